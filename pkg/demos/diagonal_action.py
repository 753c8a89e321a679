"""An abelian diagonal action on P^3 with an orbit closure containing two fixed points.

The atoms are diag(1, 1, e^{t-s}, e^{s-t}).  The lines through (1,1,0,0) and
(0,0,1,0) are fixed by all of them.  The orbit of (1,1,1,0) under the group
runs from one to the other.  Harmonic functions are still invariant here.
"""
from liouville_lab.scenarios import scenario_example71

report = scenario_example71(seed=1)
print("atoms (t, s):", [[round(v, 3) for v in row] for row in report.params["params"]])
print(f"net resolution {report.params['eps']:.2e}, word budget {report.params['max_words']}, walk horizon {report.params['horizon']}")
for c in report.checks:
    print(f"  {c.name}: {c.value}  ({c.relation} {c.threshold})")
print("overall:", report.status)
