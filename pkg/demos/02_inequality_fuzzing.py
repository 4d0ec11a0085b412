# Fuzzing the inequalities behind the preserver characterization
#
# Each suite draws seeded random instances and checks the inequality (or the
# implication hypothesis => conclusion).  Instances where the hypothesis fails
# are counted as vacuous, never as passes.
from pknorm import fuzz

for name in fuzz.suite_names():
    res = fuzz.run_suite(name, trials=500, seed=0)
    slack = "n/a" if res.min_slack is None else f"{res.min_slack:.3e}"
    print(f"{name:28s} violations={res.violations:3d} vacuous={res.vacuous:4d} min slack={slack}")

# a single instance can be replayed from (suite, seed, index)
rep = fuzz.run_instance("eigen-power-sum", 0, 17)
print("\nreplayed eigen-power-sum #17:", rep.status, "slack", rep.slack)
print("details:", {k: v for k, v in rep.details.items() if k in ("lhs", "rhs")})
