# For 0 < gamma < 1 the eigen power sum inequality does not reverse
#
# c = diag(2,2,2,2), d = diag(-1,-1,1,1): c+d = diag(1,1,3,3), c-d = diag(3,3,1,1)
import numpy as np

from pknorm.lemmas import counterexample_instance, eigen_power_sum_ineq, remark_counterexample

c, d = counterexample_instance()
print("c + d =", np.diag(c + d).real, " c - d =", np.diag(c - d).real)

for gamma in (0.1, 0.25, 0.5, 0.75, 0.9):
    rep = remark_counterexample(gamma)
    print(f"gamma={gamma:4}: lhs={rep.details['lhs']:.6f} rhs={rep.details['rhs']:.6f} slack={rep.slack:.6f}")

print("at gamma=0.5 the slack is 4*sqrt(3) - 4*sqrt(2) =", 4 * np.sqrt(3) - 4 * np.sqrt(2))

# for gamma >= 1 the forward inequality holds on the same instance
print("gamma=2 forward check:", eigen_power_sum_ineq(c, d, 2.0, 2).status)
