# (p,k)-norms: a power mean over the k largest singular values
import numpy as np

from pknorm.linalg import random_unitary, singular_values, unit
from pknorm.norms import pk_norm, ky_fan, schatten

d = np.diag([3.0, 2.0, 1.0])
print("singular values of diag(3,2,1):", singular_values(d))
print("(3,2)-norm:", pk_norm(d, 3, 2), " cube root of 35:", 35 ** (1 / 3))

# p = 1 gives the Ky Fan k-norm, k = full dimension gives the Schatten p-norm
a = np.random.default_rng(0).normal(size=(4, 4))
print("p=1, k=2:", pk_norm(a, 1, 2), "Ky Fan 2:", ky_fan(a, 2))
print("p=3, k=4:", pk_norm(a, 3, 4), "Schatten 3:", schatten(a, 3))

# every singular value of a unitary is 1, so the norm is k^(1/p)
u = random_unitary(5, seed=1)
for k in range(1, 6):
    print(f"unitary, p=4, k={k}: {pk_norm(u, 4, k):.12f} vs {k ** 0.25:.12f}")

# k past the smallest dimension is clamped
print("k=10 on a 3x3:", pk_norm(d, 3, 10), "==", pk_norm(d, 3, 3))

# tensor products of matrix units: the norm only sees 1 and x
for x in (0.1, 0.5, 0.9):
    t = np.kron(unit(0, 0, 2), unit(0, 0, 2) + x * unit(1, 1, 2))
    print(f"x={x}: norm^3 = {pk_norm(t, 3, 2) ** 3:.12f}, 1 + x^3 = {1 + x**3:.12f}")
