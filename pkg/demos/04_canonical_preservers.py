# Canonical maps X -> U (partial transpose of X) V preserve (p,k)-norms of products
import numpy as np

from pknorm.linalg import ginibre
from pknorm.norms import PkParams, pk_norm
from pknorm.preserver import CanonicalPreserver, perturbed, to_superoperator, verify_preservation
from pknorm.tensor import kron

cp = CanonicalPreserver.random([2, 3], seed=7, flags=[True, False])
phi = to_superoperator(cp)
print("shape", cp.shape.dims, "flags", cp.flags, "superoperator", phi.mat.shape)

rng = np.random.default_rng(0)
x = kron(ginibre(2, 2, rng), ginibre(3, 3, rng))
print("on a product:", pk_norm(x, 3, 2), "->", pk_norm(phi(x), 3, 2))

# a generic (entangled) input is not protected by a partial transpose
y = ginibre(6, 6, rng)
print("on a generic matrix:", pk_norm(y, 3, 2), "->", pk_norm(phi(y), 3, 2))

params = [PkParams(p, k) for p in (2.5, 3, 5) for k in (1, 3, 6)]
rep = verify_preservation(phi, params, trials=300)
print("canonical map, max relative deviation:", rep.max_deviation)

# small noise breaks preservation by roughly twice its size
for eps in (1e-2, 1e-4, 1e-6):
    rep = verify_preservation(perturbed(phi, eps, seed=1), params, trials=300)
    print(f"eps={eps:g}: max deviation {rep.max_deviation:.3e}")
