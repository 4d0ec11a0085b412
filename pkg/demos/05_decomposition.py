# Recovering U, V and the transpose pattern from a preserver's superoperator
import numpy as np

from pknorm.norms import PkParams
from pknorm.preserver import (
    CanonicalPreserver,
    DecompositionError,
    decompose,
    perturbed,
    preserver_distance,
    to_superoperator,
)

params = PkParams(3, 2)
for dims, flags in [((2, 2), (False, True)), ((3, 3), (True, True)), ((2, 2, 2), (True, False, True))]:
    cp = CanonicalPreserver.random(dims, seed=3, flags=flags)
    phi = to_superoperator(cp)
    res = decompose(phi, params)
    dist = preserver_distance(to_superoperator(res.preserver), phi)
    print(f"dims {dims}: true flags {cp.flags}, recovered {res.preserver.flags}, distance {dist:.1e}")

# U and V are only determined up to a phase (and per-factor phases cancel)
res = decompose(phi, params)
print("U recovered up to phase:", abs(abs(np.vdot(res.preserver.u, cp.u)) / cp.shape.N - 1) < 1e-9)

# a perturbed map is rejected, with the failing stage reported
try:
    decompose(perturbed(phi, 1e-2, seed=0), params)
except DecompositionError as exc:
    print("rejected:", exc)

# p <= 2 is outside the characterization
try:
    decompose(phi, PkParams(2, 2))
except ValueError as exc:
    print("refused:", exc)
