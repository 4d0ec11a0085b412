"""(p,k)-norms, their tensor-product preservers, and numerical lemma verifiers."""

from .linalg import (
    ConvergenceError,
    NotHermitianError,
    eigvalsh,
    ginibre,
    hermitian_eigen,
    nearest_unitary,
    random_unitary,
    singular_values,
    svd,
)
from .norms import PkParams, ky_fan, pk_norm, pk_norm_pth_power, schatten, weak_majorization
from .preserver import (
    CanonicalPreserver,
    DecompositionError,
    DecompositionResult,
    apply_canonical,
    decompose,
    decompose_bipartite,
    decompose_multipartite,
    preserver_distance,
    to_superoperator,
    verify_preservation,
)
from .tensor import Superoperator, TensorShape, kron, kron_multi, partial_transpose, reshuffle, unvec, vec
