"""Canonical tensor-product (p,k)-norm preservers and their recovery.

A canonical preserver is ``x -> u @ partial_transpose(x, flags) @ v`` with
unitary ``u, v``.  For p > 2 these are the only linear maps on M_N that keep
``||A_1 (x) ... (x) A_m||_(p,k)`` fixed, and :func:`decompose` recovers
``(u, v, flags)`` from the N^2 x N^2 superoperator of such a map.

The recovery peels the last tensor factor:

1. images of the diagonal units ``E_tt`` must be rank one with singular value 1;
2. their singular vectors must form two orthonormal bases ``U0, V0``;
3. conjugating by them makes the map fix every ``E_tt``;
4. each diagonal block then carries a sandwich (or a transposed sandwich) on
   the last factor, detected by realignment rank;
5. the transposition flag must agree across blocks;
6. the block unitaries are absorbed and the induced map on the remaining
   factors is read off with a partial trace, then recovered the same way
   (recursively for three or more factors);
7. all pieces are composed and compared with the input.
"""

from dataclasses import dataclass, field

import numpy as np

from .linalg import as_matrix, fro, ginibre, is_unitary, nearest_unitary, random_psd, random_unitary, svd, singular_values
from .norms import PkParams, pk_norm_pth_power_from_values
from .tensor import (
    Superoperator,
    TensorShape,
    kron_multi,
    nearest_kron_rank1,
    partial_transpose,
    partial_transpose_superop,
    transpose_superop,
    unvec,
    vec,
)

RANK_ONE_TOL = 1e-6
STAGE_TOL = 1e-6
FLAG_TOL = 1e-6
PRESERVATION_TOL = 1e-9


class DecompositionError(Exception):
    """The input is not (numerically) a tensor (p,k)-norm preserver."""

    def __init__(self, stage, residual, message, depth=0, diagnostics=None):
        self.stage = stage
        self.residual = float(residual)
        self.depth = depth
        self.diagnostics = diagnostics or {}
        super().__init__(f"not a tensor-(p,k)-preserver: stage {stage} (depth {depth}): {message} [residual {residual:.3e}]")


def _shape(shape):
    return shape if isinstance(shape, TensorShape) else TensorShape(shape)


@dataclass(frozen=True)
class CanonicalPreserver:
    shape: TensorShape
    u: np.ndarray
    v: np.ndarray
    flags: tuple

    def __post_init__(self):
        shape = _shape(self.shape)
        u = as_matrix(self.u, "u")
        v = as_matrix(self.v, "v")
        flags = tuple(bool(f) for f in self.flags)
        if len(flags) != shape.m:
            raise ValueError(f"need {shape.m} flags, got {len(flags)}")
        if u.shape != (shape.N, shape.N) or v.shape != (shape.N, shape.N):
            raise ValueError(f"u and v must be {shape.N}x{shape.N}")
        if not (is_unitary(u, 1e-10) and is_unitary(v, 1e-10)):
            raise ValueError("u and v must be unitary")
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "flags", flags)

    def __call__(self, x):
        return apply_canonical(self, x)

    @classmethod
    def identity(cls, dims):
        shape = _shape(dims)
        eye = np.eye(shape.N, dtype=np.complex128)
        return cls(shape, eye, eye.copy(), (False,) * shape.m)

    @classmethod
    def random(cls, dims, seed=None, flags=None):
        """Haar ``u, v``; flags drawn uniformly unless given."""
        shape = _shape(dims)
        rng = np.random.default_rng(seed)
        u = random_unitary(shape.N, rng)
        v = random_unitary(shape.N, rng)
        if flags is None:
            flags = tuple(bool(f) for f in rng.integers(0, 2, size=shape.m))
        return cls(shape, u, v, flags)


@dataclass
class DecompositionResult:
    preserver: CanonicalPreserver
    residual: float
    diagnostics: dict = field(default_factory=dict)


def apply_canonical(cp, x):
    x = as_matrix(x)
    if x.shape != (cp.shape.N, cp.shape.N):
        raise ValueError(f"expected {cp.shape.N}x{cp.shape.N} input, got {x.shape}")
    return cp.u @ partial_transpose(x, cp.shape, cp.flags) @ cp.v


def to_superoperator(cp):
    mat = np.kron(cp.v.T, cp.u) @ partial_transpose_superop(cp.shape, cp.flags)
    return Superoperator(cp.shape, mat)


def preserver_distance(a, b):
    """``min_{|c|=1} ||a - c b||_F / ||b||_F`` over superoperator matrices."""
    am = a.mat if isinstance(a, Superoperator) else as_matrix(a)
    bm = b.mat if isinstance(b, Superoperator) else as_matrix(b)
    if isinstance(a, Superoperator) and isinstance(b, Superoperator) and a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape.dims} vs {b.shape.dims}")
    if am.shape != bm.shape:
        raise ValueError(f"shape mismatch: {am.shape} vs {bm.shape}")
    nb = fro(bm)
    if nb == 0.0:
        return 0.0 if fro(am) == 0.0 else float("inf")
    inner = np.vdot(bm, am)
    c = inner / abs(inner) if abs(inner) > 0 else 1.0
    return fro(am - c * bm) / nb


@dataclass
class PreservationReport:
    max_deviation: float
    preserving: bool
    trials: int
    tol: float
    per_params: dict
    witness: dict | None = None


def _params_list(params):
    if isinstance(params, PkParams):
        return [params]
    if isinstance(params, tuple) and len(params) == 2 and not isinstance(params[0], (PkParams, tuple)):
        return [PkParams(*params)]
    return [p if isinstance(p, PkParams) else PkParams(*p) for p in params]


def verify_preservation(phi, params, trials=1000, seed=0, tol=PRESERVATION_TOL):
    """Sample Ginibre factor tuples and compare (p,k)-norms before and after ``phi``.

    ``params`` may be a single :class:`PkParams` or a sequence of them; the
    same samples serve every entry.  Trial ``t`` draws from the stream
    ``(seed, t)``.  The deviation is ``|N(phi(X)) - N(X)| / N(X)`` with N the
    (p,k)-norm.
    """
    shape = phi.shape
    if shape.m < 2:
        raise ValueError("verification needs at least two tensor factors")
    if trials < 1:
        raise ValueError("trials must be positive")
    plist = _params_list(params)
    N = shape.N
    worst = {pp: 0.0 for pp in plist}
    max_dev = 0.0
    witness = None
    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        factors = [ginibre(d, d, rng) for d in shape.dims]
        x = kron_multi(factors)
        y = unvec(phi.mat @ vec(x), N, N)
        sx = singular_values(x)
        sy = singular_values(y)
        for pp in plist:
            nx = pk_norm_pth_power_from_values(sx, pp.p, pp.k) ** (1 / pp.p)
            ny = pk_norm_pth_power_from_values(sy, pp.p, pp.k) ** (1 / pp.p)
            dev = abs(ny - nx) / nx
            worst[pp] = max(worst[pp], dev)
            if dev > max_dev:
                max_dev = dev
            if dev > tol and witness is None:
                witness = {"trial": t, "p": pp.p, "k": pp.k, "expected": nx, "observed": ny, "factors": factors}
    per = {f"p={pp.p:g},k={pp.k}": float(w) for pp, w in worst.items()}
    return PreservationReport(float(max_dev), max_dev <= tol, trials, tol, per, witness)


def _project(a):
    return nearest_unitary(a)


def _sandwich_or_transpose(smat, n, stage, depth, diag):
    """Detect whether ``smat`` (n^2 x n^2) is ``B -> a B b`` or ``B -> a B^T b``."""
    plain = nearest_kron_rank1(smat)
    flipped = nearest_kron_rank1(smat @ transpose_superop(n))
    ok_plain = plain[2] <= FLAG_TOL
    ok_flip = flipped[2] <= FLAG_TOL
    diag.setdefault("flag_residuals", []).append((plain[2], flipped[2]))
    if ok_plain == ok_flip:
        residual = min(plain[2], flipped[2])
        raise DecompositionError(stage, residual, "ambiguous flag", depth, diag)
    a, b, _ = plain if ok_plain else flipped
    return a, b, bool(ok_flip)


def _blockdiag(blocks):
    n = sum(b.shape[0] for b in blocks)
    out = np.zeros((n, n), dtype=np.complex128)
    i = 0
    for b in blocks:
        k = b.shape[0]
        out[i : i + k, i : i + k] = b
        i += k
    return out


def _single_factor(mat, n, depth, diag):
    """Li-Tsing form on one factor: ``A -> U A V`` or ``A -> U A^T V``."""
    a, b, flag = _sandwich_or_transpose(mat, n, "first-factor", depth, diag)
    u, v = _project(a), _project(b)
    return u, v, (flag,)


def _peel(mat, dims, depth):
    """Recover ``(u, v, flags)`` of a superoperator on ``prod(dims)``; stages emit diagnostics."""
    dims = tuple(dims)
    N = int(np.prod(dims))
    n = dims[-1]
    M = N // n
    diag = {"depth": depth, "dims": list(dims)}

    # stage 1: diagonal units map to rank-one partial isometries
    us, vs, rank_res, unit_res = [], [], 0.0, 0.0
    for t in range(N):
        img = unvec(mat[:, t * N + t], N, N)
        f = svd(img)
        s1 = f.values[0]
        rank_res = max(rank_res, (f.values[1] / s1) if s1 > 0 else np.inf)
        unit_res = max(unit_res, abs(s1 - 1.0))
        us.append(f.left[:, 0])
        vs.append(f.right[:, 0])
    diag["rank_one"] = float(rank_res)
    diag["unit_singular_value"] = float(unit_res)
    if rank_res > RANK_ONE_TOL:
        raise DecompositionError(1, rank_res, "diagonal-unit image is not rank one", depth, diag)
    if unit_res > RANK_ONE_TOL:
        raise DecompositionError(1, unit_res, "diagonal-unit image singular value differs from 1", depth, diag)

    # stage 2: the left and right singular vectors are orthonormal bases
    u0 = np.stack(us, axis=1)
    v0 = np.stack(vs, axis=1)
    orth = max(fro(u0.conj().T @ u0 - np.eye(N)), fro(v0.conj().T @ v0 - np.eye(N)))
    diag["orthonormal_families"] = float(orth)
    if orth > STAGE_TOL:
        raise DecompositionError(2, orth, "images of diagonal units are not mutually orthogonal", depth, diag)
    u0, v0 = _project(u0), _project(v0)

    # stage 3: x -> u0^* phi(x) v0 fixes every diagonal unit
    mat1 = np.kron(v0.T, u0.conj().T) @ mat

    # stage 4: block maps on the last factor
    ws, wts, flags = [], [], []
    leak = 0.0
    inner = 0.0
    for i in range(M):
        lo = i * n
        cols = [(lo + c) * N + (lo + r) for c in range(n) for r in range(n)]  # vec order of E_rc
        images = mat1[:, cols].reshape(N, N, n * n, order="F")
        block = images[lo : lo + n, lo : lo + n, :]
        total = np.sqrt(np.sum(np.abs(images) ** 2))
        leak = max(leak, np.sqrt(max(total**2 - np.sum(np.abs(block) ** 2), 0.0)) / total)
        smat = block.reshape(n * n, n * n, order="F")
        a, b, flag = _sandwich_or_transpose(smat, n, 4, depth, diag)
        wa, wb = _project(a), _project(b)
        inner = max(inner, fro(wa @ wb - np.eye(n)))
        ws.append(wa)
        wts.append(wb)
        flags.append(flag)
    diag["block_leakage"] = float(leak)
    diag["inverse_pair"] = float(inner)
    if leak > STAGE_TOL:
        raise DecompositionError(4, leak, "block maps leak outside their diagonal block", depth, diag)
    if inner > STAGE_TOL:
        raise DecompositionError(4, inner, "block sandwich factors are not mutually inverse", depth, diag)

    # stage 5: one transposition flag for the last factor
    if len(set(flags)) != 1:
        raise DecompositionError(5, 1.0, "transposition flag differs between blocks", depth, diag)
    last_flag = flags[0]

    # stage 6: absorb the block unitaries, read off the map on the leading factors
    w = _blockdiag(ws)
    wt = _blockdiag(wts)
    mat2 = np.kron(wt.conj(), w.conj().T) @ mat1
    first = _first_factor_map(mat2, M, n, last_flag, depth, diag)
    if len(dims) == 2:
        ur, vr, rflags = _single_factor(first, M, depth, diag)
    else:
        sub = _peel(first, dims[:-1], depth + 1)
        ur, vr, rflags = sub["u"], sub["v"], sub["flags"]
        diag["inner"] = sub["diagnostics"]

    # stage 7: compose
    eye = np.eye(n, dtype=np.complex128)
    u = u0 @ w @ np.kron(ur, eye)
    v = np.kron(vr, eye) @ wt @ v0.conj().T
    return {"u": _project(u), "v": _project(v), "flags": tuple(rflags) + (last_flag,), "diagnostics": diag}


def _first_factor_map(mat2, M, n, last_flag, depth, diag):
    """Superoperator of ``A -> tr_2(phi''(A (x) P)) / tr(P)`` on M_M."""
    N = M * n
    probe = np.zeros((n, n), dtype=np.complex128)
    probe[0, 0] = 1.0
    ident = np.eye(M, dtype=np.complex128)

    def image(a, p):
        return unvec(mat2 @ vec(np.kron(a, p)), N, N).reshape(M, n, M, n)

    # trace of the second-factor image of the probe, measured rather than assumed
    scale = np.einsum("ijik->", image(ident, probe)) / M
    if abs(scale) < 1e-8:
        probe = random_psd(n, np.random.default_rng(depth))
        probe /= np.trace(probe)
        scale = np.einsum("ijik->", image(ident, probe)) / M
        if abs(scale) < 1e-8:
            raise DecompositionError(6, abs(scale), "probe image has vanishing trace", depth, diag)
    diag["probe_trace"] = complex(scale)
    out = np.empty((M * M, M * M), dtype=np.complex128)
    for c in range(M):
        for r in range(M):
            e = np.zeros((M, M), dtype=np.complex128)
            e[r, c] = 1.0
            out[:, c * M + r] = vec(np.einsum("ijkj->ik", image(e, probe)) / scale)
    return out


def decompose(phi, params, tol=STAGE_TOL):
    """Recover a canonical form ``(u, v, flags)`` from a black-box superoperator.

    Requires ``p > 2``; raises :class:`DecompositionError` naming the failing
    stage when the input is not (numerically) a tensor-product preserver.
    """
    params = params if isinstance(params, PkParams) else PkParams(*params)
    if params.p <= 2:
        raise ValueError("p must exceed 2")
    shape = phi.shape
    if shape.m < 2:
        raise ValueError("decomposition needs at least two tensor factors")
    out = _peel(phi.mat, shape.dims, 0)
    cp = CanonicalPreserver(shape, out["u"], out["v"], out["flags"])
    residual = preserver_distance(to_superoperator(cp), phi)
    diag = out["diagnostics"]
    diag["residual"] = residual
    if residual > tol:
        raise DecompositionError(7, residual, "recomposed map does not match the input", 0, diag)
    return DecompositionResult(cp, residual, diag)


def decompose_bipartite(phi, params, tol=STAGE_TOL):
    if phi.shape.m != 2:
        raise ValueError(f"expected two tensor factors, got {phi.shape.m}")
    return decompose(phi, params, tol)


def decompose_multipartite(phi, params, tol=STAGE_TOL):
    return decompose(phi, params, tol)


def perturbed(phi, eps, seed=None):
    """``phi + eps * G`` with a Ginibre superoperator ``G``."""
    side = phi.mat.shape[0]
    return Superoperator(phi.shape, phi.mat + eps * ginibre(side, side, seed))
