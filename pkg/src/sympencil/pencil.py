"""The pencil problem object: spectra, margins, chains, isotropy checks.

A :class:`SymmetricPencil` is a pair of real symmetric matrices (A, B) of
equal dimension, studied through L(lam) = A - lam*B.  Eigenvalues are
computed through the sign-square-root reduction when B is nonsingular and
through determinant interpolation otherwise; the test suite carries an
independent determinant-sampling oracle against which both paths are
checked.

Infinite eigenvalues (rank deficiency of B) are exposed as a count via
:func:`infinite_multiplicity`, not as eigenvalue items.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import core
from .core import (
    Subspace,
    SymMatrix,
    TOL_CHAIN,
    TOL_DET,
    TOL_EIG,
    TOL_IMAG,
    TOL_TYPE,
    TOL_ZERO,
    as_sym,
    nullspace,
    orthonormalize,
)
from .krein import COMPLEX, NEUTRAL, classify_gram
from .errors import NotAnEigenvalue, SingularB, SingularPencil

# Relative gap under which two computed eigenvalues are treated as one
# (multiple) eigenvalue.  Defective eigenvalues split by roughly
# eps**(1/k) under rounding, so this is deliberately much looser than the
# residual tolerances.
TOL_CLUSTER = 1e-6


@dataclass(frozen=True)
class SymmetricPencil:
    """The pencil L(lam) = A - lam*B for symmetric A, B of equal size."""

    A: SymMatrix
    B: SymMatrix

    @classmethod
    def from_arrays(cls, A, B) -> "SymmetricPencil":
        return cls(as_sym(A), as_sym(B))

    def __post_init__(self):
        if self.A.dim != self.B.dim:
            raise ValueError(
                f"A has dimension {self.A.dim} but B has dimension {self.B.dim}"
            )

    @property
    def dim(self) -> int:
        return self.A.dim

    @cached_property
    def scale(self) -> float:
        """Natural size of the pencil: ||A|| + ||B|| (spectral norms)."""
        return self.A.norm + self.B.norm

    def evaluate(self, lam) -> np.ndarray:
        """The matrix L(lam) = A - lam*B (complex when lam is)."""
        if np.iscomplexobj(np.asarray(lam)) and abs(np.imag(lam)) > 0:
            return self.A.entries.astype(complex) - lam * self.B.entries
        return self.A.entries - float(np.real(lam)) * self.B.entries


@dataclass(frozen=True)
class JordanChain:
    """Vectors x_0, ..., x_k with L(lam0) x_i = B x_{i-1} and x_{-1} = 0."""

    eigenvalue: complex
    vectors: tuple

    @property
    def length(self) -> int:
        return len(self.vectors)


@dataclass(frozen=True)
class EigenItem:
    """One eigenvalue of the pencil with multiplicity, vectors and type."""

    value: complex
    algebraic_multiplicity: int
    eigenvectors: Subspace
    sign_type: str
    chains: tuple = field(default=())

    @property
    def is_real(self) -> bool:
        return self.sign_type != COMPLEX


def _sqrt_factors(P: SymmetricPencil, tol_zero=TOL_ZERO):
    sqrt_b, inv_sqrt_b, J, kernel = core.abs_sqrt_sign(P.B, tol_zero=tol_zero)
    if kernel.rank:
        raise SingularB(
            f"B has a {kernel.rank}-dimensional kernel; use the relation module"
        )
    return sqrt_b, inv_sqrt_b, J


def direct_reduced_matrix(P: SymmetricPencil, tol_zero=TOL_ZERO):
    """The single-operator matrix J |B|^{-1/2} A |B|^{-1/2} and its factors.

    Acts in the coordinates xhat = |B|^{1/2} x, where the indefinite form
    becomes the sign matrix J.  Requires B nonsingular.
    """
    sqrt_b, inv_sqrt_b, J, = _sqrt_factors(P, tol_zero=tol_zero)
    S = J.entries @ inv_sqrt_b.entries @ P.A.entries @ inv_sqrt_b.entries
    return S, sqrt_b, inv_sqrt_b, J


def _det_samples(A: np.ndarray, B: np.ndarray, points: np.ndarray) -> np.ndarray:
    return np.array([np.linalg.det(A - t * B) for t in points])


def determinant_roots(P: SymmetricPencil, tol_degree=1e-11, tol_det=TOL_DET):
    """Finite eigenvalues via interpolation of det(A - lam*B).

    Fits the determinant as a degree <= dim polynomial in a Chebyshev basis
    on an adaptively grown window, trims the numerically-zero leading
    coefficients (degree drop when B is rank deficient) and returns the
    companion-matrix roots together with the polynomial degree.
    """
    n = P.dim
    s = max(P.A.norm, P.B.norm)
    if s == 0.0:
        raise SingularPencil("both matrices vanish; det(A - lam*B) is identically 0")
    A = P.A.entries / s
    B = P.B.entries / s

    radius = 4.0
    for _ in range(4):
        m = max(2 * n + 3, 8)
        nodes = np.cos(np.pi * (np.arange(m) + 0.5) / m)  # Chebyshev points in (-1, 1)
        vals = _det_samples(A, B, radius * nodes)
        val_scale = float(np.max(np.abs(vals)))
        bound = tol_det * float(np.max((1.0 + np.abs(radius * nodes)) ** n))
        if val_scale <= bound:
            raise SingularPencil("det(A - lam*B) vanishes at all sample points")
        coeffs = np.polynomial.chebyshev.chebfit(nodes, vals, n)
        keep = np.abs(coeffs) > tol_degree * np.max(np.abs(coeffs))
        degree = int(np.max(np.nonzero(keep)[0])) if np.any(keep) else 0
        if degree == 0:
            return np.array([], dtype=complex), 0
        trimmed = coeffs[: degree + 1]
        roots = np.polynomial.chebyshev.chebroots(trimmed) * radius
        if roots.size == 0 or np.max(np.abs(roots)) <= 0.8 * radius:
            return np.asarray(roots, dtype=complex), degree
        radius = 2.0 * float(np.max(np.abs(roots)))
    return np.asarray(roots, dtype=complex), degree


def is_singular_pencil(P: SymmetricPencil, tol_det=TOL_DET) -> bool:
    """True iff det(A - lam*B) vanishes at dim+1 distinct sample points."""
    n = P.dim
    s = max(P.A.norm, P.B.norm)
    if s == 0.0:
        return True
    A = P.A.entries / s
    B = P.B.entries / s
    m = n + 1
    # Chebyshev spread over a window wide enough to dodge root clusters.
    points = 2.0 * np.cos(np.pi * (np.arange(m) + 0.5) / m)
    vals = _det_samples(A, B, points)
    bounds = tol_det * (1.0 + np.abs(points)) ** n
    return bool(np.all(np.abs(vals) <= bounds))


def infinite_multiplicity(P: SymmetricPencil) -> int:
    """Multiplicity of the eigenvalue at infinity: dim - deg det(A - lam*B)."""
    if core.inertia(P.B).n_zero == 0:
        return 0
    _, degree = determinant_roots(P)
    return P.dim - degree


def _cluster(values: np.ndarray, tol: float):
    """Group a 1-D complex array into clusters of mutual distance <= tol."""
    order = np.lexsort((values.imag, values.real))
    groups = []
    for idx in order:
        v = values[idx]
        if groups and abs(v - groups[-1][-1]) <= tol:
            groups[-1].append(v)
        else:
            groups.append([v])
    # Second pass merges conjugate-ordering artifacts.
    merged = []
    for g in groups:
        if merged and abs(np.mean(g) - np.mean(merged[-1])) <= tol:
            merged[-1].extend(g)
        else:
            merged.append(g)
    return merged


def _eigen_items(
    P: SymmetricPencil,
    raw: np.ndarray,
    tol_type=TOL_TYPE,
    tol_imag=TOL_IMAG,
    tol_cluster=TOL_CLUSTER,
    with_chains=False,
):
    if raw.size == 0:
        return []
    lam_scale = max(1.0, float(np.max(np.abs(raw))))
    items = []
    for group in _cluster(raw, tol_cluster * lam_scale):
        value = complex(np.mean(group))
        if abs(value.imag) <= tol_imag * lam_scale:
            value = complex(value.real, 0.0)
        L = P.evaluate(value)
        vectors = nullspace(L, tol=TOL_EIG)
        if vectors.rank == 0:
            # Guard against an over-tight null-space cut for ill-conditioned
            # clusters: fall back to the least singular direction.
            _, _, vh = np.linalg.svd(L)
            vectors = Subspace(P.dim, vh[-1:].conj().T)
        if value.imag != 0.0:
            sign_type = COMPLEX
        else:
            basis = np.real_if_close(vectors.basis)
            compressed = basis.T @ P.B.entries @ basis
            sign_type = classify_gram(compressed, tol_type=tol_type)
        chains = ()
        if with_chains:
            chains = tuple(jordan_chains(P, value))
        items.append(
            EigenItem(
                value=value,
                algebraic_multiplicity=len(group),
                eigenvectors=vectors,
                sign_type=sign_type,
                chains=chains,
            )
        )
    items.sort(key=lambda it: (it.value.real, it.value.imag))
    return items


def pencil_eigenvalues(
    P: SymmetricPencil,
    tol_zero=TOL_ZERO,
    tol_type=TOL_TYPE,
    tol_imag=TOL_IMAG,
    tol_cluster=TOL_CLUSTER,
    with_chains=False,
):
    """All finite eigenvalues of the pencil as classified items.

    Routed through the reduced single operator when B is nonsingular and
    through determinant interpolation otherwise.  Raises
    :class:`SingularPencil` when det(A - lam*B) is identically zero.
    """
    if is_singular_pencil(P):
        raise SingularPencil("det(A - lam*B) vanishes identically")
    if core.inertia(P.B, tol_zero=tol_zero).n_zero == 0:
        S, _, _, _ = direct_reduced_matrix(P, tol_zero=tol_zero)
        raw = np.linalg.eigvals(S)
    else:
        raw, _ = determinant_roots(P)
    return _eigen_items(
        P,
        np.asarray(raw, dtype=complex),
        tol_type=tol_type,
        tol_imag=tol_imag,
        tol_cluster=tol_cluster,
        with_chains=with_chains,
    )


def regular_type_margin(P: SymmetricPencil, lam) -> float:
    """sigma_min(A - lam*B): the best constant C with ||L(lam)x|| >= C||x||.

    Strictly positive exactly at the points of regular type (at finite
    dimension: where L(lam) is injective).
    """
    s = np.linalg.svd(P.evaluate(lam), compute_uv=False)
    return float(s[-1])


def _staircase_nullspaces(L: np.ndarray, Bmat: np.ndarray, tol: float):
    """Null spaces of the block-bidiagonal chain systems of growing length.

    Level m collects stacked vectors (x_0, ..., x_{m-1}) with L x_0 = 0 and
    L x_i = B x_{i-1}; the nullity increments count blocks of size >= m.
    """
    n = L.shape[0]
    dtype = np.promote_types(L.dtype, Bmat.dtype)
    nullities = []
    bases = []
    prev = 0
    for m in range(1, n + 1):
        T = np.zeros((m * n, m * n), dtype=dtype)
        for i in range(m):
            T[i * n : (i + 1) * n, i * n : (i + 1) * n] = L
            if i:
                T[i * n : (i + 1) * n, (i - 1) * n : i * n] = -Bmat
        N = nullspace(T, tol=tol)
        if N.rank - prev == 0:
            break
        nullities.append(N.rank)
        bases.append(N.basis)
        prev = N.rank
    return nullities, bases


def staircase_chains(L: np.ndarray, Bmat: np.ndarray, tol=TOL_CHAIN):
    """Maximal chain system for the pair (L, B) at a fixed eigenvalue.

    Returns a list of chains (each a list of vectors) whose lengths
    reproduce the canonical block structure: the level-m null-space heads
    span exactly the kernel directions extendable to length >= m, so
    selecting new head directions from the longest level downward yields
    one chain per block.
    """
    n = L.shape[0]
    nullities, bases = _staircase_nullspaces(L, Bmat, tol)
    if not nullities:
        return []
    max_len = len(nullities)
    chains = []
    used = np.zeros((n, 0), dtype=bases[0].dtype)
    for m in range(max_len, 0, -1):
        N = bases[m - 1]
        heads = N[:n, :]
        if used.shape[1]:
            heads = heads - used @ (used.conj().T @ heads)
        fresh = orthonormalize(heads, tol_rank=1e-8)
        if fresh.rank == 0:
            continue
        full_heads = N[:n, :]
        for j in range(fresh.rank):
            w = fresh.basis[:, j]
            coeff, *_ = np.linalg.lstsq(full_heads, w, rcond=None)
            z = N @ coeff
            vectors = [z[i * n : (i + 1) * n] for i in range(m)]
            head_norm = np.linalg.norm(vectors[0])
            vectors = [v / head_norm for v in vectors]
            chains.append(vectors)
        used = np.hstack([used, fresh.basis])
    chains.sort(key=lambda c: -len(c))
    return chains


def chain_residual(P: SymmetricPencil, chain: JordanChain) -> float:
    """Worst relative defect of L(lam0) x_i = B x_{i-1} over the chain."""
    L = P.evaluate(chain.eigenvalue)
    worst = 0.0
    prev = np.zeros(P.dim, dtype=L.dtype)
    for x in chain.vectors:
        defect = np.linalg.norm(L @ x - P.B.entries @ prev)
        size = P.scale * (np.linalg.norm(x) + np.linalg.norm(prev))
        worst = max(worst, defect / size if size > 0 else defect)
        prev = np.asarray(x)
    return worst


def jordan_chains(P: SymmetricPencil, lam0, tol_eig=TOL_EIG, tol_chain=TOL_CHAIN):
    """A maximal set of chains of the pencil at the eigenvalue lam0.

    Chain heads are aligned with the extendable kernel directions, so the
    chain lengths reproduce the canonical structure on non-singular
    pencils; extensions are the minimum-norm least-squares solutions.
    Raises :class:`NotAnEigenvalue` when sigma_min(L(lam0)) is not small.
    """
    lam0 = complex(lam0)
    lam_scale = max(1.0, abs(lam0))
    if abs(lam0.imag) <= TOL_IMAG * lam_scale:
        lam0 = complex(lam0.real, 0.0)
    L = P.evaluate(lam0)
    scale_L = P.A.norm + abs(lam0) * P.B.norm
    margin = regular_type_margin(P, lam0)
    if margin > tol_eig * max(scale_L, 1e-300):
        raise NotAnEigenvalue(
            f"sigma_min(L({lam0:g})) = {margin:.3e} exceeds {tol_eig:.1e} * {scale_L:.3e}"
        )
    B = P.B.entries.astype(L.dtype)
    raw_chains = staircase_chains(L, B, tol=tol_chain)
    result = []
    for vectors in raw_chains:
        if lam0.imag == 0.0:
            vectors = [np.real_if_close(v, tol=1e6) for v in vectors]
            if all(np.isrealobj(v) or np.max(np.abs(v.imag)) < 1e-9 for v in vectors):
                vectors = [np.real(v) for v in vectors]
        chain = JordanChain(eigenvalue=lam0, vectors=tuple(vectors))
        if chain_residual(P, chain) <= tol_chain:
            result.append(chain)
    return result


def check_nonisotropic(P: SymmetricPencil, tol_type=TOL_TYPE):
    """Whether no real eigenvalue carries a neutral (isotropic) eigenvector.

    Returns ``(verdict, witnesses)`` where the witnesses are the offending
    eigenvalue items.  Eigenvalues with chains of length >= 2 always show
    up here: their chain heads are automatically neutral.
    """
    items = pencil_eigenvalues(P, tol_type=tol_type)
    witnesses = [it for it in items if it.sign_type == NEUTRAL]
    return (len(witnesses) == 0, witnesses)
