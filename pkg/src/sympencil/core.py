"""Dense symmetric-matrix kernels shared by every other module.

Provides the problem's basic value types (:class:`SymMatrix`,
:class:`Inertia`, :class:`Subspace`) and the handful of spectral
primitives everything else is built from: symmetric eigendecomposition,
inertia counts with a relative zero threshold, the matrix functions
|B|^{1/2}, |B|^{-1/2} and the sign matrix of B, and rank-revealing
orthonormalization.

All spectral splits use tolerances *relative to the spectral norm* of the
matrix at hand; the example pencils span several orders of magnitude, so
absolute thresholds are not usable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import EigenDecompositionError

# Default tolerances. Every function takes them as keyword arguments so the
# CLI can override; these values are echoed in reports.
TOL_ZERO = 1e-10    # relative threshold for "numerically zero" eigenvalues
TOL_ORTHO = 1e-12   # orthonormality defect allowed in a Subspace basis
TOL_RANK = 1e-10    # rank-revealing drop tolerance, relative to column scale
TOL_EIG = 1e-8      # relative residual accepted for eigenpairs
TOL_TYPE = 1e-8     # sign-type threshold for the indefinite form
TOL_IMAG = 1e-9     # relative threshold separating real from complex
TOL_CHAIN = 1e-8    # relative residual accepted for chain extensions
TOL_DET = 1e-12     # relative threshold for an identically-zero determinant


def _as_entries(value) -> np.ndarray:
    if isinstance(value, SymMatrix):
        return value.entries
    return np.asarray(value, dtype=float)


@dataclass(frozen=True)
class SymMatrix:
    """A real symmetric matrix, symmetrized exactly on construction.

    ``asymmetry`` records the Frobenius norm of the skew part of the input,
    so callers can detect when symmetrization silently altered their data.
    """

    entries: np.ndarray
    asymmetry: float = 0.0

    @classmethod
    def from_array(cls, arr) -> "SymMatrix":
        a = np.array(arr, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {a.shape}")
        if a.shape[0] < 1:
            raise ValueError("matrix dimension must be at least 1")
        asym = float(np.linalg.norm(a - a.T))
        sym = (a + a.T) / 2.0
        sym.flags.writeable = False
        return cls(sym, asym)

    def __post_init__(self):
        e = self.entries
        if e.ndim != 2 or e.shape[0] != e.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {e.shape}")

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @cached_property
    def norm(self) -> float:
        """Spectral norm (largest absolute eigenvalue)."""
        w = np.linalg.eigvalsh(self.entries)
        return float(np.max(np.abs(w))) if w.size else 0.0

    def __array__(self, dtype=None, copy=None):
        if dtype is not None:
            return np.asarray(self.entries, dtype=dtype)
        return self.entries


def as_sym(value) -> SymMatrix:
    """Coerce an array-like or SymMatrix into a SymMatrix."""
    if isinstance(value, SymMatrix):
        return value
    return SymMatrix.from_array(value)


@dataclass(frozen=True)
class Inertia:
    """Counts of positive / numerically-zero / negative eigenvalues."""

    n_plus: int
    n_zero: int
    n_minus: int

    @property
    def dim(self) -> int:
        return self.n_plus + self.n_zero + self.n_minus

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.n_plus, self.n_zero, self.n_minus)


@dataclass(frozen=True)
class Subspace:
    """A subspace given by an orthonormal basis (columns of ``basis``).

    The basis may be empty (rank 0) and may be complex; orthonormality is
    with respect to the Euclidean (Hermitian) inner product and is checked
    on construction to ``TOL_ORTHO``.
    """

    ambient_dim: int
    basis: np.ndarray = field(repr=False)

    def __post_init__(self):
        b = self.basis
        if b.ndim != 2 or b.shape[0] != self.ambient_dim:
            raise ValueError(
                f"basis shape {b.shape} does not match ambient dim {self.ambient_dim}"
            )
        if b.shape[1]:
            gram = b.conj().T @ b
            defect = np.linalg.norm(gram - np.eye(b.shape[1]))
            if defect > 1e3 * TOL_ORTHO * max(1, b.shape[1]):
                raise ValueError(f"basis is not orthonormal (defect {defect:.2e})")

    @classmethod
    def empty(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, np.zeros((ambient_dim, 0)))

    @classmethod
    def full(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, np.eye(ambient_dim))

    @classmethod
    def from_vectors(cls, vectors, ambient_dim=None, tol_rank=TOL_RANK) -> "Subspace":
        return orthonormalize(vectors, ambient_dim=ambient_dim, tol_rank=tol_rank)

    @property
    def rank(self) -> int:
        return self.basis.shape[1]

    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.conj().T

    def project(self, x: np.ndarray) -> np.ndarray:
        return self.basis @ (self.basis.conj().T @ x)


def sym_eig(M, tol_eig=TOL_EIG):
    """Eigendecomposition of a symmetric matrix.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvalues ascending and
    eigenvectors as orthonormal columns.  Raises
    :class:`EigenDecompositionError` if LAPACK fails to converge or the
    reconstruction residual exceeds ``tol_eig`` relative to the norm.
    """
    m = _as_entries(M)
    m = (m + m.T) / 2.0
    try:
        w, v = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:
        raise EigenDecompositionError(f"eigendecomposition failed: {exc}") from exc
    scale = float(np.max(np.abs(w))) if w.size else 0.0
    if scale > 0.0:
        residual = float(np.linalg.norm(m @ v - v * w)) / scale
        if residual > tol_eig:
            raise EigenDecompositionError(
                f"eigendecomposition residual {residual:.2e} exceeds {tol_eig:.2e}",
                residual=residual,
            )
    return w, v


def inertia(M, tol_zero=TOL_ZERO) -> Inertia:
    """Eigenvalue sign counts with a relative zero threshold.

    Counts eigenvalues above ``tol_zero * norm``, within the threshold, and
    below its negative.  Invariant under congruence (Sylvester).
    """
    if tol_zero < 0:
        raise ValueError("tol_zero must be nonnegative")
    m = _as_entries(M)
    w = np.linalg.eigvalsh((m + m.T) / 2.0)
    scale = float(np.max(np.abs(w))) if w.size else 0.0
    thr = tol_zero * scale
    n_plus = int(np.sum(w > thr))
    n_minus = int(np.sum(w < -thr))
    return Inertia(n_plus, len(w) - n_plus - n_minus, n_minus)


def abs_sqrt_sign(B, tol_zero=TOL_ZERO):
    """Spectral factors |B|^{1/2}, |B|^{-1/2} on the range, sign(B), ker B.

    The sign matrix J is defined as 0 on the kernel of B, so that
    J**2 is the orthogonal projector onto range(B) and J @ abs_sqrt**2
    reproduces B.  The inverse square root is Moore-Penrose style: zero on
    the kernel, |lambda|^{-1/2} on the range.
    """
    b = _as_entries(B)
    w, v = sym_eig(b)
    scale = float(np.max(np.abs(w))) if w.size else 0.0
    kernel_mask = np.abs(w) <= tol_zero * scale if scale > 0 else np.ones_like(w, bool)

    absw = np.where(kernel_mask, 0.0, np.abs(w))
    signs = np.where(kernel_mask, 0.0, np.sign(w))
    sqrt_w = np.sqrt(absw)
    inv_sqrt_w = np.divide(1.0, sqrt_w, out=np.zeros_like(sqrt_w), where=sqrt_w > 0)

    abs_sqrt = SymMatrix.from_array(v @ np.diag(sqrt_w) @ v.T)
    abs_sqrt_inv = SymMatrix.from_array(v @ np.diag(inv_sqrt_w) @ v.T)
    J = SymMatrix.from_array(v @ np.diag(signs) @ v.T)
    kernel = Subspace(b.shape[0], np.ascontiguousarray(v[:, kernel_mask]))
    return abs_sqrt, abs_sqrt_inv, J, kernel


def orthonormalize(vectors, ambient_dim=None, tol_rank=TOL_RANK) -> Subspace:
    """Rank-revealing orthonormal basis of the span of the given vectors.

    ``vectors`` is a sequence of 1-D arrays or a 2-D array whose *columns*
    are the vectors.  Columns whose contribution falls below ``tol_rank``
    relative to the largest column norm are dropped.
    """
    if isinstance(vectors, np.ndarray) and vectors.ndim == 2:
        cols = vectors
    else:
        vecs = [np.asarray(v).reshape(-1) for v in vectors]
        if not vecs:
            if ambient_dim is None:
                raise ValueError("ambient_dim is required for an empty vector list")
            return Subspace.empty(ambient_dim)
        cols = np.column_stack(vecs)
    n = cols.shape[0]
    if ambient_dim is not None and ambient_dim != n:
        raise ValueError(f"vectors have dimension {n}, expected {ambient_dim}")
    if cols.shape[1] == 0:
        return Subspace.empty(n)
    col_scale = float(np.max(np.linalg.norm(cols, axis=0)))
    if col_scale == 0.0:
        return Subspace.empty(n)
    u, s, _ = np.linalg.svd(cols, full_matrices=False)
    rank = int(np.sum(s > tol_rank * col_scale))
    return Subspace(n, np.ascontiguousarray(u[:, :rank]))


def nullspace(M, tol=TOL_RANK) -> Subspace:
    """Orthonormal basis of the null space of a (possibly complex) matrix.

    The cut is ``tol`` relative to the largest singular value (absolute
    ``tol`` for an identically-zero matrix).
    """
    m = np.atleast_2d(np.asarray(M))
    rows, cols = m.shape
    if rows == 0:
        return Subspace.full(cols)
    _, s, vh = np.linalg.svd(m)
    smax = s[0] if s.size else 0.0
    cut = tol * smax if smax > 0 else tol
    rank = int(np.sum(s > cut))
    basis = vh[rank:].conj().T
    return Subspace(cols, np.ascontiguousarray(basis))


def subspace_distance(F: Subspace, G: Subspace) -> float:
    """Gap metric between two subspaces: spectral norm of P_F - P_G."""
    if F.ambient_dim != G.ambient_dim:
        raise ValueError("subspaces live in different ambient spaces")
    return float(np.linalg.norm(F.projector() - G.projector(), 2))


def intersect(F: Subspace, G: Subspace, tol_rank=TOL_RANK) -> Subspace:
    """Intersection of two subspaces via the null space of [F, -G]."""
    if F.ambient_dim != G.ambient_dim:
        raise ValueError("subspaces live in different ambient spaces")
    if F.rank == 0 or G.rank == 0:
        return Subspace.empty(F.ambient_dim)
    stacked = np.hstack([F.basis, -G.basis])
    coeffs = nullspace(stacked, tol=tol_rank)
    if coeffs.rank == 0:
        return Subspace.empty(F.ambient_dim)
    vectors = F.basis @ coeffs.basis[: F.rank]
    return orthonormalize(vectors, tol_rank=tol_rank)


def spectral_norm(a) -> float:
    """Spectral (2-) norm of an arbitrary matrix."""
    arr = np.asarray(_as_entries(a) if isinstance(a, SymMatrix) else a)
    if arr.size == 0:
        return 0.0
    return float(np.linalg.norm(arr, 2))
