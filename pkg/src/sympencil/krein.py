"""Indefinite inner-product machinery.

The inner product throughout is the bilinear form [x, y] = x^T G y for a
symmetric ``gram`` matrix G (typically B itself, a compressed B, or the
sign matrix J in reduced coordinates).  The form may be degenerate; the
kernel of G is tracked explicitly and quotients by it are available.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import core
from .core import (
    Inertia,
    Subspace,
    SymMatrix,
    TOL_RANK,
    TOL_TYPE,
    TOL_ZERO,
    abs_sqrt_sign,
    as_sym,
    nullspace,
)
from .errors import ZeroVector

POSITIVE = "positive"
NEGATIVE = "negative"
NEUTRAL = "neutral"
COMPLEX = "complex"


@dataclass(frozen=True)
class KreinStructure:
    """Gram matrix of the indefinite form together with its spectral factors.

    ``J`` is the sign matrix of the gram (zero on its kernel), ``abs_sqrt``
    and ``abs_sqrt_inv_on_range`` the square-root factors, and ``kernel``
    the isotropic directions of the form.  The congruence
    x -> abs_sqrt @ x carries the space to coordinates in which the form
    is given by J; that congruence is the finite-dimensional version of the
    isometry onto the completion under the |gram|^{1/2} norm.
    """

    gram: SymMatrix
    J: SymMatrix
    abs_sqrt: SymMatrix
    abs_sqrt_inv_on_range: SymMatrix
    kernel: Subspace

    @classmethod
    def from_gram(cls, gram, tol_zero=TOL_ZERO) -> "KreinStructure":
        g = as_sym(gram)
        sqrt, inv_sqrt, J, kernel = abs_sqrt_sign(g, tol_zero=tol_zero)
        return cls(g, J, sqrt, inv_sqrt, kernel)

    @property
    def dim(self) -> int:
        return self.gram.dim

    @property
    def is_nondegenerate(self) -> bool:
        return self.kernel.rank == 0


@dataclass(frozen=True)
class QuotientSpace:
    """The space modulo ker B, with representatives in the Euclidean
    orthogonal complement of the kernel.

    ``complement.basis`` (columns) maps quotient coordinates to ambient
    representatives; ``representative_map`` is the projector onto the
    complement; ``reduced_gram`` is the (nonsingular) compression of B.
    """

    ambient_dim: int
    kernel: Subspace
    complement: Subspace
    representative_map: np.ndarray
    reduced_gram: SymMatrix

    @property
    def dim(self) -> int:
        return self.complement.rank

    def to_quotient(self, x: np.ndarray) -> np.ndarray:
        """Coordinates of the class [x] in the complement basis."""
        return self.complement.basis.T @ np.asarray(x)

    def to_ambient(self, u: np.ndarray) -> np.ndarray:
        """Canonical representative of quotient coordinates ``u``."""
        return self.complement.basis @ np.asarray(u)


def krein_inner(K: KreinStructure, x, y) -> float:
    """The indefinite inner product [x, y] = x^T gram y."""
    xv = np.asarray(x, dtype=float).reshape(-1)
    yv = np.asarray(y, dtype=float).reshape(-1)
    if xv.size != K.dim or yv.size != K.dim:
        raise ValueError("vector dimension does not match the gram matrix")
    return float(xv @ K.gram.entries @ yv)


def cone_type(K: KreinStructure, x, tol_type=TOL_TYPE) -> str:
    """Classify a vector as positive, negative or neutral for the form."""
    xv = np.asarray(x, dtype=float).reshape(-1)
    nrm2 = float(xv @ xv)
    if nrm2 == 0.0:
        raise ZeroVector("cone_type requires a nonzero vector")
    val = krein_inner(K, xv, xv)
    thr = tol_type * K.gram.norm * nrm2
    if val > thr:
        return POSITIVE
    if val < -thr:
        return NEGATIVE
    return NEUTRAL


def negative_squares(form_gram, tol_zero=TOL_ZERO) -> int:
    """Number of negative squares of the form x -> x^T G x.

    Equals the largest dimension of a subspace on which the form is
    negative definite, i.e. the number of negative eigenvalues of G.
    """
    return core.inertia(form_gram, tol_zero=tol_zero).n_minus


def classify_gram(G, tol_type=TOL_TYPE) -> str:
    """Sign type of a subspace from its compressed gram matrix.

    Positive (negative) when the compression is positive (negative)
    definite beyond the type threshold; neutral as soon as some unit vector
    of the subspace has |[x, x]| below it.
    """
    g = as_sym(G)
    if g.dim == 0:
        return NEUTRAL
    w = np.linalg.eigvalsh(g.entries)
    thr = tol_type * max(g.norm, 1e-300)
    if np.all(w > thr):
        return POSITIVE
    if np.all(w < -thr):
        return NEGATIVE
    return NEUTRAL


def krein_ortho_complement(K: KreinStructure, F: Subspace, tol_rank=TOL_RANK) -> Subspace:
    """F^perp = {x : [x, f] = 0 for all f in F} in the indefinite form."""
    if F.ambient_dim != K.dim:
        raise ValueError("subspace ambient dimension does not match the gram")
    if F.rank == 0:
        return Subspace.full(K.dim)
    constraint = F.basis.conj().T @ K.gram.entries
    return nullspace(constraint, tol=tol_rank)


def is_ortho_complemented(K: KreinStructure, F: Subspace, tol_rank=TOL_RANK) -> bool:
    """Whether F (+) F^perp spans the whole space with trivial intersection.

    Equivalent to nondegeneracy of the form restricted to F; fails exactly
    when F contains an isotropic direction.
    """
    comp = krein_ortho_complement(K, F, tol_rank=tol_rank)
    if F.rank + comp.rank != K.dim:
        return False
    if F.rank == 0 or comp.rank == 0:
        return True
    stacked = np.hstack([F.basis, comp.basis])
    s = np.linalg.svd(stacked, compute_uv=False)
    return bool(s[-1] > tol_rank)


def quotient_by_kernel(B, tol_zero=TOL_ZERO) -> QuotientSpace:
    """Quotient of the space by ker B with the inherited form.

    Representatives live in the Euclidean orthogonal complement of the
    kernel (for symmetric B this is range(B), spanned by the eigenvectors
    of the nonzero eigenvalues); the compressed gram there is nonsingular
    by construction.
    """
    b = as_sym(B)
    w, v = core.sym_eig(b)
    scale = float(np.max(np.abs(w))) if w.size else 0.0
    kernel_mask = np.abs(w) <= tol_zero * scale if scale > 0 else np.ones_like(w, bool)
    kernel = Subspace(b.dim, np.ascontiguousarray(v[:, kernel_mask]))
    complement = Subspace(b.dim, np.ascontiguousarray(v[:, ~kernel_mask]))
    reduced = SymMatrix.from_array(
        complement.basis.T @ b.entries @ complement.basis
    )
    return QuotientSpace(
        ambient_dim=b.dim,
        kernel=kernel,
        complement=complement,
        representative_map=complement.projector(),
        reduced_gram=reduced,
    )
