"""Phase-space linear algebra.

Coordinates are ordered ``z = (q_1..q_n, p_1..p_n)`` and the canonical
structure is ``J = [[0, I], [-I, 0]]`` so that ``{q_i, p_j} = delta_ij``.
Everything is dense and complex; bilinear forms are plain transposes (never
conjugates), because the models of interest are complex-symmetric rather than
Hermitian.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ContractError, NotSecondClassError

DEFAULT_REL_TOL = 1e-9
SYMMETRY_TOL = 1e-12


def default_tol() -> float:
    """Rank tolerance, overridable through ``DIRAC_LADDER_TOL``."""
    raw = os.environ.get("DIRAC_LADDER_TOL")
    if raw is None:
        return DEFAULT_REL_TOL
    tol = float(raw)
    if not 0.0 < tol < 1.0:
        raise ContractError(f"DIRAC_LADDER_TOL must lie in (0, 1), got {raw!r}")
    return tol


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=complex)
    if not np.all(np.isfinite(arr)):
        raise ContractError("non-finite entries")
    arr.setflags(write=False)
    return arr


def symplectic_matrix(n: int) -> np.ndarray:
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, eye], [-eye, zero]]).astype(complex)


@dataclass(frozen=True)
class PhaseSpace:
    """Labelled canonical phase space of configuration dimension ``n``."""

    labels: tuple[str, ...]
    momentum_labels: tuple[str, ...] = ()

    def __post_init__(self):
        labels = tuple(self.labels)
        mom = tuple(self.momentum_labels) or tuple(f"p_{s}" for s in labels)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "momentum_labels", mom)
        if len(mom) != len(labels):
            raise ContractError("need one momentum label per coordinate")
        if len(set(labels + mom)) != 2 * len(labels):
            raise ContractError("phase-space labels must be unique")

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def dim(self) -> int:
        return 2 * self.n

    @property
    def all_labels(self) -> tuple[str, ...]:
        return self.labels + self.momentum_labels

    @property
    def J(self) -> np.ndarray:
        return symplectic_matrix(self.n)

    def index(self, label: str) -> int:
        try:
            return self.all_labels.index(label)
        except ValueError:
            raise ContractError(
                f"unknown phase-space label {label!r}; known: {', '.join(self.all_labels)}"
            ) from None

    def coordinate(self, label: str) -> "AffinePhaseFn":
        """The affine function picking out one phase-space coordinate."""
        g = np.zeros(self.dim, dtype=complex)
        g[self.index(label)] = 1.0
        return AffinePhaseFn(g)


@dataclass(frozen=True)
class AffinePhaseFn:
    """``f(z) = grad . z + const`` on a 2n-dimensional phase space."""

    grad: np.ndarray
    const: complex = 0.0

    def __post_init__(self):
        g = _frozen(self.grad)
        if g.ndim != 1 or g.size % 2:
            raise ContractError("gradient must be a vector of even length")
        object.__setattr__(self, "grad", g)
        c = complex(self.const)
        if not np.isfinite(c):
            raise ContractError("non-finite constant")
        object.__setattr__(self, "const", c)

    @property
    def dim(self) -> int:
        return self.grad.size

    def __call__(self, z) -> complex:
        return self.grad @ np.asarray(z) + self.const

    def __add__(self, other: "AffinePhaseFn") -> "AffinePhaseFn":
        _check_dims(self.dim, other.dim)
        return AffinePhaseFn(self.grad + other.grad, self.const + other.const)

    def __mul__(self, c) -> "AffinePhaseFn":
        return AffinePhaseFn(self.grad * c, self.const * c)

    __rmul__ = __mul__

    def __neg__(self) -> "AffinePhaseFn":
        return self * -1

    def __sub__(self, other: "AffinePhaseFn") -> "AffinePhaseFn":
        return self + (-other)

    def is_zero(self, tol: float = 1e-12) -> bool:
        return bool(np.all(np.abs(self.grad) <= tol) and abs(self.const) <= tol)

    def expression(self, labels: Sequence[str], digits: int = 6) -> str:
        """Human-readable rendering such as ``p_phi + 1*A0``."""
        terms = []
        for coeff, name in zip(self.grad, labels):
            if abs(coeff) > 10 ** (-digits - 3):
                terms.append(f"{format_scalar(coeff, digits)}*{name}")
        if abs(self.const) > 10 ** (-digits - 3) or not terms:
            terms.append(format_scalar(self.const, digits))
        return " + ".join(terms).replace("+ -", "- ")


@dataclass(frozen=True)
class QuadHamiltonian:
    """``H(z) = 1/2 z.hess.z + lin.z + const``; ``hess`` is symmetrized."""

    hess: np.ndarray
    lin: np.ndarray | None = None
    const: complex = 0.0

    def __post_init__(self):
        h = np.array(self.hess, dtype=complex)
        if h.ndim != 2 or h.shape[0] != h.shape[1] or h.shape[0] % 2:
            raise ContractError("Hessian must be square with even dimension")
        object.__setattr__(self, "hess", _frozen(0.5 * (h + h.T)))
        lin = np.zeros(h.shape[0]) if self.lin is None else self.lin
        lin = _frozen(lin)
        if lin.shape != (h.shape[0],):
            raise ContractError("linear term has the wrong length")
        object.__setattr__(self, "lin", lin)
        object.__setattr__(self, "const", complex(self.const))

    @property
    def dim(self) -> int:
        return self.hess.shape[0]

    def __call__(self, z) -> complex:
        z = np.asarray(z)
        return 0.5 * z @ self.hess @ z + self.lin @ z + self.const

    def gradient(self, z) -> np.ndarray:
        return self.hess @ np.asarray(z) + self.lin

    def energy_series(self, states: np.ndarray) -> np.ndarray:
        """Evaluate H on each row of ``states``."""
        states = np.asarray(states)
        quad = 0.5 * np.einsum("ti,ij,tj->t", states, self.hess, states)
        return quad + states @ self.lin + self.const

    def plus(self, fn: AffinePhaseFn, coeff: complex) -> "QuadHamiltonian":
        """``H + coeff * fn``, e.g. to append a multiplier term with a fixed value."""
        _check_dims(self.dim, fn.dim)
        return QuadHamiltonian(self.hess, self.lin + coeff * fn.grad, self.const + coeff * fn.const)


@dataclass(frozen=True)
class BracketMatrix:
    """Antisymmetric structure matrix ``W``: ``{f, g} = grad f . W . grad g``."""

    omega: np.ndarray = field()

    def __post_init__(self):
        w = np.array(self.omega, dtype=complex)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ContractError("bracket matrix must be square")
        scale = max(1.0, float(np.max(np.abs(w)))) if w.size else 1.0
        if w.size and np.max(np.abs(w + w.T)) > SYMMETRY_TOL * scale:
            raise ContractError("bracket matrix is not antisymmetric")
        object.__setattr__(self, "omega", _frozen(0.5 * (w - w.T)))

    @classmethod
    def canonical(cls, n: int) -> "BracketMatrix":
        return cls(symplectic_matrix(n))

    @property
    def dim(self) -> int:
        return self.omega.shape[0]


def _check_dims(*dims: int) -> None:
    if len(set(dims)) != 1:
        raise ContractError(f"phase-space dimension mismatch: {dims}")


def format_scalar(c: complex, digits: int = 6) -> str:
    c = complex(c)
    re, im = c.real, c.imag
    if abs(im) <= 10 ** (-digits - 3) * max(1.0, abs(re)):
        return f"{re:.{digits}g}"
    return f"({re:.{digits}g}{im:+.{digits}g}i)"


def bracket(f: AffinePhaseFn, g: AffinePhaseFn, W: BracketMatrix) -> complex:
    """Bracket of two affine functions under the structure ``W``.

    Constant parts drop out; the result is ``grad f . W . grad g``.
    """
    _check_dims(f.dim, g.dim, W.dim)
    return complex(f.grad @ W.omega @ g.grad)


def bracket_observable(f: AffinePhaseFn, H: QuadHamiltonian, W: BracketMatrix) -> AffinePhaseFn:
    """Time derivative ``{f, H}_W`` of ``f`` under the flow of ``H``.

    Because ``f`` is affine and ``H`` quadratic the result is again affine.
    """
    _check_dims(f.dim, H.dim, W.dim)
    row = f.grad @ W.omega
    return AffinePhaseFn(row @ H.hess, row @ H.lin)


def numerical_rank(A, rel_tol: float | None = None) -> tuple[int, np.ndarray]:
    """Rank and orthonormal right null-space basis of ``A`` via the SVD.

    Singular values above ``rel_tol * s_max`` count towards the rank. A zero
    matrix has rank 0 and the full identity as null basis; an empty matrix has
    rank 0.

    Returns
    -------
    rank : int
    null_basis : ndarray, shape (ncols, ncols - rank)
        Columns span ``{x : A x = 0}``.
    """
    tol = default_tol() if rel_tol is None else rel_tol
    if not 0.0 < tol < 1.0:
        raise ContractError(f"rel_tol must lie in (0, 1), got {tol}")
    A = np.atleast_2d(np.asarray(A, dtype=complex))
    ncols = A.shape[1]
    if A.size == 0:
        return 0, np.eye(ncols, dtype=complex)
    if not np.all(np.isfinite(A)):
        raise ContractError("matrix has non-finite entries")
    _, s, vh = np.linalg.svd(A, full_matrices=True)
    if s.size == 0 or s[0] == 0.0:
        return 0, np.eye(ncols, dtype=complex)
    rank = int(np.sum(s > tol * s[0]))
    return rank, vh[rank:].conj().T


def is_independent(rows: Sequence[np.ndarray], candidate: np.ndarray, rel_tol: float | None = None) -> bool:
    """Whether ``candidate`` is linearly independent of ``rows``.

    Rows are normalized first so that wildly different constraint scales do
    not bias the rank decision.
    """
    cand = np.asarray(candidate, dtype=complex)
    if np.linalg.norm(cand) == 0.0:
        return False
    if not rows:
        return True
    stack = np.array([r / np.linalg.norm(r) for r in rows] + [cand / np.linalg.norm(cand)])
    return numerical_rank(stack, rel_tol)[0] > numerical_rank(stack[:-1], rel_tol)[0]


def gram_matrix(grads: Sequence[np.ndarray], W: BracketMatrix) -> np.ndarray:
    """Mutual brackets ``C_ij = g_i . W . g_j``."""
    if len(grads) == 0:
        return np.zeros((0, 0), dtype=complex)
    G = np.array(grads, dtype=complex)
    _check_dims(G.shape[1], W.dim)
    C = G @ W.omega @ G.T
    return 0.5 * (C - C.T)


def dirac_bracket_matrix(
    J: BracketMatrix, scc_grads: Sequence[np.ndarray], rel_tol: float | None = None
) -> BracketMatrix:
    """Structure matrix of the Dirac bracket for a second-class set.

    ``D = J - (J G^T) C^{-1} (G J)`` with ``C = G J G^T``, so that
    ``bracket(f, g, D) = {f,g} - {f,s_i} C^{-1}_ij {s_j,g}`` and every
    constraint gradient is annihilated: ``g_i . D = 0``.

    Raises
    ------
    NotSecondClassError
        If ``C`` is singular at ``rel_tol``.
    """
    if len(scc_grads) == 0:
        return J
    G = np.array(scc_grads, dtype=complex)
    _check_dims(G.shape[1], J.dim)
    C = gram_matrix(list(G), J)
    rank, _ = numerical_rank(C, rel_tol)
    if rank < C.shape[0]:
        raise NotSecondClassError(
            f"constraints not second-class: bracket matrix has rank {rank} < {C.shape[0]}"
        )
    left = J.omega @ G.T
    right = G @ J.omega
    D = J.omega - left @ np.linalg.solve(C, right)
    return BracketMatrix(0.5 * (D - D.T))


def pfaffian_abs(C: np.ndarray) -> float:
    """``|Pf C| = sqrt|det C|`` for an antisymmetric matrix; 1 for the empty matrix."""
    C = np.asarray(C)
    if C.size == 0:
        return 1.0
    return float(np.sqrt(abs(np.linalg.det(C))))
