"""Dirac-Bergmann analysis of quadratic Lagrangians.

The pipeline is ``legendre -> constraint_chain -> classify -> [gauge_fix] ->
reduce -> spectrum``; :func:`analyze` composes it. All stages are pure
functions of immutable inputs.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .algebra import (
    AffinePhaseFn,
    BracketMatrix,
    PhaseSpace,
    QuadHamiltonian,
    bracket_observable,
    default_tol,
    dirac_bracket_matrix,
    gram_matrix,
    is_independent,
    numerical_rank,
    pfaffian_abs,
)
from .errors import (
    ContractError,
    DegenerateEliminationError,
    GaugeRequired,
    InadmissibleGaugeError,
    InconsistentConstraintsError,
    RunawayChainError,
)

log = logging.getLogger(__name__)

GAUGE_STAGE = -1


def _sym(a) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    return 0.5 * (a + a.T)


@dataclass(frozen=True)
class QuadLagrangian:
    """``L = 1/2 qdot.M.qdot + qdot.N.q + 1/2 q.K.q``.

    ``momentum_signs`` records, per coordinate, the sign relating the canonical
    momentum used here to a model's own sign convention (for instance a
    covariant index lowered with a Minkowski metric). The engine never reads
    it; it exists for presenting results in the model's notation.
    """

    M: np.ndarray
    N: np.ndarray
    K: np.ndarray
    labels: tuple[str, ...]
    momentum_signs: tuple[int, ...] = ()
    name: str = "custom"

    def __post_init__(self):
        n = len(self.labels)
        mats = {}
        for key in ("M", "N", "K"):
            m = np.array(getattr(self, key), dtype=complex)
            if m.shape != (n, n):
                raise ContractError(f"{key} must be {n}x{n}, got {m.shape}")
            if not np.all(np.isfinite(m)):
                raise ContractError(f"{key} has non-finite entries")
            mats[key] = m
        mats["M"] = _sym(mats["M"])
        mats["K"] = _sym(mats["K"])
        for key, m in mats.items():
            m.setflags(write=False)
            object.__setattr__(self, key, m)
        object.__setattr__(self, "labels", tuple(self.labels))
        signs = tuple(self.momentum_signs) or (1,) * n
        if len(signs) != n:
            raise ContractError("one momentum sign per coordinate")
        object.__setattr__(self, "momentum_signs", signs)

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def phase_space(self) -> PhaseSpace:
        return PhaseSpace(self.labels)

    def value(self, q, qdot) -> complex:
        q, qdot = np.asarray(q), np.asarray(qdot)
        return 0.5 * qdot @ self.M @ qdot + qdot @ self.N @ q + 0.5 * q @ self.K @ q

    def euler_lagrange(self, q, qdot, qddot) -> np.ndarray:
        """Residual ``M qddot + (N - N^T) qdot - K q`` (zero on solutions)."""
        return self.M @ qddot + (self.N - self.N.T) @ qdot - self.K @ q

    def plus_total_derivative(self, S) -> "QuadLagrangian":
        """Add ``d/dt (1/2 q.S.q)`` for symmetric ``S``; dynamics is unchanged."""
        return replace(self, N=self.N + _sym(S))


class Klass(str, enum.Enum):
    FIRST = "FIRST"
    SECOND = "SECOND"
    UNCLASSIFIED = "UNCLASSIFIED"


@dataclass(frozen=True)
class ConstraintRecord:
    fn: AffinePhaseFn
    stage: int
    klass: Klass = Klass.UNCLASSIFIED
    origin: str = ""

    @property
    def is_gauge(self) -> bool:
        return self.stage == GAUGE_STAGE


@dataclass(frozen=True)
class ConstraintLedger:
    """Ordered constraints with independent gradients."""

    records: tuple[ConstraintRecord, ...] = ()
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "records", tuple(self.records))
        object.__setattr__(self, "notes", tuple(self.notes))

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __getitem__(self, i) -> ConstraintRecord:
        return self.records[i]

    @property
    def grads(self) -> list[np.ndarray]:
        return [r.fn.grad for r in self.records]

    @property
    def fns(self) -> list[AffinePhaseFn]:
        return [r.fn for r in self.records]

    def count(self, klass: Klass) -> int:
        return sum(r.klass == klass for r in self.records)

    @property
    def n_first(self) -> int:
        return self.count(Klass.FIRST)

    @property
    def n_second(self) -> int:
        return self.count(Klass.SECOND)

    def append(self, record: ConstraintRecord, rel_tol: float | None = None) -> "ConstraintLedger":
        if not is_independent(self.grads, record.fn.grad, rel_tol):
            raise ContractError("constraint gradient is dependent on the ledger")
        return ConstraintLedger(self.records + (record,), self.notes)

    def with_note(self, note: str) -> "ConstraintLedger":
        return ConstraintLedger(self.records, self.notes + (note,))


@dataclass(frozen=True)
class ReducedSystem:
    """Second-class-reduced linear system on the kept coordinates.

    ``z = embedding @ z_kept + offset`` parametrizes the constraint surface.
    """

    kept: tuple[int, ...]
    eliminated: tuple[int, ...]
    embedding: np.ndarray
    offset: np.ndarray
    H_red: QuadHamiltonian
    D_red: BracketMatrix
    D_full: BracketMatrix
    labels: tuple[str, ...] = ()

    @property
    def dim(self) -> int:
        return len(self.kept)

    @property
    def flow(self) -> np.ndarray:
        """Linear part of ``d z_kept / dt``."""
        return self.D_red.omega @ self.H_red.hess

    def elim_map(self) -> dict[int, tuple[np.ndarray, complex]]:
        """Eliminated coordinate index -> (coefficients on kept coordinates, constant)."""
        return {j: (self.embedding[j].copy(), complex(self.offset[j])) for j in self.eliminated}


class ModeKind(str, enum.Enum):
    OSCILLATOR = "OSCILLATOR"
    FREE = "FREE"
    ZERO = "ZERO"


@dataclass(frozen=True)
class Mode:
    omega: complex
    kind: ModeKind
    multiplicity: int = 1
    order: int = 2  # time derivatives in the scalar mode equation

    def is_real(self, tol: float = 1e-9) -> bool:
        return abs(self.omega.imag) < tol * max(1.0, abs(self.omega))


@dataclass(frozen=True)
class SpectrumReport:
    modes: tuple[Mode, ...]
    dof_count: int
    eigenvalues: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))

    def of_kind(self, kind: ModeKind) -> list[Mode]:
        return [m for m in self.modes if m.kind == kind]

    @property
    def oscillators(self) -> list[Mode]:
        return self.of_kind(ModeKind.OSCILLATOR)

    def oscillator_omegas(self) -> list[complex]:
        """One entry per oscillator, repeated by multiplicity, sorted by |omega|."""
        out = [m.omega for m in self.oscillators for _ in range(m.multiplicity)]
        return sorted(out, key=lambda w: (abs(w), w.real, w.imag))

    def count(self, kind: ModeKind) -> int:
        return sum(m.multiplicity for m in self.of_kind(kind))


# --------------------------------------------------------------------------- legendre


def _clean_columns(B: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Row-reduce a basis (given as columns) so each vector has a unit pivot."""
    if B.size == 0:
        return B
    A = B.T.copy()
    rows, cols = A.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        p = r + int(np.argmax(np.abs(A[r:, c])))
        if abs(A[p, c]) <= tol * max(1.0, np.max(np.abs(A))):
            continue
        A[[r, p]] = A[[p, r]]
        A[r] /= A[r, c]
        for i in range(rows):
            if i != r:
                A[i] -= A[i, c] * A[r]
        r += 1
    A[np.abs(A) < tol] = 0.0
    return A[:r].T


def legendre(L: QuadLagrangian, rel_tol: float | None = None) -> tuple[QuadHamiltonian, ConstraintLedger]:
    """Canonical Hamiltonian and primary constraints of ``L``.

    Momenta are ``p = M qdot + N q``. Every null vector ``u`` of ``M`` gives a
    primary constraint ``u.(p - N q) ~ 0``; on that surface the Hamiltonian is
    ``1/2 (p - Nq).M^+.(p - Nq) - 1/2 q.K.q`` with ``M^+`` the pseudoinverse.
    """
    tol = default_tol() if rel_tol is None else rel_tol
    n = L.n
    _, null = numerical_rank(L.M, tol)
    null = _clean_columns(null)
    Mplus = _sym(np.linalg.pinv(L.M, rcond=tol)) if n else np.zeros((0, 0))
    P = np.hstack([-L.N, np.eye(n)])
    hess = P.T @ Mplus @ P
    hess[:n, :n] -= L.K
    H = QuadHamiltonian(hess)

    records = []
    for k in range(null.shape[1]):
        u = null[:, k]
        grad = np.concatenate([-L.N.T @ u, u])
        records.append(ConstraintRecord(AffinePhaseFn(grad), 0, origin="primary"))
    return H, ConstraintLedger(records)


# --------------------------------------------------------------------------- chain


def _tag(i: int) -> str:
    return f"c{i + 1}"


def constraint_chain(
    H: QuadHamiltonian,
    primaries: ConstraintLedger,
    J: BracketMatrix,
    max_stage: int | None = None,
    rel_tol: float | None = None,
) -> ConstraintLedger:
    """Generate secondary, tertiary, ... constraints until the chain closes.

    With total Hamiltonian ``H + lambda_a phi_a`` (primaries ``phi_a``),
    persistence of each constraint requires ``{phi_i, H} + C_ia lambda_a ~ 0``
    where ``C_ia = {phi_i, phi_a}``. Combinations ``w`` with ``w.C = 0`` cannot
    be satisfied by any multiplier; ``w.{phi, H}`` is a new constraint when its
    gradient is independent of the ledger, otherwise it vanishes on the
    surface. The remaining rows only fix multipliers.
    """
    tol = default_tol() if rel_tol is None else rel_tol
    dim = J.dim
    max_stage = dim if max_stage is None else max_stage
    if max_stage < 1:
        raise ContractError("max_stage must be >= 1")
    ledger = primaries
    prim_grads = [r.fn.grad for r in primaries.records]
    fresh = set(range(len(ledger)))

    for stage in range(1, max_stage + 1):
        fns = ledger.fns
        m = len(fns)
        if m == 0:
            return ledger
        derivs = [bracket_observable(f, H, J) for f in fns]
        if prim_grads:
            C_P = np.array(fns_grads(fns)) @ J.omega @ np.array(prim_grads).T
            _, W = numerical_rank(C_P.T, tol)
            big = tol * max(1.0, float(np.max(np.abs(C_P))))
            fixes = [i for i in sorted(fresh) if np.any(np.abs(C_P[i]) > big)]
        else:
            W, fixes = np.eye(m, dtype=complex), []
        W = _clean_columns(W)
        new_fresh = set()
        for k in range(W.shape[1]):
            w = W[:, k]
            support = [i for i in range(m) if abs(w[i]) > 1e-12]
            cand = AffinePhaseFn(
                sum(w[i] * derivs[i].grad for i in support),
                sum(w[i] * derivs[i].const for i in support),
            )
            src = ",".join(_tag(i) for i in support)
            if is_independent(ledger.grads, cand.grad, tol):
                new_fresh.add(len(ledger))
                ledger = ledger.append(ConstraintRecord(cand, stage, origin=f"d/dt({src})"), tol)
            else:
                _check_consistent(cand, ledger, tol)
                if fresh.intersection(support):
                    ledger = ledger.with_note(f"stage {stage}: d/dt({src}) vanishes on the surface")
        if fixes:
            ledger = ledger.with_note(
                f"stage {stage}: d/dt({','.join(_tag(i) for i in fixes)}) fixes multipliers"
            )
        if not new_fresh:
            return ledger
        fresh = new_fresh
    raise RunawayChainError(f"constraint chain still growing after {max_stage} stages")


def fns_grads(fns: Sequence[AffinePhaseFn]) -> list[np.ndarray]:
    return [f.grad for f in fns]


def _check_consistent(cand: AffinePhaseFn, ledger: ConstraintLedger, tol: float) -> None:
    """A dependent candidate must vanish on the surface, not equal a constant."""
    if not ledger.records:
        if abs(cand.const) > tol * max(1.0, np.linalg.norm(cand.grad)):
            raise InconsistentConstraintsError("consistency condition is a nonzero constant")
        return
    G = np.array(ledger.grads)
    c = np.array([r.fn.const for r in ledger.records])
    coeffs, *_ = np.linalg.lstsq(G.T, cand.grad, rcond=None)
    residual = cand.const - coeffs @ c
    scale = max(1.0, float(np.linalg.norm(cand.grad)), float(np.max(np.abs(c))))
    if abs(residual) > 1e3 * tol * scale:
        raise InconsistentConstraintsError(
            f"consistency condition reduces to the nonzero constant {residual:.3g}"
        )


# --------------------------------------------------------------------------- classification


def classify(ledger: ConstraintLedger, J: BracketMatrix, rel_tol: float | None = None) -> ConstraintLedger:
    """Split the ledger into first- and second-class records.

    First-class directions span the null space of the bracket matrix
    ``C_ij = {phi_i, phi_j}``. The ledger is re-based so that each null vector
    replaces the record at its pivot; everything else is second class.
    """
    tol = default_tol() if rel_tol is None else rel_tol
    m = len(ledger)
    if m == 0:
        return ledger
    C = gram_matrix(ledger.grads, J)
    rank, null = numerical_rank(C, tol) if np.any(C) else (0, np.eye(m, dtype=complex))
    if rank % 2:
        raise ContractError(f"odd rank {rank} for an antisymmetric bracket matrix; adjust rel_tol")
    null = _clean_columns(null)
    records = [replace(r, klass=Klass.SECOND) for r in ledger.records]
    for k in range(null.shape[1]):
        v = null[:, k]
        support = [i for i in range(m) if abs(v[i]) > 1e-12]
        pivot = support[0]
        if len(support) == 1:
            records[pivot] = replace(ledger.records[pivot], klass=Klass.FIRST)
            continue
        grad = sum(v[i] * ledger.records[i].fn.grad for i in support)
        const = sum(v[i] * ledger.records[i].fn.const for i in support)
        records[pivot] = ConstraintRecord(
            AffinePhaseFn(grad, const),
            max(ledger.records[i].stage for i in support),
            Klass.FIRST,
            origin="first-class combination of " + ",".join(_tag(i) for i in support),
        )
    return ConstraintLedger(records, ledger.notes)


def gauge_fix(
    ledger: ConstraintLedger,
    gauges: Sequence[AffinePhaseFn],
    J: BracketMatrix,
    rel_tol: float | None = None,
    labels: Sequence[str] | None = None,
) -> ConstraintLedger:
    """Adjoin one gauge condition per first-class record.

    The augmented set must be entirely second class; otherwise
    :class:`InadmissibleGaugeError` names the offending pair.
    """
    tol = default_tol() if rel_tol is None else rel_tol
    firsts = [i for i, r in enumerate(ledger.records) if r.klass == Klass.FIRST]
    if len(gauges) != len(firsts):
        raise ContractError(f"need {len(firsts)} gauge condition(s), got {len(gauges)}")
    if not gauges:
        return ledger

    def name(fn):
        return fn.expression(labels) if labels is not None else "gauge"

    records = list(ledger.records)
    for g in gauges:
        if not is_independent([r.fn.grad for r in records], g.grad, tol):
            raise InadmissibleGaugeError(f"gauge {name(g)} is dependent on the existing constraints")
        records.append(ConstraintRecord(g, GAUGE_STAGE, Klass.SECOND, origin="gauge"))
    C = gram_matrix([r.fn.grad for r in records], J)
    rank, _ = numerical_rank(C, tol)
    if rank < len(records):
        pairing = np.array([[complex(r.fn.grad @ J.omega @ g.grad) for g in gauges] for r in (records[i] for i in firsts)])
        bad = []
        for a, i in enumerate(firsts):
            for b, g in enumerate(gauges):
                if abs(pairing[a, b]) <= tol * max(1.0, np.max(np.abs(pairing))):
                    bad.append(f"({name(records[i].fn)}, {name(g)})")
        detail = "; vanishing brackets: " + ", ".join(bad) if bad else ""
        raise InadmissibleGaugeError(f"inadmissible gauge: augmented bracket matrix is singular{detail}")
    return ConstraintLedger([replace(r, klass=Klass.SECOND) for r in records], ledger.notes)


# --------------------------------------------------------------------------- reduction


def reduce(
    H: QuadHamiltonian,
    ledger: ConstraintLedger,
    J: BracketMatrix,
    rel_tol: float | None = None,
    labels: Sequence[str] | None = None,
) -> ReducedSystem:
    """Impose a second-class ledger strongly and restrict ``H`` and the Dirac bracket.

    Coordinates to eliminate are picked by Gauss-Jordan elimination on the
    constraint gradients, scanning columns in coordinate order and choosing the
    largest pivot in each column.
    """
    tol = default_tol() if rel_tol is None else rel_tol
    dim = J.dim
    if any(r.klass != Klass.SECOND for r in ledger.records):
        raise ContractError("reduce requires a fully second-class ledger")
    D = dirac_bracket_matrix(J, ledger.grads, tol)
    r = len(ledger)
    work = np.zeros((r, dim + 1), dtype=complex)
    for i, rec in enumerate(ledger.records):
        norm = np.linalg.norm(rec.fn.grad)
        work[i, :dim] = rec.fn.grad / norm
        work[i, dim] = rec.fn.const / norm
    pending = list(range(r))
    pivots: dict[int, int] = {}
    for col in range(dim):
        if not pending:
            break
        mags = np.abs(work[pending, col])
        k = int(np.argmax(mags))
        row_scale = np.max(np.abs(work[pending[k], :dim]))
        if mags[k] <= tol * row_scale:
            continue
        pr = pending.pop(k)
        work[pr] /= work[pr, col]
        for o in range(r):
            if o != pr:
                work[o] -= work[o, col] * work[pr]
        pivots[col] = pr
    if pending:
        raise DegenerateEliminationError(
            f"degenerate elimination: {len(pending)} constraint(s) left without a pivot"
        )
    eliminated = tuple(sorted(pivots))
    kept = tuple(j for j in range(dim) if j not in pivots)
    E = np.zeros((dim, len(kept)), dtype=complex)
    c = np.zeros(dim, dtype=complex)
    for a, j in enumerate(kept):
        E[j, a] = 1.0
    for col, pr in pivots.items():
        E[col] = -work[pr, list(kept)]
        c[col] = -work[pr, dim]

    hess_red = E.T @ H.hess @ E
    lin_red = E.T @ (H.hess @ c + H.lin)
    const_red = 0.5 * c @ H.hess @ c + H.lin @ c + H.const
    D_red = BracketMatrix(D.omega[np.ix_(kept, kept)])
    names = tuple(labels[j] for j in kept) if labels is not None else ()
    return ReducedSystem(kept, eliminated, E, c, QuadHamiltonian(hess_red, lin_red, const_red), D_red, D, names)


# --------------------------------------------------------------------------- spectrum


def _nullity(A: np.ndarray, tol: float) -> int:
    return A.shape[1] - numerical_rank(A, tol)[0]


def _cluster(values: np.ndarray, tol: float) -> list[list[int]]:
    order = sorted(range(len(values)), key=lambda i: (values[i].real, values[i].imag))
    clusters: list[list[int]] = []
    for i in order:
        for cl in clusters:
            if abs(values[cl[0]] - values[i]) <= tol:
                cl.append(i)
                break
        else:
            clusters.append([i])
    return clusters


def spectrum(rs: ReducedSystem, rel_tol: float | None = None) -> SpectrumReport:
    """Normal modes of the reduced linear flow ``F = D_red . hess(H_red)``.

    Nonzero eigenvalues ``lambda = i omega`` come in ``+-`` pairs; each pair is
    reported once as an OSCILLATOR with the ``omega`` having ``Re >= 0``
    (ties broken by ``Im >= 0``). The generalized null space of ``F`` is split
    by Jordan structure: blocks of size one pair up into frozen ZERO modes,
    longer blocks are FREE modes (``x'' = 0`` for size two).
    """
    tol = default_tol() if rel_tol is None else rel_tol
    F = rs.flow
    m = F.shape[0]
    if m == 0:
        return SpectrumReport((), 0)
    if not np.all(np.isfinite(F)):
        raise FloatingPointError("non-finite reduced flow")
    scale = float(np.linalg.norm(F, 2))
    eig = np.linalg.eigvals(F)
    if not np.all(np.isfinite(eig)):
        raise FloatingPointError("non-finite eigenvalues")
    if scale == 0.0:
        return SpectrumReport((Mode(0j, ModeKind.ZERO, m // 2, 0),), 0, eig)

    Fn = F / scale
    nullities = [0]
    power = np.eye(m, dtype=complex)
    for _ in range(m):
        power = power @ Fn
        nul = _nullity(power, tol)
        if nul == nullities[-1]:
            break
        nullities.append(nul)
    m0 = nullities[-1]
    longest = len(nullities) - 1

    modes: list[Mode] = []
    if m0:
        singles = 2 * nullities[1] - (nullities[2] if len(nullities) > 2 else nullities[1])
        free_dims = m0 - singles
        if free_dims:
            modes.append(Mode(0j, ModeKind.FREE, free_dims // 2, longest))
        if singles:
            modes.append(Mode(0j, ModeKind.ZERO, singles // 2, 0))

    nonzero = eig[np.argsort(-np.abs(eig))][: m - m0]
    cl_tol = 1e-6 * scale
    for cl in _cluster(nonzero, cl_tol):
        lam = complex(np.mean(nonzero[cl]))
        omega = -1j * lam
        if abs(omega.real) > 1e-12 * scale:
            plus = omega.real > 0
        else:
            plus = omega.imag >= 0
        if not plus:
            continue
        geo = _nullity(F - lam * np.eye(m), 1e3 * tol) if len(cl) > 1 else 1
        block = -(-len(cl) // max(geo, 1))
        modes.append(Mode(omega, ModeKind.OSCILLATOR, len(cl), 2 * block))
    modes.sort(key=lambda md: (md.kind != ModeKind.OSCILLATOR, abs(md.omega)))
    dof = sum(md.multiplicity for md in modes if md.kind in (ModeKind.OSCILLATOR, ModeKind.FREE))
    return SpectrumReport(tuple(modes), dof, eig)


# --------------------------------------------------------------------------- dynamics helpers


def multiplier_flow(
    H: QuadHamiltonian,
    primaries: ConstraintLedger,
    constraints: ConstraintLedger,
    J: BracketMatrix,
) -> tuple[np.ndarray, np.ndarray]:
    """Affine flow ``zdot = F z + f0`` of the total Hamiltonian with multipliers solved.

    Multipliers ``lambda(z)`` are the least-squares solution of
    ``{phi_i, H}(z) + {phi_i, phi_a} lambda_a = 0`` over every constraint
    (gauge conditions included), which is exact on the constraint surface once
    the chain has closed. Undetermined combinations get the minimum-norm value.
    """
    F = J.omega @ H.hess
    f0 = J.omega @ H.lin
    if len(primaries) == 0 or len(constraints) == 0:
        return F, f0
    P = np.array(primaries.grads)
    G = np.array(constraints.grads)
    C_P = G @ J.omega @ P.T
    h_lin = G @ J.omega @ H.hess
    h0 = G @ J.omega @ H.lin
    pinv = np.linalg.pinv(C_P, rcond=1e-10)
    Lam, lam0 = -pinv @ h_lin, -pinv @ h0
    JP = J.omega @ P.T
    return F + JP @ Lam, f0 + JP @ lam0


# --------------------------------------------------------------------------- pipeline


@dataclass(frozen=True)
class Analysis:
    """Outcome of :func:`analyze`. ``reduced``/``spectrum`` are None when a gauge is required."""

    lagrangian: QuadLagrangian
    hamiltonian: QuadHamiltonian
    primaries: ConstraintLedger
    ledger: ConstraintLedger
    fixed: ConstraintLedger | None
    reduced: ReducedSystem | None
    spectrum: SpectrumReport | None
    status: str = "ok"
    ignored_gauges: tuple[AffinePhaseFn, ...] = ()

    @property
    def n_fcc(self) -> int:
        return self.ledger.n_first

    @property
    def n_scc(self) -> int:
        return self.ledger.n_second

    @property
    def gram_pfaffian(self) -> float:
        """``sqrt|det C|`` of the second-class constraints (after gauge fixing)."""
        led = self.fixed if self.fixed is not None else self.ledger
        grads = [r.fn.grad for r in led.records if r.klass == Klass.SECOND]
        return pfaffian_abs(gram_matrix(grads, BracketMatrix.canonical(self.lagrangian.n)))


def resolve_gauges(gauges, space: PhaseSpace) -> list[AffinePhaseFn]:
    """Accept phase-space labels (``"A0"`` means ``A0 = 0``) or affine functions."""
    out = []
    for g in gauges or ():
        out.append(space.coordinate(g) if isinstance(g, str) else g)
    return out


def analyze(
    L: QuadLagrangian,
    gauges: Sequence[AffinePhaseFn | str] | None = None,
    rel_tol: float | None = None,
    strict: bool = False,
) -> Analysis:
    """Run the full constraint analysis and normal-mode extraction.

    If first-class constraints survive and no gauges are given, the result has
    ``status == "gauge_required"`` (or :class:`GaugeRequired` is raised when
    ``strict``). Gauges supplied for a purely second-class system are ignored
    and reported in ``ignored_gauges``.
    """
    tol = default_tol() if rel_tol is None else rel_tol
    space = L.phase_space
    J = BracketMatrix.canonical(L.n)
    gauge_fns = resolve_gauges(gauges, space)
    H, prim = legendre(L, tol)
    chain = constraint_chain(H, prim, J, rel_tol=tol)
    ledger = classify(chain, J, tol)
    ignored: tuple[AffinePhaseFn, ...] = ()
    if ledger.n_first:
        if not gauge_fns:
            if strict:
                raise GaugeRequired(f"{ledger.n_first} first-class constraint(s); supply gauge conditions")
            return Analysis(L, H, prim, ledger, None, None, None, "gauge_required")
        fixed = gauge_fix(ledger, gauge_fns, J, tol, space.all_labels)
    else:
        if gauge_fns:
            log.warning("no first-class constraints; ignoring %d gauge condition(s)", len(gauge_fns))
            ignored = tuple(gauge_fns)
        fixed = ledger
    rs = reduce(H, fixed, J, tol, space.all_labels)
    return Analysis(L, H, prim, ledger, fixed, rs, spectrum(rs, tol), "ok", ignored)
