"""Time-domain cross-check of the algebraic spectrum.

The unreduced system is propagated exactly (matrix exponential of the constant
multiplier-solved flow) from a point on the constraint surface, and the
frequencies of an observable are read off a windowed discrete Fourier
transform. Nothing here touches the Dirac bracket or the reduced flow's
eigen-decomposition.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .algebra import AffinePhaseFn, BracketMatrix, QuadHamiltonian
from .engine import Analysis, ConstraintLedger, multiplier_flow
from .errors import ContractError

SURFACE_TOL = 1e-10


@dataclass(frozen=True)
class Trajectory:
    dt: float
    states: np.ndarray  # shape (steps + 1, 2n)
    constraint_drift: float

    @property
    def times(self) -> np.ndarray:
        return self.dt * np.arange(self.states.shape[0])

    def series(self, observable: AffinePhaseFn) -> np.ndarray:
        return self.states @ observable.grad + observable.const


def constraint_values(constraints: ConstraintLedger, z) -> np.ndarray:
    return np.array([r.fn(z) for r in constraints.records], dtype=complex)


def project_to_surface(constraints: ConstraintLedger, z) -> np.ndarray:
    """Orthogonal projection of ``z`` onto the affine constraint surface."""
    z = np.asarray(z, dtype=complex)
    if len(constraints) == 0:
        return z
    G = np.array(constraints.grads)
    c = np.array([r.fn.const for r in constraints.records])
    return z - np.linalg.pinv(G) @ (G @ z + c)


def random_surface_point(constraints: ConstraintLedger, dim: int, rng: np.random.Generator) -> np.ndarray:
    """Gaussian sample projected onto the surface (real when the constraints are)."""
    z = project_to_surface(constraints, rng.standard_normal(dim))
    if np.all(np.abs(z.imag) < 1e-14):
        z = z.real.astype(complex)
    return z


def evolve(
    flow: tuple[np.ndarray, np.ndarray],
    z0,
    dt: float,
    steps: int,
    constraints: ConstraintLedger | None = None,
) -> Trajectory:
    """Propagate ``zdot = F z + f0`` exactly on a uniform grid.

    Parameters
    ----------
    flow : (F, f0)
        Affine flow, typically from :func:`flow_for`.
    z0 : array
        Initial state; must satisfy every constraint to ``1e-10``.
    constraints : ConstraintLedger, optional
        Constraints whose values are monitored along the trajectory.
    """
    F, f0 = (np.asarray(x, dtype=complex) for x in flow)
    dim = F.shape[0]
    z0 = np.asarray(z0, dtype=complex)
    if z0.shape != (dim,):
        raise ContractError(f"initial state must have length {dim}")
    if steps < 1 or dt <= 0:
        raise ContractError("need steps >= 1 and dt > 0")
    constraints = constraints or ConstraintLedger()
    if len(constraints):
        off = np.max(np.abs(constraint_values(constraints, z0)))
        if off > SURFACE_TOL:
            raise ContractError(f"initial state is off the constraint surface by {off:.3g}")

    # affine step via the augmented generator [[F, f0], [0, 0]]
    gen = np.zeros((dim + 1, dim + 1), dtype=complex)
    gen[:dim, :dim] = F
    gen[:dim, dim] = f0
    step = expm(dt * gen)
    states = np.empty((steps + 1, dim), dtype=complex)
    aug = np.append(z0, 1.0)
    states[0] = z0
    for t in range(1, steps + 1):
        aug = step @ aug
        states[t] = aug[:dim]
    drift = 0.0
    if len(constraints):
        G = np.array(constraints.grads)
        c = np.array([r.fn.const for r in constraints.records])
        drift = float(np.max(np.abs(states @ G.T + c)))
    return Trajectory(dt, states, drift)


def flow_for(analysis: Analysis) -> tuple[np.ndarray, np.ndarray]:
    """Multiplier-solved total flow of an analysed model, composed with the surface projection.

    Any flow that agrees with the total flow on the constraint surface is
    equally valid. Precomposing with the orthogonal projection onto the surface
    keeps rounding errors that leave the surface from being fed back; without
    it, nilpotent flows (free modes) amplify them polynomially in time.
    """
    J = BracketMatrix.canonical(analysis.lagrangian.n)
    surface = analysis.fixed if analysis.fixed is not None else analysis.ledger
    F, f0 = multiplier_flow(analysis.hamiltonian, analysis.primaries, surface, J)
    if len(surface) == 0:
        return F, f0
    G = np.array(surface.grads)
    c = np.array([r.fn.const for r in surface.records])
    Gp = np.linalg.pinv(G)
    P = np.eye(F.shape[0]) - Gp @ G
    return F @ P, f0 - F @ Gp @ c


def energy_drift(H: QuadHamiltonian, traj: Trajectory) -> float:
    """``max_t |H(z(t)) - H(z0)| / max(1, |H(z0)|)``."""
    energy = H.energy_series(traj.states)
    return float(np.max(np.abs(energy - energy[0])) / max(1.0, abs(energy[0])))


def extract_frequencies(
    traj: Trajectory,
    observable: AffinePhaseFn,
    max_samples: int | None = None,
    threshold: float = 10.0,
    rel_floor: float = 1e-6,
) -> list[tuple[float, float]]:
    """Spectral peaks of an observable's time series.

    The (real part of the) series is linearly detrended, so secular growth of
    free modes does not leak into the spectrum, then Hann-windowed and
    transformed. A peak is a local maximum of the power whose value exceeds
    ``threshold`` times the median power and ``rel_floor`` times the largest
    power; the two lowest bins are not resolvable and are skipped. Frequency
    resolution is ``2 pi / (dt * samples)``.

    Returns
    -------
    list of (omega, power), sorted by omega.
    """
    x = traj.series(observable)
    if max_samples is not None:
        x = x[:max_samples]
    n = x.size
    if n < 256:
        raise ContractError("need at least 256 samples for frequency extraction")
    x = np.real(x)
    scale = float(np.max(np.abs(x)))
    t = np.arange(n, dtype=float)
    slope, intercept = np.polyfit(t, x, 1)
    x = (x - (slope * t + intercept)) * np.hanning(n)
    power = np.abs(np.fft.rfft(x)) ** 2
    omegas = 2.0 * np.pi * np.fft.rfftfreq(n, d=traj.dt)
    floor = max(threshold * float(np.median(power)), rel_floor * float(power.max()), (1e-9 * scale * n) ** 2)
    peaks = []
    for k in range(2, power.size - 1):
        if power[k] > floor and power[k] > power[k - 1] and power[k] >= power[k + 1]:
            peaks.append((float(omegas[k]), float(power[k])))
    return peaks


def bin_width(dt: float, samples: int) -> float:
    return 2.0 * np.pi / (dt * samples)


@dataclass(frozen=True)
class OracleCheck:
    constraint_drift: float
    energy_drift: float
    peaks: list[tuple[float, float]]
    engine_omegas: list[float]
    unmatched_engine: list[float]
    unmatched_peaks: list[float]
    bin: float

    @property
    def passed(self) -> bool:
        return (
            self.constraint_drift < 1e-8
            and self.energy_drift < 1e-8
            and not self.unmatched_engine
            and not self.unmatched_peaks
        )


def cross_check(
    analysis: Analysis,
    time: float = 100.0,
    dt: float = 0.01,
    fft_samples: int = 8192,
    seed: int = 0,
) -> OracleCheck:
    """Evolve a random surface point and compare Fourier peaks to the engine spectrum.

    A random real observable is used so that every mode is generically visible.
    Engine oscillators with complex frequency (growing modes) or frequency below
    two bins are excluded from the comparison.
    """
    if analysis.spectrum is None:
        raise ContractError("analysis has no spectrum (gauge required)")
    rng = np.random.default_rng(seed)
    surface = analysis.fixed if analysis.fixed is not None else analysis.ledger
    dim = 2 * analysis.lagrangian.n
    z0 = random_surface_point(surface, dim, rng)
    steps = max(int(round(time / dt)), fft_samples)
    traj = evolve(flow_for(analysis), z0, dt, steps, surface)
    observable = AffinePhaseFn(rng.standard_normal(dim))
    samples = min(fft_samples, steps + 1)
    peaks = extract_frequencies(traj, observable, max_samples=samples)
    width = bin_width(dt, samples)
    engine = sorted(
        {round(m.omega.real, 12) for m in analysis.spectrum.oscillators if m.is_real() and m.omega.real > 2 * width}
    )
    unmatched_engine = [w for w in engine if not any(abs(w - p) <= width for p, _ in peaks)]
    unmatched_peaks = [p for p, _ in peaks if not any(abs(w - p) <= width for w in engine)]
    return OracleCheck(
        traj.constraint_drift,
        energy_drift(analysis.hamiltonian, traj),
        peaks,
        engine,
        unmatched_engine,
        unmatched_peaks,
        width,
    )
