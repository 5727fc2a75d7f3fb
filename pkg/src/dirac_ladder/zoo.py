"""Model builders and their closed-form spectra.

Models
------
csm         spatially frozen chiral Schwinger model, q = (A0, A1, phi)
csm-mode    one Fourier mode of the chiral Schwinger field theory (6 coordinates)
cranking    two-dimensional cranking oscillator, q = (x1, x2)
mcsp-point  Maxwell-Chern-Simons-Proca at zero spatial momentum, q = (A0, A1, A2)
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .engine import QuadLagrangian
from .errors import ContractError, CriticalPointError

# d/dx acting on a (cos, sin) doublet of one Fourier mode
ROTATION = np.array([[0.0, -1.0], [1.0, 0.0]])


@dataclass(frozen=True)
class ModelParams:
    a: complex = 2.0
    e: float = 1.0
    B: float = 0.0
    k_spring: float = 1.0
    k_mode: float = 0.0

    def __post_init__(self):
        if not self.e > 0:
            raise ContractError("coupling e must be positive")
        if self.k_mode < 0:
            raise ContractError("wavenumber must be non-negative")


def _check_e(e: float) -> None:
    if not e > 0:
        raise ContractError(f"coupling e must be positive, got {e}")


def csm_particle(a: complex, e: float) -> QuadLagrangian:
    """``L = 1/2 A1'^2 + 1/2 phi'^2 + e (A0 phi' + A1' phi) + a e^2/2 (A0^2 - A1^2)``.

    The canonical momentum of ``A1`` is the contravariant one, so the covariant
    ``pi_1`` equals ``-p_A1``; ``momentum_signs`` records that.
    """
    _check_e(e)
    M = np.diag([0.0, 1.0, 1.0])
    N = np.zeros((3, 3))
    N[2, 0] = e  # phi' A0
    N[1, 2] = e  # A1' phi
    K = np.diag([a * e**2, -a * e**2, 0.0])
    return QuadLagrangian(M, N, K, ("A0", "A1", "phi"), (1, -1, 1), name="csm")


def csm_omega_closed(a: complex, e: float) -> tuple[complex, complex]:
    """Closed-form oscillator frequency ``omega^2 = a^2 e^2 / (a - 1)`` for complex ``a``.

    Written in terms of ``r = |a - 1|`` as the explicit real and imaginary
    parts. The imaginary part carries the sign of ``Im a`` so that the result is
    the principal root for every ``a``; on the real axis below ``a = 1`` that is
    the root on the positive imaginary axis.

    Returns
    -------
    (omega, -omega)
    """
    _check_e(e)
    a = complex(a)
    a0, a1 = a.real, a.imag
    r2 = (a0 - 1.0) ** 2 + a1**2
    if r2 == 0.0:
        raise CriticalPointError("a = 1 is the critical point; the closed form diverges")
    r = math.sqrt(r2)
    denom = math.sqrt(2.0 * r2)
    re = (r + 1.0) * math.sqrt(max(r + a0 - 1.0, 0.0)) / denom
    im = (r - 1.0) * math.sqrt(max(r - a0 + 1.0, 0.0)) / denom
    if a1 < 0:
        im = -im
    elif a1 == 0:
        im = abs(im)
    w = e * complex(re, im)
    return w, -w


def reality_locus(a0: float, a1: float, tol: float = 1e-9) -> bool:
    """Whether ``a = a0 + i a1`` lies on the circle where the frequency is real.

    ``(a0 - 1)^2 + a1^2 = 1`` with ``|a1| < 1`` and ``|a0 - 1| < 1``.
    """
    on_circle = abs((a0 - 1.0) ** 2 + a1**2 - 1.0) <= tol
    return bool(on_circle and abs(a1) < 1.0 and abs(a0 - 1.0) < 1.0)


def cranking(B: float, k: float) -> QuadLagrangian:
    """``L = 1/2 (x1'^2 + x2'^2) + B/2 (x1 x2' - x2 x1') - k/2 (x1^2 + x2^2)``."""
    M = np.eye(2)
    N = np.array([[0.0, -B / 2], [B / 2, 0.0]])
    K = -k * np.eye(2)
    return QuadLagrangian(M, N, K, ("x1", "x2"), name="cranking")


def cranking_omega_closed(B: float, k: float) -> tuple[complex, complex]:
    """Normal-mode frequencies ``(omega_+, omega_-)`` of the cranking model.

    ``omega_pm^2 = (2k + B^2)/2 [1 +- sqrt(1 - 4k^2 / (2k + B^2)^2)]``, principal roots.
    """
    s = 2.0 * k + B * B
    if s <= 0:
        raise ContractError(f"need 2k + B^2 > 0, got {s}")
    root = cmath.sqrt(1.0 - 4.0 * k * k / (s * s))
    return cmath.sqrt(0.5 * s * (1.0 + root)), cmath.sqrt(0.5 * s * (1.0 - root))


def mcsp_point(B: float, k: float) -> QuadLagrangian:
    """Maxwell-Chern-Simons-Proca Lagrangian with spatial derivatives dropped.

    ``L = 1/2 (A1'^2 + A2'^2) + B/2 (A1' A2 - A2' A1) + k/2 (A0^2 - A1^2 - A2^2)``.
    ``A0`` is kept so that the constraint analysis removes it.
    """
    if not k > 0:
        raise ContractError("mcsp_point needs a positive Proca mass k")
    M = np.diag([0.0, 1.0, 1.0])
    N = np.zeros((3, 3))
    N[1, 2] = B / 2
    N[2, 1] = -B / 2
    K = np.diag([k, -k, -k])
    return QuadLagrangian(M, N, K, ("A0", "A1", "A2"), (1, -1, -1), name="mcsp-point")


def csm_field_mode(k_mode: float, a: complex, e: float) -> QuadLagrangian:
    """One spatial Fourier mode of the bosonized chiral Schwinger action.

    Each field becomes a real (cos, sin) doublet and ``d/dx -> k_mode * ROTATION``.
    Coordinates are ``(A0c, A1c, phic, A0s, A1s, phis)``, so at ``k_mode = 0``
    the matrices are two copies of :func:`csm_particle`.
    """
    _check_e(e)
    if k_mode < 0:
        raise ContractError("wavenumber must be non-negative")
    k = k_mode

    def pick(i):
        S = np.zeros((2, 6))
        S[0, i] = 1.0
        S[1, i + 3] = 1.0
        return S

    S0, S1, S2 = pick(0), pick(1), pick(2)
    R = ROTATION
    M = np.zeros((6, 6))
    N = np.zeros((6, 6))
    K = np.zeros((6, 6), dtype=complex)

    # 1/2 |A1' - d1 A0|^2
    M += S1.T @ S1
    N += S1.T @ (-k * R @ S0)
    K += k * k * (R @ S0).T @ (R @ S0)
    # 1/2 phi'^2 - 1/2 (d1 phi)^2
    M += S2.T @ S2
    K -= k * k * (R @ S2).T @ (R @ S2)
    # e phi' A0 + e phi A1'
    N += e * S2.T @ S0
    N += e * S1.T @ S2
    # e (d1 phi)(A0 - A1)
    W = e * k * (R @ S2).T @ (S0 - S1)
    K += W + W.T
    # a e^2 / 2 (A0^2 - A1^2)
    K += a * e**2 * (S0.T @ S0 - S1.T @ S1)
    labels = ("A0c", "A1c", "phic", "A0s", "A1s", "phis")
    return QuadLagrangian(M, N, K, labels, (1, -1, 1, 1, -1, 1), name="csm-mode")


# --------------------------------------------------------------------------- registry


@dataclass(frozen=True)
class ModelSpec:
    name: str
    builder: Callable[..., QuadLagrangian]
    params: tuple[str, ...]
    defaults: dict
    gauges: tuple[str, ...] = ()
    description: str = ""


MODELS: dict[str, ModelSpec] = {
    "csm": ModelSpec(
        "csm", csm_particle, ("a", "e"), {"a": 2.0, "e": 1.0}, ("A0",),
        "frozen chiral Schwinger model; anomaly parameter a (complex allowed), charge e",
    ),
    "csm-mode": ModelSpec(
        "csm-mode", csm_field_mode, ("k", "a", "e"), {"k": 1.0, "a": 2.0, "e": 1.0},
        ("A0c", "A0s"),
        "chiral Schwinger field theory, single Fourier mode of wavenumber k",
    ),
    "cranking": ModelSpec(
        "cranking", cranking, ("B", "k"), {"B": 1.0, "k": 1.0}, (),
        "cranking oscillator; rotation B, spring k",
    ),
    "mcsp-point": ModelSpec(
        "mcsp-point", mcsp_point, ("B", "k"), {"B": 1.0, "k": 1.0}, (),
        "Maxwell-Chern-Simons-Proca at zero momentum; CS strength B, Proca mass^2 k",
    ),
}


def resolve_params(model: str, params: dict | None = None) -> dict:
    """Fill defaults and fold ``a0``/``a1`` into a complex ``a``."""
    spec = model_spec(model)
    given = dict(params or {})
    a0, a1 = given.pop("a0", None), given.pop("a1", None)
    if (a0 is not None or a1 is not None) and "a" in spec.params:
        if "a" in given:
            raise ContractError("give either a or a0/a1, not both")
        given["a"] = complex(a0 or 0.0, a1 or 0.0)
    unknown = set(given) - set(spec.params)
    if unknown:
        raise ContractError(f"model {model} has no parameter(s) {sorted(unknown)}; known: {spec.params}")
    out = dict(spec.defaults)
    out.update(given)
    for key, val in out.items():
        if key != "a":
            val = complex(val)
            if val.imag:
                raise ContractError(f"parameter {key} must be real")
            out[key] = val.real
        else:
            out[key] = complex(val)
    return out


def model_spec(model: str) -> ModelSpec:
    try:
        return MODELS[model]
    except KeyError:
        raise ContractError(f"unknown model {model!r}; known: {', '.join(MODELS)}") from None


def build(model: str, params: dict | None = None) -> QuadLagrangian:
    spec = model_spec(model)
    p = resolve_params(model, params)
    return spec.builder(*(p[name] for name in spec.params))


def closed_form_omegas(model: str, params: dict | None = None) -> list[complex]:
    """Closed-form oscillator frequencies (``Re >= 0`` representatives), if known."""
    p = resolve_params(model, params)
    if model == "csm":
        return [_plus(csm_omega_closed(p["a"], p["e"])[0])]
    if model in ("cranking", "mcsp-point"):
        return list(cranking_omega_closed(p["B"], p["k"]))
    if model == "csm-mode":
        w, _ = csm_omega_closed(p["a"], p["e"])
        m2 = w * w
        k = p["k"]
        return [cmath.sqrt(k * k + m2)] * 2 + [complex(k)] * 2
    raise ContractError(f"no closed form for {model}")


def _plus(w: complex) -> complex:
    """Representative of ``+-w`` with ``Re >= 0``, ties (``Re`` at rounding level) by ``Im >= 0``."""
    if abs(w.real) <= 1e-12 * abs(w):
        return complex(0.0, abs(w.imag))
    return -w if w.real < 0 else w
