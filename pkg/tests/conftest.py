import numpy as np
import pytest
import sympy as sp

from dirac_ladder.algebra import PhaseSpace
from dirac_ladder.engine import ConstraintLedger, ConstraintRecord, QuadLagrangian


def gauged_pair(k: float = 1.0) -> QuadLagrangian:
    """L = 1/2 (x1' - y)^2 + 1/2 (x2' - y)^2 - k/2 (x1 - x2)^2.

    Invariant under x_i -> x_i + eps, y -> y + eps'; two first-class constraints.
    """
    M = np.diag([1.0, 1.0, 0.0])
    N = np.zeros((3, 3))
    N[0, 2] = N[1, 2] = -1.0
    K = np.zeros((3, 3))
    K[2, 2] = 2.0
    K[:2, :2] = -k * np.array([[1.0, -1.0], [-1.0, 1.0]])
    return QuadLagrangian(M, N, K, ("x1", "x2", "y"), name="gauged-pair")


def hand_ledger_a1(e: float) -> ConstraintLedger:
    """The three constraints written down by hand for a = 1 (pi0, pi, pi_1 + e phi)."""
    space = PhaseSpace(("A0", "A1", "phi"))
    c = space.coordinate
    fns = [c("p_A0"), c("p_phi"), -c("p_A1") + e * c("phi")]
    return ConstraintLedger([ConstraintRecord(f, s, origin="hand") for s, f in enumerate(fns)])


def characteristic_polynomial(L: QuadLagrangian):
    """Exact det(M s^2 + (N - N^T) s - K) for a real-parameter model."""
    s = sp.Symbol("s")
    conv = lambda m: sp.Matrix(np.real_if_close(m).tolist()).applyfunc(sp.nsimplify)  # noqa: E731
    M, N, K = conv(L.M), conv(L.N), conv(L.K)
    return sp.Poly(sp.expand((M * s**2 + (N - N.T) * s - K).det()), s)


ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line per acceptance criterion; printed in the terminal summary."""

    def record(number: int, ok: bool, detail: str) -> None:
        ACCEPTANCE_LINES[number] = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        print(ACCEPTANCE_LINES[number])
        assert ok, detail

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
