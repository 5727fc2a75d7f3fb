"""Parameter scans running the full engine pipeline at every grid point."""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict

import numpy as np

from . import zoo
from .engine import analyze
from .errors import ContractError, DiracLadderError

CSV_COLUMNS = (
    "model",
    "param1",
    "param2",
    "re_omega_plus",
    "im_omega_plus",
    "re_omega_minus",
    "im_omega_minus",
    "n_fcc",
    "n_scc",
    "dof",
    "gram_det_abs",
    "on_locus",
    "status",
)

CRITICAL_HIT = 1e-12


@dataclass(frozen=True)
class Axis:
    name: str
    start: float
    stop: float
    count: int

    def __post_init__(self):
        if self.count < 2:
            raise ContractError("an axis needs at least 2 points")
        if self.start == self.stop:
            raise ContractError("axis start and stop must differ")

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.count)


@dataclass(frozen=True)
class SweepSpec:
    model: str
    axis1: Axis
    axis2: Axis | None = None
    fixed: dict = field(default_factory=dict)
    outputs: tuple[str, ...] = CSV_COLUMNS

    def __post_init__(self):
        zoo.model_spec(self.model)
        bad = set(self.outputs) - set(CSV_COLUMNS)
        if bad:
            raise ContractError(f"unknown output column(s) {sorted(bad)}")

    def points(self) -> list[tuple[float, float | None]]:
        ys = self.axis2.values() if self.axis2 else [None]
        return [(float(x), None if y is None else float(y)) for x in self.axis1.values() for y in ys]


@dataclass(frozen=True)
class SweepRow:
    model: str
    param1: float
    param2: float | None
    re_omega_plus: float
    im_omega_plus: float
    re_omega_minus: float
    im_omega_minus: float
    n_fcc: int
    n_scc: int
    dof: int
    gram_det_abs: float
    on_locus: bool
    status: str
    omegas: tuple[complex, ...] = ()

    @property
    def omega_plus(self) -> complex:
        return complex(self.re_omega_plus, self.im_omega_plus)

    def as_record(self, outputs=CSV_COLUMNS) -> dict:
        d = asdict(self)
        d.pop("omegas")
        return {k: d[k] for k in outputs}


def _snap(name: str, value: float) -> float:
    # exact-hit policy for the critical point: only a grid point within 1e-12 counts
    if name in ("a", "a0") and abs(value - 1.0) <= CRITICAL_HIT:
        return 1.0
    return value


def point_params(spec: SweepSpec, x: float, y: float | None) -> dict:
    params = dict(spec.fixed)
    params[spec.axis1.name] = _snap(spec.axis1.name, x)
    if spec.axis2 is not None:
        params[spec.axis2.name] = _snap(spec.axis2.name, y)
    return params


def _branch(omegas: list[complex]) -> complex:
    """Highest-|omega| oscillator, normalized to Re >= 0 (ties: Im >= 0)."""
    if not omegas:
        return complex(math.nan, math.nan)
    w = max(omegas, key=lambda v: (abs(v), v.real))
    return zoo._plus(w)


def evaluate_point(model: str, params: dict, x: float, y: float | None) -> SweepRow:
    resolved = zoo.resolve_params(model, params)
    a = resolved.get("a")
    on_locus = bool(a is not None and a.imag != 0 and zoo.reality_locus(a.real, a.imag))
    nan = math.nan
    try:
        L = zoo.build(model, params)
        res = analyze(L)
        status = "ok"
        if res.status == "gauge_required":
            res = analyze(L, zoo.model_spec(model).gauges)
            status = "gauge-fixed"
        omegas = res.spectrum.oscillator_omegas()
        w = _branch(omegas)
        return SweepRow(
            model, x, y, w.real, w.imag, -w.real, -w.imag,
            res.n_fcc, res.n_scc, res.spectrum.dof_count, res.gram_pfaffian, on_locus, status,
            tuple(zoo._plus(v) for v in omegas),
        )
    except DiracLadderError as exc:
        return SweepRow(model, x, y, nan, nan, nan, nan, -1, -1, -1, nan, on_locus, f"error: {exc}")


def _evaluate(args):
    return evaluate_point(*args)


def run_sweep(spec: SweepSpec, jobs: int = 1) -> list[SweepRow]:
    """Evaluate every grid point; rows come back in grid order regardless of ``jobs``.

    Engine failures are recorded in the row's ``status`` and the sweep goes on.
    """
    tasks = [(spec.model, point_params(spec, x, y), x, y) for x, y in spec.points()]
    if jobs <= 1 or len(tasks) < 2:
        return [_evaluate(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_evaluate, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))


def dof_profile(model: str, param_axis: tuple[str, list[float]], fixed: dict | None = None) -> list[tuple]:
    """``(value, n_fcc, n_scc, dof)`` along one parameter."""
    name, values = param_axis
    out = []
    for v in values:
        params = dict(fixed or {})
        params[name] = _snap(name, float(v))
        row = evaluate_point(model, params, float(v), None)
        out.append((v, row.n_fcc, row.n_scc, row.dof))
    return out


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v + 0.0)  # no "-0.0" in the output
    return str(v)


def to_csv(rows: list[SweepRow], outputs=CSV_COLUMNS) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(outputs)
    for row in rows:
        rec = row.as_record(outputs)
        writer.writerow([_fmt(rec[k]) for k in outputs])
    return buf.getvalue()


def to_json(rows: list[SweepRow], outputs=CSV_COLUMNS) -> str:
    def clean(v):
        return None if isinstance(v, float) and math.isnan(v) else v

    return json.dumps([{k: clean(v) for k, v in r.as_record(outputs).items()} for r in rows], indent=1)


def read_csv(text: str) -> list[dict]:
    return list(csv.DictReader(io.StringIO(text)))
