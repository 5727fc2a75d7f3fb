"""Command-line interface: ``dirac-ladder {analyze,sweep,verify,zoo}``.

Exit codes: 0 success, 1 error, 2 gauge conditions required.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import oracle, sweep, zoo
from .algebra import AffinePhaseFn, default_tol, format_scalar
from .engine import Analysis, QuadLagrangian, analyze, resolve_gauges
from .errors import DiracLadderError

log = logging.getLogger("dirac_ladder")

EXIT_OK, EXIT_ERROR, EXIT_GAUGE = 0, 1, 2
ASYMMETRY_WARN = 1e-9


def parse_complex(text: str) -> complex:
    """Parse ``2``, ``0.5+0.866i`` or ``-1.5i`` (sign-explicit, no spaces)."""
    s = text.strip().replace(" ", "")
    if s.endswith("i"):
        s = s[:-1] + "j"
    try:
        return complex(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _cpair(v) -> complex:
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise DiracLadderError(f"complex entries are [re, im] pairs, got {v!r}")
        return complex(v[0], v[1])
    return complex(v)


def _matrix(raw, n: int, key: str) -> np.ndarray:
    m = np.array([[_cpair(x) for x in row] for row in raw], dtype=complex)
    if m.shape != (n, n):
        raise DiracLadderError(f"{key} must be {n}x{n}, got {m.shape}")
    return m


def load_model_file(path: str | Path) -> tuple[QuadLagrangian, list[AffinePhaseFn]]:
    """Read a JSON model ``{"n", "labels", "M", "N", "K", "gauges"?}``."""
    doc = json.loads(Path(path).read_text())
    n = int(doc["n"])
    labels = tuple(doc.get("labels") or [f"q{i + 1}" for i in range(n)])
    mats = {key: _matrix(doc[key], n, key) for key in ("M", "N", "K")}
    for key in ("M", "K"):
        asym = np.max(np.abs(mats[key] - mats[key].T)) if n else 0.0
        if asym > ASYMMETRY_WARN:
            log.warning("%s is not symmetric (max deviation %.3g); symmetrizing", key, asym)
    gauges = []
    for entry in doc.get("gauges") or []:
        coeffs, const = entry
        grad = np.array([_cpair(c) for c in coeffs], dtype=complex)
        if grad.size != 2 * n:
            raise DiracLadderError(f"gauge gradients need length {2 * n}")
        gauges.append(AffinePhaseFn(grad, _cpair(const)))
    L = QuadLagrangian(mats["M"], mats["N"], mats["K"], labels, name=Path(path).stem)
    return L, gauges


def _params_from_args(args) -> dict:
    out = {}
    for key in ("a", "a0", "a1", "e", "B", "k"):
        val = getattr(args, key, None)
        if val is not None:
            out[key] = val
    return out


def resolve_model(args) -> tuple[QuadLagrangian, list, dict]:
    """Model name or file -> (Lagrangian, gauges from the file, resolved params)."""
    if args.model in zoo.MODELS:
        params = zoo.resolve_params(args.model, _params_from_args(args))
        return zoo.build(args.model, params), [], params
    path = Path(args.model)
    if path.is_file():
        L, gauges = load_model_file(path)
        return L, gauges, {}
    raise DiracLadderError(f"unknown model {args.model!r}: not a zoo name ({', '.join(zoo.MODELS)}) or a file")


def _gauges(args, L: QuadLagrangian, file_gauges: list):
    labels = [g for chunk in (args.gauge or []) for g in chunk.split(",") if g]
    return resolve_gauges(labels, L.phase_space) + list(file_gauges)


# --------------------------------------------------------------------------- report


def _c(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def build_report(model: str, params: dict, res: Analysis) -> dict:
    """JSON-ready description of an analysis (complex numbers as [re, im])."""
    labels = list(res.lagrangian.phase_space.all_labels)
    ledger = res.fixed if res.fixed is not None else res.ledger
    report = {
        "model": model,
        "params": {k: _c(v) for k, v in sorted(params.items())},
        "status": res.status,
        "labels": labels,
        "n_fcc": res.n_fcc,
        "n_scc": res.n_scc,
        "constraints": [
            {
                "id": f"c{i + 1}",
                "stage": r.stage,
                "class": r.klass.value,
                "origin": r.origin,
                "expression": r.fn.expression(labels),
            }
            for i, r in enumerate(ledger.records)
        ],
        "notes": list(ledger.notes),
        "ignored_gauges": [g.expression(labels) for g in res.ignored_gauges],
        "reduced": None,
        "spectrum": None,
        "dof": None,
    }
    if res.reduced is not None:
        rs = res.reduced
        report["reduced"] = {
            "kept": list(rs.labels),
            "hamiltonian": [[_c(x) for x in row] for row in rs.H_red.hess],
            "hamiltonian_rank": int(np.linalg.matrix_rank(rs.H_red.hess)) if rs.dim else 0,
            "gram_det_abs": res.gram_pfaffian,
        }
        report["spectrum"] = [
            {"kind": m.kind.value, "omega": _c(m.omega), "multiplicity": m.multiplicity, "order": m.order}
            for m in res.spectrum.modes
        ]
        report["dof"] = res.spectrum.dof_count
    return report


def render_report(report: dict) -> str:
    """Plain-text rendering; depends only on the JSON-level report."""
    out = [f"model: {report['model']}"]
    if report["params"]:
        out.append("params: " + ", ".join(f"{k}={format_scalar(complex(*v))}" for k, v in report["params"].items()))
    out.append(f"constraints: {report['n_fcc']} first-class, {report['n_scc']} second-class")
    for c in report["constraints"]:
        stage = "gauge" if c["stage"] < 0 else f"stage {c['stage']}"
        out.append(f"  {c['id']:>4}  {stage:<8} {c['class']:<7} {c['expression']}    [{c['origin']}]")
    for note in report["notes"]:
        out.append(f"  note: {note}")
    for g in report["ignored_gauges"]:
        out.append(f"  gauge ignored (system is purely second-class): {g} = 0")
    if report["status"] == "gauge_required":
        out.append(f"status: {report['n_fcc']} first-class constraint(s); supply --gauge")
        return "\n".join(out) + "\n"
    red = report["reduced"]
    out.append("reduced coordinates: " + ", ".join(red["kept"]))
    out.append(f"reduced Hamiltonian (Hessian, rank {red['hamiltonian_rank']}):")
    for row in red["hamiltonian"]:
        out.append("  " + "  ".join(f"{format_scalar(complex(*x), 6):>12}" for x in row))
    out.append(f"|Pf(C)| of second-class set: {red['gram_det_abs']:.6g}")
    out.append("spectrum:")
    out.append(f"  {'kind':<11}{'omega':>28}  mult  order")
    for m in report["spectrum"]:
        out.append(f"  {m['kind']:<11}{format_scalar(complex(*m['omega']), 10):>28}  {m['multiplicity']:>4}  {m['order']:>5}")
    out.append(f"DOF: {report['dof']}")
    return "\n".join(out) + "\n"


# --------------------------------------------------------------------------- commands


def cmd_analyze(args) -> int:
    L, file_gauges, params = resolve_model(args)
    res = analyze(L, _gauges(args, L, file_gauges), rel_tol=args.tol)
    report = build_report(args.model if args.model in zoo.MODELS else L.name, params, res)
    if args.json:
        sys.stdout.write(json.dumps(report, indent=1) + "\n")
    else:
        sys.stdout.write(render_report(report))
    if res.status == "gauge_required":
        sys.stderr.write(f"{res.n_fcc} first-class constraint(s); supply --gauge\n")
        return EXIT_GAUGE
    return EXIT_OK


def _parse_fixed(text: str | None) -> dict:
    out = {}
    for item in (text or "").split(","):
        if not item.strip():
            continue
        key, _, val = item.partition("=")
        if not val:
            raise DiracLadderError(f"--fixed entries are name=value, got {item!r}")
        out[key.strip()] = parse_complex(val)
    return out


def cmd_sweep(args) -> int:
    param, param2 = args.param, args.param2
    if args.complex_grid:
        param, param2 = "a0", "a1"
    axis1 = sweep.Axis(param, args.start, args.stop, args.points)
    axis2 = None
    if param2:
        axis2 = sweep.Axis(
            param2,
            args.start if args.start2 is None else args.start2,
            args.stop if args.stop2 is None else args.stop2,
            args.points if args.points2 is None else args.points2,
        )
    spec = sweep.SweepSpec(args.model, axis1, axis2, _parse_fixed(args.fixed))
    rows = sweep.run_sweep(spec, jobs=args.jobs)
    fmt = args.format or ("json" if args.out and args.out.endswith(".json") else "csv")
    text = sweep.to_json(rows) if fmt == "json" else sweep.to_csv(rows)
    if args.out:
        try:
            Path(args.out).write_text(text)
        except OSError as exc:
            raise DiracLadderError(f"cannot write {args.out}: {exc.strerror}") from None
        failed = sum(r.status.startswith("error") for r in rows)
        sys.stderr.write(f"wrote {len(rows)} rows to {args.out} ({failed} with errors)\n")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_verify(args) -> int:
    L, file_gauges, _ = resolve_model(args)
    res = analyze(L, _gauges(args, L, file_gauges), rel_tol=args.tol)
    if res.status == "gauge_required":
        sys.stderr.write(f"{res.n_fcc} first-class constraint(s); supply --gauge\n")
        return EXIT_GAUGE
    check = oracle.cross_check(res, time=args.time, dt=args.dt, fft_samples=args.fft_samples, seed=args.seed)
    verdict = lambda ok: "PASS" if ok else "FAIL"  # noqa: E731
    lines = [
        f"constraint drift: {check.constraint_drift:.3e}  {verdict(check.constraint_drift < 1e-8)}",
        f"energy drift:     {check.energy_drift:.3e}  {verdict(check.energy_drift < 1e-8)}",
        f"frequency bin:    {check.bin:.4f}",
        "fourier peaks:    " + (", ".join(f"{p:.3f}" for p, _ in check.peaks) or "none"),
        "engine omegas:    " + (", ".join(f"{w:.3f}" for w in check.engine_omegas) or "none"),
        f"peak matching:    {verdict(not check.unmatched_engine and not check.unmatched_peaks)}",
        verdict(check.passed),
    ]
    sys.stdout.write("\n".join(lines) + "\n")
    if args.csv:
        _write_trajectory(args, res)
    return EXIT_OK if check.passed else EXIT_ERROR


def _write_trajectory(args, res: Analysis) -> None:
    rng = np.random.default_rng(args.seed)
    surface = res.fixed if res.fixed is not None else res.ledger
    dim = 2 * res.lagrangian.n
    z0 = oracle.random_surface_point(surface, dim, rng)
    steps = int(round(args.time / args.dt))
    traj = oracle.evolve(oracle.flow_for(res), z0, args.dt, steps, surface)
    labels = res.lagrangian.phase_space.all_labels
    try:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(("t",) + labels)
            for t, z in zip(traj.times, traj.states):
                w.writerow([repr(float(t))] + [repr(float(x.real)) for x in z])
    except OSError as exc:
        raise DiracLadderError(f"cannot write {args.csv}: {exc.strerror}") from None


def cmd_zoo(args) -> int:
    for spec in zoo.MODELS.values():
        defaults = ", ".join(f"{k}={zoo.resolve_params(spec.name)[k]}" for k in spec.params)
        gauges = f"  default gauge: {','.join(spec.gauges)}" if spec.gauges else ""
        sys.stdout.write(f"{spec.name:<11} {spec.description}\n{'':<11} params: {defaults}{gauges}\n")
    return EXIT_OK


# --------------------------------------------------------------------------- parser


def _model_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("model", help="zoo model name or path to a JSON model file")
    p.add_argument("--a", type=parse_complex, help="anomaly parameter, e.g. 2 or 0.5+0.866i")
    p.add_argument("--a0", type=float, help="real part of a")
    p.add_argument("--a1", type=float, help="imaginary part of a")
    p.add_argument("--e", type=float, help="coupling")
    p.add_argument("--B", type=float, help="Chern-Simons / cranking strength")
    p.add_argument("--k", type=float, help="spring constant, Proca mass^2, or wavenumber (csm-mode)")
    p.add_argument("--gauge", action="append", help="gauge condition(s) as phase-space labels set to zero, e.g. A0")
    p.add_argument("--tol", type=float, default=None, help="relative rank tolerance")


class _Parser(argparse.ArgumentParser):
    # usage errors share exit code 1 with other errors; 2 is reserved for "gauge required"
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dirac-ladder", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="constraint analysis, reduced Hamiltonian and spectrum")
    _model_args(p)
    p.add_argument("--json", action="store_true", help="emit the report as JSON")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("sweep", help="parameter scan written as CSV (or JSON)")
    p.add_argument("--model", required=True, help="zoo model: " + ", ".join(zoo.MODELS))
    p.add_argument("--param", default="a")
    p.add_argument("--from", dest="start", type=float, required=True)
    p.add_argument("--to", dest="stop", type=float, required=True)
    p.add_argument("--points", type=int, default=50)
    p.add_argument("--param2")
    p.add_argument("--from2", dest="start2", type=float)
    p.add_argument("--to2", dest="stop2", type=float)
    p.add_argument("--points2", type=int)
    p.add_argument("--complex-grid", action="store_true", help="scan a0 x a1 (second axis via --from2/--to2)")
    p.add_argument("--fixed", help="comma-separated name=value pairs, e.g. e=1,a0=0.5")
    p.add_argument("--out", help="output file (default stdout)")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="cross-check the spectrum against exact time evolution")
    _model_args(p)
    p.add_argument("--time", type=float, default=100.0)
    p.add_argument("--dt", type=float, default=0.01)
    p.add_argument("--fft-samples", type=int, default=8192)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv", help="also write the trajectory to this CSV file")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("zoo", help="list built-in models")
    p.add_argument("action", nargs="?", choices=("list",), default="list")
    p.set_defaults(func=cmd_zoo)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    if getattr(args, "tol", None) is None and hasattr(args, "tol"):
        args.tol = default_tol()
    try:
        return args.func(args)
    except DiracLadderError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_ERROR
    except (OSError, ValueError, KeyError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
