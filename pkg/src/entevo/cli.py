"""Command-line entry point: ``entevo verify | scenario | scan | channel``.

Exit codes: 0 when every check passes, 1 when a check fails, 2 for usage or
configuration errors (including unreadable or malformed input files).
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import channels as chn
from . import evolution as ev
from . import scenarios as sc
from .concurrence import RoofBudget, iconcurrence_pure, wootters_concurrence
from .states import DensityMatrix, PureState, load_state

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

log = logging.getLogger("entevo")


class UsageError(Exception):
    pass


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _write(path: Path, text: str) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}") from None


# --- verify ---------------------------------------------------------------

VERIFY_ALL = ("theorem", "corollary", "bounds", "two-sided")


def _suite_summary(name: str, reports: list[ev.EvolutionReport]) -> dict:
    gaps = np.array([r.gap for r in reports])
    out = {
        "suite": name,
        "cases": len(reports),
        "passed": sum(r.passed for r in reports),
        "pass": all(r.passed for r in reports),
        "max_abs_gap": float(np.max(np.abs(gaps))),
    }
    if reports[0].kind == "upper-bound":
        out["min_slack"] = float(np.min(-gaps))
    residuals = [r.extras["matrix_residual"] for r in reports if "matrix_residual" in r.extras]
    if residuals:
        out["max_matrix_residual"] = float(max(residuals))
    out["methods"] = sorted({r.method for r in reports})
    return out


def _retolerance(reports, tol):
    for r in reports:
        fresh = ev.make_report(r.predicted, r.direct, r.method, kind=r.kind, tol=tol)
        r.tolerance, r.passed = fresh.tolerance, fresh.passed


def cmd_verify(args) -> int:
    names = VERIFY_ALL if args.suite == "all" else (args.suite,)
    doc = {"seed": args.seed, "suites": []}
    ok = True
    for name in names:
        reports = ev.run_suite(name, args.cases, args.seed)
        if args.tolerance is not None:
            _retolerance(reports, args.tolerance)
        summary = _suite_summary(name, reports)
        ok &= summary["pass"]
        summary["reports"] = [r.to_dict() for r in reports]
        doc["suites"].append(summary)
        if args.format == "text":
            line = (f"{name}: {summary['passed']}/{summary['cases']} passed, "
                    f"max |gap| = {sc.fmt(summary['max_abs_gap'])}")
            if "min_slack" in summary:
                line += f", min slack = {sc.fmt(summary['min_slack'])}"
            print(line)
    doc["pass"] = bool(ok)
    if args.format == "json":
        sys.stdout.write(_dump(doc))
    if args.out:
        _write(Path(args.out), _dump(doc))
    return EXIT_OK if ok else EXIT_FAIL


# --- scenario -------------------------------------------------------------

def _w_params(args) -> sc.WStateParams:
    if args.beta is None and args.gamma is None:
        alpha = 1 / math.sqrt(3) if args.alpha is None else args.alpha
        return sc.WStateParams.symmetric_slice(alpha)
    if None in (args.alpha, args.beta, args.gamma):
        raise UsageError("give --alpha alone (symmetric slice) or all of --alpha --beta --gamma")
    return sc.WStateParams(args.alpha, args.beta, args.gamma)


def _t_grid(args, default_max):
    t_max = default_max if args.t_max is None else args.t_max
    if t_max <= 0 or args.points < 2:
        raise UsageError("--t-max must be > 0 and --points >= 2")
    return np.linspace(0.0, t_max, args.points)


def cmd_scenario(args) -> int:
    name = args.name
    if name == "w-dephasing":
        grid = sc.w_dephasing_scan(_w_params(args), _t_grid(args, 2.0))
        summary = sc.w_dephasing_summary(grid)
    elif name == "w-gad":
        p = 0.5 if args.p is None else args.p
        grid = sc.w_gad_scan(sc.default_alpha_grid(args.points), _t_grid(args, 2.0), p)
        search = None if args.no_tau_search else sc.tau_max_search(p)
        summary = sc.w_gad_summary(grid, p, search)
    elif name == "nmr":
        g1 = 1.0 if args.g1 is None else args.g1
        g2 = 2.0 if args.g2 is None else args.g2
        if not g2 >= g1 > 0:
            raise UsageError("nmr needs --g2 >= --g1 > 0")
        grid = sc.nmr_scenario(_t_grid(args, 10.0 / g1), g1, g2)
        summary = sc.nmr_summary(grid)
    else:
        if args.seed is None:
            raise UsageError("scenario xstate is randomized: --seed is required")
        grid, summary = sc.xstate_scan(args.cases, args.seed)
    stem = name.replace("-", "_")
    if args.out:
        out = Path(args.out)
        _write(out / f"{stem}.csv", grid.to_csv())
        _write(out / f"{stem}.json", _dump(summary))
    if args.format == "csv":
        sys.stdout.write(grid.to_csv())
    else:
        sys.stdout.write(_dump({k: v for k, v in summary.items() if k != "extrema"}))
    return EXIT_OK if summary["pass"] else EXIT_FAIL


# --- scan -----------------------------------------------------------------

def cmd_scan(args) -> int:
    """Image concurrence and purity of a named qubit channel vs gamma_t."""
    ts = _t_grid(args, 2.0)
    p = 0.5 if args.p is None else args.p
    rows = []
    for t in ts:
        ch = chn.phase_noise(t) if args.channel == "phase_noise" else chn.generalized_amplitude_damping(t, p)
        image = chn.channel_image(ch)
        rows.append([t, wootters_concurrence(image), image.purity()])
    grid = sc.ScanGrid([sc.make_axis("gamma_t", ts)], ["gamma_t", "image_concurrence", "image_purity"],
                       np.array(rows))
    text = grid.to_csv()
    if args.out:
        _write(Path(args.out), text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# --- channel --------------------------------------------------------------

def _need(value, flag, what):
    if value is None:
        raise UsageError(f"channel {what} needs {flag}")
    return value


def _resolve_channel(args) -> chn.KrausChannel:
    kind = args.kind
    if kind == "phase_noise":
        return chn.phase_noise(_need(args.gamma_t, "--gamma-t", kind))
    if kind == "gad":
        return chn.generalized_amplitude_damping(_need(args.gamma_t, "--gamma-t", kind),
                                                 0.5 if args.p is None else args.p)
    if kind == "relaxation":
        return chn.relaxation_filter(_need(args.g1, "--g1", kind), _need(args.g2, "--g2", kind))
    if kind == "random":
        seed = _need(args.seed, "--seed", kind)
        return chn.random_channel(args.dim, args.kraus, seed)
    path = args.path or args.file_path
    if path is None:
        raise UsageError("channel file needs a path")
    return chn.load_channel(path)


def _image_concurrence(image: DensityMatrix) -> tuple[float, str]:
    if image.dims == (2, 2):
        return wootters_concurrence(image), "wootters-exact"
    return ev.direct_concurrence(image, RoofBudget(seed=0))


def cmd_channel(args) -> int:
    ch = _resolve_channel(args)
    image, prob = chn.channel_image(ch, return_probability=True)
    c, method = _image_concurrence(image)
    print(f"kraus_operators: {ch.n_kraus}")
    print(f"dims: {ch.dim_in} -> {ch.dim_out}")
    print(f"trace_preserving: {str(ch.trace_preserving).lower()}")
    print(f"tp_residual: {sc.fmt(ch.tp_residual())}")
    print(f"image_concurrence: {c:.6f} ({method})")
    print(f"image_purity: {image.purity():.6f}")
    if not ch.trace_preserving:
        print(f"image_probability: {prob:.6f}")
    if args.state:
        state = load_state(args.state)
        if not isinstance(state, PureState):
            raise UsageError("--state must hold a pure state (amps_re/amps_im)")
        report = ev.verify_factorization(state, ch, budget=RoofBudget(seed=0))
        print(f"state_concurrence: {iconcurrence_pure(state):.6f}")
        print(f"evolved_predicted: {report.predicted:.6f}")
        print(f"evolved_direct: {report.direct:.6f} ({report.method})")
        print(f"gap: {sc.fmt(report.gap)}")
        return EXIT_OK if report.passed else EXIT_FAIL
    return EXIT_OK


# --- parser ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="entevo", description=__doc__.splitlines()[0])
    parser.add_argument("--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="seeded property sweeps of the evolution laws")
    v.add_argument("suite", choices=ev.SUITES + ("all",))
    v.add_argument("--cases", type=int, required=True)
    v.add_argument("--seed", type=int, required=True)
    v.add_argument("--tolerance", type=float, default=None,
                   help="override the tolerance for exact methods")
    v.add_argument("--out", help="write the JSON report here")
    v.add_argument("--format", choices=("text", "json"), default="text")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("scenario", help="reproduce a worked application")
    s.add_argument("name", choices=("w-dephasing", "w-gad", "nmr", "xstate"))
    s.add_argument("--alpha", type=float)
    s.add_argument("--beta", type=float)
    s.add_argument("--gamma", type=float)
    s.add_argument("--p", type=float)
    s.add_argument("--g1", type=float)
    s.add_argument("--g2", type=float)
    s.add_argument("--t-max", type=float)
    s.add_argument("--points", type=int, default=201)
    s.add_argument("--cases", type=int, default=500)
    s.add_argument("--seed", type=int)
    s.add_argument("--no-tau-search", action="store_true")
    s.add_argument("--out", help="directory for <name>.csv and <name>.json")
    s.add_argument("--format", choices=("json", "csv"), default="json",
                   help="what to print on stdout")
    s.set_defaults(func=cmd_scenario)

    c = sub.add_parser("scan", help="channel-image concurrence vs gamma_t as CSV")
    c.add_argument("channel", choices=("phase_noise", "gad"))
    c.add_argument("--p", type=float)
    c.add_argument("--t-max", type=float)
    c.add_argument("--points", type=int, default=201)
    c.add_argument("--out")
    c.set_defaults(func=cmd_scan)

    ch = sub.add_parser("channel", help="inspect a channel")
    ch.add_argument("kind", choices=("phase_noise", "gad", "relaxation", "random", "file"))
    ch.add_argument("file_path", nargs="?", help="JSON channel file (kind 'file' only)")
    ch.add_argument("--path", help="JSON channel file, same as the positional form")
    ch.add_argument("--gamma-t", type=float)
    ch.add_argument("--p", type=float)
    ch.add_argument("--g1", type=float)
    ch.add_argument("--g2", type=float)
    ch.add_argument("--dim", type=int, default=2)
    ch.add_argument("--kraus", type=int, default=2)
    ch.add_argument("--seed", type=int)
    ch.add_argument("--state", help="pure-state JSON to evolve through the channel")
    ch.set_defaults(func=cmd_channel)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    if args.command == "channel" and args.file_path is not None and args.kind != "file":
        parser.error("a positional path is only accepted by 'channel file'")
    try:
        return args.func(args)
    except (UsageError, ValueError) as exc:
        print(f"entevo: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
