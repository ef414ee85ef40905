"""Command-line interface: ``gausschan <command> [options]``.

Exit codes: 0 on success, 1 for usage or parse errors, 2 for domain errors
such as an unphysical channel or a non-affine network.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import capacity as cap
from .channel import CLASS_NAMES, channel_from_dict, classify, is_entanglement_breaking, new_channel
from .decompose import DEFAULT_S_T, EXACT, FiducialParams, decompose_fiducial, reconstruction_residual
from .errors import GaussChanError, ParseError
from .realize import (
    build_classical_signal,
    build_fiducial,
    build_single_quadrature_noise,
    build_thermal,
    channel_residual,
    extract_channel,
    network_from_json,
    network_to_json,
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _matrix(text, name):
    try:
        m = np.array(json.loads(text), dtype=float)
    except (ValueError, TypeError) as exc:
        raise ParseError(f"--{name}: not a JSON matrix ({exc})") from None
    return m


def _read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc.msg}", exc.lineno) from None


def _channel_from_file(path, tol):
    doc = _read_json(path)
    try:
        return channel_from_dict(doc, tol=tol)
    except (KeyError, TypeError) as exc:
        raise ParseError(f"{path}: channel needs 'X' and 'Y' entries ({exc})") from None


def load_channel(args):
    """Exactly one of ``--channel``, ``--fiducial`` or ``--x/--y``."""
    sources = [args.channel is not None, args.fiducial is not None, args.x is not None or args.y is not None]
    if sum(sources) != 1:
        raise ParseError("give exactly one channel source: --channel FILE, --fiducial TAU Y S, or --x and --y")
    if args.channel is not None:
        return _channel_from_file(args.channel, args.tol)
    if args.fiducial is not None:
        tau, y, s = args.fiducial
        f = FiducialParams(tau, y, s)
        return new_channel(f.X, f.Y, tol=args.tol)
    if args.x is None or args.y is None:
        raise ParseError("--x and --y must be given together")
    X, Y = _matrix(args.x, "x"), _matrix(args.y, "y")
    delta = None if args.delta is None else _matrix(args.delta, "delta")
    try:
        return new_channel(X, Y, delta, tol=args.tol)
    except GaussChanError:
        raise
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def _flatten(d, prefix=""):
    out = {}
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        elif isinstance(v, (list, tuple)) and v and isinstance(v[0], (list, tuple)):
            for i, row in enumerate(v):
                for j, x in enumerate(row):
                    out[f"{key}_{i}{j}"] = x
        elif isinstance(v, (list, tuple)):
            out[key] = ";".join(repr(x) for x in v)
        else:
            out[key] = v
    return out


def _csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow(["" if x is None else (repr(x) if isinstance(x, float) else x) for x in r])
    return buf.getvalue()


def emit(report, fmt, out):
    if fmt == "json":
        out.write(json.dumps(report, indent=2) + "\n")
    else:
        flat = _flatten(report)
        out.write(_csv(list(flat), [list(flat.values())]))


def cmd_classify(args, out):
    c = load_channel(args)
    k = classify(c, tol=args.tol)
    return {
        "class": k.tag,
        "name": CLASS_NAMES[k.tag],
        "tau": k.tau,
        "y": k.y,
        "T": k.T,
        "G": k.G,
        "entanglement_breaking": is_entanglement_breaking(c, tol=args.tol),
        "rank_x": c.rank_x,
        "rank_y": c.rank_y,
    }


def cmd_decompose(args, out):
    c = load_channel(args)
    d = decompose_fiducial(c, s_T=args.st, tol=args.tol)
    report = d.to_dict()
    if args.verify:
        report["residual"] = reconstruction_residual(c, d)
    return report


def cmd_capacity(args, out):
    c = load_channel(args)
    rep = cap.capacity_of_channel(c, args.nbar, s_T=args.st, seed=args.seed, starts=args.starts, tol=args.tol)
    report = rep.to_dict()
    if args.force_numerical:
        num = cap.numerical_one_shot(c, args.nbar, seed=args.seed, starts=args.starts, tol=args.tol)
        report["numerical"] = num.c_gauss
        report["gap"] = rep.c_gauss - num.c_gauss
    return report


def cmd_optimize(args, out):
    c = load_channel(args)
    return cap.numerical_one_shot(c, args.nbar, seed=args.seed, starts=args.starts, tol=args.tol).to_dict()


def cmd_bounds(args, out):
    c = load_channel(args)
    rep = cap.capacity_of_channel(c, args.nbar, s_T=args.st, seed=args.seed, starts=args.starts, tol=args.tol)
    d = decompose_fiducial(c, s_T=args.st, tol=args.tol)
    f = d.fiducial
    exact = d.limit == EXACT and f.tau != 0
    c_bar = cap.upper_bound_cbar(f, args.nbar) if exact else None
    report = {
        "c_gauss": rep.c_gauss,
        "regime": rep.regime,
        "n_thr": rep.n_thr,
        "c_bar": c_bar,
        "gap": None if c_bar is None else c_bar - rep.c_gauss,
        "gap_bound": cap.INV_LN2 if exact and f.tau > 0 and rep.regime == cap.CLOSED_FORM else None,
    }
    if exact and f.tau > 0:
        report["supplementary"] = cap.supplementary_bound(f, args.nbar, args.b)
        report["b"] = args.b
    return report


def cmd_region(args, out):
    rows = cap.region_rows(args.tau_range[0], args.tau_range[1], args.grid, args.nbar, args.s)
    if args.figure:
        from .plotting import plot_region

        plot_region(rows, args.figure, n_bar=args.nbar, s=args.s)
    header = ["tau", "y_min", "y_eb", "y_thr"]
    if args.format == "json":
        out.write(json.dumps([dict(zip(header, r)) for r in rows], indent=2) + "\n")
    else:
        out.write(_csv(header, rows))
    return None


_BUILDERS = {
    "thermal": (2, lambda p: build_thermal(*p)),
    "fiducial": (3, lambda p: build_fiducial(FiducialParams(*p))),
    "classical-signal": (1, lambda p: build_classical_signal(*p)),
    "single-quadrature-noise": (0, lambda p: build_single_quadrature_noise()),
}


def _build(spec):
    kind, _, rest = spec.partition(":")
    if kind not in _BUILDERS:
        raise ParseError(f"--build: unknown circuit {kind!r}; choose from {', '.join(_BUILDERS)}")
    n, make = _BUILDERS[kind]
    try:
        params = [float(x) for x in rest.split(",")] if rest else []
    except ValueError:
        raise ParseError(f"--build: bad parameter list {rest!r}") from None
    if len(params) != n:
        raise ParseError(f"--build {kind} takes {n} parameter(s), got {len(params)}")
    return kind, params, make(params)


def cmd_simulate(args, out):
    if (args.network is None) == (args.build is None):
        raise ParseError("give exactly one of --network FILE or --build SPEC")
    target = None
    if args.network is not None:
        try:
            with open(args.network) as fh:
                text = fh.read()
        except OSError as exc:
            raise ParseError(f"cannot read {args.network}: {exc.strerror}") from None
        net = network_from_json(text)
    else:
        kind, params, net = _build(args.build)
        if kind == "thermal":
            target = FiducialParams(params[0], params[1], 0.0).channel()
        elif kind == "fiducial":
            target = FiducialParams(*params).channel()
    if args.emit_network:
        out.write(network_to_json(net) + "\n")
        return None
    c = extract_channel(net, seed=args.seed)
    k = classify(c, tol=args.tol)
    report = {**c.to_dict(), "tau": c.tau, "y": c.y, "class": k.tag}
    if args.against is not None:
        target = _channel_from_file(args.against, args.tol)
    if target is not None:
        report["residual"] = channel_residual(c, target)
    return report


def build_parser():
    p = _Parser(prog="gausschan", description="Single-mode Gaussian channel analysis.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    common = _Parser(add_help=False)
    common.add_argument("--tol", type=float, default=None, help="residual tolerance (default: $GAUSSCHAN_TOL or 1e-9)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=("json", "csv"), default=None, help="json (default) or csv; region defaults to csv")

    chan = _Parser(add_help=False)
    chan.add_argument("--x", help="X as a JSON 2x2 array")
    chan.add_argument("--y", help="Y as a JSON 2x2 array")
    chan.add_argument("--delta", help="displacement as a JSON 2-vector")
    chan.add_argument("--channel", metavar="FILE", help='JSON file {"X": .., "Y": .., "delta": ..}')
    chan.add_argument("--fiducial", nargs=3, type=float, metavar=("TAU", "Y", "S"), help="fiducial channel parameters")
    chan.add_argument("--st", type=float, default=DEFAULT_S_T, help="truncation squeezing for rank-deficient limits")

    energy = _Parser(add_help=False)
    energy.add_argument("--nbar", type=float, required=True, help="mean input photon number")
    energy.add_argument("--starts", type=int, default=cap.DEFAULT_STARTS, help="optimizer multistart count")

    sp = sub.add_parser("classify", parents=[common, chan], help="canonical class, (tau, y, T, G)")
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("decompose", parents=[common, chan], help="fiducial decomposition")
    sp.add_argument("--verify", action="store_true", help="print the reconstruction residual")
    sp.set_defaults(func=cmd_decompose)

    sp = sub.add_parser("capacity", parents=[common, chan, energy], help="Gaussian capacity report")
    sp.add_argument("--force-numerical", action="store_true", help="also run the optimizer and print the gap")
    sp.set_defaults(func=cmd_capacity)

    sp = sub.add_parser("optimize", parents=[common, chan, energy], help="numerical one-shot optimum only")
    sp.set_defaults(func=cmd_optimize)

    sp = sub.add_parser("bounds", parents=[common, chan, energy], help="upper bounds and gap")
    sp.add_argument("--b", type=float, default=0.0, help="entropy term of the supplementary bound")
    sp.set_defaults(func=cmd_bounds)

    sp = sub.add_parser("region", parents=[common], help="(tau, y) region curves as CSV")
    sp.add_argument("--tau-range", nargs=2, type=float, default=(-2.0, 3.0), metavar=("MIN", "MAX"))
    sp.add_argument("--grid", type=int, default=101)
    sp.add_argument("--nbar", type=float, default=0.5)
    sp.add_argument("--s", type=float, default=0.0)
    sp.add_argument("--figure", metavar="PATH", help="also render the curves to an image file")
    sp.set_defaults(func=cmd_region)

    sp = sub.add_parser("simulate", parents=[common], help="extract the channel of an optical network")
    sp.add_argument("--network", metavar="FILE", help="network JSON file")
    sp.add_argument(
        "--build",
        metavar="SPEC",
        help="built-in circuit: thermal:TAU,Y | fiducial:TAU,Y,S | classical-signal:Y | single-quadrature-noise",
    )
    sp.add_argument("--against", metavar="FILE", help="expected channel JSON to compare with")
    sp.add_argument("--emit-network", action="store_true", help="print the network JSON instead of simulating")
    sp.set_defaults(func=cmd_simulate)
    return p


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report = args.func(args, out)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except GaussChanError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    if report is not None:
        emit(report, args.format or "json", out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
