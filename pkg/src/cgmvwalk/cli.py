"""
Command-line front end.

    cgmvwalk simulate --type I --alpha 0.5,0 --steps 20 --out dist.csv
    cgmvwalk spectrum --seq null-odd:0.5,0 --grid 2048 --out measure.json
    cgmvwalk limit-measure --type II --b 0.5,0 --range 4
    cgmvwalk localization --type II --raster 41 --out raster.csv
    cgmvwalk verify --correspondence --alpha 0.5,0 --dim 64
    cgmvwalk compare --type II --b 0.5,0 --out report.json

Every subcommand accepts ``--config FILE`` (``key = value`` lines, keys are
flag names; command-line flags win) and writes a manifest next to ``--out``
(or to stderr).  Exit codes: 0 ok, 2 bad configuration or input, 3 a
numerical invariant failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from .cmv import parse_seq
from .coin import (
    canonical_coin,
    coin_for_a,
    coin_for_b,
    identity_coin,
    load_coin,
    validate_coin,
    verblunsky_a,
    WalkType,
)
from .errors import CGMVError, ConfigError, NumericalError
from .experiments import RETURN_THRESHOLD, compare_report
from .limits import LimitParamsI, LimitParamsII, localizes_I, localizes_II, theorem1_mass, theorem3_mass
from .opuc import laurent_basis
from .spectral import RadialLimitConfig, spectral_measure
from .walk import FROZEN_CONVENTION, correspondence_residual, distribution, initial_state, step

COMMANDS = ("simulate", "spectrum", "limit-measure", "localization", "verify", "compare")

COLUMNS = {
    "simulate": ["t", "x", "y", "P"],
    "spectrum": ["kind", "theta", "value"],
    "polys": ["index", "exponent", "re", "im"],
    "limit-measure": ["x", "y", "mass"],
    "localization-I": ["x", "y", "localizes_I"],
    "localization-II": ["x", "y", "paper_region", "mass_criterion"],
    "verify": ["convention", "residual"],
}

TOLERANCES = {
    "unitarity": 1e-12,
    "paper_class": 1e-10,
    "zero_test": 1e-12,
    "atom_threshold": RadialLimitConfig().tau_atom,
    "return_threshold": RETURN_THRESHOLD,
    "correspondence_fit": 1e-6,
}

CONVENTIONS = {
    "type_i_edges": "reflect",
    "type_ii_origin": "norm-preserving split",
    "sqrt_delta_branch": "principal",
    "sgn_zero": 0,
    "basis_order": "1, 1/z, z, 1/z^2, z^2, ...",
    "moment_identity": "int z^t x_l conj(x_m) dmu",
    "rotation_rule": "moment_t(rotated) = exp(-i t w) moment_t",
    "radii": "1 - 2^-k, k = 4..14, Richardson order 1",
    "correspondence_winner": FROZEN_CONVENTION.label(),
}

_NUM = {"type": "number"}
_PAIR = {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2}

SCHEMAS = {
    "spectrum": {
        "type": "object",
        "required": ["weight", "atoms", "total"],
        "properties": {
            "weight": {"type": "array", "items": _PAIR},
            "atoms": {"type": "array", "items": _PAIR},
            "total": _NUM,
        },
    },
    "table": {
        "type": "object",
        "required": ["columns", "rows"],
        "properties": {
            "columns": {"type": "array", "items": {"type": "string"}},
            "rows": {"type": "array", "items": {"type": "array"}},
        },
    },
    "compare": {
        "type": "object",
        "required": ["type", "parameter", "spectrum", "limits", "half_line", "quarter_plane", "verdicts"],
        "properties": {
            "type": {"enum": ["I", "II"]},
            "parameter": _PAIR,
            "spectrum": {"type": "object", "required": ["atoms", "atom_total", "total"]},
            "verdicts": {"type": "object", "required": ["atoms", "predicate", "half_line", "quarter_plane"]},
        },
    },
    "manifest": {
        "type": "object",
        "required": ["tool", "version", "command", "config", "conventions", "tolerances", "timestamp"],
        "properties": {"timestamp": {"type": "string"}, "config": {"type": "object"}},
    },
}


# -- serialization ----------------------------------------------------------


def _num(x: float) -> str:
    if not math.isfinite(x):
        raise NumericalError(f"non-finite number {x!r} in output")
    s = format(x, ".17g")
    return s if any(c in s for c in ".en") else s + ".0"


def dumps(obj, indent: int = 1, _level: int = 0) -> str:
    """JSON with every float written to 17 significant digits."""
    pad = "\n" + " " * (indent * (_level + 1))
    end = "\n" + " " * (indent * _level)
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _num(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return dumps([obj.real, obj.imag], indent, _level)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [json.dumps(str(k)) + ": " + dumps(v, indent, _level + 1) for k, v in obj.items()]
        return "{" + pad + ("," + pad).join(items) + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in seq) + "]"
        return "[" + pad + ("," + pad).join(dumps(v, indent, _level + 1) for v in seq) + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return _num(float(v))
    return str(v)


def csv_text(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_cell(v) for v in r])
    return buf.getvalue()


def plot_text(columns, rows) -> str:
    lines = ["# " + " ".join(columns)]
    for r in rows:
        lines.append(" ".join(_cell(int(v) if isinstance(v, (bool, np.bool_)) else v) for v in r))
    return "\n".join(lines) + "\n"


def validate_output(kind: str, text: str, fmt: str = "json", columns=None) -> None:
    """Schema check of an emitted artifact; raises on mismatch."""
    if fmt == "json":
        jsonschema.validate(json.loads(text), SCHEMAS[kind])
        return
    rows = list(csv.reader(io.StringIO(text)))
    if columns is not None and rows[0] != list(columns):
        raise ValueError(f"CSV header {rows[0]} != {columns}")
    width = len(rows[0])
    if any(len(r) != width for r in rows[1:]):
        raise ValueError("ragged CSV rows")


# -- argument parsing -------------------------------------------------------


def _pair(text: str) -> complex:
    try:
        re_, im_ = (float(v) for v in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected RE,IM, got {text!r}") from exc
    return complex(re_, im_)


def _reals(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated reals, got {text!r}") from exc


def _complexes(text: str) -> tuple[complex, ...]:
    try:
        return tuple(complex(v.strip().replace(" ", "")) for v in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated complex numbers, got {text!r}") from exc


def _common(p: argparse.ArgumentParser, out: bool = True, fmt: bool = True) -> None:
    p.add_argument("--config", help="key = value file; command-line flags override it")
    p.add_argument("--seed", type=int, default=0, help="seed recorded in the manifest")
    p.add_argument("--manifest", help="manifest path (default: OUT.manifest.json, or stderr)")
    if out:
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--emit-plot-data", dest="emit_plot_data", help="also write gnuplot-ready columns here")
    if fmt:
        p.add_argument("--format", choices=("json", "csv"), default=None)


def _coin_args(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("--coin", help="coin JSON file or 'identity'")
    g.add_argument("--alpha", type=_pair, help="canonical coin C(alpha), as RE,IM")
    g.add_argument("--a", type=_pair, help="coin realizing Type I parameter a")
    g.add_argument("--b", type=_pair, help="coin and phases realizing Type II parameter b")
    p.add_argument("--gamma", type=_reals, default=None, help="Type II phases g1,g2")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cgmvwalk", description="CMV matrices, spectral measures and quarter-plane quantum walks")
    ap.add_argument("--version", action="version", version=f"cgmvwalk {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a Type I/II walk, emit (t, x, y, P)")
    _common(p)
    p.add_argument("--type", default="I")
    _coin_args(p)
    p.add_argument("--steps", type=int, default=10)
    p.add_argument("--coin-state", dest="coin_state", type=_complexes, default=None)
    p.add_argument("--edge", choices=("reflect", "stay"), default="reflect")
    p.add_argument("--all-times", dest="all_times", action="store_true", help="emit every t, not just the last")
    p.add_argument("--min-prob", dest="min_prob", type=float, default=1e-15)

    p = sub.add_parser("spectrum", help="spectral measure of a Verblunsky sequence")
    _common(p)
    p.add_argument("--seq", required=True, help="null-odd:RE,IM | null-even:RE,IM | const:RE,IM | zero")
    p.add_argument("--grid", type=int, default=2048)
    p.add_argument("--dim", type=int, default=8, help="number of basis functions for --dump-polys")
    p.add_argument("--kmax", type=int, default=14, help="innermost radius 1 - 2^-kmax")
    p.add_argument("--dump-polys", dest="dump_polys", help="write Laurent coefficient table (CSV)")

    p = sub.add_parser("limit-measure", help="closed-form limit masses on [0, K]^2")
    _common(p)
    p.add_argument("--type", default="I")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--a", type=_pair)
    g.add_argument("--b", type=_pair)
    p.add_argument("--coin-state", dest="coin_state", type=_complexes, default=(1, 0, 0, 0))
    p.add_argument("--theta", type=float, default=0.0)
    p.add_argument("--parity", choices=("even", "odd"), default="even")
    p.add_argument("--range", dest="range_", type=int, default=4)

    p = sub.add_parser("localization", help="predicate raster over the unit disk")
    _common(p)
    p.add_argument("--type", default="II")
    p.add_argument("--raster", type=int, default=21)
    p.add_argument("--coin-state", dest="coin_state", type=_complexes, default=(1, 0, 0, 0))
    p.add_argument("--theta", type=float, default=0.0)

    p = sub.add_parser("verify", help="walk/CMV correspondence residuals")
    _common(p)
    p.add_argument("--correspondence", action="store_true", required=True)
    p.add_argument("--type", default="I")
    _coin_args(p)
    p.add_argument("--dim", type=int, default=64)

    p = sub.add_parser("compare", help="spectrum vs. simulation vs. predicates")
    _common(p, fmt=False)
    p.add_argument("--type", default="II")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--a", type=_pair)
    g.add_argument("--b", type=_pair)
    p.add_argument("--sites", type=int, default=4)
    return ap


def read_config(path) -> list[tuple[str, str]]:
    """``key = value`` pairs; blank lines and ``#`` comments ignored."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    pairs = []
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{n}: expected key = value")
        k, v = (s.strip() for s in line.split("=", 1))
        pairs.append((k.replace("_", "-"), v))
    return pairs


def _config_argv(parser: argparse.ArgumentParser, command: str, pairs) -> list[str]:
    sub = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction)).choices[command]
    flags = {}
    for act in sub._actions:
        for opt in act.option_strings:
            flags[opt] = act
    argv = []
    for k, v in pairs:
        opt = "--" + k
        if opt not in flags or opt in ("--config", "--help"):
            raise ConfigError(f"unknown config key {k!r} for {command}")
        act = flags[opt]
        if act.nargs == 0:
            if v.lower() in ("1", "true", "yes", "on"):
                argv.append(opt)
            elif v.lower() not in ("0", "false", "no", "off"):
                raise ConfigError(f"config key {k!r} expects a boolean")
        else:
            argv += [opt, v]
    return argv


def parse_args(argv=None) -> argparse.Namespace:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    args = parser.parse_args(argv)
    if args.config:
        extra = _config_argv(parser, args.command, read_config(args.config))
        # config first so explicit flags override
        args = parser.parse_args([args.command] + extra + argv[argv.index(args.command) + 1 :])
    return args


def _threads() -> int:
    raw = os.environ.get("CGMV_THREADS")
    if raw is None:
        return min(4, os.cpu_count() or 1)
    try:
        n = int(raw)
    except ValueError as exc:
        raise ConfigError(f"CGMV_THREADS must be an integer, got {raw!r}") from exc
    if n < 1:
        raise ConfigError("CGMV_THREADS must be >= 1")
    return n


# -- commands ---------------------------------------------------------------


def _resolve_coin(args, kind):
    gamma = tuple(args.gamma) if args.gamma else (0.0, 0.0)
    if args.alpha is not None:
        return canonical_coin(args.alpha), gamma
    if args.a is not None:
        return coin_for_a(args.a), gamma
    if args.b is not None:
        coin, g = coin_for_b(args.b)
        return coin, (gamma if args.gamma else g)
    if args.coin in (None, "identity"):
        return identity_coin(), gamma
    return load_coin(args.coin), gamma


def cmd_simulate(args):
    kind = WalkType.parse(args.type)
    coin, gamma = _resolve_coin(args, kind)
    if args.steps < 0:
        raise ConfigError("--steps must be >= 0")
    cs = args.coin_state or ((1, 0, 0, 0) if kind is WalkType.I else (0, 0))
    if kind is WalkType.II:
        cs = tuple(float(c.real) for c in cs)
    st = initial_state(kind, cs, args.steps + 4)
    rows = []
    for t in range(args.steps + 1):
        if args.all_times or t == args.steps:
            P = distribution(st)
            xs, ys = np.nonzero(P > args.min_prob)
            order = np.lexsort((ys, xs))
            rows += [[t, int(xs[i]), int(ys[i]), float(P[xs[i], ys[i]])] for i in order]
        if t < args.steps:
            st = step(st, coin, gamma, args.edge)
    return "table", COLUMNS["simulate"], rows, None


def cmd_spectrum(args):
    seq = parse_seq(args.seq)
    cfg = RadialLimitConfig(kmax=args.kmax)
    mu = spectral_measure(seq, args.grid, cfg)
    if args.dump_polys:
        basis = laurent_basis(seq, args.dim)
        prow = []
        for j, poly in enumerate(basis.polys):
            for k, c in poly.as_dict().items():
                prow.append([j, k, c.real, c.imag])
        _write(args.dump_polys, csv_text(COLUMNS["polys"], prow))
    rows = [["weight", float(t), float(w)] for t, w in zip(mu.theta, mu.weight)]
    rows += [["atom", t, m] for t, m in mu.atoms]
    return "spectrum", COLUMNS["spectrum"], rows, mu.to_dict()


def cmd_limit_measure(args):
    kind = WalkType.parse(args.type)
    K = args.range_
    if K < 0:
        raise ConfigError("--range must be >= 0")
    rows = []
    if kind is WalkType.I:
        if args.a is None:
            raise ConfigError("Type I needs --a")
        cs = np.asarray(args.coin_state, dtype=complex)
        p = LimitParamsI(args.a, args.theta, tuple(cs / np.linalg.norm(cs)))
        for x in range(K + 1):
            for y in range(K + 1):
                rows.append([x, y, theorem1_mass(p, x, y)])
    else:
        if args.b is None:
            raise ConfigError("Type II needs --b")
        p = LimitParamsII(args.b)
        for x in range(K + 1):
            for y in range(K + 1):
                rows.append([x, y, theorem3_mass(p, x, y, args.parity)])
    return "table", COLUMNS["limit-measure"], rows, None


def _raster_row(kind, xs, y, cs, theta):
    out = []
    for x in xs:
        z = complex(x, y)
        if not abs(z) < 1:
            continue
        if kind is WalkType.I:
            out.append([float(x), float(y), localizes_I(cs, z, theta)])
        else:
            region, crit = localizes_II(z)
            out.append([float(x), float(y), region, crit])
    return out


def cmd_localization(args):
    kind = WalkType.parse(args.type)
    N = args.raster
    if N < 2:
        raise ConfigError("--raster must be >= 2")
    grid = -1.0 + (2.0 * np.arange(N) + 1.0) / N
    cs = np.asarray(args.coin_state, dtype=complex)
    cs = tuple(cs / np.linalg.norm(cs))
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        chunks = list(pool.map(lambda y: _raster_row(kind, grid, y, cs, args.theta), grid))
    rows = [r for c in chunks for r in c]
    if kind is WalkType.II:
        dis = sum(1 for r in rows if r[2] != r[3])
        print(f"raster {N}x{N}: {len(rows)} points in the disk, {dis} where the region formula and M(b) > 0 disagree", file=sys.stderr)
        return "table", COLUMNS["localization-II"], rows, None
    return "table", COLUMNS["localization-I"], rows, None


def cmd_verify(args):
    kind = WalkType.parse(args.type)
    coin, gamma = _resolve_coin(args, kind)
    rep = correspondence_residual(kind, coin, gamma, args.dim)
    rows = [[label, r] for label, r in rep.rows]
    lines = [f"{label:<45s} {r:.3e}" for label, r in rep.rows]
    lines.append(f"best: {rep.best.label()}  residual {rep.best_residual:.3e}  parameter {rep.parameter.real:.17g},{rep.parameter.imag:.17g}")
    lines.append(f"verdict: {rep.verdict} (tolerance {rep.tol:g})")
    print("\n".join(lines), file=sys.stderr)
    return "table", COLUMNS["verify"], rows, None


def cmd_compare(args):
    kind = WalkType.parse(args.type)
    p = args.a if kind is WalkType.I else args.b
    if p is None:
        raise ConfigError(f"Type {kind.value} needs --{'a' if kind is WalkType.I else 'b'}")
    return "compare", None, None, compare_report(kind, p, args.sites)


HANDLERS = {
    "simulate": cmd_simulate,
    "spectrum": cmd_spectrum,
    "limit-measure": cmd_limit_measure,
    "localization": cmd_localization,
    "verify": cmd_verify,
    "compare": cmd_compare,
}


# -- driver -----------------------------------------------------------------


def _write(path, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8", newline="\n")


def _resolved_config(args) -> dict:
    out = {}
    for k, v in sorted(vars(args).items()):
        if k in ("config",):
            continue
        if isinstance(v, complex):
            v = [v.real, v.imag]
        elif isinstance(v, tuple):
            v = [[c.real, c.imag] if isinstance(c, complex) else c for c in v]
        out[k.rstrip("_")] = v
    return out


def manifest(args, outputs) -> dict:
    return {
        "tool": "cgmvwalk",
        "version": __version__,
        "command": args.command,
        "config": _resolved_config(args),
        "config_file": args.config,
        "conventions": CONVENTIONS,
        "tolerances": TOLERANCES,
        "columns": {k: v for k, v in COLUMNS.items()},
        "outputs": outputs,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }


def run(args) -> int:
    kind, columns, rows, payload = HANDLERS[args.command](args)
    fmt = getattr(args, "format", None)
    if fmt is None:
        fmt = "csv" if (args.out or "").endswith(".csv") else "json"
    if kind == "compare":
        fmt = "json"
    if fmt == "json":
        data = payload if payload is not None else {"columns": columns, "rows": rows}
        text = dumps(data) + "\n"
        validate_output("table" if payload is None else kind, text)
    else:
        text = csv_text(columns, rows)
        validate_output(kind, text, "csv", columns)
    outputs = []
    if args.out:
        _write(args.out, text)
        outputs.append(args.out)
    else:
        sys.stdout.write(text)
    plot = getattr(args, "emit_plot_data", None)
    if plot:
        if columns is None:
            raise ConfigError("--emit-plot-data is not available for this command")
        _write(plot, plot_text(columns, rows))
        outputs.append(plot)
    man = dumps(manifest(args, outputs)) + "\n"
    validate_output("manifest", man)
    target = args.manifest or (args.out + ".manifest.json" if args.out else None)
    if target:
        _write(target, man)
    else:
        sys.stderr.write(man)
    return 0


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
        return run(args)
    except NumericalError as exc:
        print(f"cgmvwalk: numerical invariant failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except (CGMVError, ValueError, OSError, jsonschema.ValidationError) as exc:
        print(f"cgmvwalk: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
