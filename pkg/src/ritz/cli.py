"""Command-line front end: ``ritz solve | study | benchmark``."""
from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from .basis import BASIS_NAMES, Sector
from .errors import (
    BasisSpecError,
    ConfigurationError,
    PotentialParseError,
    RitzError,
    UnknownReferenceError,
    UnsupportedPotentialError,
)
from .model import parse_potential
from .mpkernel import MIN_DIGITS
from .study import (
    agreement_digits,
    compute_levels,
    emit_csv,
    emit_svg,
    load_reference_file,
    parse_csv,
    reference_for,
    run_study,
)

EXIT_OK, EXIT_FAILURE, EXIT_USAGE = 0, 1, 2

# errors caused by what the user typed rather than by the computation
_USAGE_ERRORS = (PotentialParseError, BasisSpecError, ConfigurationError,
                 UnsupportedPotentialError, UnknownReferenceError)

_SECTORS = {"even": (Sector.EVEN,), "odd": (Sector.ODD,), "both": (Sector.EVEN, Sector.ODD)}


def parse_n_range(text: str) -> list[int]:
    """``"40"``, ``"4..50"`` or ``"4..50:2"``."""
    text = str(text).strip()
    try:
        if ".." not in text:
            return [int(text)]
        lo, rest = text.split("..", 1)
        hi, _, step = rest.partition(":")
        values = list(range(int(lo), int(hi) + 1, int(step) if step else 1))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad N range {text!r}") from exc
    if not values or min(values) < 1:
        raise argparse.ArgumentTypeError(f"bad N range {text!r}")
    return values


def _basis_list(text: str) -> list[str]:
    names = [b.strip() for b in str(text).split(",") if b.strip()]
    for b in names:
        if b not in BASIS_NAMES and not (b.startswith("s") and b[1:].isdigit() and int(b[1:]) >= 1):
            raise argparse.ArgumentTypeError(f"unknown basis {b!r}")
    if not names:
        raise argparse.ArgumentTypeError("empty basis list")
    return names


def _precision(text: str) -> int:
    try:
        d = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"precision must be an integer, got {text!r}") from exc
    if d < MIN_DIGITS:
        raise argparse.ArgumentTypeError(f"precision must be >= {MIN_DIGITS}")
    return d


def read_config(path: str) -> dict[str, str]:
    """``key = value`` lines; '#' comments; keys use flag spelling (dashes or underscores)."""
    out = {}
    for num, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"{path}:{num}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value.strip("\"'")
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ritz", description="Rayleigh-Ritz eigenvalues with asymptotically matched bases")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="key = value file merged under explicit flags")
        sp.add_argument("--potential", "-p", help='polynomial, e.g. "x^4-5*x^2" or "i*x^3"')
        sp.add_argument("--precision", type=_precision, default=60, help="base working digits (default 60)")
        sp.add_argument("--scale", default="1", help="harmonic-oscillator length scale (default 1)")
        sp.add_argument("--sector", choices=sorted(_SECTORS), default="both")
        sp.add_argument("--states", type=int, default=4)

    s = sub.add_parser("solve", help="print the lowest eigenvalues for one basis size")
    common(s)
    s.add_argument("--basis", type=_basis_list, default=["auto"])
    s.add_argument("--n", type=parse_n_range, required=False, default=None)
    s.add_argument("--digits", type=int, default=None, help="printed digits (default: self-consistency estimate)")
    s.add_argument("--format", choices=("text", "csv"), default="text")

    st = sub.add_parser("study", help="logarithmic errors over a range of basis sizes")
    common(st)
    st.add_argument("--basis", type=_basis_list, default=["auto"])
    st.add_argument("--n", type=parse_n_range, default=None)
    st.add_argument("--csv", help="CSV output path (one file per basis when several are given)")
    st.add_argument("--svg", help="SVG output path")
    st.add_argument("--reference", help="file with reference eigenvalues, one per line")
    st.add_argument("--overlay", action="append", default=[], metavar="LABEL=CSV",
                    help="extra CSV series to draw (not computed here)")
    st.add_argument("--workers", type=int, default=1)
    st.add_argument("--stamp", action="store_true", help="write a timestamp into the SVG")
    st.add_argument("--format", choices=("text", "csv", "svg"), default="text")

    b = sub.add_parser("benchmark", help="reproduce the published benchmarks; PASS/FAIL per criterion")
    b.add_argument("--criteria", default="1,2,3,4,5", help='comma list or "all" (6-8 are slow)')
    b.add_argument("--verbose", "-v", action="store_true")
    return p


def _parse(argv):
    parser = build_parser()
    args = parser.parse_args(argv)
    cfg_path = getattr(args, "config", None)
    if cfg_path:
        try:
            cfg = read_config(cfg_path)
        except OSError as exc:
            parser.error(f"cannot read config: {exc}")
        sub = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest: a for a in sub._actions}
        defaults = {}
        for key, raw in cfg.items():
            if key not in known:
                parser.error(f"unknown config key {key!r}")
            action = known[key]
            try:
                defaults[key] = action.type(raw) if action.type else raw
            except argparse.ArgumentTypeError as exc:
                parser.error(f"config {key}: {exc}")
        sub.set_defaults(**defaults)
        args = parser.parse_args(argv)
    if args.command in ("solve", "study"):
        if not args.potential:
            parser.error("--potential is required")
        if args.n is None:
            parser.error("--n is required")
        if args.states < 1:
            parser.error("--states must be positive")
    return parser, args


def _cmd_solve(args, out) -> int:
    V = parse_potential(args.potential)
    N = args.n[-1]
    sectors = _SECTORS[args.sector]
    for basis in args.basis:
        lv = compute_levels(V, basis, N, args.states, args.precision, scale=args.scale, sectors=sectors)
        prev = None
        if N > 1:
            prev = compute_levels(V, basis, N - 1, args.states, args.precision, scale=args.scale,
                                  sectors=sectors, start_digits=lv.ctx.decimal_digits)
        ctx = lv.ctx
        if args.format == "csv":
            out.write("state,N,eigenvalue,digits\n")
        else:
            out.write(f"# V = {V.to_expr()}  basis = {basis}  N = {N}  working digits = {ctx.decimal_digits}\n")
        for n, e in enumerate(lv.values):
            est = lv.certified_digits
            if prev is not None:
                est = min(est, agreement_digits(e, prev.values[n], ctx))
            shown = max(args.digits if args.digits else est, 1)
            text = ctx.mp.nstr(e, shown, strip_zeros=False)
            if args.format == "csv":
                out.write(f"{n},{N},{text},{est}\n")
            else:
                out.write(f"E{n} = {text}   ({est} digits)\n")
    return EXIT_OK


def _split_output(path: str, basis: str, multi: bool) -> str:
    if not multi:
        return path
    p = Path(path)
    return str(p.with_name(f"{p.stem}_{basis}{p.suffix}"))


def _cmd_study(args, out) -> int:
    V = parse_potential(args.potential)
    reference = load_reference_file(args.reference) if args.reference else reference_for(V)
    if reference is None:
        raise ConfigurationError(f"no built-in reference for {V.to_expr()}; pass --reference")
    series = {}
    multi = len(args.basis) > 1
    for basis in args.basis:
        records = run_study(V, basis, args.n, args.states, args.precision, reference=reference,
                            scale=args.scale, workers=args.workers, label=basis)
        series[basis] = records
        if args.csv:
            emit_csv(records, _split_output(args.csv, basis, multi))
        if args.format == "csv" and not args.csv:
            out.write(emit_csv(records))
        elif args.format == "text":
            for rec in records:
                tail = rec.rows[-1]
                out.write(f"{basis} state {rec.state}: L_N = "
                          + " ".join(f"{r.N}:{float(r.log10_error):.2f}" for r in rec.rows)
                          + f"   (E at N={tail.N}: {tail.eigenvalue.context.nstr(tail.eigenvalue, 20)})\n")
    for item in args.overlay:
        label, _, path = item.partition("=")
        if not path:
            raise ConfigurationError(f"--overlay expects LABEL=CSV, got {item!r}")
        series[label] = parse_csv(path, label=label)
    if args.svg:
        stamp = time.strftime("%Y-%m-%d %H:%M:%S") if args.stamp else None
        emit_svg(series, args.svg, title=f"V(x) = {V.to_expr()}", stamp=stamp)
    return EXIT_OK


def _cmd_benchmark(args, out) -> int:
    from .benchmark import CRITERIA

    if args.criteria.strip() == "all":
        numbers = sorted(CRITERIA)
    else:
        try:
            numbers = [int(x) for x in args.criteria.split(",") if x.strip()]
        except ValueError:
            raise ConfigurationError(f"bad criteria list {args.criteria!r}") from None
        bad = [n for n in numbers if n not in CRITERIA]
        if bad:
            raise ConfigurationError(f"unknown criteria {bad}")
    all_ok = True
    for n in numbers:
        res = CRITERIA[n]()
        all_ok &= res.passed
        out.write(res.line() + "\n")
        if args.verbose or not res.passed:
            for d in res.details:
                out.write(f"    {d}\n")
        out.flush()
    return EXIT_OK if all_ok else EXIT_FAILURE


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        _, args = _parse(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        if args.command == "solve":
            return _cmd_solve(args, out)
        if args.command == "study":
            return _cmd_study(args, out)
        return _cmd_benchmark(args, out)
    except _USAGE_ERRORS as exc:
        sys.stderr.write(f"ritz: usage error[{exc.category}]: {exc}\n")
        return EXIT_USAGE
    except RitzError as exc:
        sys.stderr.write(f"ritz: error[{exc.category}]: {exc}\n")
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
