"""Convergence studies: eigenvalues versus basis size and their logarithmic errors.

L_N = log10 |E_n(N) - E_n(ref)|, with the complex modulus for the
non-Hermitian harmonic-oscillator runs.
"""
from __future__ import annotations

import csv
import io
import os
from collections.abc import Iterable, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .assemble import assemble_spec
from .basis import Sector, specs_for
from .eigen import Spectrum, auto_precision_solve
from .errors import ConfigurationError, RitzError, UnknownReferenceError
from .model import Potential, parse_potential
from .mpkernel import (
    PrecisionContext,
    context_for_repr,
    format_number,
    format_real,
    parse_number,
    parse_real,
    split_complex,
    with_precision,
)

CSV_HEADER = ["state", "N", "eigenvalue", "log10_error"]

# Published benchmark eigenvalues, digits verbatim.
REFERENCES: dict[str, tuple[str, tuple[str, ...]]] = {
    "V_Q": ("x^4-5*x^2", (
        "-3.410142761239829475297709653521909198712339047564881868937911775329611301715294",
        "-3.2506753622892359802285137755477368771546011476394241429953014335680690809034749688022953825298",
        "0.638919563783838124491010103332504264852401329058137207433367771840730088316019330941500824",
        "2.5812162706174514809779380656962090234197947974759598949291704975284539346710703866627200928172",
    )),
    "V_S": ("x^6-4*x^2", (
        "-0.523268622127552239416169497190784061165634222518711069953854385633821213450649003542309",
        "1.00576834022554481670604083074777604686886504417542730471341100873617568288708176003637",
        "5.374970008840044994060514769418235325821754311501338177585996687355671683247232390293",
        "10.572585044585912113906061555314011464842213880057529217715660995992776130576146017312",
    )),
    "IX3": ("i*x^3", (
        "1.156267071988113293799219177999951",
        "4.1092287528096515358436684785613",
        "7.5622738549788280413518091106314827208",
        "11.314421820195804402233783948426989",
    )),
}


class StudyError(RitzError):
    def __init__(self, N: int, cause: RitzError):
        self.N = N
        self.cause = cause
        self.category = cause.category
        super().__init__(f"N={N}: {cause}")


@dataclass(frozen=True)
class ReferenceEigenvalues:
    potential_id: str
    values: tuple[str, ...]
    expression: str | None = None

    def __len__(self):
        return len(self.values)

    def value(self, n: int, ctx: PrecisionContext):
        return parse_real(self.values[n], ctx)

    def significant_digits(self, n: int) -> int:
        s = self.values[n].lstrip("+-").replace(".", "").lstrip("0")
        return len(s)


def reference_table(potential_id: str) -> ReferenceEigenvalues:
    key = potential_id.upper()
    if key not in REFERENCES:
        raise UnknownReferenceError(f"no reference eigenvalues for {potential_id!r}; known: {sorted(REFERENCES)}")
    expr, values = REFERENCES[key]
    return ReferenceEigenvalues(key, values, expr)


def reference_for(V: Potential) -> ReferenceEigenvalues | None:
    for key, (expr, _) in REFERENCES.items():
        if parse_potential(expr) == V:
            return reference_table(key)
    return None


def load_reference_file(path: str | os.PathLike, potential_id: str = "external") -> ReferenceEigenvalues:
    """One decimal eigenvalue per line; blank lines and '#' comments ignored."""
    vals = []
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            parse_real(line, with_precision(30))  # validate
            vals.append(line)
    if not vals:
        raise ConfigurationError(f"reference file {path} holds no values")
    return ReferenceEigenvalues(potential_id, tuple(vals))


@dataclass
class Row:
    N: int
    eigenvalue: object
    log10_error: object


@dataclass
class ConvergenceRecord:
    state: int
    rows: list[Row] = field(default_factory=list)
    label: str = ""

    def add(self, row: Row) -> None:
        if self.rows and row.N <= self.rows[-1].N:
            raise ValueError("rows must be strictly increasing in N")
        self.rows.append(row)

    @property
    def Ns(self) -> list[int]:
        return [r.N for r in self.rows]


@dataclass
class Levels:
    """Lowest eigenvalues of one (potential, basis, N) solve."""

    N: int
    values: list
    ctx: PrecisionContext
    certified_digits: int
    spectra: list[Spectrum] = field(default_factory=list)


def compute_levels(V: Potential, basis: str, N: int, states: int, base_digits: int = 60, *,
                   scale=1, sectors: Sequence[Sector] = (Sector.EVEN, Sector.ODD),
                   start_digits: int | None = None, literal_indices: bool = False) -> Levels:
    """Solve every block for ``V`` in the named basis and return the lowest levels.

    Parity-split runs are merged by value into global quantum numbers.  On
    the complex path only eigenvalues flagged real are returned; spurious
    complex-conjugate pairs of the truncated matrix are skipped.
    """
    specs = specs_for(V, basis, N, sectors=tuple(sectors), scale=scale, literal_indices=literal_indices)
    spectra = []
    for spec in specs:
        spectra.append(auto_precision_solve(
            lambda ctx, spec=spec: assemble_spec(V, spec, ctx), N, base_digits,
            start_digits=start_digits, vectors=False,
        ))
    ctx = with_precision(max(s.digits for s in spectra))
    values = []
    for s in spectra:
        for e in s.real_levels():
            values.append(ctx.complex(e.real, e.imag) if s.is_complex else ctx.real(e))
    if any(s.is_complex for s in spectra):
        values.sort(key=lambda e: (e.real, e.imag))
    else:
        values.sort()
    if len(values) < states:
        raise ConfigurationError(f"only {len(values)} levels available at N={N}, {states} requested")
    return Levels(N, values[:states], ctx, min(s.certified_digits for s in spectra), spectra)


def log_error(value, ref, ctx: PrecisionContext):
    """log10 |value - ref|, floored at the working precision."""
    mp = ctx.mp
    diff = abs(value - ref)
    floor = mp.mpf(10) ** (-ctx.decimal_digits) * max(1, abs(ref))
    return mp.log10(max(diff, floor))


def agreement_digits(a, b, ctx: PrecisionContext) -> int:
    """Significant decimal digits on which ``a`` and ``b`` agree."""
    mp = ctx.mp
    diff = abs(a - b)
    if diff == 0:
        return ctx.decimal_digits
    scale = max(abs(a), abs(b), mp.mpf(10) ** (-ctx.decimal_digits))
    return max(0, min(ctx.decimal_digits, int(mp.floor(-mp.log10(diff / scale)))))


def _task(expr, basis, N, states, base_digits, scale, start_digits):
    V = parse_potential(expr)
    lv = compute_levels(V, basis, N, states, base_digits, scale=scale, start_digits=start_digits)
    return N, [format_number(v, lv.ctx) for v in lv.values], lv.ctx.decimal_digits


def run_study(V: Potential, basis: str, n_values: Iterable[int], states: int,
              base_digits: int = 60, *, reference: ReferenceEigenvalues | Sequence[str] | None = None,
              scale=1, workers: int = 1, label: str | None = None) -> list[ConvergenceRecord]:
    """Logarithmic-error records (one per state) for every N in ``n_values``."""
    n_values = sorted(set(n_values))
    if not n_values:
        raise ConfigurationError("empty N range")
    if reference is None:
        reference = reference_for(V)
        if reference is None:
            raise UnknownReferenceError(f"no built-in reference for {V}; supply one")
    if not isinstance(reference, ReferenceEigenvalues):
        reference = ReferenceEigenvalues("external", tuple(str(v) for v in reference))
    if states > len(reference):
        raise ConfigurationError(f"{states} states requested, reference has {len(reference)}")

    results: dict[int, tuple[list[str], int]] = {}
    if workers > 1:
        expr = V.to_expr()
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = {N: pool.submit(_task, expr, basis, N, states, base_digits, scale, None) for N in n_values}
            for N, fut in futures.items():
                try:
                    _, vals, digits = fut.result()
                except RitzError as exc:
                    raise StudyError(N, exc) from exc
                results[N] = (vals, digits)
    else:
        start = None
        for N in n_values:
            try:
                lv = compute_levels(V, basis, N, states, base_digits, scale=scale, start_digits=start)
            except RitzError as exc:
                raise StudyError(N, exc) from exc
            # conditioning only grows with N, so later sizes start where this one ended
            start = lv.ctx.decimal_digits
            results[N] = ([format_number(v, lv.ctx) for v in lv.values], start)

    ctx = with_precision(max(d for _, d in results.values()))
    records = [ConvergenceRecord(n, label=label or basis) for n in range(states)]
    for N in n_values:
        vals, _ = results[N]
        for n, text in enumerate(vals):
            e = parse_number(text, ctx)
            records[n].add(Row(N, e, log_error(e, reference.value(n, ctx), ctx)))
    return records


# output ----------------------------------------------------------------------

def _ctx_of(x) -> PrecisionContext:
    return with_precision(x.context.dps)


def emit_csv(records: Sequence[ConvergenceRecord], path: str | os.PathLike | None = None) -> str:
    """Write ``state,N,eigenvalue,log10_error`` rows; returns the CSV text."""
    rows = [(rec.state, r) for rec in records for r in rec.rows]
    if not rows:
        raise ConfigurationError("no convergence rows to write")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for state, r in sorted(rows, key=lambda t: (t[0], t[1].N)):
        ctx = _ctx_of(r.eigenvalue)
        w.writerow([state, r.N, format_number(r.eigenvalue, ctx), format_real(r.log10_error, _ctx_of(r.log10_error))])
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text


def parse_csv(source: str | os.PathLike, *, text: str | None = None, label: str = "") -> list[ConvergenceRecord]:
    """Inverse of :func:`emit_csv`; values come back at the precision they were written with."""
    content = text if text is not None else Path(source).read_text()
    reader = csv.reader(io.StringIO(content))
    header = next(reader, None)
    if header != CSV_HEADER:
        raise ConfigurationError(f"unexpected CSV header {header!r}")
    by_state: dict[int, ConvergenceRecord] = {}
    for line in reader:
        if not line:
            continue
        state, N, ev, err = line
        e = parse_number(ev, context_for_repr(split_complex(ev)[0]))
        L = parse_real(err, context_for_repr(err))
        rec = by_state.setdefault(int(state), ConvergenceRecord(int(state), label=label))
        rec.add(Row(int(N), e, L))
    return [by_state[k] for k in sorted(by_state)]


# markers: s1 open red squares, s2 filled green squares, s3 open blue circles.
_STYLES = {
    "s1": dict(marker="s", color="red", mfc="none"),
    "s2": dict(marker="s", color="green"),
    "s3": dict(marker="o", color="blue", mfc="none"),
    "ho": dict(marker="s", color="red", mfc="none"),
}
_FALLBACK = [dict(marker="o", color="blue", mfc="none"), dict(marker="^", color="purple"),
             dict(marker="D", color="orange", mfc="none"), dict(marker="v", color="black")]


def emit_svg(series: dict[str, Sequence[ConvergenceRecord]], path: str | os.PathLike,
             title: str | None = None, stamp: str | None = None) -> None:
    """One panel per state, one line per labelled series; deterministic SVG output."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    series = {k: v for k, v in series.items() if v and any(r.rows for r in v)}
    if not series:
        raise ConfigurationError("no convergence records to plot")
    states = sorted({rec.state for recs in series.values() for rec in recs})
    ncols = 2 if len(states) > 1 else 1
    nrows = (len(states) + ncols - 1) // ncols
    with matplotlib.rc_context({"svg.hashsalt": "ritz", "svg.fonttype": "none"}):
        fig, axes = plt.subplots(nrows, ncols, figsize=(5.5 * ncols, 4 * nrows), squeeze=False)
        fallback = iter(_FALLBACK * 4)
        styles = {lab: _STYLES.get(lab) or next(fallback) for lab in series}
        for ax, state in zip(axes.flat, states):
            for lab, recs in series.items():
                for rec in recs:
                    if rec.state != state:
                        continue
                    xs = [r.N for r in rec.rows]
                    ys = [float(r.log10_error) for r in rec.rows]
                    ax.plot(xs, ys, linestyle="-", linewidth=0.8, markersize=4, label=lab,
                            gid=f"series-{lab}-n{state}", **styles[lab])
            ax.set_gid(f"panel-n{state}")
            ax.set_xlabel("N")
            ax.set_ylabel("$L_N$")
            ax.set_title(f"n = {state}")
            ax.grid(alpha=0.3)
            ax.legend(fontsize=8)
        for ax in list(axes.flat)[len(states):]:
            ax.set_visible(False)
        if title:
            fig.suptitle(title)
        if stamp:
            fig.text(0.99, 0.01, stamp, ha="right", va="bottom", fontsize=6)
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
