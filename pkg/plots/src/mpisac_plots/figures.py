"""Figure builders and the deterministic save path.

Each builder takes parsed CSV rows and returns a matplotlib Figure.
Figures are built directly on matplotlib.figure.Figure, not through
pyplot, so there is no global figure registry and rerendering the same
input cannot pick up state from earlier calls.
"""

import csv
from dataclasses import dataclass
from pathlib import Path

import matplotlib
from matplotlib.figure import Figure

KINDS = ("fusion-curve", "comparison", "region")

REQUIRED_COLUMNS = {
    "fusion-curve": ("n", "exact", "approx", "best_exact", "opt_approx"),
    "comparison": ("p_sum", "seed", "scheme", "accuracy", "rate"),
    "region": ("mu", "rate", "accuracy"),
}

_SCHEME_ORDER = {"mpisac": 0, "isac-no-fusion": 1, "multi-radar": 2}

# SVG element ids are content hashes salted with a constant, and the
# Date field is dropped at save time, so rerenders are byte-identical.
_RC = {"svg.hashsalt": "mpisac-plots", "svg.fonttype": "path"}


class SchemaError(Exception):
    """The input CSV does not carry the columns the figure needs."""


@dataclass(frozen=True)
class FigureSpec:
    src: Path
    kind: str
    out: Path
    xlabel: str | None = None
    ylabel: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}")


def read_rows(path, kind: str) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise SchemaError(f"{path}: empty file, expected a CSV header row")
        missing = [c for c in REQUIRED_COLUMNS[kind]
                   if c not in reader.fieldnames]
        if missing:
            raise SchemaError(f"{path}: missing columns: {', '.join(missing)}")
        rows = list(reader)
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return rows


def _num(row: dict, col: str) -> float:
    try:
        return float(row[col])
    except (TypeError, ValueError):
        raise SchemaError(
            f"column {col!r}: expected a number, got {row[col]!r}")


def fusion_curve_figure(rows, xlabel=None, ylabel=None) -> Figure:
    """Accuracy against the vote threshold, marking the exact peak and
    the closed-form threshold (the two flag columns)."""
    pts = sorted((_num(r, "n"), _num(r, "exact"), _num(r, "approx"),
                  _num(r, "best_exact"), _num(r, "opt_approx"))
                 for r in rows)
    ns = [p[0] for p in pts]
    fig = Figure(figsize=(6.0, 4.0))
    ax = fig.subplots()
    ax.plot(ns, [p[1] for p in pts], marker="o", label="actual")
    ax.plot(ns, [p[2] for p in pts], marker="s", linestyle="--",
            label="mean-rate approximation")
    for n, exact, _, best, opt in pts:
        if opt:
            ax.axvline(n, color="tab:gray", linewidth=0.8, linestyle=":",
                       label=f"closed-form threshold n={n:g}")
        if best:
            ax.plot([n], [exact], marker="*", markersize=15,
                    linestyle="none", color="tab:red", zorder=5,
                    label=f"peak n={n:g}")
    ax.set_xticks(ns)
    ax.set_xlabel(xlabel or "vote threshold n")
    ax.set_ylabel(ylabel or "fused accuracy")
    ax.legend()
    fig.tight_layout()
    return fig


def comparison_figure(rows, xlabel=None, ylabel=None) -> Figure:
    """Accuracy and rate against the sum power budget, one series per
    scheme, mean over seeds with a min/max band. A single budget point
    degenerates to bars with min/max whiskers."""
    series: dict[str, dict[float, list[tuple[float, float]]]] = {}
    for r in rows:
        by = series.setdefault(r["scheme"], {})
        by.setdefault(_num(r, "p_sum"), []).append(
            (_num(r, "accuracy"), _num(r, "rate")))
    schemes = sorted(series, key=lambda s: (_SCHEME_ORDER.get(s, 99), s))
    psums = sorted({p for by in series.values() for p in by})

    fig = Figure(figsize=(6.0, 6.5))
    ax_acc, ax_rate = fig.subplots(2, 1, sharex=True)
    panels = ((ax_acc, 0), (ax_rate, 1))

    if len(psums) == 1:
        pos = range(len(schemes))
        for ax, idx in panels:
            means, err_lo, err_hi = [], [], []
            for s in schemes:
                vals = [v[idx] for v in series[s][psums[0]]]
                m = sum(vals) / len(vals)
                means.append(m)
                err_lo.append(m - min(vals))
                err_hi.append(max(vals) - m)
            ax.bar(pos, means, yerr=(err_lo, err_hi), capsize=4,
                   color=[f"C{i}" for i in range(len(schemes))],
                   tick_label=schemes)
        ax_rate.set_xlabel(xlabel or f"schemes at sum power {psums[0]:g} W")
    else:
        for s in schemes:
            by = series[s]
            xs = sorted(by)
            for ax, idx in panels:
                mean = [sum(v[idx] for v in by[x]) / len(by[x]) for x in xs]
                lo = [min(v[idx] for v in by[x]) for x in xs]
                hi = [max(v[idx] for v in by[x]) for x in xs]
                line, = ax.plot(xs, mean, marker="o", label=s)
                ax.fill_between(xs, lo, hi, alpha=0.2,
                                color=line.get_color())
        ax_acc.legend()
        ax_rate.set_xlabel(xlabel or "sum power budget (W)")
    ax_acc.set_ylabel("detection accuracy")
    ax_rate.set_ylabel(ylabel or "communication rate")
    fig.tight_layout()
    return fig


def region_figure(rows, xlabel=None, ylabel=None) -> Figure:
    """Accuracy against rate, non-dominated points joined by a
    staircase, dominated points greyed out, trade-off weights written
    at the two extremes."""
    pts = [(_num(r, "mu"), _num(r, "rate"), _num(r, "accuracy"))
           for r in rows]
    nd = [p for p in pts
          if not any(q[1] >= p[1] and q[2] >= p[2]
                     and (q[1] > p[1] or q[2] > p[2]) for q in pts)]
    dom = [p for p in pts if p not in nd]

    fig = Figure(figsize=(6.0, 4.5))
    ax = fig.subplots()
    if dom:
        ax.scatter([p[1] for p in dom], [p[2] for p in dom],
                   color="tab:gray", alpha=0.4, label="dominated")
    nd.sort(key=lambda p: (p[1], -p[2]))
    ax.step([p[1] for p in nd], [p[2] for p in nd], where="post",
            color="tab:blue", linewidth=1.2, label="Pareto frontier")
    ax.scatter([p[1] for p in nd], [p[2] for p in nd],
               color="tab:blue", zorder=3)
    # several weights can land on one extreme point; label the corner
    # with the weight that names it (smallest at max accuracy, largest
    # at max rate)
    for mu, rate, acc in {max(nd, key=lambda p: (p[2], -p[0])),
                          max(nd, key=lambda p: (p[1], p[0]))}:
        ax.annotate(f"mu = {mu:g}", (rate, acc),
                    textcoords="offset points", xytext=(6, 6))
    ax.set_xlabel(xlabel or "communication rate")
    ax.set_ylabel(ylabel or "detection accuracy")
    ax.legend()
    fig.tight_layout()
    return fig


_BUILDERS = {
    "fusion-curve": fusion_curve_figure,
    "comparison": comparison_figure,
    "region": region_figure,
}


def render(spec: FigureSpec, fmt: str | None = None, dpi: int = 150) -> Path:
    """Read the CSV, build the figure, write the image. fmt defaults to
    the output suffix, falling back to svg."""
    rows = read_rows(spec.src, spec.kind)
    if fmt is None:
        fmt = "png" if str(spec.out).lower().endswith(".png") else "svg"
    fig = _BUILDERS[spec.kind](rows, xlabel=spec.xlabel, ylabel=spec.ylabel)
    # a None metadata value suppresses the writer's default for that
    # key: the SVG date and the PNG software stamp would otherwise vary
    # across runs or versions
    meta = {"Date": None} if fmt == "svg" else {"Software": None}
    with matplotlib.rc_context(_RC):
        fig.savefig(spec.out, format=fmt, metadata=meta, dpi=dpi)
    return Path(spec.out)
