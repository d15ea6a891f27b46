"""Turn aggregate sweep rows into a labeled errorbar figure.

One invocation renders one panel: a metric (energy efficiency or transmit
exposure) against one sweep axis, one line per scheme, error bars from the
standard-error columns. Closed-form schemes (b and d) are only meaningful
while the exposure budget stays at or below the per-antenna weight, so on
the budget-ratio axis their series are clipped to axis values <= 1.

Series-ordering sanity checks (the unconstrained solver should sit on top,
random-phase variants at the bottom) are returned as warning strings, not
raised: with few trials the orderings can flip by noise and a figure is
still worth having.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .reader import AggregateRow, read_aggregate

#: schemes whose correctness argument needs budget/weight <= 1
CLOSED_FORM_SCHEMES = ("b", "d")

SCHEME_LABELS = {
    "a": "aware: alternating",
    "b": "aware: closed form",
    "c": "aware: random phases",
    "d": "aware: closed form, random phases",
    "e": "unaware: alternating",
    "f": "unaware: random phases",
}

# one fixed style per scheme so figures stay comparable across runs:
# exposure-aware solid, unconstrained dashed, random-phase variants dotted
SCHEME_STYLES = {
    "a": dict(color="tab:blue", marker="o", linestyle="-"),
    "b": dict(color="tab:green", marker="s", linestyle="-"),
    "c": dict(color="tab:cyan", marker="^", linestyle=":"),
    "d": dict(color="tab:olive", marker="v", linestyle=":"),
    "e": dict(color="tab:red", marker="D", linestyle="--"),
    "f": dict(color="tab:purple", marker="x", linestyle="--"),
}
_FALLBACK_STYLE = dict(color="tab:gray", marker=".", linestyle="-")

PANELS = {
    "ee": ("mean_ee_bpj", "se_ee_bpj", "mean energy efficiency [bit/J]"),
    "exposure": ("mean_tx_exposure", "se_tx_exposure", "mean transmit exposure"),
}

AXIS_LABELS = {
    "budget_ratio": "exposure budget / weight",
    "ris_elements": "surface elements",
}

_CANONICAL = "abcdef"


@dataclass(frozen=True)
class FigureSpec:
    """Everything render() needs: inputs, output, panel, axis, series."""

    csv_paths: tuple[str, ...]
    out_path: str
    panel: str = "ee"
    axis: str = "budget_ratio"
    # scheme -> legend label; empty means "every scheme found in the data"
    series: dict[str, str] = field(default_factory=dict)
    title: str = ""

    def __post_init__(self) -> None:
        if not self.csv_paths:
            raise ValueError("csv_paths must name at least one file")
        if self.panel not in PANELS:
            raise ValueError(f"unknown panel {self.panel!r}, expected one of {sorted(PANELS)}")
        if self.axis not in AXIS_LABELS:
            raise ValueError(f"unknown axis {self.axis!r}, expected one of {sorted(AXIS_LABELS)}")


def _scheme_order(schemes) -> list[str]:
    known = [s for s in _CANONICAL if s in schemes]
    rest = sorted(s for s in schemes if s not in _CANONICAL)
    return known + rest


def collect_series(
    rows: list[AggregateRow], panel: str, axis: str, schemes: list[str]
) -> dict[str, tuple[list[float], list[float], list[float]]]:
    """Group rows into per-scheme (axis values, means, standard errors).

    Rows for other axes are ignored; closed-form schemes are clipped on the
    budget-ratio axis. Raises ValueError naming every requested scheme that
    ends up with no points, so a figure never quietly drops a series.
    """
    mean_col, se_col, _ = PANELS[panel]
    on_axis = [r for r in rows if r.axis == axis]
    if not on_axis:
        have = sorted({r.axis for r in rows})
        raise ValueError(f"no rows for axis {axis!r} (data has {have})")
    out: dict[str, tuple[list[float], list[float], list[float]]] = {}
    empty: list[str] = []
    for scheme in schemes:
        pts = sorted(
            (r.axis_value, getattr(r, mean_col), getattr(r, se_col))
            for r in on_axis
            if r.scheme == scheme
        )
        if scheme in CLOSED_FORM_SCHEMES and axis == "budget_ratio":
            pts = [p for p in pts if p[0] <= 1.0 + 1e-12]
        if not pts:
            empty.append(scheme)
            continue
        xs, ys, es = zip(*pts)
        out[scheme] = (list(xs), list(ys), list(es))
    if empty:
        raise ValueError(
            "scheme(s) with no plottable rows: " + ", ".join(empty)
            + f" (axis {axis!r}; budget ratios above 1 do not count for b/d)"
        )
    return out


def ordering_warnings(rows: list[AggregateRow], axis: str, schemes: list[str]) -> list[str]:
    """Check the expected mean-EE dominance pattern; report misses as text.

    Expected pointwise on shared axis values: e >= a >= c and e >= b.
    """
    try:
        series = collect_series(rows, "ee", axis, [s for s in schemes if s in "abce"])
    except ValueError:
        return []  # a partial scheme set is fine, the checks are best-effort
    warnings: list[str] = []
    for hi, lo in (("e", "a"), ("a", "c"), ("e", "b")):
        if hi not in series or lo not in series:
            continue
        xs_hi, ys_hi, _ = series[hi]
        xs_lo, ys_lo, _ = series[lo]
        shared = sorted(set(xs_hi) & set(xs_lo))
        for x in shared:
            top = ys_hi[xs_hi.index(x)]
            bot = ys_lo[xs_lo.index(x)]
            if top < bot:
                warnings.append(
                    f"ordering: mean EE of scheme {hi} < scheme {lo} at "
                    f"{axis}={x:g} ({top:.6g} < {bot:.6g})"
                )
    return warnings


def render(spec: FigureSpec) -> list[str]:
    """Write the figure for ``spec`` and return ordering warnings.

    The output file is only created once the data has fully validated, so a
    bad CSV never leaves a stale or partial image behind.
    """
    rows = read_aggregate(spec.csv_paths)
    if spec.series:
        schemes = _scheme_order(spec.series)
        labels = dict(spec.series)
    else:
        schemes = _scheme_order({r.scheme for r in rows if r.axis == spec.axis})
        labels = {s: SCHEME_LABELS.get(s, s) for s in schemes}
    series = collect_series(rows, spec.panel, spec.axis, schemes)
    warnings = ordering_warnings(rows, spec.axis, schemes)

    plt.rcParams["svg.hashsalt"] = "risee-plots"
    plt.rcParams["svg.fonttype"] = "none"  # keep label text greppable in the svg
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    try:
        for scheme in schemes:
            xs, ys, es = series[scheme]
            style = SCHEME_STYLES.get(scheme, _FALLBACK_STYLE)
            ax.errorbar(xs, ys, yerr=es, capsize=3, label=labels[scheme], **style)
        ax.set_xlabel(AXIS_LABELS[spec.axis])
        ax.set_ylabel(PANELS[spec.panel][2])
        ax.set_title(spec.title or f"{PANELS[spec.panel][2]} vs {AXIS_LABELS[spec.axis]}")
        ax.grid(True, alpha=0.4)
        ax.legend()
        fig.tight_layout()
        out = Path(spec.out_path)
        if out.suffix.lower() == ".svg":
            # drop the embedded timestamp so identical data gives identical bytes
            fig.savefig(out, metadata={"Date": None})
        else:
            fig.savefig(out)
    finally:
        plt.close(fig)
    return warnings
