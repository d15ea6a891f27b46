"""Monte Carlo sweeps over exposure budget or RIS size, with CSV output.

The design is paired: at a given (axis value, trial index) every scheme sees
the same channel draw, so scheme differences are isolated from sampling
noise.  Trial seeds derive from (master_seed, axis_index, trial), phase seeds
for the random-phase schemes from the same tuple with a sub-stream index.

Two CSV shapes are emitted, both UTF-8 with LF endings, '.' decimals, and
floats printed via repr (shortest round-trip form):

trial rows
    scheme,axis,axis_value,trial,seed,channel_hash,ee_bpj,rate_bps,
    tx_exposure,rx_exposure,tx_power_w,iterations,wall_time_s
aggregate rows
    scheme,axis,axis_value,trials,mean_ee_bpj,se_ee_bpj,mean_tx_exposure,
    se_tx_exposure,mean_rx_exposure,se_rx_exposure

Everything except wall_time_s is a pure function of the sweep spec, so two
runs of the same spec agree byte for byte once that column is dropped.
"""

from __future__ import annotations

import concurrent.futures
import dataclasses
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from . import algorithms, channel, model

AXIS_BUDGET = "budget_ratio"
AXIS_ELEMENTS = "ris_elements"

TRIAL_HEADER = (
    "scheme,axis,axis_value,trial,seed,channel_hash,ee_bpj,rate_bps,"
    "tx_exposure,rx_exposure,tx_power_w,iterations,wall_time_s"
)
AGGREGATE_HEADER = (
    "scheme,axis,axis_value,trials,mean_ee_bpj,se_ee_bpj,mean_tx_exposure,"
    "se_tx_exposure,mean_rx_exposure,se_rx_exposure"
)


@dataclass(frozen=True)
class TrialRecord:
    scheme: str
    axis: str
    axis_value: float
    trial: int
    seed: int
    channel_hash: str
    ee_bpj: float
    rate_bps: float
    tx_exposure: float
    rx_exposure: float
    tx_power_w: float
    iterations: int
    wall_time_s: float


@dataclass(frozen=True)
class AggregateRow:
    scheme: str
    axis: str
    axis_value: float
    trials: int
    mean_ee_bpj: float
    se_ee_bpj: float
    mean_tx_exposure: float
    se_tx_exposure: float
    mean_rx_exposure: float
    se_rx_exposure: float


@dataclass(frozen=True)
class SkippedTrial:
    scheme: str
    axis_value: float
    trial: int
    error: str


@dataclass(frozen=True, eq=False)
class SweepTable:
    """All trial records plus their per-(scheme, axis value) aggregates."""

    records: List[TrialRecord]
    rows: List[AggregateRow]
    skipped: List[SkippedTrial]


@dataclass(frozen=True)
class SweepSpec:
    """One sweep: which axis moves, what stays fixed, and how many trials.

    axis is 'budget_ratio' (exposure budget over weight, same ratio applied
    at both ends) or 'ris_elements'.  fixed_value carries the other quantity.
    params acts as a template; its exposure budgets are recomputed per point
    from the ratio and the isotropic weights coeff_c, coeff_d.
    """

    axis: str
    axis_values: Tuple[float, ...]
    fixed_value: float
    schemes: Tuple[str, ...]
    trials: int
    master_seed: int
    params: model.SystemParams
    n_tx: int = 4
    n_rx: int = 4
    coeff_c: float = 0.25
    coeff_d: float = 0.25
    los_mean_h: complex = 2.0 + 0.0j
    los_mean_g: complex = 2.0 + 0.0j
    nlos_variance: float = 1.0
    opts: algorithms.AlternatingOptions = algorithms.AlternatingOptions()

    def __post_init__(self):
        if self.axis not in (AXIS_BUDGET, AXIS_ELEMENTS):
            raise ValueError(f"axis must be {AXIS_BUDGET!r} or {AXIS_ELEMENTS!r}")
        values = tuple(float(v) for v in self.axis_values)
        if len(values) < 1 or any(b <= a for a, b in zip(values, values[1:])):
            raise ValueError("axis_values must be non-empty and strictly increasing")
        if any(v <= 0 for v in values):
            raise ValueError("axis_values must be positive")
        object.__setattr__(self, "axis_values", values)
        schemes = tuple(self.schemes)
        for s in schemes:
            if s not in algorithms.SCHEMES:
                raise ValueError(f"unknown scheme {s!r}")
        if len(set(schemes)) != len(schemes):
            raise ValueError("schemes must not repeat")
        object.__setattr__(self, "schemes", schemes)
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.n_tx < 1 or self.n_rx < 1:
            raise ValueError("antenna counts must be positive")
        if self.coeff_c <= 0 or self.coeff_d <= 0:
            raise ValueError("sweeps use isotropic exposure weights, which must be positive")
        if self.fixed_value <= 0:
            raise ValueError("fixed_value must be positive")

    def point(self, axis_value: float) -> Tuple[int, float]:
        """(n_ris, budget_ratio) at one axis position."""
        if self.axis == AXIS_BUDGET:
            return int(round(self.fixed_value)), float(axis_value)
        return int(round(axis_value)), float(self.fixed_value)


def _params_at(spec: SweepSpec, ratio: float) -> model.SystemParams:
    return dataclasses.replace(
        spec.params,
        tx_exposure_budget=ratio * spec.coeff_c,
        rx_exposure_budget=ratio * spec.coeff_d,
    )


def _scheme_allowed(scheme: str, ratio: float) -> bool:
    # the closed-form solvers only exist where the exposure cap implies the
    # norm cap; those schemes are skipped, not failed, elsewhere
    if scheme in ("b", "d"):
        return ratio <= 1.0
    return True


def _run_cell(
    spec: SweepSpec, axis_i: int, trial: int
) -> Tuple[List[TrialRecord], List[SkippedTrial]]:
    axis_value = spec.axis_values[axis_i]
    n_ris, ratio = spec.point(axis_value)
    params = _params_at(spec, ratio)
    coeffs = model.ExposureCoefficients.isotropic(
        spec.coeff_c, spec.coeff_d, spec.n_tx, spec.n_rx
    )
    cmodel = channel.ChannelModel(
        rician_mean_h=spec.los_mean_h,
        rician_mean_g=spec.los_mean_g,
        scatter_variance=spec.nlos_variance,
        dims=(n_ris, spec.n_tx, spec.n_rx),
    )
    seed = channel.derive_seed(spec.master_seed, axis_i, trial)
    phase_seed = channel.derive_seed(spec.master_seed, axis_i, trial, 1)
    pair = channel.sample(cmodel, seed)
    digest = channel.channel_digest(pair)

    records: List[TrialRecord] = []
    skipped: List[SkippedTrial] = []
    for scheme in spec.schemes:
        if not _scheme_allowed(scheme, ratio):
            continue
        try:
            run = algorithms.run_scheme(
                scheme, params, pair, coeffs, spec.opts, phase_seed=phase_seed
            )
        except Exception as exc:  # record and move on; one bad cell must not kill the sweep
            skipped.append(SkippedTrial(scheme, axis_value, trial, repr(exc)))
            continue
        records.append(
            TrialRecord(
                scheme=scheme,
                axis=spec.axis,
                axis_value=axis_value,
                trial=trial,
                seed=seed,
                channel_hash=digest,
                ee_bpj=run.result.ee_bits_per_joule,
                rate_bps=run.result.rate_bps,
                tx_exposure=run.result.tx_exposure,
                rx_exposure=run.result.rx_exposure,
                tx_power_w=run.config.tx_power_w,
                iterations=run.iterations,
                wall_time_s=run.wall_time_s,
            )
        )
    return records, skipped


def _stderr(values: np.ndarray) -> float:
    if values.size < 2:
        return 0.0
    return float(np.std(values, ddof=1) / np.sqrt(values.size))


def aggregate(spec: SweepSpec, records: Sequence[TrialRecord]) -> List[AggregateRow]:
    """Deterministic fold of trial records into per-cell means and standard errors."""
    cells: Dict[Tuple[str, float], List[TrialRecord]] = {}
    for rec in records:
        cells.setdefault((rec.scheme, rec.axis_value), []).append(rec)
    rows: List[AggregateRow] = []
    for scheme in spec.schemes:
        for axis_value in spec.axis_values:
            cell = cells.get((scheme, float(axis_value)))
            if not cell:
                continue
            cell = sorted(cell, key=lambda r: r.trial)
            ee = np.array([r.ee_bpj for r in cell])
            tx = np.array([r.tx_exposure for r in cell])
            rx = np.array([r.rx_exposure for r in cell])
            rows.append(
                AggregateRow(
                    scheme=scheme,
                    axis=spec.axis,
                    axis_value=float(axis_value),
                    trials=len(cell),
                    mean_ee_bpj=float(np.mean(ee)),
                    se_ee_bpj=_stderr(ee),
                    mean_tx_exposure=float(np.mean(tx)),
                    se_tx_exposure=_stderr(tx),
                    mean_rx_exposure=float(np.mean(rx)),
                    se_rx_exposure=_stderr(rx),
                )
            )
    return rows


def run_sweep(
    spec: SweepSpec,
    threads: int = 1,
    progress=None,
) -> SweepTable:
    """Run every (axis value, trial, scheme) cell and aggregate.

    threads > 1 fans the (axis value, trial) cells over a thread pool; record
    order and aggregates are identical for any pool width because assembly
    sorts by (axis index, trial, scheme position).  progress, if given, is
    called with a line of text after each axis value completes.
    """
    jobs = [(ai, t) for ai in range(len(spec.axis_values)) for t in range(spec.trials)]
    results: Dict[Tuple[int, int], Tuple[List[TrialRecord], List[SkippedTrial]]] = {}
    if threads <= 1:
        for ai, t in jobs:
            results[(ai, t)] = _run_cell(spec, ai, t)
    else:
        with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
            futures = {pool.submit(_run_cell, spec, ai, t): (ai, t) for ai, t in jobs}
            for fut in concurrent.futures.as_completed(futures):
                results[futures[fut]] = fut.result()

    records: List[TrialRecord] = []
    skipped: List[SkippedTrial] = []
    for ai in range(len(spec.axis_values)):
        for t in range(spec.trials):
            recs, skips = results[(ai, t)]
            records.extend(recs)
            skipped.extend(skips)
        if progress is not None:
            progress(f"axis {spec.axis}={spec.axis_values[ai]} done ({spec.trials} trials)")
    return SweepTable(records=records, rows=aggregate(spec, records), skipped=skipped)


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(obj: Union[SweepTable, Sequence[TrialRecord], Sequence[AggregateRow]], path) -> None:
    """Write trial records or aggregate rows; a SweepTable writes its aggregates."""
    if isinstance(obj, SweepTable):
        rows: Sequence = obj.rows
        header = AGGREGATE_HEADER
    else:
        rows = list(obj)
        if rows and isinstance(rows[0], AggregateRow):
            header = AGGREGATE_HEADER
        elif not rows or isinstance(rows[0], TrialRecord):
            header = TRIAL_HEADER
        else:
            raise TypeError("write_csv expects TrialRecord or AggregateRow sequences")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in dataclasses.astuple(row)) + "\n")


def read_csv(path) -> Union[List[TrialRecord], List[AggregateRow]]:
    """Read either CSV shape back into records; the header picks the type."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    if not lines:
        raise ValueError(f"{path}: empty CSV")
    header = lines[0]
    if header == TRIAL_HEADER:
        out_t: List[TrialRecord] = []
        for ln in lines[1:]:
            f = ln.split(",")
            out_t.append(
                TrialRecord(
                    scheme=f[0],
                    axis=f[1],
                    axis_value=float(f[2]),
                    trial=int(f[3]),
                    seed=int(f[4]),
                    channel_hash=f[5],
                    ee_bpj=float(f[6]),
                    rate_bps=float(f[7]),
                    tx_exposure=float(f[8]),
                    rx_exposure=float(f[9]),
                    tx_power_w=float(f[10]),
                    iterations=int(f[11]),
                    wall_time_s=float(f[12]),
                )
            )
        return out_t
    if header == AGGREGATE_HEADER:
        out_a: List[AggregateRow] = []
        for ln in lines[1:]:
            f = ln.split(",")
            out_a.append(
                AggregateRow(
                    scheme=f[0],
                    axis=f[1],
                    axis_value=float(f[2]),
                    trials=int(f[3]),
                    mean_ee_bpj=float(f[4]),
                    se_ee_bpj=float(f[5]),
                    mean_tx_exposure=float(f[6]),
                    se_tx_exposure=float(f[7]),
                    mean_rx_exposure=float(f[8]),
                    se_rx_exposure=float(f[9]),
                )
            )
        return out_a
    raise ValueError(f"{path}: unrecognized CSV header")
