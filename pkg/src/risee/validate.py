"""Self-check properties runnable from the command line.

Each property draws `count` seeded instances and checks the solvers against
an independent reference (dense grids, random-search dominance, or algebraic
certificates).  Failures report the offending seeds so an instance can be
replayed exactly.
"""

from __future__ import annotations

from typing import Callable, List, Tuple

import numpy as np

from . import algorithms, channel, model, subsolvers


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed))


def _random_conic(rng) -> subsolvers.ConicLinearProblem:
    n = int(rng.integers(1, 9))
    gains = rng.uniform(0.0, 2.0, n)
    coeffs = rng.uniform(0.0, 1.0, n)
    if rng.uniform() < 0.2:
        coeffs[rng.integers(0, n)] = 0.0
    budget = float(rng.uniform(0.0, 1.2) * max(np.sum(coeffs), 1e-3))
    return subsolvers.ConicLinearProblem(gains, coeffs, budget)


def _random_system(rng, ratio_cap: float = 1.4) -> Tuple[
    model.SystemParams, model.ChannelPair, model.ExposureCoefficients
]:
    n_ris = int(rng.integers(2, 17))
    n_tx = int(rng.integers(1, 5))
    n_rx = int(rng.integers(1, 5))
    ratio = float(rng.uniform(0.1, ratio_cap))
    c, d = 1.0 / n_tx, 1.0 / n_rx
    params = model.SystemParams(
        bandwidth_hz=5e6,
        path_loss_db=110.0,
        noise_psd_dbm_per_hz=-174.0,
        amp_inefficiency=1.0,
        static_power_w=30.0,
        max_tx_power_w=20.0,
        tx_exposure_budget=ratio * c,
        rx_exposure_budget=ratio * d,
    )
    cmodel = channel.ChannelModel(dims=(n_ris, n_tx, n_rx))
    pair = channel.sample(cmodel, int(rng.integers(0, 2**63)))
    coeffs = model.ExposureCoefficients.isotropic(c, d, n_tx, n_rx)
    return params, pair, coeffs


def check_phase_alignment(count: int, master_seed: int) -> List[int]:
    """Aligned phases beat a 256x256 grid on 2-element instances."""
    failing = []
    grid = np.linspace(0.0, 2.0 * np.pi, 256, endpoint=False)
    p1, p2 = np.meshgrid(grid, grid, indexing="ij")
    for k in range(count):
        seed = channel.derive_seed(master_seed, 0, k)
        rng = _rng(seed)
        g = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        h = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        prod = np.conj(g) * h
        aligned = float(np.abs(np.sum(prod * np.exp(1j * subsolvers.optimize_phases(g, h)))))
        over_grid = np.abs(prod[0] * np.exp(1j * p1) + prod[1] * np.exp(1j * p2))
        if aligned < float(over_grid.max()) - 1e-9 or abs(
            aligned - float(np.sum(np.abs(prod)))
        ) > 1e-10:
            failing.append(seed)
    return failing


def check_conic_certificates(count: int, master_seed: int) -> List[int]:
    """Feasibility within 1e-9 and complementary slackness within 1e-7."""
    failing = []
    for k in range(count):
        seed = channel.derive_seed(master_seed, 1, k)
        prob = _random_conic(_rng(seed))
        x, lam, nu = subsolvers.solve_conic_linear_kkt(prob)
        exposure = float(prob.coeffs @ x)
        norm_sq = float(x @ x)
        ok = (
            np.all(x >= 0)
            and exposure <= prob.budget + 1e-9
            and norm_sq <= 1.0 + 1e-9
            and abs(lam * (prob.budget - exposure)) <= 1e-7
            and abs(nu * (1.0 - norm_sq)) <= 1e-7
        )
        if not ok:
            failing.append(seed)
    return failing


def check_conic_dominance(count: int, master_seed: int, samples: int = 10_000) -> List[int]:
    """Solver objective beats random feasible magnitude vectors."""
    failing = []
    for k in range(count):
        seed = channel.derive_seed(master_seed, 2, k)
        rng = _rng(seed)
        prob = _random_conic(rng)
        x = subsolvers.solve_conic_linear(prob)
        obj = float(prob.gains @ x)
        n = prob.gains.size
        pts = np.abs(rng.standard_normal((samples, n)))
        norms = np.linalg.norm(pts, axis=1, keepdims=True)
        norms[norms == 0.0] = 1.0
        pts = pts / norms * rng.uniform(0.0, 1.0, (samples, 1))
        exposure = pts @ prob.coeffs
        over = exposure > prob.budget
        with np.errstate(divide="ignore", invalid="ignore"):
            shrink = np.where(over & (exposure > 0), prob.budget / np.where(exposure > 0, exposure, 1.0), 1.0)
        pts = pts * shrink[:, None]
        best = float((pts @ prob.gains).max())
        if obj < best - 1e-9:
            failing.append(seed)
    return failing


def check_single_antenna(count: int, master_seed: int) -> List[int]:
    """Closed-form rule matches the general solver on isotropic data."""
    failing = []
    for k in range(count):
        seed = channel.derive_seed(master_seed, 3, k)
        rng = _rng(seed)
        n = int(rng.integers(1, 9))
        gains = rng.uniform(0.0, 3.0, n)
        coeff = float(rng.uniform(0.05, 1.0))
        ratio = float(rng.uniform(0.0, 1.0))
        xs = subsolvers.select_single_antenna(gains, ratio)
        xg = subsolvers.solve_conic_linear(
            subsolvers.ConicLinearProblem(gains, np.full(n, coeff), ratio * coeff)
        )
        if abs(float(gains @ xs) - float(gains @ xg)) > 1e-9:
            failing.append(seed)
    return failing


def check_monotone_traces(count: int, master_seed: int) -> List[int]:
    """Alternating traces never decrease and end in feasible configurations."""
    failing = []
    for k in range(count):
        seed = channel.derive_seed(master_seed, 4, k)
        rng = _rng(seed)
        params, pair, coeffs = _random_system(rng)
        cfg, trace = algorithms.alternating_max(params, pair, coeffs)
        t = trace.objective_trace
        monotone = bool(np.all(t[1:] >= t[:-1] * (1.0 - 1e-9) - 1e-15))
        if not (monotone and trace.converged and model.is_feasible(params, coeffs, cfg).ok):
            failing.append(seed)
    return failing


def check_power_step(count: int, master_seed: int, grid_points: int = 10_000) -> List[int]:
    """Scalar power step beats a dense grid over [0, max power]."""
    failing = []
    for k in range(count):
        seed = channel.derive_seed(master_seed, 5, k)
        rng = _rng(seed)
        prob = subsolvers.PowerProblem(
            gain=float(rng.uniform(0.0, 5.0) * 10.0 ** rng.uniform(-3, 6)),
            amp_inefficiency=float(rng.uniform(1.0, 4.0)),
            static_power_w=float(rng.uniform(0.5, 50.0)),
            max_tx_power_w=float(rng.uniform(0.1, 40.0)),
        )
        p = subsolvers.optimize_power(prob)

        def ratio(pv):
            return np.log2(1.0 + pv * prob.gain) / (
                prob.amp_inefficiency * pv + prob.static_power_w
            )

        grid = np.linspace(0.0, prob.max_tx_power_w, grid_points)
        if float(ratio(p)) < float(ratio(grid).max()) - 1e-10:
            failing.append(seed)
    return failing


def check_global_dominance(count: int, master_seed: int, samples: int = 2_000) -> List[int]:
    """Closed-form global solver beats random feasible designs (ratio <= 1)."""
    failing = []
    for k in range(count):
        seed = channel.derive_seed(master_seed, 6, k)
        rng = _rng(seed)
        params, pair, coeffs = _random_system(rng, ratio_cap=1.0)
        c, d = float(coeffs.tx_coeffs[0]), float(coeffs.rx_coeffs[0])
        cfg, _ = algorithms.global_special_case(params, pair, c, d)
        best_cfg_ee = model.evaluate(params, pair, coeffs, cfg).ee_bits_per_joule
        rq = params.tx_exposure_budget / c
        rw = params.rx_exposure_budget / d
        denom = params.path_loss_linear * params.noise_power_w
        best_gain = 0.0
        for _ in range(samples):
            phases = rng.uniform(0.0, 2.0 * np.pi, pair.n_ris)
            q = _random_l1_point(rng, pair.n_tx, rq)
            w = _random_l1_point(rng, pair.n_rx, rw)
            s = (np.conj(w) @ pair.g) * np.exp(1j * phases) @ (pair.h @ q)
            best_gain = max(best_gain, float(abs(s) ** 2))
        p = subsolvers.optimize_power(
            subsolvers.PowerProblem(
                gain=best_gain / denom,
                amp_inefficiency=params.amp_inefficiency,
                static_power_w=params.static_power_w,
                max_tx_power_w=params.max_tx_power_w,
            )
        )
        sample_ee = (
            params.bandwidth_hz
            * np.log2(1.0 + p * best_gain / denom)
            / (params.amp_inefficiency * p + params.static_power_w)
        )
        if best_cfg_ee < float(sample_ee) - 1e-9:
            failing.append(seed)
    return failing


def _random_l1_point(rng, n: int, l1_cap: float) -> np.ndarray:
    z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    l1 = float(np.sum(np.abs(z)))
    if l1 == 0.0:
        return np.zeros(n, dtype=complex)
    return z * (l1_cap * rng.uniform() / l1)


PROPERTIES: List[Tuple[str, Callable[[int, int], List[int]]]] = [
    ("phase_alignment_grid", check_phase_alignment),
    ("conic_kkt_certificates", check_conic_certificates),
    ("conic_random_dominance", check_conic_dominance),
    ("single_antenna_equivalence", check_single_antenna),
    ("monotone_feasible_traces", check_monotone_traces),
    ("power_grid_dominance", check_power_step),
    ("global_random_dominance", check_global_dominance),
]


def run_all(count: int, master_seed: int, emit=print) -> bool:
    """Run every property; returns True when all pass."""
    if count == 0:
        emit("warning: count is 0, all properties pass vacuously")
    all_ok = True
    for name, fn in PROPERTIES:
        failing = fn(count, master_seed) if count > 0 else []
        if failing:
            all_ok = False
            shown = ", ".join(str(s) for s in failing[:5])
            more = "" if len(failing) <= 5 else f" (+{len(failing) - 5} more)"
            emit(f"FAIL {name}: {len(failing)}/{count} instances, seeds {shown}{more}")
        else:
            emit(f"PASS {name} ({count} instances)")
    return all_ok
