"""Per-block optimizers used by the alternating loop.

Four building blocks:
  * optimize_phases     - closed-form RIS phase alignment
  * solve_conic_linear  - linear objective under one linear and one norm cap
  * align_and_solve_*   - phase alignment plus magnitude solve for q and w
  * optimize_power      - scalar transmit-power step of the efficiency ratio
plus select_single_antenna, the closed-form magnitude rule that the conic
problem collapses to when the exposure weights are equal across antennas and
the budget-to-weight ratio is at most one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .model import DimensionError, PreconditionError, wrap_phases

#: bisection iteration count for the exposure multiplier (halves the bracket each step)
_BISECT_ITERS = 90

#: relative tolerance used to group near-tied gain-to-weight ratios
_TIE_REL = 1e-12


def optimize_phases(g_vec, h_vec) -> np.ndarray:
    """Phase shifts maximizing |sum_n conj(g_n) e^{j phi_n} h_n|.

    Each term is rotated onto the positive real axis, phi_n = -angle(conj(g_n) h_n),
    which is optimal by the triangle inequality.  Zero products get phase 0
    (the principal angle of 0).  Output lies in [0, 2*pi).
    """
    g = np.atleast_1d(np.asarray(g_vec, dtype=complex))
    h = np.atleast_1d(np.asarray(h_vec, dtype=complex))
    if g.shape != h.shape or g.ndim != 1:
        raise DimensionError("phase alignment needs two 1-D vectors of equal length")
    return wrap_phases(-np.angle(np.conj(g) * h))


@dataclass(frozen=True)
class ConicLinearProblem:
    """maximize gains . x  s.t.  coeffs . x <= budget,  ||x||_2 <= 1,  x >= 0."""

    gains: np.ndarray
    coeffs: np.ndarray
    budget: float

    def __post_init__(self):
        g = np.atleast_1d(np.asarray(self.gains, dtype=float))
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=float))
        if g.ndim != 1 or g.size < 1:
            raise DimensionError("gains must be a non-empty 1-D vector")
        if c.shape != g.shape:
            raise DimensionError("coeffs must match gains in length")
        if not (np.all(np.isfinite(g)) and np.all(np.isfinite(c))):
            raise ValueError("gains and coeffs must be finite")
        if np.any(g < 0) or np.any(c < 0):
            raise ValueError("gains and coeffs must be non-negative")
        b = float(self.budget)
        if not (np.isfinite(b) and b >= 0):
            raise ValueError("budget must be non-negative and finite")
        g.setflags(write=False)
        c.setflags(write=False)
        object.__setattr__(self, "gains", g)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "budget", b)


def solve_conic_linear_kkt(prob: ConicLinearProblem) -> Tuple[np.ndarray, float, float]:
    """Solve the conic-linear magnitude problem, returning (x, lam, nu).

    lam and nu are the multipliers of the exposure and norm constraints.  The
    stationarity condition is x_n = max(0, gains_n - lam * coeffs_n) / (2 nu),
    and the four complementarity cases are handled explicitly:

      0. gains identically zero        -> x = 0
      1. norm cap active, lam = 0      -> x = gains / ||gains||
      2. exposure cap active, nu = 0   -> mass on the best gain/weight ratio
      3. both caps active              -> bisection on lam; nu = ||d(lam)||/2
         where d(lam) = max(0, gains - lam * coeffs) and x = d / ||d||

    In case 3 the exposure level c . d(lam)/||d(lam)|| falls from above the
    budget at lam = 0 to below it as lam approaches the largest ratio, so a
    sign change is guaranteed and any crossing satisfies the KKT system of a
    convex problem, hence is globally optimal.
    """
    g = prob.gains
    c = prob.coeffs
    budget = prob.budget
    n = g.size

    if not np.any(g > 0):
        return np.zeros(n), 0.0, 0.0

    # case 1: ignore the exposure cap; optimal by Cauchy-Schwarz
    norm_g = float(np.linalg.norm(g))
    x_norm = g / norm_g
    if float(c @ x_norm) <= budget:
        return x_norm, 0.0, norm_g / 2.0

    pos = c > 0          # coordinates the exposure cap can see
    free = (~pos) & (g > 0)

    if budget == 0.0:
        # every weighted coordinate is forced to zero
        lam = float(np.max(g[pos] / c[pos])) if np.any(pos) else 0.0
        if not np.any(free):
            return np.zeros(n), lam, 0.0
        d = np.where(free, g, 0.0)
        nd = float(np.linalg.norm(d))
        return d / nd, lam, nd / 2.0

    # case 2: ignore the norm cap.  Bounded only if no free coordinate has
    # positive gain; the optimum then sits on the face of best ratio.  When
    # several ratios tie, take the least-norm point of that face.
    ratio = np.where(pos, g / np.where(pos, c, 1.0), -np.inf)
    r_max = float(np.max(ratio))
    tied = ratio >= r_max * (1.0 - _TIE_REL)
    c_tied = np.where(tied, c, 0.0)
    tied_norm = float(np.linalg.norm(c_tied))
    if not np.any(free):
        x_face = budget * c_tied / float(c_tied @ c_tied)
        if float(x_face @ x_face) <= 1.0:
            return x_face, r_max, 0.0
        phi_limit = tied_norm
    else:
        phi_limit = 0.0  # beyond the largest ratio only zero-weight mass survives

    # case 3: both caps active; bisect the exposure multiplier on [0, r_max]
    def exposure_level(lam: float) -> Tuple[float, np.ndarray]:
        d = np.maximum(0.0, g - lam * c)
        nd = float(np.linalg.norm(d))
        if nd == 0.0:
            return phi_limit, d
        return float(c @ d) / nd, d

    lo, hi = 0.0, r_max
    for _ in range(_BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        level, _ = exposure_level(mid)
        if level > budget:
            lo = mid
        else:
            hi = mid
    _, d = exposure_level(hi)
    nd = float(np.linalg.norm(d))
    if nd == 0.0:
        # crossing sits within rounding of r_max: return the limit direction,
        # where gains - r_max * coeffs vanishes on the support and nu drops out
        return c_tied / tied_norm, r_max, 0.0
    return d / nd, hi, nd / 2.0


def solve_conic_linear(prob: ConicLinearProblem) -> np.ndarray:
    """Magnitude vector maximizing gains . x under both caps (see the KKT variant)."""
    x, _, _ = solve_conic_linear_kkt(prob)
    return x


def select_single_antenna(gains, budget_over_coeff: float) -> np.ndarray:
    """Closed-form magnitudes for equal exposure weights and budget ratio <= 1.

    All mass goes to the first antenna attaining the largest gain, with
    magnitude budget_over_coeff.  Valid only when budget_over_coeff <= 1,
    where the exposure cap implies the norm cap.
    """
    g = np.atleast_1d(np.asarray(gains, dtype=float))
    if g.ndim != 1 or g.size < 1:
        raise DimensionError("gains must be a non-empty 1-D vector")
    if np.any(g < 0) or not np.all(np.isfinite(g)):
        raise ValueError("gains must be finite and non-negative")
    r = float(budget_over_coeff)
    if not (np.isfinite(r) and r >= 0):
        raise ValueError("budget_over_coeff must be non-negative")
    if r > 1.0:
        raise PreconditionError(
            "budget_over_coeff exceeds 1; the single-antenna rule does not apply"
        )
    x = np.zeros(g.size)
    x[int(np.argmax(g))] = r
    return x


def _align_and_solve(target, coeffs, budget: float) -> np.ndarray:
    t = np.atleast_1d(np.asarray(target, dtype=complex))
    if t.ndim != 1:
        raise DimensionError("target must be a 1-D vector")
    x = solve_conic_linear(ConicLinearProblem(np.abs(t), np.asarray(coeffs, dtype=float), budget))
    return x * np.exp(1j * np.angle(t))


def align_and_solve_beamformer(v, tx_coeffs, tx_budget: float) -> np.ndarray:
    """Optimal beamformer against the composite vector v = (w^H G Phi H)^H.

    Phases copy v entrywise (making v^H q real non-negative), magnitudes come
    from the conic-linear solve on |v|.
    """
    return _align_and_solve(v, tx_coeffs, tx_budget)


def align_and_solve_combiner(u, rx_coeffs, rx_budget: float) -> np.ndarray:
    """Optimal combiner against the composite vector u = G Phi H q."""
    return _align_and_solve(u, rx_coeffs, rx_budget)


@dataclass(frozen=True)
class PowerProblem:
    """maximize log2(1 + p * gain) / (mu * p + static) over p in [0, max_power].

    gain is the SNR per unit transmit power (channel gain over path loss and
    noise), so p * gain is the SNR itself.
    """

    gain: float
    amp_inefficiency: float
    static_power_w: float
    max_tx_power_w: float

    def __post_init__(self):
        for name in ("gain", "amp_inefficiency", "static_power_w", "max_tx_power_w"):
            val = float(getattr(self, name))
            if not (np.isfinite(val) and val >= 0):
                raise ValueError(f"{name} must be non-negative and finite")
        if float(self.static_power_w) <= 0:
            raise ValueError("static_power_w must be positive")


def optimize_power(prob: PowerProblem) -> float:
    """Transmit power maximizing the efficiency ratio.

    The ratio is strictly pseudo-concave in p, so the sign of its derivative,
    proportional to
        s(p) = gain * (mu p + static) / (1 + p gain) - mu * log(1 + p gain),
    is strictly decreasing.  Bisect on that sign to a bracket width of
    1e-12 * max_tx_power_w; if s stays positive on the whole interval, the
    cap itself is optimal.  Zero gain yields p = 0.
    """
    a = float(prob.gain)
    mu = float(prob.amp_inefficiency)
    pc = float(prob.static_power_w)
    p_max = float(prob.max_tx_power_w)
    if a == 0.0 or p_max == 0.0:
        return 0.0

    def dsign(p: float) -> float:
        snr = p * a
        return a * (mu * p + pc) / (1.0 + snr) - mu * math.log1p(snr)

    if dsign(p_max) > 0.0:
        return p_max
    lo, hi = 0.0, p_max
    width = 1e-12 * p_max
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        if dsign(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
