"""Domain types and the energy-efficiency objective of an RIS-assisted MIMO link.

The link is TX -> RIS -> RX with no direct path.  A transmit beamformer q
(n_tx entries), N passive reflecting elements applying unit-modulus phase
shifts, and a receive combiner w (n_rx entries) shape a scalar effective
channel.  Energy efficiency is the achievable rate divided by the consumed
power, and the design is constrained by transmit power, unit-norm filters,
and linear exposure budgets on the filter magnitudes at both ends.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

TWO_PI = 2.0 * np.pi

#: absolute slack allowed when checking feasibility of returned solutions
FEASIBILITY_TOL = 1e-9


class DimensionError(ValueError):
    """Shapes of channels, filters, or coefficient vectors do not agree."""


class PreconditionError(ValueError):
    """A solver or command was invoked outside the regime it is valid in."""


def db_to_linear(value_db: float) -> float:
    """Convert a dB quantity to linear scale."""
    return 10.0 ** (value_db / 10.0)


def linear_to_db(value: float) -> float:
    """Convert a linear quantity to dB."""
    return 10.0 * np.log10(value)


def dbm_to_watts(value_dbm: float) -> float:
    """Convert dBm to watts."""
    return 10.0 ** ((value_dbm - 30.0) / 10.0)


def wrap_phases(angles) -> np.ndarray:
    """Map angles (radians) into [0, 2*pi).

    Principal values in (-pi, pi] are shifted up by 2*pi when negative.  A
    tiny negative angle can round up to exactly 2*pi after the shift, which
    would fall outside the half-open interval, so that case is pinned to 0.
    """
    a = np.mod(np.asarray(angles, dtype=float), TWO_PI)
    return np.where(a >= TWO_PI, 0.0, a)


@dataclass(frozen=True)
class SystemParams:
    """Scalar link-level parameters.

    bandwidth_hz         B, transmission bandwidth in Hz
    path_loss_db         end-to-end path loss in dB (applied to the SNR)
    noise_psd_dbm_per_hz noise power spectral density in dBm/Hz
    amp_inefficiency     power-amplifier inefficiency mu >= 1
    static_power_w       static circuit power P_c > 0 in watts
    max_tx_power_w       transmit power cap in watts
    tx_exposure_budget   bound on sum_n c_n |q_n| at the transmitter
    rx_exposure_budget   bound on sum_n d_n |w_n| at the receiver
    """

    bandwidth_hz: float
    path_loss_db: float
    noise_psd_dbm_per_hz: float
    amp_inefficiency: float
    static_power_w: float
    max_tx_power_w: float
    tx_exposure_budget: float
    rx_exposure_budget: float

    def __post_init__(self):
        if not (np.isfinite(self.bandwidth_hz) and self.bandwidth_hz > 0):
            raise ValueError("bandwidth_hz must be positive and finite")
        if not np.isfinite(self.path_loss_db):
            raise ValueError("path_loss_db must be finite")
        if not np.isfinite(self.noise_psd_dbm_per_hz):
            raise ValueError("noise_psd_dbm_per_hz must be finite")
        if not (np.isfinite(self.amp_inefficiency) and self.amp_inefficiency >= 1.0):
            raise ValueError("amp_inefficiency must be >= 1")
        if not (np.isfinite(self.static_power_w) and self.static_power_w > 0):
            raise ValueError("static_power_w must be positive")
        if not (np.isfinite(self.max_tx_power_w) and self.max_tx_power_w >= 0):
            raise ValueError("max_tx_power_w must be non-negative")
        if not (np.isfinite(self.tx_exposure_budget) and self.tx_exposure_budget >= 0):
            raise ValueError("tx_exposure_budget must be non-negative")
        if not (np.isfinite(self.rx_exposure_budget) and self.rx_exposure_budget >= 0):
            raise ValueError("rx_exposure_budget must be non-negative")

    @property
    def path_loss_linear(self) -> float:
        return db_to_linear(self.path_loss_db)

    @property
    def noise_power_w(self) -> float:
        """Total noise power sigma^2 = PSD * bandwidth, in watts."""
        return dbm_to_watts(self.noise_psd_dbm_per_hz) * self.bandwidth_hz


def _as_nonneg_vector(values, name: str) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(values, dtype=float))
    if arr.ndim != 1 or arr.size < 1:
        raise DimensionError(f"{name} must be a non-empty 1-D vector")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} entries must be finite")
    if np.any(arr < 0):
        raise ValueError(f"{name} entries must be non-negative")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ExposureCoefficients:
    """Per-antenna exposure weights c (transmit) and d (receive)."""

    tx_coeffs: np.ndarray
    rx_coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "tx_coeffs", _as_nonneg_vector(self.tx_coeffs, "tx_coeffs"))
        object.__setattr__(self, "rx_coeffs", _as_nonneg_vector(self.rx_coeffs, "rx_coeffs"))

    @classmethod
    def isotropic(cls, c: float, d: float, n_tx: int, n_rx: int) -> "ExposureCoefficients":
        return cls(np.full(n_tx, float(c)), np.full(n_rx, float(d)))

    @property
    def is_isotropic(self) -> bool:
        return bool(
            np.all(self.tx_coeffs == self.tx_coeffs[0])
            and np.all(self.rx_coeffs == self.rx_coeffs[0])
        )


@dataclass(frozen=True, eq=False)
class ChannelPair:
    """Channel matrices h (N x n_tx, TX to RIS) and g (n_rx x N, RIS to RX)."""

    h: np.ndarray
    g: np.ndarray

    def __post_init__(self):
        h = np.asarray(self.h, dtype=complex)
        g = np.asarray(self.g, dtype=complex)
        if h.ndim != 2 or g.ndim != 2:
            raise DimensionError("channel matrices must be 2-D")
        if h.shape[0] != g.shape[1]:
            raise DimensionError(
                f"RIS dimension mismatch: h has {h.shape[0]} rows, g has {g.shape[1]} columns"
            )
        if min(h.shape) < 1 or min(g.shape) < 1:
            raise DimensionError("channel matrices must have at least one element per axis")
        if not (np.all(np.isfinite(h.real)) and np.all(np.isfinite(h.imag))):
            raise ValueError("channel h contains non-finite entries")
        if not (np.all(np.isfinite(g.real)) and np.all(np.isfinite(g.imag))):
            raise ValueError("channel g contains non-finite entries")
        h.setflags(write=False)
        g.setflags(write=False)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "g", g)

    @property
    def n_ris(self) -> int:
        return self.h.shape[0]

    @property
    def n_tx(self) -> int:
        return self.h.shape[1]

    @property
    def n_rx(self) -> int:
        return self.g.shape[0]


@dataclass(frozen=True, eq=False)
class LinkConfig:
    """One complete design point: RIS phases, filters, and transmit power."""

    phases: np.ndarray
    beamformer: np.ndarray
    combiner: np.ndarray
    tx_power_w: float

    def __post_init__(self):
        phases = np.atleast_1d(np.asarray(self.phases, dtype=float))
        q = np.atleast_1d(np.asarray(self.beamformer, dtype=complex))
        w = np.atleast_1d(np.asarray(self.combiner, dtype=complex))
        if phases.ndim != 1 or q.ndim != 1 or w.ndim != 1:
            raise DimensionError("phases, beamformer, and combiner must be 1-D vectors")
        # min/max double as finiteness checks: a NaN fails both comparisons
        lo = float(np.min(phases, initial=0.0))
        hi = float(np.max(phases, initial=0.0))
        if not (lo >= 0.0 and hi < TWO_PI):
            raise ValueError("phases must be finite and lie in [0, 2*pi)")
        for name, vec in (("beamformer", q), ("combiner", w)):
            nsq = float(np.vdot(vec, vec).real)
            if not np.isfinite(nsq):
                raise ValueError(f"{name} contains non-finite entries")
            if nsq > 1.0 + FEASIBILITY_TOL:
                raise ValueError(f"{name} squared norm {nsq} exceeds 1")
        p = float(self.tx_power_w)
        if not (np.isfinite(p) and p >= 0.0):
            raise ValueError("tx_power_w must be finite and non-negative")
        phases.setflags(write=False)
        q.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "phases", phases)
        object.__setattr__(self, "beamformer", q)
        object.__setattr__(self, "combiner", w)
        object.__setattr__(self, "tx_power_w", p)


@dataclass(frozen=True)
class EvalResult:
    """Objective value and the diagnostics that go with it."""

    ee_bits_per_joule: float
    rate_bps: float
    effective_gain: float
    tx_exposure: float
    rx_exposure: float


def _check_dims(channels: ChannelPair, cfg: LinkConfig) -> None:
    if cfg.phases.size != channels.n_ris:
        raise DimensionError(
            f"phase vector has {cfg.phases.size} entries, RIS has {channels.n_ris} elements"
        )
    if cfg.beamformer.size != channels.n_tx:
        raise DimensionError(
            f"beamformer has {cfg.beamformer.size} entries, channel expects {channels.n_tx}"
        )
    if cfg.combiner.size != channels.n_rx:
        raise DimensionError(
            f"combiner has {cfg.combiner.size} entries, channel expects {channels.n_rx}"
        )


def effective_amplitude(channels: ChannelPair, cfg: LinkConfig) -> complex:
    """Scalar cascaded channel w^H G diag(e^{j phi}) H q."""
    _check_dims(channels, cfg)
    ris_in = channels.h @ cfg.beamformer
    ris_out = np.exp(1j * cfg.phases) * ris_in
    return complex(np.conj(cfg.combiner) @ (channels.g @ ris_out))


def evaluate(
    params: SystemParams,
    channels: ChannelPair,
    coeffs: ExposureCoefficients,
    cfg: LinkConfig,
) -> EvalResult:
    """Energy efficiency of a design point.

    rate = B * log2(1 + p * |w^H G diag(e^{j phi}) H q|^2 / (pl * sigma^2))
    ee   = rate / (mu * p + P_c)

    Returns an EvalResult; both rate and efficiency are zero when p = 0.
    """
    if coeffs.tx_coeffs.size != channels.n_tx or coeffs.rx_coeffs.size != channels.n_rx:
        raise DimensionError("exposure coefficient lengths do not match the channel")
    s = effective_amplitude(channels, cfg)
    gain = float(abs(s) ** 2)
    if not np.isfinite(gain):
        raise ValueError("effective channel gain is not finite")
    snr = cfg.tx_power_w * gain / (params.path_loss_linear * params.noise_power_w)
    rate = params.bandwidth_hz * np.log2(1.0 + snr)
    consumed = params.amp_inefficiency * cfg.tx_power_w + params.static_power_w
    return EvalResult(
        ee_bits_per_joule=float(rate / consumed),
        rate_bps=float(rate),
        effective_gain=gain,
        tx_exposure=float(coeffs.tx_coeffs @ np.abs(cfg.beamformer)),
        rx_exposure=float(coeffs.rx_coeffs @ np.abs(cfg.combiner)),
    )


@dataclass(frozen=True)
class FeasibilityReport:
    """Outcome of a constraint check; violations hold (name, slack) pairs.

    Slack is limit minus value, so a violated constraint has negative slack.
    """

    ok: bool
    violations: Tuple[Tuple[str, float], ...]

    def __bool__(self) -> bool:
        return self.ok


def is_feasible(
    params: SystemParams,
    coeffs: ExposureCoefficients,
    cfg: LinkConfig,
    tol: float = FEASIBILITY_TOL,
) -> FeasibilityReport:
    """Check power bounds, exposure budgets, and unit-norm constraints."""
    if coeffs.tx_coeffs.size != cfg.beamformer.size or coeffs.rx_coeffs.size != cfg.combiner.size:
        raise DimensionError("exposure coefficient lengths do not match the filters")
    checks: List[Tuple[str, float]] = [
        ("tx_power_lower", cfg.tx_power_w - 0.0),
        ("tx_power_upper", params.max_tx_power_w - cfg.tx_power_w),
        ("tx_exposure", params.tx_exposure_budget - float(coeffs.tx_coeffs @ np.abs(cfg.beamformer))),
        ("rx_exposure", params.rx_exposure_budget - float(coeffs.rx_coeffs @ np.abs(cfg.combiner))),
        ("tx_norm", 1.0 - float(np.sum(np.abs(cfg.beamformer) ** 2))),
        ("rx_norm", 1.0 - float(np.sum(np.abs(cfg.combiner) ** 2))),
    ]
    violations = tuple((name, slack) for name, slack in checks if slack < -tol)
    return FeasibilityReport(ok=not violations, violations=violations)
