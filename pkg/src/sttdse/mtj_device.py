"""MTJ reliability equations and their inverses.

Forward forms give the retention-failure, read-disturb and write-error
probabilities of a single bit. Inverse forms answer the design questions:
which thermal stability factor holds data for a given time, and how long
may a read or write pulse be at a target bit error rate.

All probabilities are evaluated as ``-expm1(-x)`` and all inversions use
``log1p`` so that rates down to 1e-15 keep full double precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .constants import BOLTZMANN, ELECTRON_CHARGE, PLANCK
from .errors import DomainError

# exp() overflows past this exponent
_EXP_LIMIT = 700.0


def _positive(name: str, value: float) -> float:
    value = float(value)
    if not value > 0.0 or math.isinf(value):
        raise DomainError(f"{name} must be positive and finite, got {value!r}")
    return value


def _probability(name: str, p: float) -> float:
    p = float(p)
    if not 0.0 < p < 1.0:
        raise DomainError(f"{name} must lie in (0, 1), got {p!r}")
    return p


def _non_negative(name: str, value: float) -> float:
    value = float(value)
    if not value >= 0.0:
        raise DomainError(f"{name} must be >= 0, got {value!r}")
    return value


@dataclass(frozen=True)
class MtjTechParams:
    """Technology constants for one MTJ stack.

    ``h_k * m_s * volume`` is taken as the free-layer barrier energy in
    joules, so ``h_k`` should carry any permeability factor (for SI inputs
    pass mu0*H_K in tesla).
    """

    alpha: float
    eta: float
    m_eff_term: float
    h_k: float
    m_s: float
    volume: float
    tau_retention: float = 1.0
    tau_write: float = 1e-9
    t_nom: float = 300.0

    def __post_init__(self):
        for name in ("alpha", "eta", "m_eff_term", "h_k", "m_s", "volume",
                     "tau_retention", "tau_write", "t_nom"):
            _positive(name, getattr(self, name))


@dataclass(frozen=True)
class ReliabilityTargets:
    t_ret: float
    ber_rf: float
    ber_rd: float
    ber_we: float


@dataclass(frozen=True)
class CurrentKnobs:
    ir_over_ic: float = 0.3
    iw_over_ic: float = 1.5


@dataclass(frozen=True)
class OperatingPoint:
    """A solved design point: barrier, currents, pulse widths and BER targets."""

    delta: float
    i_c: float
    i_w: float
    i_r: float
    t_w: float
    t_r: float
    t_ret: float
    ber_rf: float
    ber_rd: float
    ber_we: float


def thermal_stability(h_k, m_s, volume, temperature):
    """Barrier height in units of k_B*T."""
    for name, v in (("h_k", h_k), ("m_s", m_s), ("volume", volume),
                    ("temperature", temperature)):
        _positive(name, v)
    return h_k * m_s * volume / (2.0 * BOLTZMANN * temperature)


def critical_current(params: MtjTechParams, delta, temperature):
    """Critical switching current in amperes."""
    _positive("delta", delta)
    _positive("temperature", temperature)
    prefactor = 4.0 * ELECTRON_CHARGE * BOLTZMANN * temperature / PLANCK
    return prefactor * (params.alpha / params.eta) * delta * params.m_eff_term


def retention_failure_prob(t, tau, delta):
    """Probability a bit flips spontaneously within ``t`` seconds."""
    _non_negative("t", t)
    _positive("tau", tau)
    return -math.expm1(-(t / tau) * math.exp(-delta))


def retention_time_for_ber(p, tau, delta):
    """Longest hold time whose retention failure probability is ``p``."""
    _probability("p", p)
    _positive("tau", tau)
    return -math.log1p(-p) * tau * math.exp(delta)


def delta_for_retention(t, p, tau):
    """Thermal stability factor that holds data ``t`` seconds at failure probability ``p``."""
    _positive("t", t)
    _probability("p", p)
    _positive("tau", tau)
    return math.log(t) - math.log(tau) - math.log(-math.log1p(-p))


def calibrate_tau(t, p, delta):
    """Technology constant implied by one (retention time, BER, delta) observation."""
    _positive("t", t)
    _probability("p", p)
    _positive("delta", delta)
    return t * math.exp(-delta) / -math.log1p(-p)


def read_disturb_prob(t_r, tau, delta, i_r, i_c):
    _non_negative("t_r", t_r)
    _positive("tau", tau)
    _positive("i_c", i_c)
    _non_negative("i_r", i_r)
    if i_r >= i_c:
        raise DomainError(f"read current {i_r!r} must stay below critical current {i_c!r}")
    barrier = delta * (1.0 - i_r / i_c)
    return -math.expm1(-(t_r / tau) * math.exp(-barrier))


def max_read_pulse(p, tau, delta, ir_over_ic):
    """Longest read pulse whose read-disturb probability stays at ``p``."""
    _probability("p", p)
    _positive("tau", tau)
    if not 0.0 <= ir_over_ic < 1.0:
        raise DomainError(f"ir_over_ic must lie in [0, 1), got {ir_over_ic!r}")
    return -math.log1p(-p) * tau * math.exp(delta * (1.0 - ir_over_ic))


def _overdrive(iw_over_ic):
    r = float(iw_over_ic)
    if not r > 1.0:
        raise DomainError(f"iw_over_ic must exceed 1, got {r!r}")
    return r


def write_error_rate(t_w, tau, delta, iw_over_ic):
    """Probability a write pulse of ``t_w`` seconds ends before the cell switches."""
    _non_negative("t_w", t_w)
    _positive("tau", tau)
    _positive("delta", delta)
    r = _overdrive(iw_over_ic)
    a = math.pi ** 2 * delta * (r - 1.0)
    z = (r - 1.0) * t_w / tau
    if z > _EXP_LIMIT:
        exponent = a / (4.0 * r) * math.exp(-z)
    else:
        # r*e^z - 1 written to stay exact as z -> 0
        exponent = a / (4.0 * ((r - 1.0) + r * math.expm1(z)))
    return -math.expm1(-exponent)


def write_pulse_for_wer(p, tau, delta, iw_over_ic):
    """Shortest write pulse meeting write error rate ``p``.

    Returns 0.0 when the target is already met by a zero-length pulse
    (large overdrive at small ``delta``).
    """
    _probability("p", p)
    _positive("tau", tau)
    _positive("delta", delta)
    r = _overdrive(iw_over_ic)
    a = math.pi ** 2 * delta * (r - 1.0)
    q = a / (4.0 * -math.log1p(-p)) + 1.0
    if q <= r:
        return 0.0
    return tau / (r - 1.0) * math.log(q / r)


def solve_operating_point(params: MtjTechParams, targets: ReliabilityTargets,
                          knobs: CurrentKnobs = CurrentKnobs()) -> OperatingPoint:
    """Pick delta from the retention target, then size read and write pulses.

    Retention and read disturb use ``params.tau_retention``; the write
    error rate uses ``params.tau_write``.
    """
    _positive("t_ret", targets.t_ret)
    for name in ("ber_rf", "ber_rd", "ber_we"):
        _probability(name, getattr(targets, name))
    if not 0.0 < knobs.ir_over_ic < 1.0:
        raise DomainError(f"ir_over_ic must lie in (0, 1), got {knobs.ir_over_ic!r}")
    r = _overdrive(knobs.iw_over_ic)

    delta = delta_for_retention(targets.t_ret, targets.ber_rf, params.tau_retention)
    if delta <= 0.0:
        raise DomainError(
            f"retention target {targets.t_ret!r} s at BER {targets.ber_rf!r} "
            f"needs non-positive delta ({delta:.3g})")
    i_c = critical_current(params, delta, params.t_nom)
    t_r = max_read_pulse(targets.ber_rd, params.tau_retention, delta, knobs.ir_over_ic)
    t_w = write_pulse_for_wer(targets.ber_we, params.tau_write, delta, r)
    return OperatingPoint(
        delta=delta,
        i_c=i_c,
        i_w=r * i_c,
        i_r=knobs.ir_over_ic * i_c,
        t_w=t_w,
        t_r=t_r,
        t_ret=targets.t_ret,
        ber_rf=targets.ber_rf,
        ber_rd=targets.ber_rd,
        ber_we=targets.ber_we,
    )
