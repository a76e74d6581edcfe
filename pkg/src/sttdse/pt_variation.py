"""Process/temperature guard bands on the thermal stability factor."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .mtj_device import MtjTechParams, critical_current


@dataclass(frozen=True)
class VariationProfile:
    """Process spread and temperature corners.

    ``sigma_frac`` is the standard deviation of delta as a fraction of its
    mean; ``n_sigma`` is the coverage in standard deviations.
    """

    sigma_frac: float = 0.021
    n_sigma: float = 4.0
    t_nom: float = 300.0
    t_hot: float = 393.0
    t_cold: float = 253.0

    def __post_init__(self):
        spread = self.sigma_frac * self.n_sigma
        if self.sigma_frac < 0 or self.n_sigma < 0 or not spread < 1.0:
            raise DomainError(
                f"sigma_frac*n_sigma must lie in [0, 1), got {spread!r}")
        if not 0 < self.t_cold <= self.t_nom <= self.t_hot:
            raise DomainError(
                "temperatures must satisfy 0 < t_cold <= t_nom <= t_hot, got "
                f"{self.t_cold!r}, {self.t_nom!r}, {self.t_hot!r}")

    @property
    def spread(self) -> float:
        return self.n_sigma * self.sigma_frac


def _check_delta(name, value):
    if not value > 0:
        raise DomainError(f"{name} must be positive, got {value!r}")


def guardbanded_delta(delta_scaled, profile=VariationProfile()):
    """Design-time delta whose slow, hot corner still reaches ``delta_scaled``."""
    _check_delta("delta_scaled", delta_scaled)
    return delta_scaled * (profile.t_hot / profile.t_nom) / (1.0 - profile.spread)


def scaled_delta_check(delta_gb, profile=VariationProfile()):
    """Worst-case (low sigma corner, hot) delta of a guard-banded design."""
    _check_delta("delta_gb", delta_gb)
    return (delta_gb - profile.spread * delta_gb) * (profile.t_nom / profile.t_hot)


def delta_pt_max(delta_gb, profile=VariationProfile()):
    """Largest delta seen at the high sigma corner and cold temperature."""
    _check_delta("delta_gb", delta_gb)
    return (delta_gb + profile.spread * delta_gb) * (profile.t_nom / profile.t_cold)


def write_driver_levels(params: MtjTechParams, delta_gb, profile=VariationProfile(),
                        n_levels=4, iw_over_ic=1.5):
    """Write currents for an adjustable driver, nominal first, worst case last.

    The bottom level drives a nominal die at ``profile.t_nom``; the top level
    drives the high-sigma die at ``profile.t_cold``. Levels are spaced
    linearly in current.
    """
    if int(n_levels) != n_levels or n_levels < 2:
        raise DomainError(f"n_levels must be an integer >= 2, got {n_levels!r}")
    if not iw_over_ic > 1.0:
        raise DomainError(f"iw_over_ic must exceed 1, got {iw_over_ic!r}")
    _check_delta("delta_gb", delta_gb)
    low = iw_over_ic * critical_current(params, delta_gb, profile.t_nom)
    high = iw_over_ic * critical_current(params, delta_pt_max(delta_gb, profile), profile.t_cold)
    if not high > low:
        raise DomainError("degenerate profile: worst-case current equals nominal")
    levels = np.linspace(low, high, int(n_levels))
    levels[0], levels[-1] = low, high
    return levels.tolist()
