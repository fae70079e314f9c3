"""Synthetic demand and generation processes."""

from __future__ import annotations

from typing import TYPE_CHECKING, Literal

import numpy as np
from scipy.signal import lfilter


if TYPE_CHECKING:
    from collections.abc import Sequence


Profile = Literal["flat", "daily-sinusoid"]
PROFILES: tuple[Profile, ...] = ("flat", "daily-sinusoid")
DEFAULT_PEAK_HOUR = 19.0
HOURS_PER_DAY = 24.0


def profile_shape(  # noqa: PLR0913
    profile: Profile,
    base_kw: float,
    amplitude_kw: float,
    steps: int,
    *,
    step_seconds: float = 900.0,
    peak_hour: float = DEFAULT_PEAK_HOUR,
) -> np.ndarray:
    """Return the noise-free profile for ``steps`` steps starting at midnight."""
    if profile not in PROFILES:
        msg = f"unknown profile {profile!r}; expected one of {', '.join(PROFILES)}"
        raise ValueError(msg)
    if profile == "flat":
        return np.full(steps, float(base_kw))
    hours = np.arange(steps) * step_seconds / 3600.0
    return base_kw + amplitude_kw * np.cos(2.0 * np.pi * (hours - peak_hour) / HOURS_PER_DAY)


def synth_process(  # noqa: PLR0913
    profile: Profile,
    base_kw: float,
    amplitude_kw: float,
    ar_phi: Sequence[float],
    noise_sigma: float,
    steps: int,
    seed: int | np.random.Generator,
    *,
    step_seconds: float = 900.0,
    peak_hour: float = DEFAULT_PEAK_HOUR,
    integrated: bool = False,
) -> np.ndarray:
    """Generate a non-negative power series around a profile.

    White noise of standard deviation ``noise_sigma`` is coloured by the AR filter ``ar_phi``;
    with ``integrated`` the coloured noise is cumulated, giving ARIMA(a,1,0) fluctuations.
    """
    if steps < 1:
        msg = f"steps must be at least 1, got {steps}"
        raise ValueError(msg)
    if not noise_sigma >= 0:
        msg = f"noise_sigma must be non-negative, got {noise_sigma}"
        raise ValueError(msg)
    if not step_seconds > 0:
        msg = f"step_seconds must be positive, got {step_seconds}"
        raise ValueError(msg)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    shape = profile_shape(profile, base_kw, amplitude_kw, steps, step_seconds=step_seconds, peak_hour=peak_hour)
    shocks = noise_sigma * rng.standard_normal(steps)
    noise = np.asarray(lfilter([1.0], np.concatenate(([1.0], -np.asarray(ar_phi, dtype=float))), shocks))
    if integrated:
        noise = np.cumsum(noise)
    return np.maximum(shape + noise, 0.0)
