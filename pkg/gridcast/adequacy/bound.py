"""Analytic lower bound of the adequacy ratio and the noise/storage parameters behind it."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, overload

import numpy as np
from scipy.special import erf


if TYPE_CHECKING:
    from collections.abc import Callable

    from numpy.typing import ArrayLike


@dataclass(frozen=True, slots=True)
class NoiseParams:
    """Variances of the independent demand and generation forecast noises."""

    sigma_d2: float
    sigma_g2: float

    def __post_init__(self) -> None:
        for name in ("sigma_d2", "sigma_g2"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                msg = f"{name} must be a finite non-negative variance, got {value}"
                raise ValueError(msg)

    @property
    def sigma2(self) -> float:
        """Variance rate of the stored-energy Wiener process."""
        return self.sigma_d2 + self.sigma_g2

    @classmethod
    def from_step_noise(cls, sigma_d2: float, sigma_g2: float, step_hours: float) -> NoiseParams:
        """Convert per-sample power noise (kW^2) into energy diffusion rates (kWh^2 per hour).

        Accumulating i.i.d. power errors over steps of ``u`` hours adds ``u^2 * var`` of energy
        variance per step, i.e. ``u * var`` per hour.
        """
        if not step_hours > 0:
            msg = f"step_hours must be positive, got {step_hours}"
            raise ValueError(msg)
        return cls(sigma_d2 * step_hours, sigma_g2 * step_hours)


@dataclass(frozen=True, slots=True)
class StorageSpec:
    """Initial stored energy ``s_q``, threshold margin ``lam`` and expected trajectory."""

    s_q: float
    lam: float
    shat: Callable[[np.ndarray], np.ndarray] | None = None

    def __post_init__(self) -> None:
        if not self.s_q >= 0:
            msg = f"s_q must be non-negative, got {self.s_q}"
            raise ValueError(msg)
        if not 0 <= self.lam <= self.s_q:
            msg = f"lambda must lie in [0, s_q={self.s_q}], got {self.lam}"
            raise ValueError(msg)

    @property
    def threshold(self) -> float:
        """Stored-energy level ``s_q - lambda`` that must never be reached."""
        return self.s_q - self.lam

    def expected(self, t: ArrayLike) -> np.ndarray:
        """Return ``S_hat(t)``; flat at ``s_q`` when no trajectory is given."""
        times = np.asarray(t, dtype=float)
        if self.shat is None:
            return np.full(times.shape, self.s_q)
        return np.broadcast_to(np.asarray(self.shat(times), dtype=float), times.shape)

    def is_sufficient(self, t: ArrayLike) -> bool:
        """Check the long-term sufficiency assumption ``S_hat(t) >= s_q`` on a grid."""
        return bool(np.all(self.expected(t) >= self.s_q))


@overload
def adequacy_lower_bound(lam: float, sigma2: float, t: float) -> float: ...


@overload
def adequacy_lower_bound(lam: float, sigma2: float, t: np.ndarray) -> np.ndarray: ...


def adequacy_lower_bound(lam: float, sigma2: float, t: float | np.ndarray) -> float | np.ndarray:
    """Return ``erf(lam / sqrt(2 t sigma2))``, the probability the running maximum stays below ``lam``.

    Raises
    ------
    ValueError
        If ``lam`` is negative or ``sigma2`` or any ``t`` is not positive.
    """
    if lam < 0:
        msg = f"lambda must be non-negative, got {lam}"
        raise ValueError(msg)
    if not sigma2 > 0:
        msg = f"sigma2 must be positive, got {sigma2}"
        raise ValueError(msg)
    times = np.asarray(t, dtype=float)
    if not np.all(times > 0):
        msg = "t must be positive"
        raise ValueError(msg)
    bound = erf(lam / np.sqrt(2.0 * times * sigma2))
    if np.ndim(t) == 0:
        return float(bound)
    return bound
