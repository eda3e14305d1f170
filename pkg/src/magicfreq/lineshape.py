"""Doppler and Voigt spectral weights.

Weights are peak-unnormalized: the Doppler weight is exp(-d^2/2 sigma^2)
with value 1 on resonance, and the Voigt weight Re w((d + i*gamma)/(sigma
sqrt(2))) reduces to it exactly as gamma -> 0.  Only ratios between the
excited hyperfine components matter downstream, so no area normalization
is applied.

Natural linewidth, laser linewidth and Zeeman splitting are not modelled;
they are far below the Doppler scale for warm alkali vapor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .atomdata import CONSTANTS
from .kernels import faddeeva_real

__all__ = ["BroadeningModel", "doppler_sigma", "weight"]


@dataclass(frozen=True)
class BroadeningModel:
    """Spectral model: pure Doppler, or Voigt with a uniform pressure shift.

    The pressure shift is added to every transition frequency of the line
    (one scalar per buffer-gas cell); the Lorentzian half width at half
    maximum feeds the Voigt kernel.
    """

    kind: str
    temperature_k: float
    lorentz_hwhm_hz: float = 0.0
    pressure_shift_hz: float = 0.0

    def __post_init__(self):
        if self.kind not in ("doppler", "voigt"):
            raise ValueError(f"kind must be 'doppler' or 'voigt', got {self.kind!r}")
        if not self.temperature_k > 0.0:
            raise ValueError(f"temperature_k must be positive, got {self.temperature_k}")
        if self.lorentz_hwhm_hz < 0.0:
            raise ValueError(f"lorentz_hwhm_hz must be >= 0, got {self.lorentz_hwhm_hz}")
        if self.kind == "doppler" and (
            self.lorentz_hwhm_hz != 0.0 or self.pressure_shift_hz != 0.0
        ):
            raise ValueError("doppler model must have zero width and zero shift")

    @classmethod
    def doppler(cls, temperature_k: float) -> "BroadeningModel":
        return cls("doppler", temperature_k)

    @classmethod
    def voigt(
        cls,
        temperature_k: float,
        lorentz_hwhm_hz: float,
        pressure_shift_hz: float = 0.0,
    ) -> "BroadeningModel":
        return cls("voigt", temperature_k, lorentz_hwhm_hz, pressure_shift_hz)

    def with_temperature(self, temperature_k: float) -> "BroadeningModel":
        return replace(self, temperature_k=temperature_k)


def doppler_sigma(frequency_hz: float, temperature_k: float, mass_kg: float) -> float:
    """Doppler standard deviation f * sqrt(kB T / m c^2) in Hz."""
    if frequency_hz <= 0.0:
        raise ValueError(f"frequency_hz must be positive, got {frequency_hz}")
    if temperature_k <= 0.0:
        raise ValueError(f"temperature_k must be positive, got {temperature_k}")
    if mass_kg <= 0.0:
        raise ValueError(f"mass_kg must be positive, got {mass_kg}")
    c = CONSTANTS.speed_of_light_m_per_s
    return frequency_hz * math.sqrt(
        CONSTANTS.boltzmann_j_per_k * temperature_k / (mass_kg * c * c)
    )


def weight(model: BroadeningModel, delta_hz, sigma_hz: float):
    """Spectral weight at detuning ``delta_hz`` from one transition.

    ``delta_hz`` must already include any pressure shift; the caller owns
    the shift bookkeeping because it applies per transition frequency.
    Accepts scalars or arrays.
    """
    if not sigma_hz > 0.0:
        raise ValueError(f"sigma_hz must be positive, got {sigma_hz}")
    delta = np.asarray(delta_hz, dtype=np.float64)
    if model.kind == "doppler" or model.lorentz_hwhm_hz == 0.0:
        out = np.exp(-0.5 * (delta / sigma_hz) ** 2)
    else:
        scale = 1.0 / (sigma_hz * math.sqrt(2.0))
        out = faddeeva_real(delta * scale, model.lorentz_hwhm_hz * scale)
    if np.isscalar(delta_hz):
        return float(out)
    return out
