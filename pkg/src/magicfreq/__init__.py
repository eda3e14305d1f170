"""Zeeman-sublevel-resolved absorption of alkali D lines.

Computes relative absorption rates of linearly polarized light per Zeeman
sublevel, locates the magic detunings at which absorption is independent
of the sublevel populations and the beam geometry, and decomposes density
matrices into polarization moments.
"""

__version__ = "0.1.0"

from .absorption import (
    Geometry,
    SublevelProfile,
    delta_gamma,
    equal_absorption_sum,
    gamma_rel,
    gamma_rel_profile,
    polarization_components,
    s_f,
    s_f_max,
    surface,
)
from .angular import HalfInt, clebsch_gordan, wigner3j, wigner6j
from .atomdata import (
    CONSTANTS,
    SpeciesLine,
    bundled_names,
    load_bundled,
    load_species,
    transitions_from,
)
from .kernels import BACKEND
from .lineshape import BroadeningModel, doppler_sigma, weight
from .magic import (
    MagicFrequencyResult,
    find_magic_frequencies,
    robustness_window,
    temperature_sensitivity,
)
from .moments import (
    DensityMatrix,
    PolarizationMoment,
    density_to_moments,
    moments_to_density,
    population,
    total_absorption,
)

__all__ = [
    "__version__",
    "BACKEND",
    "CONSTANTS",
    "BroadeningModel",
    "DensityMatrix",
    "Geometry",
    "HalfInt",
    "MagicFrequencyResult",
    "PolarizationMoment",
    "SpeciesLine",
    "SublevelProfile",
    "bundled_names",
    "clebsch_gordan",
    "delta_gamma",
    "density_to_moments",
    "doppler_sigma",
    "equal_absorption_sum",
    "find_magic_frequencies",
    "gamma_rel",
    "gamma_rel_profile",
    "load_bundled",
    "load_species",
    "moments_to_density",
    "polarization_components",
    "population",
    "robustness_window",
    "s_f",
    "s_f_max",
    "surface",
    "temperature_sensitivity",
    "total_absorption",
    "transitions_from",
    "weight",
    "wigner3j",
    "wigner6j",
]
