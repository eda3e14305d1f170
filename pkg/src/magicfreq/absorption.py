"""Sublevel-resolved relative absorption rates of linearly polarized light.

For a ground hyperfine level F probed on a D line, the relative rate from
sublevel m is a sum over the dipole-allowed excited levels F':

    rate(m) = sum_F' W(offset_F' - detuning) * (2F'+1) * sixj^2
              * sum_q |E_{-q}|^2 * <F', m-q; 1, q | F, m>^2

with W the Doppler or Voigt weight, sixj = {J J' 1; F' F I}, and E_q the
spherical components of the polarization vector in the field frame.  All
m-independent prefactors are dropped; only ratios between sublevels and
between detunings are meaningful.

The m-dependence factorizes: for any two sublevels,

    rate(m1) - rate(m2) = (1 - 3|E_+1|^2) * (m1^2 - m2^2) * eq_sum(detuning)

where ``equal_absorption_sum`` below evaluates eq_sum.  Its roots are the
detunings at which every sublevel absorbs equally for every beam geometry
(the magic detunings found by :mod:`magicfreq.magic`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import kernels
from .angular import HalfInt, clebsch_gordan, projections, wigner6j
from .atomdata import SpeciesLine, transitions_from
from .lineshape import BroadeningModel, doppler_sigma

__all__ = [
    "Geometry",
    "REFERENCE_GEOMETRY",
    "SublevelProfile",
    "polarization_components",
    "polarization_intensities",
    "gamma_rel",
    "gamma_rel_profile",
    "equal_absorption_sum",
    "s_f",
    "s_f_max",
    "s_f_argmax",
    "delta_gamma",
    "surface",
]


@dataclass(frozen=True)
class Geometry:
    """Beam geometry: theta between B and k, phi between E and the B-k plane."""

    theta: float
    phi: float


REFERENCE_GEOMETRY = Geometry(0.0, 0.0)


def polarization_components(geometry: Geometry) -> tuple[complex, complex, complex]:
    """Spherical components (E_-1, E_0, E_+1) of a unit linear polarization."""
    ct, st = math.cos(geometry.theta), math.sin(geometry.theta)
    cp, sp = math.cos(geometry.phi), math.sin(geometry.phi)
    e0 = complex(-st * cp, 0.0)
    e_plus = complex(ct * cp, sp) / math.sqrt(2.0)
    e_minus = complex(ct * cp, -sp) / math.sqrt(2.0)
    return e_minus, e0, e_plus


def polarization_intensities(geometry: Geometry) -> np.ndarray:
    """|E_{-q}|^2 for q = -1, 0, +1, i.e. the weights paired with each CGC."""
    e_minus, e0, e_plus = polarization_components(geometry)
    return np.array([abs(e_plus) ** 2, abs(e0) ** 2, abs(e_minus) ** 2])


def _fraction_factor(F: HalfInt, fp: HalfInt) -> float:
    # ((3*delta_FF' - 1)(2F'+1) + F - F') / (2F'(F'+1)); the F'=0 value is
    # the analytic continuation of the F'=F-1 branch (-1/F at F=1).
    if fp.twice == 0:
        return -1.0
    f_frac = Fraction(F.twice, 2)
    fp_frac = Fraction(fp.twice, 2)
    delta = 1 if F.twice == fp.twice else 0
    num = (3 * delta - 1) * (2 * fp_frac + 1) + f_frac - fp_frac
    return float(num / (2 * fp_frac * (fp_frac + 1)))


@lru_cache(maxsize=None)
def _line_tensors(line: SpeciesLine, F: HalfInt):
    """Per-(line, F) static arrays: offsets, coupling tensor, eq-sum coefficients."""
    channels = transitions_from(line, F)
    ms = projections(F)
    offsets = np.array([off for _, off in channels])
    coupling = np.zeros((len(channels), len(ms), 3))
    eq_coeff = np.zeros(len(channels))
    for fi, (fp, _) in enumerate(channels):
        sixj_sq = wigner6j(line.j_ground, line.j_excited, 1, fp, F, line.nuclear_spin) ** 2
        eq_coeff[fi] = sixj_sq * _fraction_factor(F, fp)
        for mi, m in enumerate(ms):
            for qi, q in enumerate((-1, 0, 1)):
                m_exc = m - q
                if abs(m_exc.twice) > fp.twice:
                    continue
                cgc = clebsch_gordan(fp, m_exc, 1, q, F, m)
                coupling[fi, mi, qi] = (fp.twice + 1) * sixj_sq * cgc * cgc
    for arr in (offsets, coupling, eq_coeff):
        arr.setflags(write=False)
    return offsets, coupling, eq_coeff


def sigma_for(line: SpeciesLine, model: BroadeningModel) -> float:
    """Doppler standard deviation of this line at the model temperature."""
    return doppler_sigma(line.frequency_hz, model.temperature_k, line.mass_kg)


def _weights(line, F, delta_l, model):
    offsets, _, _ = _line_tensors(line, HalfInt.of(F))
    sigma = sigma_for(line, model)
    return kernels.transition_weights(
        np.atleast_1d(np.asarray(delta_l, dtype=np.float64)),
        offsets,
        sigma,
        model.lorentz_hwhm_hz,
        model.pressure_shift_hz,
    )


@dataclass(frozen=True)
class SublevelProfile:
    """Relative absorption rates on a detuning grid, one row per m = -F..+F."""

    F: HalfInt
    grid_hz: np.ndarray
    rates: np.ndarray  # shape (2F+1, len(grid_hz))

    def m_values(self) -> list[HalfInt]:
        return projections(self.F)

    def validate(self, tol: float = 1e-12) -> "SublevelProfile":
        if np.any(self.rates < -tol):
            raise ValueError("rates must be non-negative")
        flipped = self.rates[::-1]
        scale = max(np.max(np.abs(self.rates)), 1.0)
        if np.max(np.abs(self.rates - flipped)) > tol * scale:
            raise ValueError("rates for +m and -m must coincide")
        return self


def gamma_rel_profile(line, F, delta_l_hz, geometry, model) -> SublevelProfile:
    """Rates for all sublevels over a detuning grid."""
    F = HalfInt.of(F)
    _, coupling, _ = _line_tensors(line, F)
    weights = _weights(line, F, delta_l_hz, model)
    pol = polarization_intensities(geometry)[None, :]
    rates = kernels.gamma_rel_grid(weights, coupling, pol)[:, 0, :]
    grid = np.atleast_1d(np.asarray(delta_l_hz, dtype=np.float64)).copy()
    return SublevelProfile(F=F, grid_hz=grid, rates=rates.T.copy())


def gamma_rel(line, F, m_F, delta_l_hz: float, geometry, model) -> float:
    """Relative absorption rate of one sublevel at one detuning."""
    F = HalfInt.of(F)
    m = HalfInt.of(m_F)
    if abs(m.twice) > F.twice or (F.twice - m.twice) % 2:
        raise ValueError(f"m_F={m} is not a projection of F={F}")
    profile = gamma_rel_profile(line, F, [delta_l_hz], geometry, model)
    return float(profile.rates[(m.twice + F.twice) // 2, 0])


def equal_absorption_sum(line, F, delta_l_hz, model):
    """The frequency factor of the factorized equal-absorption condition.

    Scalar in, scalar out; arrays broadcast elementwise.  Positive means
    larger-|m| sublevels absorb more when |E_+1|^2 < 1/3, negative the
    opposite; roots are the magic detunings.
    """
    F = HalfInt.of(F)
    offsets, _, eq_coeff = _line_tensors(line, F)
    sigma = sigma_for(line, model)
    out = kernels.equal_absorption_grid(
        np.atleast_1d(np.asarray(delta_l_hz, dtype=np.float64)),
        offsets,
        eq_coeff,
        sigma,
        model.lorentz_hwhm_hz,
        model.pressure_shift_hz,
    )
    if np.isscalar(delta_l_hz):
        return float(out[0])
    return out


def s_f(line, F, delta_l_hz, model):
    """Sublevel-averaged rate; geometry-free (evaluated at the reference one)."""
    F = HalfInt.of(F)
    _, coupling, _ = _line_tensors(line, F)
    weights = _weights(line, F, delta_l_hz, model)
    pol_ref = polarization_intensities(REFERENCE_GEOMETRY)
    out = kernels.sublevel_mean_grid(weights, coupling, pol_ref)
    if np.isscalar(delta_l_hz):
        return float(out[0])
    return out


def s_f_argmax(
    line, F, model, scan_hz, coarse_hz: float = 1e6, refine_hz: float = 1e3
) -> tuple[float, float]:
    """Location and value of the maximum of s_f over a scan range.

    Coarse grid scan followed by golden-section refinement of the winning
    bracket down to ``refine_hz``.
    """
    lo, hi = float(scan_hz[0]), float(scan_hz[1])
    if not lo < hi:
        raise ValueError(f"scan range must satisfy lo < hi, got ({lo}, {hi})")
    grid = np.arange(lo, hi + coarse_hz, coarse_hz)
    grid = grid[grid <= hi + 1e-9]
    values = s_f(line, F, grid, model)
    best = int(np.argmax(values))
    a = grid[max(best - 1, 0)]
    b = grid[min(best + 1, len(grid) - 1)]
    if a == b:
        return float(grid[best]), float(values[best])

    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc = float(s_f(line, F, c, model))
    fd = float(s_f(line, F, d, model))
    while b - a > refine_hz:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = float(s_f(line, F, c, model))
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = float(s_f(line, F, d, model))
    x = 0.5 * (a + b)
    return x, float(s_f(line, F, x, model))


def s_f_max(line, F, model, scan_hz) -> float:
    """Maximum of s_f over the scan range (the rate normalizer)."""
    return s_f_argmax(line, F, model, scan_hz)[1]


def delta_gamma(line, F, delta_l_hz, geometry, model, s_f_max_value: float):
    """(max_m rate - min_m rate) / s_f_max at one detuning and geometry."""
    if not s_f_max_value > 0.0:
        raise ValueError(f"s_f_max_value must be positive, got {s_f_max_value}")
    F = HalfInt.of(F)
    _, coupling, _ = _line_tensors(line, F)
    weights = _weights(line, F, delta_l_hz, model)
    pol = polarization_intensities(geometry)[None, :]
    spread = kernels.delta_gamma_grid(weights, coupling, pol)[:, 0]
    out = spread / s_f_max_value
    if np.isscalar(delta_l_hz):
        return float(out[0])
    return out


def delta_gamma_many(line, F, delta_l_hz, pol_matrix, model, s_f_max_value: float):
    """delta_gamma over a detuning grid x a batch of polarization rows.

    ``pol_matrix`` holds |E_{-q}|^2 rows as produced by
    :func:`polarization_intensities`; returns shape (ndetunings, ngeometries).
    """
    F = HalfInt.of(F)
    _, coupling, _ = _line_tensors(line, F)
    weights = _weights(line, F, delta_l_hz, model)
    return kernels.delta_gamma_grid(weights, coupling, pol_matrix) / s_f_max_value


def surface(line, F, theta_grid, delta_l_grid, phi: float, model):
    """delta_gamma on the (theta x detuning) product grid, plus the s_f row.

    Returns ``(dg, sf, sfm)``: ``dg[i, j]`` is delta_gamma at
    ``theta_grid[i]``, ``delta_l_grid[j]``; ``sf[j]`` the sublevel-averaged
    rate; ``sfm`` the normalizer max(s_f) refined over the grid's range.
    """
    theta_grid = np.asarray(theta_grid, dtype=np.float64)
    delta_l_grid = np.asarray(delta_l_grid, dtype=np.float64)
    if theta_grid.size == 0 or delta_l_grid.size == 0:
        raise ValueError("theta and detuning grids must be non-empty")
    F = HalfInt.of(F)
    pol = np.array(
        [polarization_intensities(Geometry(t, phi)) for t in theta_grid]
    )
    scan = (float(delta_l_grid.min()), float(delta_l_grid.max()))
    if scan[0] == scan[1]:
        sfm = float(s_f(line, F, scan[0], model))
    else:
        sfm = s_f_max(line, F, model, scan)
    dg = delta_gamma_many(line, F, delta_l_grid, pol, model, sfm).T
    sf = s_f(line, F, delta_l_grid, model)
    return dg, sf, sfm
