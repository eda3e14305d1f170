"""Locating magic detunings and characterizing their robustness.

A magic detuning is a root of :func:`magicfreq.absorption.equal_absorption_sum`;
there every Zeeman sublevel of the ground hyperfine level absorbs the same,
for every beam direction and linear polarization angle.  Roots are found by
a fixed-resolution scan followed by bisection, which keeps the bracketing
semantics the invariants rely on.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .absorption import (
    Geometry,
    delta_gamma_many,
    equal_absorption_sum,
    polarization_intensities,
    s_f,
    s_f_max,
)
from .angular import HalfInt
from .atomdata import SpeciesLine
from .lineshape import BroadeningModel

__all__ = [
    "MagicFrequencyResult",
    "find_magic_frequencies",
    "refine_root",
    "temperature_sensitivity",
    "robustness_window",
    "window_geometry_sample",
]

DEFAULT_GRID_HZ = 1e6
DEFAULT_REFINE_HZ = 1e3
WINDOW_RESOLUTION_HZ = 1e5
WINDOW_MAX_HALFWIDTH_HZ = 8e7


@dataclass(frozen=True)
class MagicFrequencyResult:
    """One magic detuning with its robustness figures."""

    delta_l_magic_hz: float
    s_f_at_magic: float
    window_halfwidth_hz: float
    temp_sensitivity_hz_per_k: float
    bracket_hz: tuple[float, float]


def _bisect(func, lo: float, hi: float, tol: float) -> float:
    flo = func(lo)
    fhi = func(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0.0:
        raise ValueError(f"no sign change on bracket ({lo}, {hi})")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fmid = func(mid)
        if fmid == 0.0:
            return mid
        if flo * fmid < 0.0:
            hi, fhi = mid, fmid
        else:
            lo, flo = mid, fmid
    return 0.5 * (lo + hi)


def refine_root(line, F, model, bracket_hz, tol_hz: float = DEFAULT_REFINE_HZ) -> float:
    """Bisect equal_absorption_sum inside a sign-changing bracket."""
    lo, hi = float(bracket_hz[0]), float(bracket_hz[1])
    return _bisect(lambda x: equal_absorption_sum(line, F, x, model), lo, hi, tol_hz)


def window_geometry_sample(
    n_theta: int = 32, n_phi: int = 16, exclusion: float = 0.05
) -> np.ndarray:
    """Deterministic (theta, phi) sample as polarization-intensity rows.

    The band |cos^2 theta - 2/3| <= exclusion is dropped: at phi = 0 those
    angles equalize the three polarization intensities, so every detuning
    looks magic there and the sample would carry no information.
    """
    thetas = np.linspace(0.0, math.pi, n_theta)
    phis = np.linspace(0.0, math.pi, n_phi, endpoint=False)
    rows = [
        polarization_intensities(Geometry(theta, phi))
        for theta in thetas
        if abs(math.cos(theta) ** 2 - 2.0 / 3.0) > exclusion
        for phi in phis
    ]
    return np.array(rows)


def robustness_window(
    line,
    F,
    model,
    root_hz: float,
    threshold: float = 0.01,
    *,
    s_f_max_value: float | None = None,
    scan_hz=None,
    resolution_hz: float = WINDOW_RESOLUTION_HZ,
    max_halfwidth_hz: float = WINDOW_MAX_HALFWIDTH_HZ,
) -> float:
    """Largest halfwidth around the root inside which the worst-case
    (over the geometry sample) normalized sublevel spread stays below
    ``threshold``.

    The search expands symmetrically in steps of ``resolution_hz`` and is
    capped at ``max_halfwidth_hz``.
    """
    if scan_hz is None:
        scan_hz = (root_hz - 7e8, root_hz + 7e8)
    if s_f_max_value is None:
        s_f_max_value = s_f_max(line, F, model, scan_hz)
    pol = window_geometry_sample()
    steps = int(max_halfwidth_hz / resolution_hz)
    deltas = root_hz + resolution_hz * np.arange(-steps, steps + 1)
    spread = delta_gamma_many(line, F, deltas, pol, model, s_f_max_value)
    passed = spread.max(axis=1) < threshold
    halfwidth = 0
    while (
        halfwidth < steps
        and passed[steps - halfwidth - 1]
        and passed[steps + halfwidth + 1]
    ):
        halfwidth += 1
    return halfwidth * resolution_hz


def temperature_sensitivity(
    line,
    F,
    model,
    root_hz: float,
    *,
    delta_t_k: float = 1.0,
    refine_hz: float = 1.0,
) -> float:
    """Central finite difference of the root location over T +/- delta_t_k.

    Each perturbed root is re-converged by bisection from a bracket around
    the unperturbed one.  Returns NaN (with a warning) if either perturbed
    root cannot be re-bracketed.
    """
    moved = []
    for sign in (+1.0, -1.0):
        perturbed = model.with_temperature(model.temperature_k + sign * delta_t_k)
        new_root = _track_root(line, F, perturbed, root_hz, refine_hz)
        if new_root is None:
            warnings.warn(
                f"magic root near {root_hz / 1e6:.3f} MHz lost when the "
                f"temperature moved by {sign * delta_t_k:+g} K",
                stacklevel=2,
            )
            return math.nan
        moved.append(new_root)
    return (moved[0] - moved[1]) / (2.0 * delta_t_k)


def _track_root(line, F, model, root_hz, refine_hz, max_expand_hz: float = 3.2e7):
    halfwidth = 2e6
    func = lambda x: equal_absorption_sum(line, F, x, model)
    while halfwidth <= max_expand_hz:
        lo, hi = root_hz - halfwidth, root_hz + halfwidth
        flo, fhi = func(lo), func(hi)
        if flo == 0.0 and fhi == 0.0:
            # locally flat zero (degenerate ladder): the root does not move
            return root_hz
        if flo == 0.0 or fhi == 0.0 or flo * fhi < 0.0:
            return _bisect(func, lo, hi, refine_hz)
        halfwidth *= 2.0
    return None


def find_magic_frequencies(
    line: SpeciesLine,
    F,
    model: BroadeningModel,
    scan_hz,
    *,
    grid_hz: float = DEFAULT_GRID_HZ,
    refine_hz: float = DEFAULT_REFINE_HZ,
    window_threshold: float = 0.01,
    characterize: bool = True,
) -> list[MagicFrequencyResult]:
    """All magic detunings in a scan range, sorted ascending.

    Every sign change of equal_absorption_sum on the ``grid_hz`` grid is
    bracketed and bisected down to ``refine_hz``.  With ``characterize``
    each result also carries s_f at the root, the robustness window and
    the temperature sensitivity; without it those fields are NaN (cheap
    mode for root location only).
    """
    F = HalfInt.of(F)
    lo, hi = float(scan_hz[0]), float(scan_hz[1])
    if not lo < hi:
        raise ValueError(f"scan range must satisfy lo < hi, got ({lo}, {hi})")
    grid = np.arange(lo, hi + grid_hz, grid_hz)
    grid = grid[grid <= hi + 1e-9]
    values = equal_absorption_sum(line, F, grid, model)

    # each entry: (bracket, root-or-None); exact grid zeros skip bisection
    brackets: list[tuple[tuple[float, float], float | None]] = []
    for i in range(len(grid) - 1):
        if values[i] == 0.0:
            brackets.append(((grid[i] - grid_hz, grid[i] + grid_hz), float(grid[i])))
        elif values[i] * values[i + 1] < 0.0:
            brackets.append(((float(grid[i]), float(grid[i + 1])), None))
    if len(values) and values[-1] == 0.0:
        brackets.append(((grid[-1] - grid_hz, grid[-1] + grid_hz), float(grid[-1])))

    normalizer = s_f_max(line, F, model, (lo, hi)) if (characterize and brackets) else None

    results = []
    for bracket, exact in brackets:
        root = exact if exact is not None else refine_root(line, F, model, bracket, refine_hz)
        if characterize:
            window = robustness_window(
                line,
                F,
                model,
                root,
                window_threshold,
                s_f_max_value=normalizer,
                scan_hz=(lo, hi),
            )
            sensitivity = temperature_sensitivity(line, F, model, root)
        else:
            window = math.nan
            sensitivity = math.nan
        results.append(
            MagicFrequencyResult(
                delta_l_magic_hz=root,
                s_f_at_magic=float(s_f(line, F, root, model)),
                window_halfwidth_hz=window,
                temp_sensitivity_hz_per_k=sensitivity,
                bracket_hz=bracket,
            )
        )
    results.sort(key=lambda r: r.delta_l_magic_hz)
    return results
