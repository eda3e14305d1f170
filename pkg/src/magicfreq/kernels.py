"""Hot numerical kernels: numba-compiled loops with a pure-numpy fallback.

The backend is chosen once at import time from the ``MAGICFREQ_BACKEND``
environment variable: ``numba`` (default when numba imports cleanly) or
``numpy``.  Both implementations of every kernel stay importable — the
benchmark in ``benchmarks/bench_backends.py`` and the equivalence tests
run them side by side.

Array conventions shared by all kernels:

* ``weights[nd, nf]``   spectral weight of excited level f at detuning d
* ``coupling[nf, nm, 3]`` squared dipole factors per (F', m, q), q = -1,0,+1
* ``pol[ng, 3]``        polarization intensities |E_{-q}|^2 per geometry
"""

from __future__ import annotations

import math
import os

import numpy as np

__all__ = [
    "BACKEND",
    "NUMBA_ENABLED",
    "faddeeva_real",
    "transition_weights",
    "gamma_rel_grid",
    "delta_gamma_grid",
    "sublevel_mean_grid",
    "equal_absorption_grid",
]

_choice = os.environ.get("MAGICFREQ_BACKEND", "").strip().lower()
if _choice not in ("", "numba", "numpy"):
    raise ValueError(
        f"MAGICFREQ_BACKEND={_choice!r} not understood (use 'numba' or 'numpy')"
    )

NUMBA_ENABLED = False
if _choice != "numpy":
    try:
        from numba import njit

        NUMBA_ENABLED = True
    except ImportError:
        if _choice == "numba":
            raise
BACKEND = "numba" if NUMBA_ENABLED else "numpy"


# --------------------------------------------------------------------------
# Faddeeva function w(z) for Im z >= 0, via Weideman's rational expansion
# (SIAM J. Numer. Anal. 31, 1497 (1994)).  With 64 terms the relative error
# of Re w on the upper half-plane region used here is below 1e-12, well
# inside the 1e-6 budget the Voigt weights are tested against.
# --------------------------------------------------------------------------

_WEIDEMAN_N = 64


def _weideman_coefficients(n: int) -> tuple[float, np.ndarray]:
    m = 2 * n
    big_l = math.sqrt(n / math.sqrt(2.0))
    k = np.arange(-m + 1, m)
    t = big_l * np.tan(k * np.pi / (2 * m))
    f = np.concatenate(([0.0], np.exp(-t * t) * (big_l * big_l + t * t)))
    a = np.real(np.fft.fft(np.fft.fftshift(f))) / (2 * m)
    return big_l, a[1 : n + 1][::-1].copy()  # highest-degree first


_WEIDEMAN_L, _WEIDEMAN_A = _weideman_coefficients(_WEIDEMAN_N)
_INV_SQRT_PI = 1.0 / math.sqrt(math.pi)


def faddeeva_real(x, y: float):
    """Re w(x + iy) for y >= 0, vectorized over x."""
    x = np.asarray(x, dtype=np.float64)
    if y < 0.0:
        raise ValueError("faddeeva_real requires y >= 0")
    if y == 0.0:
        return np.exp(-x * x)
    iz = 1j * (x + 1j * y)
    rec = 1.0 / (_WEIDEMAN_L - iz)
    big_z = (_WEIDEMAN_L + iz) * rec
    poly = np.polyval(_WEIDEMAN_A, big_z)
    return np.real(2.0 * poly * rec * rec + _INV_SQRT_PI * rec)


# --------------------------------------------------------------------------
# numpy implementations
# --------------------------------------------------------------------------


def transition_weights_numpy(delta_l, offsets, sigma, gamma, shift):
    """Spectral weights W[nd, nf]; Gaussian when gamma == 0, else Voigt."""
    delta_l = np.asarray(delta_l, dtype=np.float64)
    arg = offsets[None, :] + shift - delta_l[:, None]
    if gamma == 0.0:
        return np.exp(-0.5 * (arg / sigma) ** 2)
    scale = 1.0 / (sigma * math.sqrt(2.0))
    return faddeeva_real(arg * scale, gamma * scale)


def gamma_rel_grid_numpy(weights, coupling, pol):
    """Relative absorption rates G[nd, ng, nm]."""
    return np.einsum("df,fmq,gq->dgm", weights, coupling, pol, optimize=True)


def delta_gamma_grid_numpy(weights, coupling, pol):
    """Unnormalized max-min spread over m: D[nd, ng]."""
    rates = gamma_rel_grid_numpy(weights, coupling, pol)
    return rates.max(axis=2) - rates.min(axis=2)


def sublevel_mean_grid_numpy(weights, coupling, pol_ref):
    """Mean over m of the rates at one reference polarization: S[nd]."""
    rates = np.einsum("df,fmq,q->dm", weights, coupling, pol_ref, optimize=True)
    return rates.mean(axis=1)


def equal_absorption_grid_numpy(delta_l, offsets, eq_coeff, sigma, gamma, shift):
    """The frequency-dependent factor whose roots are the magic detunings."""
    weights = transition_weights_numpy(delta_l, offsets, sigma, gamma, shift)
    return weights @ eq_coeff


# --------------------------------------------------------------------------
# numba implementations (compiled lazily, cached on disk)
# --------------------------------------------------------------------------

if NUMBA_ENABLED:

    @njit(cache=True)
    def _faddeeva_real_scalar(x, y):
        iz = complex(-y, x)
        rec = 1.0 / (_WEIDEMAN_L - iz)
        big_z = (_WEIDEMAN_L + iz) * rec
        poly = 0.0 + 0.0j
        for c in _WEIDEMAN_A:
            poly = poly * big_z + c
        return (2.0 * poly * rec * rec + _INV_SQRT_PI * rec).real

    @njit(cache=True)
    def _transition_weights_numba(delta_l, offsets, sigma, gamma, shift):
        nd = delta_l.shape[0]
        nf = offsets.shape[0]
        out = np.empty((nd, nf))
        inv_sq = 1.0 / (sigma * math.sqrt(2.0))
        for d in range(nd):
            for f in range(nf):
                arg = offsets[f] + shift - delta_l[d]
                if gamma == 0.0:
                    x = arg / sigma
                    out[d, f] = math.exp(-0.5 * x * x)
                else:
                    out[d, f] = _faddeeva_real_scalar(arg * inv_sq, gamma * inv_sq)
        return out

    @njit(cache=True)
    def _gamma_rel_grid_numba(weights, coupling, pol):
        nd, nf = weights.shape
        nm = coupling.shape[1]
        ng = pol.shape[0]
        out = np.empty((nd, ng, nm))
        cp = np.empty((nf, nm))
        for g in range(ng):
            for f in range(nf):
                for m in range(nm):
                    cp[f, m] = (
                        coupling[f, m, 0] * pol[g, 0]
                        + coupling[f, m, 1] * pol[g, 1]
                        + coupling[f, m, 2] * pol[g, 2]
                    )
            for d in range(nd):
                for m in range(nm):
                    acc = 0.0
                    for f in range(nf):
                        acc += weights[d, f] * cp[f, m]
                    out[d, g, m] = acc
        return out

    @njit(cache=True)
    def _delta_gamma_grid_numba(weights, coupling, pol):
        nd, nf = weights.shape
        nm = coupling.shape[1]
        ng = pol.shape[0]
        out = np.empty((nd, ng))
        cp = np.empty((nf, nm))
        for g in range(ng):
            for f in range(nf):
                for m in range(nm):
                    cp[f, m] = (
                        coupling[f, m, 0] * pol[g, 0]
                        + coupling[f, m, 1] * pol[g, 1]
                        + coupling[f, m, 2] * pol[g, 2]
                    )
            for d in range(nd):
                hi = -np.inf
                lo = np.inf
                for m in range(nm):
                    acc = 0.0
                    for f in range(nf):
                        acc += weights[d, f] * cp[f, m]
                    if acc > hi:
                        hi = acc
                    if acc < lo:
                        lo = acc
                out[d, g] = hi - lo
        return out

    @njit(cache=True)
    def _sublevel_mean_grid_numba(weights, coupling, pol_ref):
        nd, nf = weights.shape
        nm = coupling.shape[1]
        out = np.empty(nd)
        cp = np.empty((nf, nm))
        for f in range(nf):
            for m in range(nm):
                cp[f, m] = (
                    coupling[f, m, 0] * pol_ref[0]
                    + coupling[f, m, 1] * pol_ref[1]
                    + coupling[f, m, 2] * pol_ref[2]
                )
        for d in range(nd):
            acc = 0.0
            for m in range(nm):
                for f in range(nf):
                    acc += weights[d, f] * cp[f, m]
            out[d] = acc / nm
        return out

    @njit(cache=True)
    def _equal_absorption_grid_numba(delta_l, offsets, eq_coeff, sigma, gamma, shift):
        weights = _transition_weights_numba(delta_l, offsets, sigma, gamma, shift)
        nd, nf = weights.shape
        out = np.empty(nd)
        for d in range(nd):
            acc = 0.0
            for f in range(nf):
                acc += weights[d, f] * eq_coeff[f]
            out[d] = acc
        return out

    def transition_weights_numba(delta_l, offsets, sigma, gamma, shift):
        delta_l = np.ascontiguousarray(delta_l, dtype=np.float64)
        return _transition_weights_numba(delta_l, offsets, sigma, gamma, shift)

    def gamma_rel_grid_numba(weights, coupling, pol):
        return _gamma_rel_grid_numba(weights, coupling, pol)

    def delta_gamma_grid_numba(weights, coupling, pol):
        return _delta_gamma_grid_numba(weights, coupling, pol)

    def sublevel_mean_grid_numba(weights, coupling, pol_ref):
        return _sublevel_mean_grid_numba(weights, coupling, pol_ref)

    def equal_absorption_grid_numba(delta_l, offsets, eq_coeff, sigma, gamma, shift):
        delta_l = np.ascontiguousarray(delta_l, dtype=np.float64)
        return _equal_absorption_grid_numba(
            delta_l, offsets, eq_coeff, sigma, gamma, shift
        )

    transition_weights = transition_weights_numba
    gamma_rel_grid = gamma_rel_grid_numba
    delta_gamma_grid = delta_gamma_grid_numba
    sublevel_mean_grid = sublevel_mean_grid_numba
    equal_absorption_grid = equal_absorption_grid_numba
else:
    transition_weights = transition_weights_numpy
    gamma_rel_grid = gamma_rel_grid_numpy
    delta_gamma_grid = delta_gamma_grid_numpy
    sublevel_mean_grid = sublevel_mean_grid_numpy
    equal_absorption_grid = equal_absorption_grid_numpy
