"""Polarization-moment decomposition of a hyperfine-level density matrix.

A (2F+1)x(2F+1) density matrix decomposes into irreducible spherical
tensor components of rank kappa = 0 .. 2F:

    moment[kappa][q] = sum_{m1,m2} (-1)^(F-m1) <F,m2; F,-m1 | kappa,q> rho[m1,m2]

The rank-0 component is the scalar (population) content: it equals
Tr(rho)/sqrt(2F+1) for any Hermitian matrix.  The transformation is an
orthogonal change of basis on the (m1, m2) index pair, so the inverse is
its transpose and round trips are exact to rounding.

Note the Clebsch-Gordan triangle rule caps the rank at 2F; requesting
higher ranks yields identically zero coefficients.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .absorption import gamma_rel_profile
from .angular import HalfInt, clebsch_gordan, projections

__all__ = [
    "DensityMatrix",
    "PolarizationMoment",
    "density_to_moments",
    "moments_to_density",
    "population",
    "total_absorption",
    "moments_to_json",
    "moments_from_json",
]

COHERENCE_WARN_NORM = 1e-9


@dataclass(frozen=True)
class DensityMatrix:
    """Density matrix of one hyperfine level; basis ordered m = -F .. +F."""

    F: HalfInt
    matrix: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=np.complex128)
        dim = self.F.twice + 1
        if mat.shape != (dim, dim):
            raise ValueError(
                f"matrix shape {mat.shape} does not match F={self.F} "
                f"(expected {(dim, dim)})"
            )
        object.__setattr__(self, "matrix", mat)

    @classmethod
    def from_populations(cls, F, diagonal) -> "DensityMatrix":
        F = HalfInt.of(F)
        diag = np.asarray(diagonal, dtype=np.float64)
        if diag.shape != (F.twice + 1,):
            raise ValueError(f"need {F.twice + 1} populations for F={F}")
        return cls(F, np.diag(diag.astype(np.complex128)))

    @classmethod
    def equal_populations(cls, F, per_level: float) -> "DensityMatrix":
        """Every sublevel carrying the same population ``per_level``."""
        F = HalfInt.of(F)
        return cls.from_populations(F, np.full(F.twice + 1, per_level))

    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def hermiticity_defect(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return self.hermiticity_defect() <= tol

    def validate_physical(self, tol: float = 1e-12) -> "DensityMatrix":
        if not self.is_hermitian(tol):
            raise ValueError(f"matrix is not Hermitian (defect {self.hermiticity_defect():.2e})")
        diag = np.diag(self.matrix)
        if np.max(np.abs(diag.imag)) > tol:
            raise ValueError("diagonal must be real")
        if np.min(diag.real) < -tol:
            raise ValueError("diagonal populations must be non-negative")
        tr = self.trace()
        if not 0.0 < tr <= 1.0 + tol:
            raise ValueError(f"trace {tr} outside (0, 1]")
        return self

    def to_json(self) -> str:
        return json.dumps(
            {
                "F": str(self.F),
                "re": self.matrix.real.tolist(),
                "im": self.matrix.imag.tolist(),
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "DensityMatrix":
        payload = json.loads(text)
        F = HalfInt.of(payload["F"])
        mat = np.asarray(payload["re"], dtype=np.float64) + 1j * np.asarray(
            payload["im"], dtype=np.float64
        )
        return cls(F, mat)


@dataclass(frozen=True)
class PolarizationMoment:
    """Rank-kappa tensor components, ordered q = -kappa .. +kappa."""

    kappa: int
    components: np.ndarray

    def __post_init__(self):
        comps = np.asarray(self.components, dtype=np.complex128)
        if comps.shape != (2 * self.kappa + 1,):
            raise ValueError(
                f"rank {self.kappa} needs {2 * self.kappa + 1} components, "
                f"got shape {comps.shape}"
            )
        object.__setattr__(self, "components", comps)

    def component(self, q: int) -> complex:
        if abs(q) > self.kappa:
            raise ValueError(f"|q|={abs(q)} exceeds rank {self.kappa}")
        return complex(self.components[q + self.kappa])


@lru_cache(maxsize=None)
def _moment_tensor(F: HalfInt) -> tuple[np.ndarray, ...]:
    """T[kappa][q, m1, m2] = (-1)^(F-m1) <F,m2; F,-m1 | kappa,q>."""
    ms = projections(F)
    dim = len(ms)
    tensors = []
    for kappa in range(F.twice + 1):
        t = np.zeros((2 * kappa + 1, dim, dim))
        for qi in range(2 * kappa + 1):
            q = qi - kappa
            for i1, m1 in enumerate(ms):
                for i2, m2 in enumerate(ms):
                    if m2.twice - m1.twice != 2 * q:
                        continue
                    sign = -1.0 if ((F.twice - m1.twice) // 2) % 2 else 1.0
                    t[qi, i1, i2] = sign * clebsch_gordan(F, m2, F, -m1, kappa, q)
        t.setflags(write=False)
        tensors.append(t)
    return tuple(tensors)


def density_to_moments(rho: DensityMatrix) -> list[PolarizationMoment]:
    """All polarization moments, ranks 0 .. 2F."""
    tensors = _moment_tensor(rho.F)
    return [
        PolarizationMoment(kappa, np.einsum("qab,ab->q", t, rho.matrix))
        for kappa, t in enumerate(tensors)
    ]


def moments_to_density(moments, F) -> DensityMatrix:
    """Rebuild the density matrix from a complete rank 0..2F moment set.

    The reconstruction is the transpose of the forward transform (the
    coefficient matrix is orthogonal).  If the supplied components break
    the Hermiticity pattern mom[kappa][-q] = (-1)^q conj(mom[kappa][q]),
    the resulting matrix is returned as-is and a warning flags it.
    """
    F = HalfInt.of(F)
    by_rank = {m.kappa: m for m in moments}
    expected = list(range(F.twice + 1))
    if sorted(by_rank) != expected:
        raise ValueError(
            f"need every rank 0..{F.twice} exactly once, got {sorted(by_rank)}"
        )
    tensors = _moment_tensor(F)
    dim = F.twice + 1
    mat = np.zeros((dim, dim), dtype=np.complex128)
    for kappa, t in enumerate(tensors):
        mat += np.einsum("qab,q->ab", t, by_rank[kappa].components)
    rho = DensityMatrix(F, mat)
    if not rho.is_hermitian(1e-9 * max(1.0, float(np.max(np.abs(mat))))):
        warnings.warn(
            "moment components violate the Hermiticity pattern; "
            "the reconstructed matrix is not Hermitian",
            stacklevel=2,
        )
    return rho


def population(rho: DensityMatrix) -> float:
    """Total population of the level: the scalar-moment content.

    Equal to sqrt(2F+1) * moment[0][0] for Hermitian input; evaluated as
    the trace, which is the same number without the round trip through the
    rank-0 coefficients.
    """
    return rho.trace()


def total_absorption(rho: DensityMatrix, line, delta_l_hz: float, geometry, model) -> float:
    """Population-weighted relative absorption sum_m rho[m,m] * rate(m).

    The rate model is population-only: coherences do not contribute, and a
    warning is emitted when their norm is non-negligible.
    """
    off_diag = rho.matrix - np.diag(np.diag(rho.matrix))
    if np.linalg.norm(off_diag) > COHERENCE_WARN_NORM:
        warnings.warn(
            "off-diagonal density-matrix elements are ignored by the "
            "population-only absorption model",
            stacklevel=2,
        )
    profile = gamma_rel_profile(line, rho.F, [delta_l_hz], geometry, model)
    rates = profile.rates[:, 0]
    return float(np.dot(np.diag(rho.matrix).real, rates))


def moments_to_json(F, moments) -> str:
    """Serialize a moment list;  q runs -kappa..+kappa within each rank."""
    payload = {
        "F": str(HalfInt.of(F)),
        "moments": [
            {
                "kappa": m.kappa,
                "re": m.components.real.tolist(),
                "im": m.components.imag.tolist(),
            }
            for m in sorted(moments, key=lambda m: m.kappa)
        ],
    }
    return json.dumps(payload)


def moments_from_json(text: str) -> tuple[HalfInt, list[PolarizationMoment]]:
    payload = json.loads(text)
    F = HalfInt.of(payload["F"])
    moments = [
        PolarizationMoment(
            int(entry["kappa"]),
            np.asarray(entry["re"], dtype=np.float64)
            + 1j * np.asarray(entry["im"], dtype=np.float64),
        )
        for entry in payload["moments"]
    ]
    return F, moments
