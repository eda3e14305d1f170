"""Alkali D-line datasets: nuclear spin, mass, and the excited hyperfine ladder.

Species files are flat ``key = value`` text (see FORMATS.md) and are fully
validated on load.  The bundled files under ``magicfreq/data`` were
transcribed from the published Steck alkali D-line data tables; each file
records its provenance in comments and in the ``source`` key.

Detuning convention: excited-level offsets are stored relative to the
lowest F' level of the excited manifold, whether or not that level is
dipole-accessible from a given ground F.  A laser detuning of zero
therefore always refers to the ground-F -> lowest-F' energy difference.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .angular import HalfInt

__all__ = [
    "PhysicalConstants",
    "CONSTANTS",
    "SpeciesLine",
    "SpeciesFileError",
    "load_species",
    "loads_species",
    "dumps_species",
    "bundled_names",
    "load_bundled",
    "transitions_from",
]


@dataclass(frozen=True)
class PhysicalConstants:
    """CODATA values used by the whole package; injected here only."""

    boltzmann_j_per_k: float = 1.380649e-23  # exact, 2019 SI
    speed_of_light_m_per_s: float = 2.99792458e8  # exact


CONSTANTS = PhysicalConstants()


class SpeciesFileError(ValueError):
    """A species data file failed to parse or violated an invariant."""


@dataclass(frozen=True)
class SpeciesLine:
    """One alkali D line: ground/excited fine-structure terms and the F' ladder.

    ``excited_levels`` holds ``(F', offset_hz)`` pairs sorted by offset,
    where offset is measured from the lowest excited F' level.
    """

    species: str
    line: str
    nuclear_spin: HalfInt
    mass_kg: float
    j_ground: HalfInt
    j_excited: HalfInt
    frequency_hz: float
    excited_levels: tuple[tuple[HalfInt, float], ...]
    version: str = "1"
    source: str = ""

    @property
    def name(self) -> str:
        return f"{self.species.lower()}_{self.line.lower()}"

    @property
    def provenance(self) -> str:
        src = self.source or "unspecified source"
        return f"{self.species} {self.line} v{self.version} ({src})"

    def ground_f_values(self) -> list[HalfInt]:
        lo = abs(self.j_ground - self.nuclear_spin)
        hi = self.j_ground + self.nuclear_spin
        return HalfInt.range_inclusive(lo, hi)

    def validate(self) -> "SpeciesLine":
        """Check all invariants; raises SpeciesFileError naming the bad field."""
        if self.mass_kg <= 0.0:
            raise SpeciesFileError(f"mass_kg: must be positive, got {self.mass_kg}")
        if self.frequency_hz <= 0.0:
            raise SpeciesFileError(
                f"frequency_hz: must be positive, got {self.frequency_hz}"
            )
        if self.j_ground != HalfInt(1):
            raise SpeciesFileError(
                f"J_ground: alkali D lines have J=1/2, got {self.j_ground}"
            )
        expected = HalfInt.range_inclusive(
            abs(self.j_excited - self.nuclear_spin),
            self.j_excited + self.nuclear_spin,
        )
        seen = [fp for fp, _ in self.excited_levels]
        if sorted(set(t.twice for t in seen)) != [t.twice for t in expected]:
            raise SpeciesFileError(
                "excited_levels: F' values must be exactly "
                f"{[str(f) for f in expected]}, got {[str(f) for f in seen]}"
            )
        if len(seen) != len(set(t.twice for t in seen)):
            raise SpeciesFileError("excited_levels: duplicate F' value")
        offsets = [off for _, off in self.excited_levels]
        if offsets[0] != 0.0:
            raise SpeciesFileError(
                f"excited_levels: lowest offset must be 0, got {offsets[0]}"
            )
        if any(b <= a for a, b in zip(offsets, offsets[1:])):
            raise SpeciesFileError("excited_levels: offsets must increase strictly")
        return self


_REQUIRED_KEYS = (
    "species",
    "line",
    "I",
    "mass_kg",
    "J_ground",
    "J_excited",
    "frequency_hz",
)


def loads_species(text: str, origin: str = "<string>") -> SpeciesLine:
    """Parse a species file from a string.  See FORMATS.md for the grammar."""
    fields: dict[str, str] = {}
    levels: list[tuple[HalfInt, float]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].strip()
        if not stripped:
            continue
        tokens = stripped.split()
        if tokens[0] == "fprime":
            body = [t for t in tokens[1:] if t != "="]
            if len(body) != 2:
                raise SpeciesFileError(
                    f"{origin}:{lineno}: expected 'fprime <2F'> <offset_hz>'"
                )
            try:
                twice_fp = int(body[0])
                offset = float(body[1])
            except ValueError as exc:
                raise SpeciesFileError(f"{origin}:{lineno}: {exc}") from None
            levels.append((HalfInt(twice_fp), offset))
            continue
        if "=" not in stripped:
            raise SpeciesFileError(f"{origin}:{lineno}: expected 'key = value'")
        key, _, value = stripped.partition("=")
        key, value = key.strip(), value.strip()
        if key in fields:
            raise SpeciesFileError(f"{origin}:{lineno}: duplicate key {key!r}")
        fields[key] = value

    for key in _REQUIRED_KEYS:
        if key not in fields:
            raise SpeciesFileError(f"{origin}: missing required key {key!r}")
    if not levels:
        raise SpeciesFileError(f"{origin}: no fprime lines found")

    try:
        spin = HalfInt.of(fields["I"])
        jg = HalfInt.of(fields["J_ground"])
        je = HalfInt.of(fields["J_excited"])
        mass = float(fields["mass_kg"])
        freq = float(fields["frequency_hz"])
    except (ValueError, TypeError) as exc:
        raise SpeciesFileError(f"{origin}: {exc}") from None

    levels.sort(key=lambda pair: pair[1])
    line = SpeciesLine(
        species=fields["species"],
        line=fields["line"],
        nuclear_spin=spin,
        mass_kg=mass,
        j_ground=jg,
        j_excited=je,
        frequency_hz=freq,
        excited_levels=tuple(levels),
        version=fields.get("version", "1"),
        source=fields.get("source", ""),
    )
    return line.validate()


def load_species(path) -> SpeciesLine:
    """Load and validate a species file from disk."""
    path = Path(path)
    return loads_species(path.read_text(encoding="utf-8"), origin=str(path))


def dumps_species(line: SpeciesLine) -> str:
    """Serialize in canonical form; load(dumps(x)) reproduces x bit-exactly."""
    rows = [
        f"version = {line.version}",
        f"species = {line.species}",
        f"line = {line.line}",
        f"I = {line.nuclear_spin}",
        f"mass_kg = {line.mass_kg!r}",
        f"J_ground = {line.j_ground}",
        f"J_excited = {line.j_excited}",
        f"frequency_hz = {line.frequency_hz!r}",
    ]
    if line.source:
        rows.append(f"source = {line.source}")
    for fp, off in line.excited_levels:
        rows.append(f"fprime {fp.twice} {off!r}")
    return "\n".join(rows) + "\n"


def _data_dir():
    return resources.files("magicfreq") / "data"


def bundled_names() -> list[str]:
    """Names of the species files shipped with the package."""
    return sorted(
        entry.name[: -len(".txt")]
        for entry in _data_dir().iterdir()
        if entry.name.endswith(".txt")
    )


def load_bundled(name: str) -> SpeciesLine:
    """Load a bundled dataset by name, e.g. ``load_bundled("rb87_d2")``."""
    entry = _data_dir() / f"{name}.txt"
    if not entry.is_file():
        raise SpeciesFileError(
            f"no bundled species {name!r}; available: {', '.join(bundled_names())}"
        )
    return loads_species(entry.read_text(encoding="utf-8"), origin=f"bundled:{name}")


def transitions_from(line: SpeciesLine, F) -> list[tuple[HalfInt, float]]:
    """Dipole-allowed (F', offset_hz) pairs reachable from ground level F.

    Offsets keep the manifold zero (lowest F' of the excited manifold), so
    they plug directly into the laser-detuning axis used everywhere else.
    """
    F = HalfInt.of(F)
    if F not in line.ground_f_values():
        raise ValueError(
            f"F={F} is not a ground hyperfine level of {line.name} "
            f"(valid: {[str(f) for f in line.ground_f_values()]})"
        )
    out = []
    for fp, off in line.excited_levels:
        if abs(F.twice - fp.twice) > 2:
            continue
        if F.twice == 0 and fp.twice == 0:
            continue  # 0 -> 0 is dipole-forbidden
        out.append((fp, off))
    return out
