"""Species data: masses, quantum defects, model-potential parameters.

The numbers live in a versioned JSON file (``data/rb_species.json``) so the
physics inputs stay auditable and swappable.  Schema (per species entry)::

    {
      "name":                      "Rb87" | "Rb85" | <custom>,
      "mass_u":                    float, atomic mass in u,
      "rydberg_constant_1_per_m":  float, mass-corrected Rydberg constant,
      "defects": [ {"l": int, "j2": int (=2j), "delta0": float, "delta2": float}, ... ],
      "model_potential":           optional; parametric core potential
                                   {"z": int, "alpha_c": a.u., "terms":
                                    [{"l", "a1", "a2", "a3", "a4", "rc"}, ...]},
      "notes":                     optional free text
    }

A species without ``model_potential`` is treated as hydrogen-like
(pure -1/r core), which is what the test fixtures use.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .constants import ATOMIC_MASS, RYDBERG_INF
from .errors import ConfigurationError


@dataclass(frozen=True)
class ModelPotentialTerm:
    a1: float
    a2: float
    a3: float
    a4: float
    rc: float


@dataclass(frozen=True)
class ModelPotential:
    z: int
    alpha_c: float  # core polarizability, a.u.
    terms: dict[int, ModelPotentialTerm]  # keyed by l; highest l reused above

    def term_for(self, l: int) -> ModelPotentialTerm:
        return self.terms[min(l, max(self.terms))]


@dataclass(frozen=True, eq=False)
class Species:
    """Immutable single-species structure data.

    Instances hash/compare by identity; the bundled loader returns
    singletons, so levels of the same species share one object.
    """

    name: str
    mass_u: float
    rydberg_constant: float  # 1/m, mass corrected
    defect_table: dict[tuple[int, int], tuple[float, float]]  # (l, 2j) -> (d0, d2)
    model_potential: ModelPotential | None = None
    notes: str = ""

    def __post_init__(self):
        if self.mass_u <= 0:
            raise ConfigurationError(f"{self.name}: mass must be positive")
        if self.rydberg_constant <= 0:
            raise ConfigurationError(f"{self.name}: Rydberg constant must be positive")
        for (l, j2), (d0, _d2) in self.defect_table.items():
            if d0 < 0:
                raise ConfigurationError(
                    f"{self.name}: delta0 < 0 for series l={l}, j={j2 / 2}"
                )

    @property
    def mass(self) -> float:
        """Atomic mass in kg."""
        return self.mass_u * ATOMIC_MASS

    @property
    def reduced_electron_mass(self) -> float:
        """Electron reduced mass in units of m_e (from the scaled Rydberg)."""
        return self.rydberg_constant / RYDBERG_INF

    def defect_coefficients(self, l: int, j: float) -> tuple[float, float]:
        key = (l, round(2 * j))
        try:
            return self.defect_table[key]
        except KeyError:
            raise ConfigurationError(
                f"{self.name}: no quantum defect tabulated for series "
                f"l={l}, j={j} (add it to the species data file)"
            ) from None


def _parse_species(entry: dict) -> Species:
    for key in ("name", "mass_u", "rydberg_constant_1_per_m", "defects"):
        if key not in entry:
            raise ConfigurationError(f"species entry missing required field '{key}'")
    defects: dict[tuple[int, int], tuple[float, float]] = {}
    for d in entry["defects"]:
        defects[(int(d["l"]), int(d["j2"]))] = (float(d["delta0"]), float(d["delta2"]))
    mp = None
    if entry.get("model_potential"):
        raw = entry["model_potential"]
        terms = {
            int(t["l"]): ModelPotentialTerm(
                a1=float(t["a1"]),
                a2=float(t["a2"]),
                a3=float(t["a3"]),
                a4=float(t["a4"]),
                rc=float(t["rc"]),
            )
            for t in raw["terms"]
        }
        mp = ModelPotential(z=int(raw["z"]), alpha_c=float(raw["alpha_c"]), terms=terms)
    return Species(
        name=entry["name"],
        mass_u=float(entry["mass_u"]),
        rydberg_constant=float(entry["rydberg_constant_1_per_m"]),
        defect_table=defects,
        model_potential=mp,
        notes=entry.get("notes", ""),
    )


def load_species_file(path: str | Path | None = None) -> dict[str, Species]:
    """Load all species from a JSON data file (bundled file when path is None)."""
    if path is None:
        text = resources.files("rydbell").joinpath("data/rb_species.json").read_text()
    else:
        text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"species data file is not valid JSON: {exc}") from exc
    entries = doc["species"] if isinstance(doc, dict) else doc
    table = {}
    for entry in entries:
        sp = _parse_species(entry)
        table[sp.name] = sp
    return table


_BUILTIN: dict[str, Species] | None = None


def get_species(name: str) -> Species:
    """Bundled species by name ('Rb87' or 'Rb85')."""
    global _BUILTIN
    if _BUILTIN is None:
        _BUILTIN = load_species_file()
    try:
        return _BUILTIN[name]
    except KeyError:
        raise ConfigurationError(
            f"unknown species '{name}'; bundled: {sorted(_BUILTIN)}"
        ) from None


@dataclass(frozen=True)
class RydbergLevel:
    """Fine-structure Rydberg level |n l j m_j> of one species."""

    species: Species
    n: int
    l: int
    j: float
    m_j: float

    def __post_init__(self):
        j2, m2 = round(2 * self.j), round(2 * self.m_j)
        if abs(j2 - 2 * self.j) > 1e-9 or abs(m2 - 2 * self.m_j) > 1e-9:
            raise ConfigurationError("j and m_j must be integer or half-integer")
        if self.n <= self.l:
            raise ConfigurationError(f"need n > l, got n={self.n}, l={self.l}")
        allowed_j2 = {2 * self.l + 1} if self.l == 0 else {2 * self.l - 1, 2 * self.l + 1}
        if j2 not in allowed_j2:
            raise ConfigurationError(f"j={self.j} incompatible with l={self.l}")
        if abs(m2) > j2:
            raise ConfigurationError(f"|m_j|={abs(self.m_j)} exceeds j={self.j}")

    def family(self) -> tuple[int, int, float]:
        """The (n, l, j) series this level belongs to."""
        return (self.n, self.l, self.j)

    def with_m(self, m_j: float) -> "RydbergLevel":
        return RydbergLevel(self.species, self.n, self.l, self.j, m_j)

    def label(self) -> str:
        letters = "spdfghiklm"
        lx = letters[self.l] if self.l < len(letters) else f"l{self.l}"
        return f"{self.species.name} {self.n}{lx}{round(2 * self.j)}/2 m={self.m_j:+g}"


@dataclass(frozen=True)
class FieldConfig:
    """Static magnetic field along the quantization axis (lab y)."""

    b_gauss: float
    quantization_axis: tuple[float, float, float] = (0.0, 1.0, 0.0)

    def __post_init__(self):
        if self.b_gauss < 0:
            raise ConfigurationError("field magnitude must be non-negative")
        ax = self.quantization_axis
        norm = (ax[0] ** 2 + ax[1] ** 2 + ax[2] ** 2) ** 0.5
        if abs(norm - 1.0) > 1e-12:
            raise ConfigurationError("quantization axis must be normalized to 1 (1e-12)")

    @property
    def b_tesla(self) -> float:
        return self.b_gauss * 1e-4
