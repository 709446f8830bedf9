"""Aggregate and bath definitions.

An aggregate is a chain or ring of N two-level monomers restricted to the
single-excitation manifold; each monomer is linearly coupled to its own
vibrational environment described by a sum of exponentially decaying
correlation terms (one term = one Lorentzian spectral density).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

__all__ = [
    "Geometry",
    "AggregateSpec",
    "BathTerm",
    "BathSpec",
    "System",
    "build_system_hamiltonian",
    "correlation_at_zero",
    "spectral_density",
]


class Geometry(str, Enum):
    LINEAR = "linear"
    RING = "ring"

    @classmethod
    def parse(cls, value) -> "Geometry":
        if isinstance(value, Geometry):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ValueError(
                f"unknown geometry {value!r}; expected 'linear' or 'ring'"
            ) from None


def _as_float_tuple(values, n, default, name):
    if values is None:
        return (float(default),) * n
    out = tuple(float(v) for v in values)
    if len(out) != n:
        raise ValueError(f"{name} must have length {n}, got {len(out)}")
    if not all(math.isfinite(v) for v in out):
        raise ValueError(f"{name} contains non-finite entries")
    return out


@dataclass(frozen=True)
class AggregateSpec:
    """Geometry, couplings and transition dipoles of an N-monomer aggregate.

    The electronic coupling between nearest neighbours is
    ``dipole_coupling * cos(dipole_angle)``; for a ring the bond between
    monomers 1 and N is included.  Site energies default to the degenerate
    case (all zero) and dipole magnitudes default to one.
    """

    n_monomers: int
    geometry: Geometry = Geometry.LINEAR
    site_energies: tuple[float, ...] = None
    dipole_coupling: float = 1.0
    dipole_angle: float = 0.0
    dipole_magnitudes: tuple[float, ...] = None
    dipole_parallel: bool = True

    def __post_init__(self):
        n = int(self.n_monomers)
        object.__setattr__(self, "n_monomers", n)
        object.__setattr__(self, "geometry", Geometry.parse(self.geometry))
        if n < 1:
            raise ValueError("n_monomers must be >= 1")
        if self.geometry is Geometry.RING and n < 3:
            raise ValueError("ring geometry requires n_monomers >= 3")
        if not self.dipole_parallel:
            raise NotImplementedError(
                "non-parallel dipole prefactors are not supported; "
                "the dipole angle enters only through the coupling"
            )
        for name in ("dipole_coupling", "dipole_angle"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, v)
        object.__setattr__(
            self,
            "site_energies",
            _as_float_tuple(self.site_energies, n, 0.0, "site_energies"),
        )
        object.__setattr__(
            self,
            "dipole_magnitudes",
            _as_float_tuple(self.dipole_magnitudes, n, 1.0, "dipole_magnitudes"),
        )

    @property
    def dipoles(self) -> np.ndarray:
        return np.asarray(self.dipole_magnitudes, dtype=float)


def build_system_hamiltonian(spec: AggregateSpec) -> np.ndarray:
    """Return the N x N single-excitation Hamiltonian of the aggregate.

    Diagonal entries are the site energies; nearest-neighbour entries are
    ``V cos(theta)`` with the ring closing the 1-N bond.  The result is
    real-symmetric, returned as complex for use in the hierarchy.
    """
    n = spec.n_monomers
    h = np.zeros((n, n), dtype=complex)
    np.fill_diagonal(h, spec.site_energies)
    v = spec.dipole_coupling * math.cos(spec.dipole_angle)
    for i in range(n - 1):
        h[i, i + 1] += v
        h[i + 1, i] += v
    if spec.geometry is Geometry.RING:
        h[0, n - 1] += v
        h[n - 1, 0] += v
    return h


@dataclass(frozen=True)
class BathTerm:
    """One exponential term of a bath correlation function.

    The term represents ``alpha(tau) = weight * exp(-decay * tau)`` for
    ``tau > 0``, with ``Re(decay) = gamma >= 0`` the dissipation rate and
    ``Im(decay) = Omega`` the centre frequency of the associated Lorentzian
    spectral density ``2 g gamma / (gamma^2 + (omega - Omega)^2)``.
    """

    weight: complex
    decay: complex

    def __post_init__(self):
        w = complex(self.weight)
        d = complex(self.decay)
        if not (math.isfinite(w.real) and math.isfinite(w.imag)):
            raise ValueError("bath term weight must be finite")
        if not (math.isfinite(d.real) and math.isfinite(d.imag)):
            raise ValueError("bath term decay must be finite")
        if d.real < 0:
            raise ValueError("Re(decay) must be >= 0: correlations may not grow")
        object.__setattr__(self, "weight", w)
        object.__setattr__(self, "decay", d)

    @classmethod
    def lorentzian(cls, g: float, gamma: float, omega: float = 1.0) -> "BathTerm":
        """Term for a single Lorentzian of weight g, width gamma, centre omega."""
        if g < 0:
            raise ValueError("lorentzian weight g must be >= 0")
        return cls(weight=complex(g), decay=complex(gamma, omega))

    @property
    def gamma(self) -> float:
        return self.decay.real

    @property
    def center(self) -> float:
        return self.decay.imag


@dataclass(frozen=True)
class BathSpec:
    """Per-monomer lists of bath correlation terms.

    Monomers couple to statistically independent environments; the flattened
    term count M (monomer-major, term-minor) sets the length of the hierarchy
    multi-index.
    """

    per_monomer_terms: tuple[tuple[BathTerm, ...], ...]

    def __post_init__(self):
        terms = tuple(tuple(ts) for ts in self.per_monomer_terms)
        if not terms:
            raise ValueError("bath must cover at least one monomer")
        for i, ts in enumerate(terms):
            if len(ts) == 0:
                raise ValueError(f"monomer {i + 1} has no bath terms")
            if not all(isinstance(t, BathTerm) for t in ts):
                raise TypeError("per_monomer_terms entries must be BathTerm")
        object.__setattr__(self, "per_monomer_terms", terms)

    @classmethod
    def uniform(cls, n_monomers: int, g: float, gamma: float, omega: float = 1.0) -> "BathSpec":
        term = BathTerm.lorentzian(g, gamma, omega)
        return cls(per_monomer_terms=tuple((term,) for _ in range(n_monomers)))

    @classmethod
    def from_terms(cls, n_monomers: int, terms) -> "BathSpec":
        """Identical multi-term bath on every monomer."""
        shared = tuple(terms)
        return cls(per_monomer_terms=tuple(shared for _ in range(n_monomers)))

    @property
    def n_monomers(self) -> int:
        return len(self.per_monomer_terms)

    @property
    def shared(self) -> bool:
        first = self.per_monomer_terms[0]
        return all(ts == first for ts in self.per_monomer_terms)

    @property
    def term_count(self) -> int:
        return sum(len(ts) for ts in self.per_monomer_terms)

    def flattened(self):
        """Monomer-major flattening: (weights, decays, slot_monomer).

        slot_monomer[j] is the 0-based monomer owning hierarchy slot j.
        """
        weights, decays, owners = [], [], []
        for n, ts in enumerate(self.per_monomer_terms):
            for t in ts:
                weights.append(t.weight)
                decays.append(t.decay)
                owners.append(n)
        return (
            np.asarray(weights, dtype=complex),
            np.asarray(decays, dtype=complex),
            np.asarray(owners, dtype=np.int64),
        )


def correlation_at_zero(bath: BathSpec, monomer: int) -> complex:
    """Bath correlation at tau=0 for one monomer: the sum of term weights."""
    terms = bath.per_monomer_terms[monomer]
    return complex(sum(t.weight for t in terms))


def spectral_density(term: BathTerm, omega: float) -> float:
    """Lorentzian spectral density 2 g gamma / (gamma^2 + (omega - Omega)^2).

    Undefined at gamma = 0, where the density degenerates to a delta
    distribution (the hierarchy itself still runs at gamma = 0).
    """
    gamma = term.gamma
    if gamma <= 0.0:
        raise ValueError("spectral density is a delta distribution at gamma = 0")
    g = term.weight.real
    return 2.0 * g * gamma / (gamma**2 + (omega - term.center) ** 2)


@dataclass(frozen=True)
class System:
    """An aggregate together with its bath."""

    aggregate: AggregateSpec
    bath: BathSpec

    def __post_init__(self):
        if self.bath.n_monomers != self.aggregate.n_monomers:
            raise ValueError(
                f"bath covers {self.bath.n_monomers} monomers, aggregate has "
                f"{self.aggregate.n_monomers}"
            )

    @classmethod
    def uniform(
        cls,
        n_monomers: int,
        geometry=Geometry.LINEAR,
        coupling: float = 1.0,
        angle: float = 0.0,
        g: float = 1.0,
        gamma: float = 1.0,
        omega: float = 1.0,
        site_energies=None,
        dipole_magnitudes=None,
    ) -> "System":
        agg = AggregateSpec(
            n_monomers=n_monomers,
            geometry=geometry,
            site_energies=site_energies,
            dipole_coupling=coupling,
            dipole_angle=angle,
            dipole_magnitudes=dipole_magnitudes,
        )
        return cls(aggregate=agg, bath=BathSpec.uniform(n_monomers, g, gamma, omega))

    @property
    def n_monomers(self) -> int:
        return self.aggregate.n_monomers
