"""Independent reference computations used to validate the Laplace engine.

Nothing here reuses the sparse assembler or the per-point solver: mode tables
come from explicit eigenvectors, the zero-dissipation references from dense
diagonalisation of the displaced-oscillator model, and the time-domain
reference from a generic ODE integrator plus quadrature.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson, solve_ivp

from .hierarchy import enumerate_basis
from .model import AggregateSpec, Geometry, System, build_system_hamiltonian
from .spectrum import SpectrumResult

__all__ = [
    "ModeTable",
    "StickSpectrum",
    "chain_modes",
    "ring_modes",
    "chain_strength_closed_form",
    "ring_strength_printed",
    "franck_condon_monomer",
    "dense_vibronic_spectrum",
    "bare_electronic_spectrum",
    "TimeDomainReference",
    "time_domain_reference",
]


@dataclass(frozen=True)
class ModeTable:
    """Transition frequencies and oscillator strengths of the bare aggregate.

    Strengths are always computed from eigenvector sums |sum_n c_jn|^2;
    closed forms are kept separate as cross-checks.
    """

    entries: tuple  # of (j, omega_j, f_j), j = 1..N
    geometry: Geometry
    n_monomers: int
    coupling: float
    angle: float

    def frequencies(self) -> np.ndarray:
        return np.array([e[1] for e in self.entries])

    def strengths(self) -> np.ndarray:
        return np.array([e[2] for e in self.entries])

    def bright(self) -> tuple:
        """Entries with non-negligible strength."""
        return tuple(e for e in self.entries if e[2] > 1e-12)


def chain_modes(n: int, coupling: float, angle: float = 0.0) -> ModeTable:
    """Eigenmodes of the open chain.

    omega_j = 2 V cos(theta) cos(j pi / (N + 1)) with eigenvector components
    sqrt(2/(N+1)) sin(j n pi / (N+1)); even-j modes are dark.
    """
    if n < 1:
        raise ValueError("chain needs n >= 1")
    scale = 2.0 * coupling * math.cos(angle)
    entries = []
    for j in range(1, n + 1):
        omega_j = scale * math.cos(j * math.pi / (n + 1))
        c = math.sqrt(2.0 / (n + 1)) * np.sin(j * np.arange(1, n + 1) * np.pi / (n + 1))
        entries.append((j, omega_j, float(abs(c.sum()) ** 2)))
    return ModeTable(
        entries=tuple(entries), geometry=Geometry.LINEAR,
        n_monomers=n, coupling=coupling, angle=angle,
    )


def ring_modes(n: int, coupling: float, angle: float = 0.0) -> ModeTable:
    """Eigenmodes of the ring: omega_j = 2 V cos(theta) cos(2 pi j / N).

    Only the j = N (fully symmetric) mode is bright; its eigenvector sum
    gives strength N.
    """
    if n < 3:
        raise ValueError("ring needs n >= 3")
    scale = 2.0 * coupling * math.cos(angle)
    entries = []
    for j in range(1, n + 1):
        omega_j = scale * math.cos(2.0 * math.pi * j / n)
        c = np.exp(2j * math.pi * j * np.arange(1, n + 1) / n) / math.sqrt(n)
        entries.append((j, omega_j, float(abs(c.sum()) ** 2)))
    return ModeTable(
        entries=tuple(entries), geometry=Geometry.RING,
        n_monomers=n, coupling=coupling, angle=angle,
    )


def chain_strength_closed_form(j: int, n: int) -> float:
    """Closed-form chain strength: zero for even j, else cot^2-weighted."""
    if j % 2 == 0:
        return 0.0
    half = j * math.pi / (2.0 * (n + 1))
    return (2.0 / (n + 1)) / math.tan(half) ** 2


def ring_strength_printed(j: int, n: int) -> float:
    """The (N-1)^2/N closed form sometimes quoted for the bright ring mode.

    Direct evaluation of the eigenvector sum gives N instead; both values are
    reported by the CLI so the discrepancy stays visible.
    """
    return (n - 1) ** 2 / n if j == n else 0.0


@dataclass(frozen=True)
class StickSpectrum:
    """Discrete sticks (position, weight >= 0) plus their total weight."""

    sticks: tuple
    normalization: float

    def positions(self) -> np.ndarray:
        return np.array([s[0] for s in self.sticks])

    def weights(self) -> np.ndarray:
        return np.array([s[1] for s in self.sticks])

    def broadened(self, epsilon: float, grid: np.ndarray) -> np.ndarray:
        return lorentzian_mixture(self.positions(), self.weights(), epsilon, grid)


def lorentzian_mixture(positions, weights, epsilon, grid) -> np.ndarray:
    """Sum of weights * eps / (eps^2 + (omega - position)^2) on the grid."""
    grid = np.asarray(grid, dtype=float)
    out = np.zeros_like(grid)
    for pos, wgt in zip(positions, weights):
        out += wgt * epsilon / (epsilon**2 + (grid - pos) ** 2)
    return out


def _displaced_oscillator(g: float, omega_vib: float, n_max: int) -> np.ndarray:
    """Excited-state Hamiltonian of one mode with linear coupling sqrt(g)."""
    dim = n_max + 1
    h = np.diag(omega_vib * np.arange(dim)).astype(float)
    kappa = math.sqrt(g)
    for nph in range(n_max):
        h[nph, nph + 1] = h[nph + 1, nph] = -kappa * math.sqrt(nph + 1)
    return h


def franck_condon_monomer(g: float, omega_vib: float = 1.0, n_max: int = 20) -> StickSpectrum:
    """Vibronic sticks of a single monomer at zero dissipation.

    Dense diagonalisation of the displaced-oscillator model; weights are the
    squared overlaps with the vibrational ground state.  The result follows a
    Poisson progression with Huang-Rhys factor S = g / Omega^2: sticks at
    -g/Omega + n Omega weighted exp(-S) S^n / n!.
    """
    if g < 0:
        raise ValueError("g must be >= 0")
    if omega_vib <= 0:
        raise ValueError("omega_vib must be > 0")
    s_hr = g / omega_vib**2
    tail = 1.0 - math.fsum(
        math.exp(-s_hr) * s_hr**k / math.factorial(k) for k in range(n_max + 1)
    )
    if tail > 1e-10:
        raise ValueError(
            f"Fock truncation n_max = {n_max} leaves a Poisson tail of {tail:.2e} "
            "(must be < 1e-10); increase n_max"
        )
    energies, vectors = np.linalg.eigh(_displaced_oscillator(g, omega_vib, n_max))
    weights = np.abs(vectors[0, :]) ** 2
    order = np.argsort(energies)
    sticks = tuple(
        (float(energies[i]), float(weights[i])) for i in order
    )
    return StickSpectrum(sticks=sticks, normalization=float(weights.sum()))


def _vibronic_hamiltonian(spec: AggregateSpec, g: float, omega_vib: float, n_max: int) -> np.ndarray:
    """Aggregate + one explicit mode per monomer, in the single-excitation manifold."""
    n = spec.n_monomers
    fock = n_max + 1
    h_sys = build_system_hamiltonian(spec).real
    ladder = np.zeros((fock, fock))
    for nph in range(n_max):
        ladder[nph, nph + 1] = ladder[nph + 1, nph] = math.sqrt(nph + 1)
    number = np.diag(np.arange(fock)).astype(float)
    eye_f = np.eye(fock)
    kappa = math.sqrt(g)

    dim = n * fock**n
    h = np.zeros((dim, dim))
    eye_sites = np.eye(n)
    h += np.kron(h_sys, np.eye(fock**n))
    for mode in range(n):
        ops_num = [number if q == mode else eye_f for q in range(n)]
        num_full = ops_num[0]
        for op in ops_num[1:]:
            num_full = np.kron(num_full, op)
        h += omega_vib * np.kron(eye_sites, num_full)

        ops_lad = [ladder if q == mode else eye_f for q in range(n)]
        lad_full = ops_lad[0]
        for op in ops_lad[1:]:
            lad_full = np.kron(lad_full, op)
        proj = np.zeros((n, n))
        proj[mode, mode] = 1.0
        h -= kappa * np.kron(proj, lad_full)
    return h


def dense_vibronic_spectrum(
    spec: AggregateSpec,
    g: float,
    omega_vib: float,
    n_max: int,
    epsilon: float,
    grid,
    dipoles=None,
    max_dimension: int = 20_000,
) -> SpectrumResult:
    """Zero-dissipation spectrum from explicit vibronic diagonalisation.

    Exact up to the Fock truncation; the per-monomer modes are kept explicitly
    so the result is an independent cross-check of the hierarchy at gamma = 0.
    """
    n = spec.n_monomers
    fock = n_max + 1
    dim = n * fock**n
    if dim > max_dimension:
        raise ValueError(
            f"vibronic dimension {dim} exceeds the cap of {max_dimension}"
        )
    grid = np.asarray(grid, dtype=float)
    mu = spec.dipoles if dipoles is None else np.asarray(dipoles, float)

    h = _vibronic_hamiltonian(spec, g, omega_vib, n_max)
    energies, vectors = np.linalg.eigh(h)

    # Bright vector: sum_m mu_m |site m, all modes in vacuum>.
    bright = np.zeros(dim)
    for m in range(n):
        bright[m * fock**n] = mu[m]
    overlaps = vectors.T @ bright
    weights = np.abs(overlaps) ** 2

    f = lorentzian_mixture(energies, weights, epsilon, grid)
    meta = {
        "oracle": "dense_vibronic_spectrum",
        "model": {
            "n_monomers": n, "geometry": spec.geometry.value,
            "coupling": spec.dipole_coupling, "angle": spec.dipole_angle,
        },
        "bath": {"g": g, "gamma": 0.0, "omega": omega_vib},
        "numerics": {"epsilon": epsilon, "n_max": n_max},
    }
    return SpectrumResult(omega=grid, f=f, meta=meta)


def bare_electronic_spectrum(spec: AggregateSpec, epsilon: float, grid, dipoles=None) -> np.ndarray:
    """Decoupled-bath (g = 0) spectrum: a Lorentzian per electronic eigenmode."""
    h = build_system_hamiltonian(spec).real
    mu = spec.dipoles if dipoles is None else np.asarray(dipoles, float)
    energies, vectors = np.linalg.eigh(h)
    weights = np.abs(vectors.T @ mu) ** 2
    return lorentzian_mixture(energies, weights, epsilon, np.asarray(grid, float))


@dataclass(frozen=True)
class TimeDomainReference:
    """Correlation trajectories c_nm(t) and their numerical Laplace transform."""

    t: np.ndarray
    c: np.ndarray  # shape (len(t), N, N); c[:, n, m] from initial site m
    decayed: bool

    def laplace_transform(self, s_values) -> np.ndarray:
        """Quadrature of exp(-s t) c(t) dt for each s; shape (len(s), N, N)."""
        s_values = np.atleast_1d(np.asarray(s_values, dtype=complex))
        t = self.t
        out = np.empty((len(s_values), *self.c.shape[1:]), dtype=complex)
        for i, s in enumerate(s_values):
            kernel = np.exp(-s * t)
            out[i] = simpson(kernel[:, None, None] * self.c, x=t, axis=0)
            # crude tail bound: |int_T^inf| <= |C(T)| e^{-Re(s) T} / Re(s)
            tail = abs(kernel[-1]) * np.abs(self.c[-1]).max() / max(s.real, 1e-300)
            if tail > 1e-6:
                warnings.warn(
                    f"insufficient decay at t_max = {t[-1]:g} for s = {s:g}: "
                    f"estimated transform tail {tail:.1e}",
                    stacklevel=2,
                )
        return out


def _dense_generator(system: System, e_max: int) -> np.ndarray:
    """Time-evolution generator of the truncated hierarchy, built by plain loops.

    Deliberately independent of the sparse assembler: d/dt psi = G psi with
    G = -(i H + sum_j k_j decay_j) on the diagonal, +k_j weight_j down-coupling
    and -1 up-coupling through the site projector of the owning monomer.
    """
    n = system.n_monomers
    weights, decays, owners = system.bath.flattened()
    basis = enumerate_basis(len(weights), e_max, block_size=n)
    h = build_system_hamiltonian(system.aggregate)
    dim = len(basis) * n
    gen = np.zeros((dim, dim), dtype=complex)
    for r, index in enumerate(basis.indices):
        row0 = r * n
        gen[row0:row0 + n, row0:row0 + n] -= 1j * h
        gen[row0:row0 + n, row0:row0 + n] -= np.eye(n) * np.dot(index.k, decays)
        for j in range(basis.m):
            site = int(owners[j])
            down = basis.down_ordinals[r, j]
            if down >= 0:
                gen[row0 + site, down * n + site] += index.k[j] * weights[j]
            up = basis.up_ordinals[r, j]
            if up >= 0:
                gen[row0 + site, up * n + site] -= 1.0
    return gen


def time_domain_reference(
    system: System,
    e_max: int,
    *,
    t_max: float = None,
    dt: float = 0.005,
    rtol: float = 1e-10,
    atol: float = 1e-12,
    window: float = 150.0,
    decay_tol: float = 1e-9,
    t_max_cap: float = 5000.0,
) -> TimeDomainReference:
    """Integrate the noise-free hierarchy in time from each initial site.

    Uses adaptive high-order stepping (DOP853) with dense per-step sampling at
    `dt` for the later quadrature.  If `t_max` is not given, integration
    proceeds in windows until the correlation has decayed below `decay_tol`
    or `t_max_cap` is hit (reported as insufficient decay).
    """
    n = system.n_monomers
    gen = _dense_generator(system, e_max)
    dim = gen.shape[0]

    def rhs(_t, y):
        return gen @ y

    adaptive = t_max is None
    horizon = t_max_cap if adaptive else float(t_max)
    n_windows = max(1, math.ceil(horizon / window))

    t_chunks = []
    c_chunks = []
    states = []
    for m in range(n):
        y0 = np.zeros(dim, dtype=complex)
        y0[m] = 1.0
        states.append(y0)

    t_start = 0.0
    decayed = False
    first = True
    for _ in range(n_windows):
        span = min(window, horizon - t_start)
        n_steps = max(1, int(round(span / dt)))
        t_eval = t_start + dt * np.arange(n_steps + 1)
        chunk = np.empty((len(t_eval), n, n), dtype=complex)
        for m in range(n):
            sol = solve_ivp(
                rhs, (t_start, t_eval[-1]), states[m],
                method="DOP853", t_eval=t_eval, rtol=rtol, atol=atol,
            )
            if not sol.success:
                raise RuntimeError(f"time-domain integration failed: {sol.message}")
            chunk[:, :, m] = sol.y[:n, :].T
            states[m] = sol.y[:, -1]
        if first:
            t_chunks.append(t_eval)
            c_chunks.append(chunk)
            first = False
        else:  # drop the duplicated window edge
            t_chunks.append(t_eval[1:])
            c_chunks.append(chunk[1:])
        t_start = t_eval[-1]
        if adaptive and np.abs(chunk).max() < decay_tol:
            decayed = True
            break
        if t_start >= horizon - dt / 2:
            break

    t = np.concatenate(t_chunks)
    c = np.concatenate(c_chunks)
    if not adaptive:
        decayed = bool(np.abs(c[-1]).max() < decay_tol)
    elif not decayed:
        warnings.warn(
            f"correlation had not decayed below {decay_tol:g} by t = {t[-1]:g}; "
            "Laplace transforms may carry a tail error",
            stacklevel=2,
        )
    return TimeDomainReference(t=t, c=c, decayed=decayed)
