"""Validation matrix: every release criterion as a runnable check.

The checks are shared between ``vibrospec validate`` and the acceptance test
suite.  Each returns a CheckResult with the measured values in `detail`, so a
failure is diagnosable from the printed line alone.

Depth choices: the hierarchy depth defaults to 12, but checks that are
mathematically depth-independent (the sum rule) or evaluated deep in the
overdamped regime (the strong-dissipation limit, where high tiers carry
weight suppressed by powers of g / gamma^2) run the largest aggregates at
reduced depth with an explicit convergence guard.  This keeps the matrix
honest on a single core.
"""

from __future__ import annotations

import filecmp
import itertools
import math
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .hierarchy import enumerate_basis
from .model import Geometry, System
from .oracle import chain_modes, dense_vibronic_spectrum, ring_modes, time_domain_reference
from .solver import SweepPlan, sweep_frequency
from .spectrum import find_peaks, integrated_intensity, spectrum_from_blocks

__all__ = ["CheckResult", "run_criterion", "run_profile", "reference_grids", "CRITERIA"]

SQ5 = math.sqrt(5.0)

# Electronic transition frequencies of the bare aggregates at V = 1, theta = 0;
# rows j = 1..N.  Chains host one bright mode per odd j, rings only j = N.
CHAIN_FREQUENCIES = {
    1: (0.0,),
    2: (1.0, -1.0),
    3: (math.sqrt(2.0), 0.0, -math.sqrt(2.0)),
    4: ((SQ5 + 1) / 2, (SQ5 - 1) / 2, -(SQ5 - 1) / 2, -(SQ5 + 1) / 2),
}
RING_FREQUENCIES = {
    3: (-1.0, -1.0, 2.0),
    4: (0.0, -2.0, 0.0, 2.0),
}


@dataclass
class CheckResult:
    criterion: int
    name: str
    passed: bool
    detail: str
    extras: dict = None


def _spectrum(system, grid, e_max, epsilon=0.01, workers=1):
    plan = SweepPlan(omega_grid=grid, epsilon=epsilon, e_max=e_max, workers=workers)
    blocks = sweep_frequency(system, plan)
    meta = {"numerics": {"epsilon": epsilon}}
    return spectrum_from_blocks(blocks, system.aggregate.dipoles, meta)


def check_analytic_tables(workers: int = 1) -> CheckResult:
    worst = 0.0
    for n, expected in CHAIN_FREQUENCIES.items():
        got = chain_modes(n, 1.0).frequencies()
        worst = max(worst, float(np.abs(got - np.array(expected)).max()))
    for n, expected in RING_FREQUENCIES.items():
        got = ring_modes(n, 1.0).frequencies()
        worst = max(worst, float(np.abs(got - np.array(expected)).max()))
    # strengths: chain closed forms and the sum rule; ring bright mode = N
    for n in range(1, 5):
        table = chain_modes(n, 1.0)
        worst = max(worst, abs(float(table.strengths().sum()) - n))
    for n in (3, 4):
        table = ring_modes(n, 1.0)
        bright = table.entries[n - 1][2]
        worst = max(worst, abs(bright - n))
    return CheckResult(
        1, "analytic mode tables", worst <= 1e-12,
        f"max deviation {worst:.2e} (tol 1e-12)",
    )


def check_markovian_limit(workers: int = 1) -> CheckResult:
    # Deep overdamped regime: high tiers are damped by k * gamma = 50 k, so a
    # shallow hierarchy is converged; the guard re-solves two tiers deeper.
    cases = [
        (2, Geometry.LINEAR, 1.0, 12),
        (3, Geometry.LINEAR, math.sqrt(2.0), 8),
        (4, Geometry.LINEAR, (SQ5 + 1) / 2, 6),
        (3, Geometry.RING, 2.0, 8),
        (4, Geometry.RING, 2.0, 6),
    ]
    grid = np.linspace(-4.0, 6.0, 1001)
    details = []
    ok = True
    for n, geom, target, e_max in cases:
        system = System.uniform(n, geometry=geom, coupling=1.0, g=1.0, gamma=50.0)
        result = _spectrum(system, grid, e_max, workers=workers)
        peak = float(grid[np.argmax(result.f)])
        err = abs(peak - target)
        window = grid[np.abs(grid - peak) <= 0.2]
        guard = _spectrum(system, window, e_max + 2, workers=workers)
        guard_peak = float(window[np.argmax(guard.f)])
        converged = abs(guard_peak - peak) <= 0.01
        ok &= err <= 0.02 and converged
        details.append(f"{geom.value} N={n}: peak {peak:+.3f} vs {target:+.3f}")
    return CheckResult(
        2, "strong-dissipation peak positions", ok,
        "; ".join(details) + " (tol 0.02)",
    )


def check_monomer_vibronic(workers: int = 1) -> CheckResult:
    grid = np.linspace(-4.0, 6.0, 2001)
    system = System.uniform(1, g=1.0, gamma=0.0, omega=1.0)
    result = _spectrum(system, grid, 12, workers=workers)
    peaks = find_peaks(result, rel_threshold=1e-3).positions()
    expected = np.array([-1.0, 0.0, 1.0, 2.0, 3.0])
    step = grid[1] - grid[0]
    pos_ok = all(np.abs(peaks - e).min() <= step + 1e-9 for e in expected)

    dense = dense_vibronic_spectrum(
        system.aggregate, g=1.0, omega_vib=1.0, n_max=20, epsilon=0.01, grid=grid
    )
    dev = float(np.abs(result.f - dense.f).max() / result.f.max())
    curve_ok = dev <= 1e-4
    return CheckResult(
        3, "zero-dissipation monomer progression", pos_ok and curve_ok,
        f"peak positions within one grid step: {pos_ok}; "
        f"pointwise deviation {dev:.2e} of max (tol 1e-4)",
        extras={"positions_ok": pos_ok, "pointwise_dev": dev},
    )


def check_cross_method(workers: int = 1) -> CheckResult:
    grid = np.linspace(-4.0, 6.0, 201)
    epsilon = 0.01
    worst = 0.0
    for n, coupling in [(1, 0.0), (2, 0.1), (2, 1.0)]:
        for gamma in (0.05, 1.0, 5.0):
            system = System.uniform(n, coupling=coupling, g=1.0, gamma=gamma)
            plan = SweepPlan(omega_grid=grid, epsilon=epsilon, e_max=8, workers=workers)
            blocks = sweep_frequency(system, plan)
            c_laplace = np.stack([b.c_tilde for b in blocks])
            reference = time_domain_reference(system, 8)
            c_time = reference.laplace_transform(epsilon - 1j * grid)
            worst = max(worst, float(np.abs(c_time - c_laplace).max()))
    return CheckResult(
        4, "time-domain vs Laplace-domain agreement", worst <= 1e-6,
        f"max |c_time - c_laplace| = {worst:.2e} (tol 1e-6)",
    )


def check_sum_rule(workers: int = 1) -> CheckResult:
    # The integral equals pi N for every truncation depth (the correlation
    # starts at the identity); the largest aggregates run at reduced depth.
    grid = np.linspace(-8.0, 10.0, 3601)
    geometries = [
        (1, Geometry.LINEAR, 12), (2, Geometry.LINEAR, 12),
        (3, Geometry.LINEAR, 8), (4, Geometry.LINEAR, 6),
        (3, Geometry.RING, 8), (4, Geometry.RING, 6),
    ]
    worst = 0.0
    ok = True
    for n, geom, e_max in geometries:
        for g, gamma in [(1.0, 5.0), (1.0, 0.05), (3.0, 0.05)]:
            system = System.uniform(n, geometry=geom, coupling=1.0, g=g, gamma=gamma)
            result = _spectrum(system, grid, e_max, workers=workers)
            integral = integrated_intensity(result)
            rel = abs(integral - math.pi * n) / (math.pi * n)
            worst = max(worst, rel)
            ok &= rel <= 0.01
    return CheckResult(
        5, "integrated-intensity sum rule", ok,
        f"worst relative deviation from pi*N: {worst:.2e} (tol 1e-2)",
    )


def check_truncation_convergence(workers: int = 1) -> CheckResult:
    grid = np.linspace(-4.0, 6.0, 2001)
    system = System.uniform(2, coupling=1.0, g=1.0, gamma=0.05)
    f10 = _spectrum(system, grid, 10, workers=workers).f
    f12 = _spectrum(system, grid, 12, workers=workers).f
    change = float(np.abs(f12 - f10).max() / np.abs(f12).max())
    return CheckResult(
        6, "truncation convergence on the dimer", change < 1e-3,
        f"sup-norm relative change depth 10 -> 12: {change:.2e} (tol 1e-3)",
    )


def _dimer_peak_count(gamma: float, grid, workers: int = 1) -> int:
    system = System.uniform(2, coupling=1.0, g=1.0, gamma=gamma)
    result = _spectrum(system, grid, 12, workers=workers)
    return len(find_peaks(result, rel_threshold=0.05, min_separation=0.02))


def check_splitting_signature(workers: int = 1) -> CheckResult:
    grid = np.linspace(-4.0, 6.0, 1001)
    count_markov = _dimer_peak_count(5.0, grid, workers)
    count_memory = _dimer_peak_count(0.05, grid, workers)
    # Onset: largest gamma (descending scan) at which a second peak appears.
    onset = None
    for gamma in np.geomspace(2.0, 0.05, 17):
        if _dimer_peak_count(float(gamma), grid, workers) >= 2:
            onset = float(gamma)
            break
    ok = count_markov == 1 and count_memory >= 2 and onset is not None and 0.5 <= onset <= 2.0
    return CheckResult(
        7, "dissipation-driven splitting signature", ok,
        f"peaks at gamma=5: {count_markov} (want 1); at gamma=0.05: "
        f"{count_memory} (want >=2); onset at gamma={onset} (want in [0.5, 2])",
        extras={
            "count_markov": count_markov,
            "count_memory": count_memory,
            "onset": onset,
        },
    )


def check_basis_counts(workers: int = 1) -> CheckResult:
    ok = True
    checked = 0
    for m in range(1, 5):
        for e_max in range(0, 13):
            basis = enumerate_basis(m, e_max)
            expected = math.comb(e_max + m, m)
            brute = {
                k for k in itertools.product(range(e_max + 1), repeat=m)
                if sum(k) <= e_max
            }
            ok &= len(basis) == expected == len(brute)
            ok &= {idx.k for idx in basis.indices} == brute
            checked += 1
    return CheckResult(
        8, "basis combinatorics vs brute force", ok,
        f"{checked} (m, depth) pairs checked against C(depth+m, m)",
    )


def check_determinism(workers: int = 1) -> CheckResult:
    from .cli import main as cli_main

    overrides = [
        "model.n=2", "bath.gamma=0.5",
        "numerics.omega_points=101", "numerics.e_max=6",
        "sweep.axis='gamma'", "sweep.values=[0.5, 5.0]",
    ]
    with tempfile.TemporaryDirectory() as tmp:
        paths = []
        for workers in (1, 8):
            out = Path(tmp) / f"run_w{workers}"
            argv = ["sweep", "--output", str(out)]
            for item in overrides + [f"numerics.workers={workers}"]:
                argv += ["--set", item]
            code = cli_main(argv)
            if code != 0:
                return CheckResult(9, "worker-count determinism", False,
                                   f"sweep exited with code {code}")
            paths.append(out.with_suffix(".csv"))
        identical = filecmp.cmp(paths[0], paths[1], shallow=False)
    return CheckResult(
        9, "worker-count determinism", identical,
        "CSV bytes identical for 1 vs 8 workers" if identical
        else "CSV output differs between 1 and 8 workers",
    )


CRITERIA = {
    1: check_analytic_tables,
    2: check_markovian_limit,
    3: check_monomer_vibronic,
    4: check_cross_method,
    5: check_sum_rule,
    6: check_truncation_convergence,
    7: check_splitting_signature,
    8: check_basis_counts,
    9: check_determinism,
}

QUICK_PROFILE = (1, 3, 6, 7, 8)
FULL_PROFILE = (1, 2, 3, 4, 5, 6, 7, 8, 9)


def run_criterion(number: int, workers: int = 1) -> CheckResult:
    return CRITERIA[number](workers=workers)


def run_profile(profile: str, grid_dir=None, workers: int = 1):
    numbers = QUICK_PROFILE if profile == "quick" else FULL_PROFILE
    results = [run_criterion(i, workers=workers) for i in numbers]
    if profile == "full" and grid_dir is not None:
        reference_grids(grid_dir, workers=workers)
    return results


# ---------------------------------------------------------------------------
# Reduced-resolution reference data grids for the 2-d parameter maps
# ---------------------------------------------------------------------------

GRID_DEPTH_BY_N = {1: 12, 2: 12, 3: 10, 4: 8}


def _grid_panels():
    gammas = tuple(np.geomspace(0.01, 10.0, 60))
    gs = tuple(np.linspace(0.0, 3.0, 60))
    panels = [
        ("monomer_vs_dissipation", 1, Geometry.LINEAR, 0.0, ("gamma", gammas), {}),
        ("monomer_vs_coupling", 1, Geometry.LINEAR, 0.0, ("g", gs), {"gamma": 0.05}),
    ]
    for v in (0.1, 0.5, 1.0):
        panels.append((f"dimer_vs_dissipation_V{v:g}", 2, Geometry.LINEAR, v,
                       ("gamma", gammas), {}))
        panels.append((f"dimer_vs_coupling_V{v:g}", 2, Geometry.LINEAR, v,
                       ("g", gs), {"gamma": 0.05}))
    for n, label in ((3, "trimer"), (4, "tetramer")):
        for geom in (Geometry.LINEAR, Geometry.RING):
            for v in (0.1, 1.0):
                panels.append((f"{label}_{geom.value}_vs_dissipation_V{v:g}",
                               n, geom, v, ("gamma", gammas), {}))
    for geom in (Geometry.LINEAR, Geometry.RING):
        for v in (0.1, 1.0):
            panels.append((f"trimer_{geom.value}_vs_coupling_V{v:g}",
                           3, geom, v, ("g", tuple(gs)), {"gamma": 0.05}))
    return panels


def reference_grids(out_dir, workers: int = 1, omega_points: int = 400):
    """Write the reduced-resolution 2-d data grids (long-format CSV per panel).

    Sixty axis values by `omega_points` frequencies per panel; hierarchy depth
    follows GRID_DEPTH_BY_N (reduced for the larger aggregates to keep the
    full profile tractable; positions converge much faster than amplitudes).
    """
    from .solver import sweep_parameter
    from .spectrum import sweep_from_rows

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    grid = np.linspace(-4.0, 6.0, omega_points)
    written = []
    for name, n, geom, v, axis, bath_kw in _grid_panels():
        system = System.uniform(
            n, geometry=geom, coupling=v, g=1.0,
            gamma=bath_kw.get("gamma", 1.0),
        )
        plan = SweepPlan(
            omega_grid=grid, epsilon=0.01, parameter_axis=axis,
            e_max=GRID_DEPTH_BY_N[n], workers=workers,
        )
        rows = sweep_parameter(system, plan)
        result = sweep_from_rows(rows, axis[1], system.aggregate.dipoles,
                                 {"numerics": {"epsilon": 0.01}})
        path = out_dir / f"{name}.csv"
        with open(path, "w", newline="") as fh:
            fh.write(f"{axis[0]},omega,F\n")
            for value, row in zip(result.axis_values, result.f):
                for w, f in zip(result.omega, row):
                    fh.write(f"{value!r},{w!r},{f!r}\n")
        written.append(path)
    return written
