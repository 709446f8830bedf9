"""Absorption spectra of small quantum aggregates with Lorentzian vibrational
baths, computed by solving a Laplace-domain hierarchy of algebraic equations."""

__version__ = "0.1.0"

from .model import (  # noqa: F401
    AggregateSpec,
    BathSpec,
    BathTerm,
    Geometry,
    System,
    build_system_hamiltonian,
    correlation_at_zero,
    spectral_density,
)
from .hierarchy import HierarchyBasis, MultiIndex, enumerate_basis, neighbor  # noqa: F401
from .assembler import (  # noqa: F401
    HierarchyOperator,
    LaplacePoint,
    assemble_static,
    rhs_all_sites,
    rhs_for_initial_site,
)
from .solver import (  # noqa: F401
    CorrelationBlock,
    SolverError,
    SweepPlan,
    solve_point,
    sweep_frequency,
    sweep_parameter,
)
from .spectrum import (  # noqa: F401
    PeakList,
    SpectrumResult,
    absorption,
    find_peaks,
    integrated_intensity,
    spectrum_from_blocks,
    sweep_from_rows,
)
from .oracle import (  # noqa: F401
    ModeTable,
    StickSpectrum,
    chain_modes,
    dense_vibronic_spectrum,
    franck_condon_monomer,
    ring_modes,
    time_domain_reference,
)
