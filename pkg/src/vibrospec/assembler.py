"""Sparse assembly of the Laplace-domain hierarchy operator.

The coupled algebraic equations for the auxiliary amplitudes Psi^(k)(s) form
one linear system A(s) X = B with one block row of size N per multi-index:

    block (k, k)        = i H_sys + (sum_j k_j * decay_j) I_N
    block (k, k - e_j)  = -k_j * weight_j * |n_j><n_j|
    block (k, k + e_j)  = +|n_j><n_j|
    A(s)                = A0 + s I

Only the diagonal depends on s, so the static part is built once per model
and the shift is applied per Laplace point on a private copy of the data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.special import gammaln

from .hierarchy import DEFAULT_UNKNOWN_CAP, BasisSizeError, HierarchyBasis
from .model import System, build_system_hamiltonian

__all__ = [
    "LaplacePoint",
    "HierarchyOperator",
    "assemble_static",
    "rhs_for_initial_site",
    "rhs_all_sites",
]


@dataclass(frozen=True)
class LaplacePoint:
    """Complex frequency s = epsilon - i omega with strictly positive epsilon."""

    epsilon: float
    omega: float

    def __post_init__(self):
        eps = float(self.epsilon)
        w = float(self.omega)
        if not (math.isfinite(eps) and math.isfinite(w)):
            raise ValueError("Laplace point must be finite")
        if eps <= 0.0:
            raise ValueError("epsilon must be > 0; the zero-broadening limit is "
                             "approached by shrinking epsilon, never reached")
        object.__setattr__(self, "epsilon", eps)
        object.__setattr__(self, "omega", w)

    @property
    def value(self) -> complex:
        return complex(self.epsilon, -self.omega)


@dataclass(frozen=True)
class HierarchyOperator:
    """Static part A0 of the hierarchy system, with reusable sparsity pattern.

    `static` carries the raw coupling convention (down-coupling -k_j g_j, unit
    up-coupling).  Solves run on `balanced`, the diagonal similarity that
    rescales the amplitude of index k by prod_j sqrt(k_j! |g_j|^k_j): both
    couplings then have magnitude sqrt(k_j |g_j|), which keeps the solution
    entries of one order and the solve residual at the rounding floor even at
    strong coupling.  The similarity is unity on the k = 0 block, so the
    correlation block extracted there is identical in both gauges.

    `shifted(s)` returns A0 + s I as a fresh CSC matrix sharing the index
    structure; concurrent solves therefore never share mutable data.
    """

    dimension: int
    block_size: int
    n_terms: int
    static: sparse.csc_matrix
    balanced: sparse.csc_matrix
    diag_positions: np.ndarray
    diag_static: np.ndarray
    basis: HierarchyBasis

    def shifted(self, s: LaplacePoint, *, raw: bool = False) -> sparse.csc_matrix:
        base = self.static if raw else self.balanced
        data = base.data.copy()
        data[self.diag_positions] = self.diag_static + s.value
        return sparse.csc_matrix(
            (data, base.indices, base.indptr), shape=base.shape
        )


def assemble_static(
    system: System,
    basis: HierarchyBasis,
    *,
    max_unknowns: int = DEFAULT_UNKNOWN_CAP,
) -> HierarchyOperator:
    """Build A0 over the given basis; O(D (N + M)) construction."""
    n = system.n_monomers
    weights, decays, owners = system.bath.flattened()
    m = len(weights)
    if m != basis.m:
        raise ValueError(
            f"basis has {basis.m} slots but the bath defines {m} terms"
        )
    n_block = len(basis)
    dim = n_block * n
    if dim > max_unknowns:
        raise BasisSizeError(
            f"hierarchy dimension {dim} exceeds the cap of {max_unknowns} unknowns"
        )

    h = build_system_hamiltonian(system.aggregate)
    ordinals = np.arange(n_block, dtype=np.int64)
    depth_shift = basis.index_array @ decays  # sum_j k_j * decay_j per index

    row_parts, col_parts, val_parts = [], [], []

    # Diagonal blocks: explicit diagonal entries first (present even if zero),
    # then the off-diagonal entries of i H_sys.
    for a in range(n):
        row_parts.append(ordinals * n + a)
        col_parts.append(ordinals * n + a)
        val_parts.append(1j * h[a, a] + depth_shift)
    off_a, off_b = np.nonzero((h != 0) & ~np.eye(n, dtype=bool))
    for a, b in zip(off_a, off_b):
        row_parts.append(ordinals * n + a)
        col_parts.append(ordinals * n + b)
        val_parts.append(np.full(n_block, 1j * h[a, b], dtype=complex))

    # Couplings to shallower (down) and deeper (up) neighbours act on the
    # owning monomer only: the coupling operator is the site projector.
    for j in range(m):
        site = int(owners[j])
        up = basis.up_ordinals[:, j]
        has_up = up >= 0
        row_parts.append(ordinals[has_up] * n + site)
        col_parts.append(up[has_up] * n + site)
        val_parts.append(np.ones(int(has_up.sum()), dtype=complex))

        down = basis.down_ordinals[:, j]
        has_down = down >= 0
        k_j = basis.index_array[has_down, j]
        row_parts.append(ordinals[has_down] * n + site)
        col_parts.append(down[has_down] * n + site)
        val_parts.append(-k_j * weights[j])

    rows = np.concatenate(row_parts)
    cols = np.concatenate(col_parts)
    vals = np.concatenate(val_parts).astype(complex)
    a0 = sparse.coo_matrix((vals, (rows, cols)), shape=(dim, dim)).tocsc()
    a0.sort_indices()

    # Balanced gauge: log scale = 1/2 sum_j (log k_j! + k_j log |g_j|), with
    # weightless slots contributing nothing (their couplings vanish anyway).
    log_w = np.zeros(m)
    has_weight = np.abs(weights) > 0
    log_w[has_weight] = np.log(np.abs(weights[has_weight]))
    log_scale = 0.5 * (
        gammaln(basis.index_array + 1.0).sum(axis=1)
        + basis.index_array @ log_w
    )
    block_of = np.arange(dim) // n
    scale_ratio = np.exp(log_scale[block_of[cols]] - log_scale[block_of[rows]])
    a0_bal = sparse.coo_matrix(
        (vals * scale_ratio, (rows, cols)), shape=(dim, dim)
    ).tocsc()
    a0_bal.sort_indices()

    diag_positions = _diagonal_positions(a0)
    if not np.array_equal(a0.indices, a0_bal.indices) or not np.array_equal(
        a0.indptr, a0_bal.indptr
    ):
        raise AssertionError("raw and balanced gauges disagree on the pattern")
    diag_static = a0.data[diag_positions].copy()
    if np.any(diag_static.real < -1e-12):
        raise AssertionError(
            "static diagonal acquired a negative real part; damping-stable "
            "convention violated (is some bath gamma negative?)"
        )

    return HierarchyOperator(
        dimension=dim,
        block_size=n,
        n_terms=m,
        static=a0,
        balanced=a0_bal,
        diag_positions=diag_positions,
        diag_static=diag_static,
        basis=basis,
    )


def _diagonal_positions(a: sparse.csc_matrix) -> np.ndarray:
    """Positions of the (i, i) entries inside the CSC data array."""
    dim = a.shape[0]
    col_of_entry = np.repeat(np.arange(dim), np.diff(a.indptr))
    mask = a.indices == col_of_entry
    positions = np.nonzero(mask)[0]
    if len(positions) != dim:
        raise AssertionError("assembled matrix is missing explicit diagonal entries")
    return positions


def rhs_for_initial_site(basis: HierarchyBasis, n_monomers: int, site: int) -> np.ndarray:
    """Unit vector for an excitation initially localised on `site` (1-based).

    Only the k = 0 block is populated; all auxiliary amplitudes start at zero.
    """
    if not 1 <= site <= n_monomers:
        raise ValueError(f"site must be in 1..{n_monomers}, got {site}")
    rhs = np.zeros(len(basis) * n_monomers, dtype=complex)
    rhs[site - 1] = 1.0
    return rhs


def rhs_all_sites(basis: HierarchyBasis, n_monomers: int) -> np.ndarray:
    """All N initial-site columns as a (D, N) matrix."""
    rhs = np.zeros((len(basis) * n_monomers, n_monomers), dtype=complex)
    for m in range(n_monomers):
        rhs[m, m] = 1.0
    return rhs
