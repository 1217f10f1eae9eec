"""Partial-transpose and reduction criteria across the A|B cut given by party labels."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .tensor_core import (TOL_PSD, Operator, min_eigenvalue, partial_trace,
                          partial_transpose, to_cut_order)

PPT_INVARIANCE_TOL = 1e-12


@dataclass(frozen=True)
class CriteriaReport:
    npt: bool
    min_pt_eigenvalue: float
    reduction_ok: bool
    min_reduction_eigenvalues: tuple[float, float]
    ppt_invariant: bool
    ppt_deviation: float

    def to_dict(self) -> dict:
        return asdict(self)


def _require_bipartite(rho: Operator):
    if not rho.layout.indices("A") or not rho.layout.indices("B"):
        raise ValueError(f"layout {rho.layout.parties} needs both an A and a B factor")


def peres_horodecki(rho: Operator) -> tuple[bool, float]:
    """Return ``(is_npt, min eigenvalue of the B-side partial transpose)``."""
    _require_bipartite(rho)
    lam = min_eigenvalue(partial_transpose(rho, rho.layout.indices("B")))
    return lam < -TOL_PSD, lam


def reduction_criterion(rho: Operator) -> tuple[bool, float, float]:
    """Check ``1_A (x) rho_B - rho >= 0`` and ``rho_A (x) 1_B - rho >= 0``.

    Returns the verdict and the two minimum eigenvalues (A-side first, i.e.
    the one with ``1_A``).
    """
    _require_bipartite(rho)
    op, d_a, d_b = to_cut_order(rho)
    mat = op.matrix.reshape(d_a, d_b, d_a, d_b)
    rho_a = np.einsum("ibjb->ij", mat)
    rho_b = np.einsum("aiaj->ij", mat)
    gap_a = np.kron(np.eye(d_a), rho_b) - op.matrix
    gap_b = np.kron(rho_a, np.eye(d_b)) - op.matrix
    lay = op.layout
    min_a = min_eigenvalue(Operator(gap_a, lay))
    min_b = min_eigenvalue(Operator(gap_b, lay))
    return (min_a >= -TOL_PSD and min_b >= -TOL_PSD), min_a, min_b


def ppt_invariance(rho: Operator, tol: float = PPT_INVARIANCE_TOL) -> tuple[bool, float]:
    pt = partial_transpose(rho, rho.layout.indices("B"))
    dev = float(np.max(np.abs(pt.matrix - rho.matrix)))
    return dev <= tol, dev


def report(rho: Operator) -> CriteriaReport:
    npt, lam = peres_horodecki(rho)
    ok, ra, rb = reduction_criterion(rho)
    inv, dev = ppt_invariance(rho)
    return CriteriaReport(npt, lam, ok, (ra, rb), inv, dev)


def reduced_states(rho: Operator) -> tuple[Operator, Operator]:
    """Marginals ``(rho_A, rho_B)`` with factors grouped by party."""
    lay = rho.layout
    return partial_trace(rho, lay.indices("B")), partial_trace(rho, lay.indices("A"))

