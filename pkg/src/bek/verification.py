"""Closed-form checks run by ``bek verify``.

Each check yields a :class:`Check` carrying a numeric residual so that a
failure can be diagnosed from the JSON report alone.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from . import criteria
from .states import (PENT_HEIGHT, PENT_NORM, b_from_lambda, flagged_mixture, lambda_from_b,
                     max_entangled, pent_basis, rho_pent, swap_operator, werner,
                     werner_eigenvalues)
from .tensor_core import TOL_PSD, eigvalsh, is_density, partial_transpose, tensor
from .witness import (SQRT5, analytic_psi2, assemble, closed_form, expectation,
                      witness_assignment, inner_product_table, schmidt_rank,
                      threshold_lambda, witness_terms)

EXACT = 1e-12
LOOSE = 1e-10
ROUNDED_THRESHOLD = 2.3300

# Corruptions of the pentagon constants used to prove the suite can fail.
FAULTS = {
    # sign flip of the 1 under the root: h = sqrt(sqrt5 - 1) / 2
    "h-sign": dict(height=0.5 * np.sqrt(np.sqrt(5) - 1)),
    "n-scale": dict(norm=1.01 * PENT_NORM),
}


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    residual: float
    tolerance: float

    def to_dict(self) -> dict:
        return asdict(self)


def _check(name, residual, tol):
    residual = float(residual)
    return Check(name, bool(residual <= tol), residual, tol)


def run_checks(fault: str | None = None) -> list[Check]:
    kw = FAULTS[fault] if fault else {}
    basis = pent_basis(height=kw.get("height", PENT_HEIGHT), norm=kw.get("norm", PENT_NORM))
    v = basis.vectors
    rp = rho_pent(basis)
    out = []

    out.append(_check("pentagon unit norms",
                      max(abs(np.linalg.norm(x) - 1) for x in v), EXACT))
    out.append(_check("pentagon orthogonality",
                      max(abs(v[i] @ v[(i + 2) % 5]) for i in range(5)), EXACT))
    prods = np.array([p.amplitudes for p in basis.products])
    out.append(_check("UPB products orthonormal",
                      np.max(np.abs(prods.conj() @ prods.T - np.eye(5))), EXACT))
    out.append(_check("rho_Pent trace", abs(rp.trace() - 1), EXACT))
    spec = eigvalsh(rp)
    out.append(_check("rho_Pent spectrum {0 x5, 1/4 x4}",
                      np.max(np.abs(spec - np.r_[np.zeros(5), np.full(4, 0.25)])), EXACT))
    out.append(_check("rho_Pent annihilates UPB",
                      max(np.linalg.norm(rp.matrix @ p) for p in prods), EXACT))
    out.append(_check("rho_Pent PT invariance", criteria.ppt_invariance(rp)[1], EXACT))

    for row in inner_product_table(basis):
        out.append(_check(f"inner product {row.label}", abs(row.value - row.expected), EXACT))

    psi = analytic_psi2(basis)
    out.append(_check("witness assembly matches expansion",
                      np.max(np.abs(assemble(witness_assignment(basis)).amplitudes - psi.amplitudes)),
                      EXACT))
    rank, sv = schmidt_rank(psi)
    out.append(_check("witness Schmidt rank 2", abs(rank - 2), 0))
    out.append(_check("witness squared norm 9.5 + sqrt5", abs(psi.norm ** 2 - 9.5 - SQRT5), EXACT))

    grid = np.linspace(2.0, 3.0, 11)
    terms = [witness_terms(lam, basis) for lam in grid]
    out.append(_check("off-diagonal term vanishes", max(abs(t.off_diagonal) for t in terms), EXACT))
    out.append(_check("raw witness equals closed form",
                      max(abs(t.total - closed_form(lam)) for t, lam in zip(terms, grid)), LOOSE))
    rho_prod = tensor(werner(2.0), rp)
    out.append(_check("normalized witness at lambda=2",
                      abs(expectation(psi.normalized(), rho_prod)
                          - (2 * SQRT5 - 4.5) / (15 * (9.5 + SQRT5))), EXACT))
    thr = threshold_lambda()
    out.append(_check("threshold ~ 2.3300", abs(thr - ROUNDED_THRESHOLD), 5e-5))
    lo, hi = witness_terms(2.32, basis).total, witness_terms(2.34, basis).total
    out.append(_check("witness sign change brackets threshold",
                      0.0 if (lo < 0 < hi) else max(lo, -hi, 0) + 1.0, 0))

    h = swap_operator()
    out.append(_check("swap squares to identity, trace 3",
                      max(np.max(np.abs(h.matrix @ h.matrix - np.eye(9))), abs(h.trace() - 3)),
                      EXACT))
    worst = 0.0
    for lam in (0.5, 2.0, 5.0, 100.0):
        sym, anti = werner_eigenvalues(lam)
        ref = np.sort(np.r_[np.full(6, sym), np.full(3, anti)])
        worst = max(worst, np.max(np.abs(eigvalsh(werner(lam)) - ref)))
    out.append(_check("Werner spectrum closed forms", worst, EXACT))
    worst = 0.0
    for lam in (2.0, 2.33, 5.0, 50.0):
        worst = max(worst, abs(criteria.peres_horodecki(werner(lam))[1] + 1 / (8 * lam - 1)))
    out.append(_check("Werner min PT eigenvalue -1/(8 lambda - 1)", worst, EXACT))
    psi_max = max_entangled()
    out.append(_check("<Psi|PT(rho_W(2))|Psi> = -1/15",
                      abs(expectation(psi_max, werner(2.0)) + 1 / 15), EXACT))
    out.append(_check("lambda(b=1/5) = 2", abs(lambda_from_b(1 / 5) - 2), EXACT))
    out.append(_check("b/lambda round trip", abs(b_from_lambda(lambda_from_b(0.19)) - 0.19), 1e-14))

    for label, rho in (("rho_W(2)", werner(2.0)), ("rho_Pent", rp), ("rho_W(2) x rho_Pent", rho_prod)):
        _, ra, rb = criteria.reduction_criterion(rho)
        out.append(_check(f"reduction criterion holds for {label}", max(0.0, -min(ra, rb)), TOL_PSD))
    pt = partial_transpose(rho_prod, rho_prod.layout.indices("B"))
    out.append(_check("product state is NPT",
                      0.0 if criteria.peres_horodecki(rho_prod)[0] else 1.0, 0))
    mix = flagged_mixture(rp, werner(2.0))
    out.append(_check("flagged mixture is a density matrix", 0.0 if is_density(mix) else 1.0, 0))
    out.append(_check("PT of product is Hermitian", pt.hermiticity_error(), EXACT))
    return out
