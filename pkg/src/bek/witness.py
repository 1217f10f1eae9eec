"""Schmidt-rank-2 distillability witness for ``rho_W(lam) (x) rho_Pent``.

The test vector lives on four qutrits ordered ``A1, B1, A2, B2``: the first
pair carries the Werner copy, the second the pentagon state.  Writing it as
``sum_ij |i,j> (x) psi_ij`` with ``psi_ij = x_i (x) y_j + z_i (x) u_j`` makes it
rank two across ``A1 A2 | B1 B2``.

Two value conventions are used.  ``raw`` drops the ``1/(8 lam - 1)`` Werner
prefactor and leaves the witness unnormalized, which gives the closed form
``(lam (17 sqrt5 - 37) + 20 - 10 sqrt5) / 12``.  ``normalized`` is the plain
expectation of the unit witness in the normalized state.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .states import PentBasis, pent_basis, rho_pent, werner
from .tensor_core import Ket, Layout, Operator, partial_transpose, tensor

SQRT5 = np.sqrt(5)
SCHMIDT_TOL = 1e-10
IMAG_TOL = 1e-12

WITNESS_LAYOUT = Layout.of((3, "A"), (3, "B"), (3, "A"), (3, "B"))


@dataclass(frozen=True, eq=False)
class Rank2Witness:
    """Local vector families ``x_i, z_i`` (Alice) and ``y_j, u_j`` (Bob).

    Arrays are indexed ``[label, payload]``: ``xs[i]`` is ``|x_i>``.
    """

    xs: np.ndarray
    zs: np.ndarray
    ys: np.ndarray
    us: np.ndarray

    def __post_init__(self):
        for name in ("xs", "zs", "ys", "us"):
            object.__setattr__(self, name, np.atleast_2d(np.asarray(getattr(self, name), dtype=complex)))
        if self.xs.shape != self.zs.shape or self.ys.shape != self.us.shape:
            raise ValueError("x/z and y/u families must have matching shapes")

    @property
    def layout(self) -> Layout:
        (la, pa), (lb, pb) = self.xs.shape, self.ys.shape
        return Layout.of((la, "A"), (lb, "B"), (pa, "A"), (pb, "B"))

    def component(self, i: int, j: int) -> np.ndarray:
        """``psi_ij`` as a vector on the payload pair ``A2, B2``."""
        return np.kron(self.xs[i], self.ys[j]) + np.kron(self.zs[i], self.us[j])

    def cut_pairs(self) -> tuple[np.ndarray, np.ndarray]:
        """Rows ``(a_1, a_2)`` on ``A1 A2`` and ``(b_1, b_2)`` on ``B1 B2``."""
        return (np.stack([self.xs.ravel(), self.zs.ravel()]),
                np.stack([self.ys.ravel(), self.us.ravel()]))


def assemble(w: Rank2Witness) -> Ket:
    """Global vector ``sum_ij |i,j> (x) psi_ij`` in ``A1, B1, A2, B2`` order."""
    t = (np.einsum("ia,jb->ijab", w.xs, w.ys)
         + np.einsum("ia,jb->ijab", w.zs, w.us))
    return Ket(t.ravel(), w.layout)


def witness_assignment(basis: PentBasis | None = None) -> Rank2Witness:
    v = (basis or pent_basis()).vectors
    xs = [v[4], -v[1], (v[3] + v[2]) / 2]
    zs = [v[4], v[1], (v[3] - v[2]) / 2]
    ys = [v[1] / 2, v[4] / 2, v[3] - v[2]]
    us = [v[1] / 2, -v[4] / 2, v[3] + v[2]]
    return Rank2Witness(np.array(xs), np.array(zs), np.array(ys), np.array(us))


def analytic_psi2(basis: PentBasis | None = None) -> Ket:
    """The explicit seven-term witness, built term by term."""
    v = (basis or pent_basis()).vectors
    e = np.eye(3)

    def term(i, j, payload):
        return np.kron(np.kron(e[i], e[j]), payload)

    kv = np.kron
    psi = (2 * term(0, 2, kv(v[4], v[3]))
           + 0.5 * term(2, 0, kv(v[3], v[1]))
           + 2 * term(1, 2, kv(v[1], v[2]))
           + 0.5 * term(2, 1, kv(v[2], v[4]))
           + term(0, 0, kv(v[4], v[1]))
           - term(1, 1, kv(v[1], v[4]))
           + term(2, 2, kv(v[3], v[3]) - kv(v[2], v[2])))
    return Ket(psi, WITNESS_LAYOUT)


def schmidt_rank(psi: Ket, a_factors=None, tol: float = SCHMIDT_TOL) -> tuple[int, np.ndarray]:
    """Schmidt rank across a cut and the full singular spectrum.

    ``a_factors`` lists the factor indices on Alice's side; by default they
    are read off the party labels.
    """
    if psi.norm == 0:
        raise ValueError("Schmidt rank of the zero vector is undefined")
    lay = psi.layout
    if a_factors is None:
        a_factors = lay.indices("A")
    a_factors = tuple(a_factors)
    b_factors = tuple(k for k in range(len(lay)) if k not in a_factors)
    if not a_factors or not b_factors:
        raise ValueError("cut must leave factors on both sides")
    moved = psi.permute(a_factors + b_factors)
    d_a = int(np.prod([lay.dims[k] for k in a_factors]))
    sv = np.linalg.svd(moved.amplitudes.reshape(d_a, -1), compute_uv=False)
    return int(np.sum(sv > tol * sv[0])), sv


def expectation(psi: Ket, rho: Operator, pt_parties=("B",)) -> float:
    """``<psi| PT(rho) |psi>`` with the transpose taken on every factor of ``pt_parties``."""
    if psi.layout.total != rho.layout.total:
        raise ValueError(
            f"dimension mismatch: ket {psi.layout.total}, operator {rho.layout.total}")
    subset = [k for k, p in enumerate(rho.layout.parties) if p in pt_parties]
    pt = partial_transpose(rho, subset).matrix
    val = np.vdot(psi.amplitudes, pt @ psi.amplitudes)
    if abs(val.imag) > IMAG_TOL * max(1.0, abs(val.real)):
        raise ValueError(f"expectation has imaginary part {val.imag:.3g}; operator not Hermitian?")
    return float(val.real)


class WitnessTerms(NamedTuple):
    diagonal: float
    off_diagonal: float

    @property
    def total(self) -> float:
        return self.diagonal + self.off_diagonal


def witness_terms(lam: float, basis: PentBasis | None = None) -> WitnessTerms:
    """Split the raw witness value into its ``psi_ii`` and ``psi_ij, i != j`` parts."""
    basis = basis or pent_basis()
    w = witness_assignment(basis)
    rp = rho_pent(basis).matrix
    n = w.xs.shape[0]
    diag = [w.component(i, i) for i in range(n)]
    gram = np.array([[np.vdot(p, rp @ q) for q in diag] for p in diag])
    d = lam * np.trace(gram) - (lam + 1) / 3 * gram.sum()
    off = sum(np.vdot(w.component(i, j), rp @ w.component(i, j))
              for i in range(n) for j in range(n) if i != j)
    return WitnessTerms(float(np.real(d)), float(lam * np.real(off)))


def witness_value_raw(lam: float, basis: PentBasis | None = None) -> float:
    return witness_terms(lam, basis).total


def closed_form(lam: float) -> float:
    return (lam * (17 * SQRT5 - 37) + 20 - 10 * SQRT5) / 12


def threshold_lambda() -> float:
    """Root of :func:`closed_form`; the witness is negative below it."""
    return (10 * SQRT5 - 20) / (17 * SQRT5 - 37)


def product_state(lam: float, basis: PentBasis | None = None) -> Operator:
    """``rho_W(lam) (x) rho_Pent`` on ``A1, B1, A2, B2``."""
    return tensor(werner(lam), rho_pent(basis))


def witness_value_normalized(lam: float, basis: PentBasis | None = None) -> float:
    psi = analytic_psi2(basis).normalized()
    return expectation(psi, product_state(lam, basis))


def witness_value(lam: float, convention: str = "raw") -> float:
    if convention == "raw":
        return witness_value_raw(lam)
    if convention == "normalized":
        return witness_value_normalized(lam)
    raise ValueError(f"unknown convention {convention!r}")


class InnerProduct(NamedTuple):
    label: str
    value: float
    expected: float


def inner_product_table(basis: PentBasis | None = None) -> list[InnerProduct]:
    """Matrix elements of ``rho_Pent`` between the diagonal witness components."""
    basis = basis or pent_basis()
    v = basis.vectors
    rp = rho_pent(basis).matrix
    v14 = np.kron(v[1], v[4])
    v41 = np.kron(v[4], v[1])
    psi22 = np.kron(v[3], v[3]) - np.kron(v[2], v[2])

    def el(bra, ket):
        return float(np.real(np.vdot(bra, rp @ ket)))

    return [
        InnerProduct("<v1,v4|rho|v1,v4>", el(v14, v14), SQRT5 / 2 - 1),
        InnerProduct("<v4,v1|rho|v4,v1>", el(v41, v41), SQRT5 / 2 - 1),
        InnerProduct("<v4,v1|rho|v1,v4>", el(v41, v14), (-7 + 3 * SQRT5) / 8),
        InnerProduct("<psi22|rho|psi22>", el(psi22, psi22), SQRT5 - 2 - (3 - SQRT5) / 4),
        InnerProduct("<psi22|rho|v4,v1>", el(psi22, v41), (-2 + SQRT5) / 4),
        InnerProduct("<psi22|rho|v1,v4>", el(psi22, v14), (2 - SQRT5) / 4),
    ]


def pt_product_operator(lam: float) -> Operator:
    """``(1 (x) T)(rho_W(lam) (x) rho_Pent)`` on ``A1, B1, A2, B2``."""
    rho = product_state(lam)
    return partial_transpose(rho, rho.layout.indices("B"))

