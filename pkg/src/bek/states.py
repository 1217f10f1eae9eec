"""Concrete states on two qutrits: Werner family, pentagon UPB and friends."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import numpy as np

from .tensor_core import Ket, Layout, Operator, is_density, tensor

QUTRITS = Layout.bipartite(3, 3)
MAX_TENSOR_DIM = 1024

PENT_NORM = 2 / np.sqrt(5 + np.sqrt(5))
PENT_HEIGHT = 0.5 * np.sqrt(1 + np.sqrt(5))


def swap_operator() -> Operator:
    """The 9x9 permutation ``H|i,j> = |j,i>``."""
    h = np.zeros((9, 9))
    for i in range(3):
        for j in range(3):
            h[3 * j + i, 3 * i + j] = 1
    return Operator(h, QUTRITS)


def werner(lam: float) -> Operator:
    r"""Werner state ``(lam*1 - (lam+1)/3 * H) / (8*lam - 1)`` on 3x3.

    Eigenvalues are ``(2 lam - 1) / (3 (8 lam - 1))`` on the six-dimensional
    symmetric subspace and ``(4 lam + 1) / (3 (8 lam - 1))`` on the
    antisymmetric one, so the matrix is a state only for ``lam >= 1/2``.
    """
    lam = float(lam)
    if lam == 1 / 8:
        raise ValueError("lambda = 1/8 makes the normalization singular")
    if lam < 0.5:
        raise ValueError(f"werner({lam}) is not positive semidefinite; need lambda >= 1/2")
    mat = (lam * np.eye(9) - (lam + 1) / 3 * swap_operator().matrix) / (8 * lam - 1)
    return Operator(mat, QUTRITS)


def werner_eigenvalues(lam: float) -> tuple[float, float]:
    """Closed-form (symmetric, antisymmetric) eigenvalues of :func:`werner`."""
    return ((2 * lam - 1) / (3 * (8 * lam - 1)),
            (4 * lam + 1) / (3 * (8 * lam - 1)))


def _exact(x) -> Fraction:
    # floats are read by their shortest repr, so 0.2 means 1/5
    if isinstance(x, Rational):
        return Fraction(x)
    return Fraction(repr(float(x)))


def lambda_from_b(b) -> float:
    """Map the Werner parameter ``b`` in (1/6, 1/5] to lambda in [2, inf).

    Evaluated in exact rational arithmetic, so ``lambda_from_b(0.2) == 2.0``.
    """
    q = _exact(b)
    if q <= Fraction(1, 6):
        raise ValueError(f"b = {b} must exceed 1/6 (pole of the lambda map)")
    return float((q + Fraction(1, 3)) / (8 * q - Fraction(4, 3)))


def b_from_lambda(lam) -> float:
    q = _exact(lam)
    if q <= Fraction(1, 8):
        raise ValueError(f"lambda = {lam} must exceed 1/8")
    return float((4 * q + 1) / (3 * (8 * q - 1)))


def max_entangled() -> Ket:
    """``(|00> + |11> + |22>) / sqrt(3)``."""
    psi = np.zeros(9)
    psi[[0, 4, 8]] = 1 / np.sqrt(3)
    return Ket(psi, QUTRITS)


@dataclass(frozen=True, eq=False)
class PentBasis:
    """Pentagon vectors ``v_0..v_4`` and the UPB products ``v_i (x) v_{2i mod 5}``."""

    vectors: tuple[np.ndarray, ...]

    @property
    def pairs(self) -> tuple[tuple[int, int], ...]:
        return tuple((i, 2 * i % 5) for i in range(5))

    def product(self, i: int, j: int) -> Ket:
        return Ket(np.kron(self.vectors[i], self.vectors[j]), QUTRITS)

    @property
    def products(self) -> tuple[Ket, ...]:
        return tuple(self.product(i, j) for i, j in self.pairs)


def pent_basis(height: float = PENT_HEIGHT, norm: float = PENT_NORM) -> PentBasis:
    """``v_i = N (cos(2 pi i/5), sin(2 pi i/5), h)`` for ``i = 0..4``.

    ``height`` and ``norm`` are exposed only so that verification code can
    be exercised against a corrupted basis.
    """
    vecs = []
    for i in range(5):
        phi = 2 * np.pi * i / 5
        v = norm * np.array([np.cos(phi), np.sin(phi), height])
        v.setflags(write=False)
        vecs.append(v)
    return PentBasis(tuple(vecs))


def rho_pent(basis: PentBasis | None = None) -> Operator:
    """Bound entangled state ``(1 - sum_i |v_i, v_2i><v_i, v_2i|) / 4``."""
    basis = basis or pent_basis()
    proj = sum(p.projector().matrix for p in basis.products)
    return Operator((np.eye(9) - proj) / 4, QUTRITS)


def flagged_mixture(rho1: Operator, rho2: Operator) -> Operator:
    """``rho1 (x) |1><1|/2 + rho2 (x) |2><2|/2`` with a trailing qubit flag held by A."""
    if rho1.layout != rho2.layout:
        raise ValueError("flagged_mixture needs identical layouts")
    flag = Layout.of((2, "A"))
    one = Operator(np.diag([1.0, 0.0]), flag)
    two = Operator(np.diag([0.0, 1.0]), flag)
    return 0.5 * tensor(rho1, one) + 0.5 * tensor(rho2, two)


def tensor_power(rho: Operator, n: int, max_dim: int = MAX_TENSOR_DIM) -> Operator:
    if n < 1:
        raise ValueError(f"tensor power needs n >= 1, got {n}")
    if rho.dim ** n > max_dim:
        raise ValueError(
            f"dimension {rho.dim}**{n} = {rho.dim ** n} exceeds the cap of {max_dim}")
    return tensor(*([rho] * n))


def require_density(rho: Operator, name: str = "operator"):
    if not is_density(rho):
        raise ValueError(f"{name} is not a density matrix")
