"""Subsystem-aware dense linear algebra.

Every vector and matrix carries a :class:`Layout`, an ordered list of
``(dim, party)`` factors with ``party`` in ``{"A", "B"}``.  Composite indices
follow the row-major Kronecker convention: the first factor varies slowest,
exactly as ``np.kron(a, b)`` lays out ``a (x) b``.  All index arithmetic in the
package (reshapes, permutations, partial traces) relies on this.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg

TOL_HERM = 1e-10
TOL_TRACE = 1e-10
TOL_PSD = 1e-9
TOL_EIG = 1e-10

PARTIES = ("A", "B")


@dataclass(frozen=True)
class Layout:
    """Ordered tensor factors, each a ``(dim, party)`` pair."""

    factors: tuple[tuple[int, str], ...]

    def __post_init__(self):
        factors = tuple((int(d), str(p)) for d, p in self.factors)
        if not factors:
            raise ValueError("layout needs at least one factor")
        for d, p in factors:
            if d < 1:
                raise ValueError(f"factor dimension must be >= 1, got {d}")
            if p not in PARTIES:
                raise ValueError(f"party must be 'A' or 'B', got {p!r}")
        object.__setattr__(self, "factors", factors)

    @classmethod
    def of(cls, *factors: tuple[int, str]) -> "Layout":
        return cls(tuple(factors))

    @classmethod
    def bipartite(cls, d_a: int, d_b: int) -> "Layout":
        return cls(((d_a, "A"), (d_b, "B")))

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(d for d, _ in self.factors)

    @property
    def parties(self) -> tuple[str, ...]:
        return tuple(p for _, p in self.factors)

    @property
    def total(self) -> int:
        return int(np.prod(self.dims))

    def __len__(self):
        return len(self.factors)

    def __add__(self, other: "Layout") -> "Layout":
        return Layout(self.factors + other.factors)

    def indices(self, party: str) -> tuple[int, ...]:
        return tuple(k for k, p in enumerate(self.parties) if p == party)

    def party_dim(self, party: str) -> int:
        return int(np.prod([self.dims[k] for k in self.indices(party)]))

    def permuted(self, perm: Sequence[int]) -> "Layout":
        return Layout(tuple(self.factors[k] for k in perm))

    def cut_permutation(self) -> tuple[int, ...]:
        """Permutation bringing all A factors before all B factors (stable)."""
        return self.indices("A") + self.indices("B")


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=complex)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Ket:
    """Unnormalized complex vector on a layout."""

    amplitudes: np.ndarray
    layout: Layout

    def __post_init__(self):
        amp = _frozen(np.ravel(self.amplitudes))
        if amp.shape[0] != self.layout.total:
            raise ValueError(
                f"ket has {amp.shape[0]} amplitudes but layout dimension is "
                f"{self.layout.total}")
        object.__setattr__(self, "amplitudes", amp)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "Ket":
        return Ket(self.amplitudes / self.norm, self.layout)

    def projector(self) -> "Operator":
        return Operator(np.outer(self.amplitudes, self.amplitudes.conj()),
                        self.layout)

    def permute(self, perm: Sequence[int]) -> "Ket":
        perm = _check_perm(perm, len(self.layout))
        t = self.amplitudes.reshape(self.layout.dims).transpose(perm)
        return Ket(t.ravel(), self.layout.permuted(perm))


@dataclass(frozen=True, eq=False)
class Operator:
    """Square complex matrix on a layout."""

    matrix: np.ndarray
    layout: Layout

    def __post_init__(self):
        mat = _frozen(self.matrix)
        n = self.layout.total
        if mat.shape != (n, n):
            raise ValueError(
                f"matrix shape {mat.shape} does not match layout dimension {n}")
        object.__setattr__(self, "matrix", mat)

    @property
    def dim(self) -> int:
        return self.layout.total

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))

    def is_hermitian(self, tol: float = TOL_HERM) -> bool:
        return self.hermiticity_error() <= tol

    def with_layout(self, layout: Layout) -> "Operator":
        return Operator(self.matrix, layout)

    def __add__(self, other: "Operator") -> "Operator":
        _same_layout(self, other)
        return Operator(self.matrix + other.matrix, self.layout)

    def __sub__(self, other: "Operator") -> "Operator":
        _same_layout(self, other)
        return Operator(self.matrix - other.matrix, self.layout)

    def __mul__(self, c) -> "Operator":
        return Operator(self.matrix * c, self.layout)

    __rmul__ = __mul__

    def __matmul__(self, other):
        if isinstance(other, Ket):
            return Ket(self.matrix @ other.amplitudes, self.layout)
        _same_layout(self, other)
        return Operator(self.matrix @ other.matrix, self.layout)


def _same_layout(a: Operator, b: Operator):
    if a.layout.dims != b.layout.dims:
        raise ValueError(f"layout mismatch: {a.layout.dims} vs {b.layout.dims}")


def _check_perm(perm: Sequence[int], n: int) -> tuple[int, ...]:
    perm = tuple(int(p) for p in perm)
    if len(perm) != n or sorted(perm) != list(range(n)):
        raise ValueError(f"{perm} is not a permutation of {n} factors")
    return perm


def _check_subset(subset: Iterable[int], n: int) -> tuple[int, ...]:
    subset = tuple(sorted(set(int(k) for k in subset)))
    for k in subset:
        if not 0 <= k < n:
            raise IndexError(f"factor index {k} out of range for {n} factors")
    return subset


def identity(layout: Layout) -> Operator:
    return Operator(np.eye(layout.total), layout)


def tensor(*ops: Operator) -> Operator:
    """Kronecker product with concatenated layouts."""
    if not ops:
        raise ValueError("tensor needs at least one operator")
    return Operator(reduce(np.kron, (o.matrix for o in ops)),
                    reduce(lambda x, y: x + y, (o.layout for o in ops)))


def tensor_kets(*kets: Ket) -> Ket:
    return Ket(reduce(np.kron, (k.amplitudes for k in kets)),
               reduce(lambda x, y: x + y, (k.layout for k in kets)))


def permute_subsystems(op: Operator, perm: Sequence[int]) -> Operator:
    """Reorder tensor factors.

    ``perm[i]`` is the old position of the factor that ends up at position
    ``i`` (the ``np.transpose`` convention).  The inverse permutation is
    ``np.argsort(perm)``.
    """
    n = len(op.layout)
    perm = _check_perm(perm, n)
    dims = op.layout.dims
    t = op.matrix.reshape(dims + dims)
    t = t.transpose(perm + tuple(n + p for p in perm))
    return Operator(t.reshape(op.dim, op.dim), op.layout.permuted(perm))


def partial_transpose(op: Operator, subset: Iterable[int]) -> Operator:
    """Transpose the computational-basis indices of the factors in ``subset``."""
    n = len(op.layout)
    subset = _check_subset(subset, n)
    if not subset:
        return op
    dims = op.layout.dims
    axes = list(range(2 * n))
    for k in subset:
        axes[k], axes[n + k] = n + k, k
    t = op.matrix.reshape(dims + dims).transpose(axes)
    return Operator(t.reshape(op.dim, op.dim), op.layout)


def partial_trace(op: Operator, subset: Iterable[int]) -> Operator:
    """Trace out the factors in ``subset``; the rest keep their order."""
    n = len(op.layout)
    subset = _check_subset(subset, n)
    if len(subset) == n:
        raise ValueError("cannot trace out every factor; use Operator.trace()")
    keep = [k for k in range(n) if k not in subset]
    dims = op.layout.dims
    t = op.matrix.reshape(dims + dims)
    m = n
    for k in reversed(subset):
        t = np.trace(t, axis1=k, axis2=k + m)
        m -= 1
    layout = Layout(tuple(op.layout.factors[k] for k in keep))
    return Operator(t.reshape(layout.total, layout.total), layout)


def _require_hermitian(op: Operator):
    err = op.hermiticity_error()
    if err > TOL_HERM:
        raise ValueError(f"operator is not Hermitian (max |X - X^H| = {err:.3g})")


def eigvalsh(op: Operator) -> np.ndarray:
    _require_hermitian(op)
    return scipy.linalg.eigvalsh(op.matrix)


def min_eigpair(op: Operator) -> tuple[float, Ket]:
    """Smallest eigenvalue of a Hermitian operator and a unit eigenvector."""
    _require_hermitian(op)
    herm = 0.5 * (op.matrix + op.matrix.conj().T)
    w, v = scipy.linalg.eigh(herm, subset_by_index=[0, 0])
    return float(w[0]), Ket(v[:, 0], op.layout)


def min_eigenvalue(op: Operator) -> float:
    _require_hermitian(op)
    herm = 0.5 * (op.matrix + op.matrix.conj().T)
    return float(scipy.linalg.eigvalsh(herm, subset_by_index=[0, 0])[0])


def is_psd(op: Operator, tol: float = TOL_PSD) -> bool:
    return min_eigenvalue(op) >= -tol


def is_density(op: Operator) -> bool:
    return (op.is_hermitian()
            and abs(op.trace() - 1) <= TOL_TRACE
            and is_psd(op))


def to_cut_order(op: Operator) -> tuple[Operator, int, int]:
    """Permute so A factors precede B factors; return the operator, d_A, d_B."""
    lay = op.layout
    if not lay.indices("A") or not lay.indices("B"):
        raise ValueError(f"layout {lay.parties} lacks an A or a B factor")
    return (permute_subsystems(op, lay.cut_permutation()),
            lay.party_dim("A"), lay.party_dim("B"))
