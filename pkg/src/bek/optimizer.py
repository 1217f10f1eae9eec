"""See-saw minimization of ``<psi|M|psi> / <psi|psi>`` over Schmidt-rank-2 vectors.

With ``psi = a_1 (x) b_1 + a_2 (x) b_2`` and Bob's pair held fixed, the
quotient is a generalized Rayleigh quotient in the stacked pair
``(a_1, a_2)``: numerator ``a^H K a`` with ``K_kl = <b_k| M |b_l>`` (partial
matrix elements on Bob's side) and metric ``G (x) 1`` with
``G_kl = <b_k|b_l>``.  The smallest generalized eigenvector is the exact
minimizer for that half-step, so the objective never increases.  The roles
then swap.

After each half-step the freshly solved pair is QR-orthonormalized and the
triangular factor is pushed onto the other pair.  This leaves ``psi``
untouched and keeps the next metric at the identity, so a collapse towards
rank one does not make the eigenproblem ill-conditioned.
"""

from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
import scipy.linalg

from .states import lambda_from_b, tensor_power, werner
from .tensor_core import TOL_HERM, Ket, Operator, partial_transpose, permute_subsystems
from .witness import product_state, witness_assignment

log = logging.getLogger(__name__)

MAX_METRIC_CONDITION = 1e12
TIE_TOL = 1e-14
DEFAULT_SEED = 20011


@dataclass(frozen=True)
class SeeSawConfig:
    max_iters: int = 500
    rel_tol: float = 1e-12
    num_starts: int = 32
    rng_seed: int = DEFAULT_SEED
    gram_regularization: float = 1e-12
    max_redraws: int = 10
    workers: int | None = None

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be > 0")
        if self.num_starts < 1:
            raise ValueError("num_starts must be >= 1")


def evidence_config(**kw) -> SeeSawConfig:
    return SeeSawConfig(**{"num_starts": 64, **kw})


@dataclass
class StartResult:
    index: int
    value: float
    iterations: int
    converged: bool
    history: list[float]
    redraws: int = 0
    seeded: bool = False
    a: np.ndarray | None = field(default=None, repr=False)
    b: np.ndarray | None = field(default=None, repr=False)


@dataclass
class Rank2Result:
    value: float
    ket: Ket
    best_start: int
    starts: list[StartResult]

    @property
    def iterations(self) -> int:
        return self.starts[self.best_start].iterations

    @property
    def converged(self) -> bool:
        return self.starts[self.best_start].converged


class DegenerateStartError(RuntimeError):
    pass


def _worker_count(cfg: SeeSawConfig) -> int:
    if cfg.workers is not None:
        return max(1, cfg.workers)
    env = os.environ.get("BEK_THREADS")
    return max(1, int(env)) if env else 1


def _orthonormalize(p: np.ndarray, q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Re-gauge ``sum_k p_k (x) q_k`` so the rows of ``p`` are orthonormal."""
    qmat, r = np.linalg.qr(p.T)
    return qmat.T, r @ q


class _Problem:
    """``M`` in cut order, reshaped to ``(d_A, d_B, d_A, d_B)``."""

    def __init__(self, m: np.ndarray, d_a: int, d_b: int, cfg: SeeSawConfig):
        self.mat = m
        self.t = m.reshape(d_a, d_b, d_a, d_b)
        self.d_a, self.d_b = d_a, d_b
        self.cfg = cfg
        self.floor = np.finfo(float).eps * max(np.linalg.norm(m), np.finfo(float).tiny)

    def psi(self, a, b):
        return np.einsum("ka,kb->ab", a, b).ravel()

    def objective(self, a, b) -> float:
        v = self.psi(a, b)
        return float(np.real(np.vdot(v, self.mat @ v)) / np.real(np.vdot(v, v)))

    def _half_step(self, fixed: np.ndarray, side: str) -> np.ndarray:
        if side == "A":
            # K[(k,a),(l,c)] = sum_{b,d} conj(f_k[b]) T[a,b,c,d] f_l[d]
            tf = np.tensordot(self.t, fixed, axes=([3], [1]))          # a b c l
            k = np.tensordot(fixed.conj(), tf, axes=([1], [1]))         # k a c l
            k = k.transpose(0, 1, 3, 2)
            d = self.d_a
        else:
            tf = np.tensordot(self.t, fixed, axes=([2], [1]))          # a b d l
            k = np.tensordot(fixed.conj(), tf, axes=([1], [0]))         # k b d l
            k = k.transpose(0, 1, 3, 2)
            d = self.d_b
        k = k.reshape(2 * d, 2 * d)
        k = 0.5 * (k + k.conj().T)
        gram = fixed.conj() @ fixed.T
        metric = np.kron(gram, np.eye(d)) + self.cfg.gram_regularization * np.eye(2 * d)
        if np.linalg.cond(metric) > MAX_METRIC_CONDITION:
            raise DegenerateStartError("metric condition number above 1e12")
        _, vec = scipy.linalg.eigh(k, metric, subset_by_index=[0, 0])
        return vec[:, 0].reshape(2, d)

    def run(self, a, b, index: int, seeded: bool, redraws: int) -> StartResult:
        cfg = self.cfg
        b, a = _orthonormalize(b, a)
        if np.linalg.norm(self.psi(a, b)) < np.sqrt(np.finfo(float).tiny):
            raise DegenerateStartError("starting vector is zero")
        f = self.objective(a, b)
        history = [f]
        converged = False
        it = 0
        for it in range(1, cfg.max_iters + 1):
            f_prev = f
            a = self._half_step(b, "A")
            a, b = _orthonormalize(a, b)
            history.append(self.objective(a, b))
            b = self._half_step(a, "B")
            b, a = _orthonormalize(b, a)
            f = self.objective(a, b)
            history.append(f)
            if abs(f_prev - f) <= cfg.rel_tol * max(abs(f), self.floor):
                converged = True
                break
        return StartResult(index, f, it, converged, history, redraws, seeded, a, b)


def _draw(rng: np.random.Generator, d_a: int, d_b: int):
    a = rng.standard_normal((2, d_a)) + 1j * rng.standard_normal((2, d_a))
    b = rng.standard_normal((2, d_b)) + 1j * rng.standard_normal((2, d_b))
    return a, b


def _cut(op: Operator, a_factors):
    lay = op.layout
    if a_factors is None:
        a_factors = lay.indices("A")
    a_factors = tuple(a_factors)
    b_factors = tuple(k for k in range(len(lay)) if k not in a_factors)
    if not a_factors or not b_factors:
        raise ValueError("cut must put at least one factor on each side")
    perm = a_factors + b_factors
    d_a = int(np.prod([lay.dims[k] for k in a_factors]))
    return perm, d_a, lay.total // d_a


def minimize_rank2(m: Operator, cfg: SeeSawConfig | None = None,
                   seeds: Sequence[tuple[np.ndarray, np.ndarray]] = (),
                   a_factors=None) -> Rank2Result:
    """Multi-start see-saw minimum of the Rayleigh quotient over rank-2 vectors.

    Parameters
    ----------
    m : Operator
        Hermitian operator.  The cut is taken from party labels unless
        ``a_factors`` names Alice's factors explicitly.
    cfg : SeeSawConfig
        Iteration limits, start count and RNG seed.
    seeds : sequence of (a, b) pairs
        Deterministic starting points, each a pair of ``(2, d_A)`` and
        ``(2, d_B)`` arrays in cut order.  They take the first start indices
        and count against ``cfg.num_starts``.

    Returns
    -------
    Rank2Result
        Best value (an upper bound on the true minimum), the unit-norm
        minimizer in ``m``'s own layout, and per-start diagnostics.
    """
    cfg = cfg or SeeSawConfig()
    err = m.hermiticity_error()
    if err > TOL_HERM:
        raise ValueError(f"operator is not Hermitian (max |M - M^H| = {err:.3g})")
    perm, d_a, d_b = _cut(m, a_factors)
    mp = permute_subsystems(m, perm)
    prob = _Problem(0.5 * (mp.matrix + mp.matrix.conj().T), d_a, d_b, cfg)

    seeds = list(seeds)[:cfg.num_starts]
    n_random = cfg.num_starts - len(seeds)
    streams = np.random.SeedSequence(cfg.rng_seed).spawn(n_random)

    def seeded_start(idx):
        a, b = seeds[idx]
        a = np.asarray(a, dtype=complex).reshape(2, d_a)
        b = np.asarray(b, dtype=complex).reshape(2, d_b)
        try:
            return prob.run(a, b, idx, True, 0)
        except DegenerateStartError:
            log.warning("seed %d is degenerate; skipped", idx)
            return None

    def random_start(j):
        rng = np.random.default_rng(streams[j])
        for redraw in range(cfg.max_redraws + 1):
            try:
                return prob.run(*_draw(rng, d_a, d_b), len(seeds) + j, False, redraw)
            except DegenerateStartError:
                continue
        log.warning("start %d degenerate after %d redraws", len(seeds) + j, cfg.max_redraws)
        return None

    jobs = [(seeded_start, i) for i in range(len(seeds))] + \
           [(random_start, j) for j in range(n_random)]
    workers = _worker_count(cfg)
    if workers == 1:
        results = [fn(arg) for fn, arg in jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda job: job[0](job[1]), jobs))

    done = [r for r in results if r is not None]
    if not done:
        raise DegenerateStartError("every start was degenerate")
    best = done[0]
    for r in done[1:]:
        if r.value < best.value - TIE_TOL:
            best = r

    lay_cut = m.layout.permuted(perm)
    ket = Ket(prob.psi(best.a, best.b), lay_cut).permute(np.argsort(perm)).normalized()
    starts = sorted(done, key=lambda r: r.index)
    best_pos = next(i for i, r in enumerate(starts) if r.index == best.index)
    return Rank2Result(best.value, ket, best_pos, starts)


def analytic_seed() -> tuple[np.ndarray, np.ndarray]:
    """The closed-form witness as a see-saw starting point on ``A1 A2 | B1 B2``."""
    return witness_assignment().cut_pairs()


def pt_operator(rho: Operator) -> Operator:
    return partial_transpose(rho, rho.layout.indices("B"))


@dataclass(frozen=True)
class SweepRecord:
    b: float
    lam: float
    min_value: float
    best_start: int
    iterations: int
    converged: bool
    error: str | None = None


def activation_minimum(lam: float, cfg: SeeSawConfig | None = None,
                       use_analytic_seed: bool = True) -> Rank2Result:
    """Rank-2 minimum of ``(1 (x) T)(rho_W(lam) (x) rho_Pent)`` over ``A1 A2 | B1 B2``."""
    seeds = [analytic_seed()] if use_analytic_seed else []
    return minimize_rank2(pt_operator(product_state(lam)), cfg, seeds)


def sweep_b(b_grid: Sequence[float], cfg: SeeSawConfig | None = None) -> list[SweepRecord]:
    """Activation minimum at each ``b``; bad grid points yield error records."""
    cfg = cfg or SeeSawConfig()
    records = []
    for b in b_grid:
        try:
            if float(b) > 1 / 5:
                raise ValueError(f"b = {b} above 1/5")
            lam = lambda_from_b(b)
        except ValueError as exc:
            records.append(SweepRecord(float(b), float("nan"), float("nan"), -1, 0, False,
                                       str(exc)))
            continue
        res = activation_minimum(lam, cfg)
        log.info("b=%.6f lambda=%.6f min=%.6e", float(b), lam, res.value)
        records.append(SweepRecord(float(b), lam, res.value, res.starts[res.best_start].index,
                                   res.iterations, res.converged))
    return records


def conjecture_evidence(n: int, lam: float, cfg: SeeSawConfig | None = None,
                        min_lambda: float = 2.0) -> Rank2Result:
    """Rank-2 minimum of ``(1 (x) T)(rho_W(lam)^{(x) n})`` across the n-copy cut.

    A non-negative result is evidence only: see-saw values are upper bounds.
    """
    if n not in (1, 2, 3):
        raise ValueError(f"n must be 1, 2 or 3, got {n}")
    if lam < min_lambda:
        raise ValueError(f"lambda = {lam} below {min_lambda}")
    cfg = cfg or evidence_config()
    return minimize_rank2(pt_operator(tensor_power(werner(lam), n)), cfg)


def with_starts(cfg: SeeSawConfig, num_starts: int) -> SeeSawConfig:
    return replace(cfg, num_starts=num_starts)
