"""Monte Carlo estimation of logical error rates and loss thresholds.

One trial samples independent Z flips on the primal qubits, decodes the
syndrome with weighted matching and checks whether the residual error links
the two primal x-boundaries an odd number of times.

Reproducibility
---------------
Trials are processed in fixed blocks of ``BLOCK_SIZE``.  Block ``b`` of a plan
with seed ``s`` draws from ``PCG64(SeedSequence([s, b]))``, so failure counts
depend only on ``(plan, seed)`` and never on the number of worker threads.
"""

from __future__ import annotations

import math
import os
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np

from .analytics import Scheme
from .decoder import build_decoding_graph, decode_batch
from .loss_model import FusionErrorRates, fusion_error_rates
from .rhg_lattice import (ErrorAssignment, Lattice, assign_error_rates, build_lattice,
                          logical_errors, sample_errors, syndrome)

__all__ = [
    "BLOCK_SIZE",
    "THREADS_ENV",
    "TrialPlan",
    "LogicalErrorEstimate",
    "ThresholdPoint",
    "ThresholdEstimate",
    "resolve_threads",
    "point_seed",
    "run_trials",
    "estimate_threshold",
    "bisect_threshold",
    "fit_crossing",
    "scan_alpha",
    "Extrapolation",
    "extrapolate_p_L",
]

BLOCK_SIZE = 10_000
THREADS_ENV = "HYBRIDCAT_THREADS"


@dataclass(frozen=True)
class TrialPlan:
    scheme: str
    alpha: float
    eta: float
    d: int
    n_trials: int
    seed: int = 0

    def __post_init__(self):
        if self.n_trials < 1:
            raise ValueError("n_trials must be >= 1")


@dataclass(frozen=True)
class LogicalErrorEstimate:
    n_trials: int
    n_failures: int

    @property
    def p_L(self) -> float:
        return self.n_failures / self.n_trials

    @property
    def stderr(self) -> float:
        p = self.p_L
        return math.sqrt(p * (1.0 - p) / self.n_trials)


@dataclass(frozen=True)
class ThresholdPoint:
    eta: float
    estimates: dict  # d -> LogicalErrorEstimate

    def ordered(self, n_sigma: float = 2.0) -> bool:
        """``p_L`` decreases with ``d`` at ``n_sigma`` for every consecutive pair."""
        ds = sorted(self.estimates)
        for a, b in zip(ds, ds[1:]):
            ea, eb = self.estimates[a], self.estimates[b]
            gap = ea.p_L - eb.p_L
            if gap <= n_sigma * math.hypot(ea.stderr, eb.stderr):
                return False
        return True

    def reversed(self, n_sigma: float = 2.0) -> bool:
        ds = sorted(self.estimates)
        for a, b in zip(ds, ds[1:]):
            ea, eb = self.estimates[a], self.estimates[b]
            if eb.p_L - ea.p_L > n_sigma * math.hypot(ea.stderr, eb.stderr):
                return True
        return False


@dataclass
class ThresholdEstimate:
    """``eta_th`` is ``None`` when no grid point is significantly ordered."""

    scheme: str
    alpha: float
    eta_th: Optional[float]
    points: list = field(default_factory=list)

    @property
    def below_grid(self) -> bool:
        return self.eta_th is None

    def rows(self):
        for pt in self.points:
            for d, est in sorted(pt.estimates.items()):
                yield (self.scheme, self.alpha, pt.eta, d, est.n_trials, est.n_failures,
                       est.p_L, est.stderr)


def resolve_threads(threads: Optional[int] = None) -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        threads = int(env)
    return max(1, int(threads or 1))


def point_seed(seed: int, *keys: int) -> int:
    """Derive a 64-bit seed for a scan point from the master seed."""
    ss = np.random.SeedSequence([int(seed) & (2**63 - 1)] + [int(k) for k in keys])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


@lru_cache(maxsize=16)
def _lattice(d: int) -> Lattice:
    return build_lattice(d)


@lru_cache(maxsize=256)
def _rates(scheme: str, alpha: float, eta: float) -> FusionErrorRates:
    return fusion_error_rates(scheme, alpha, eta)


def _block_failures(lattice: Lattice, assignment: ErrorAssignment, seed: int,
                    block: int, shots: int, local: threading.local) -> int:
    graph = getattr(local, "graph", None)
    if graph is None or local.key != id(assignment):
        # matchers are not shared between threads
        graph = build_decoding_graph(lattice, assignment)
        local.graph, local.key = graph, id(assignment)
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, block])))
    flips = sample_errors(assignment, shots, rng)
    if not flips.any():
        return 0
    corr = decode_batch(graph, syndrome(lattice, flips))
    return int(logical_errors(lattice, flips ^ corr, check=False).sum())


def run_trials(plan: TrialPlan, threads: Optional[int] = None,
               rates: Optional[FusionErrorRates] = None,
               q_z: Optional[np.ndarray] = None) -> LogicalErrorEstimate:
    """Estimate the logical error rate for one plan.

    ``rates`` or a per-qubit ``q_z`` array override the loss-model rates.
    """
    lattice = _lattice(int(plan.d))
    if q_z is not None:
        assignment = ErrorAssignment(np.broadcast_to(np.asarray(q_z, float),
                                                     (lattice.n_qubits,)).copy())
    else:
        if rates is None:
            rates = _rates(Scheme.parse(plan.scheme).value, float(plan.alpha), float(plan.eta))
        assignment = assign_error_rates(lattice, rates)
    if not np.any(assignment.q_z > 0):
        return LogicalErrorEstimate(plan.n_trials, 0)
    if np.any(assignment.q_z >= 0.5):
        # zero-information weights; decoding is skipped and every trial is a coin flip
        q = np.minimum(assignment.q_z, 0.5 - 1e-12)
        assignment = ErrorAssignment(q)
    n_blocks = -(-plan.n_trials // BLOCK_SIZE)
    sizes = [min(BLOCK_SIZE, plan.n_trials - b * BLOCK_SIZE) for b in range(n_blocks)]
    local = threading.local()
    nthreads = resolve_threads(threads)
    job = lambda b: _block_failures(lattice, assignment, plan.seed, b, sizes[b], local)
    if nthreads == 1 or n_blocks == 1:
        fails = sum(job(b) for b in range(n_blocks))
    else:
        with ThreadPoolExecutor(nthreads) as ex:
            fails = sum(ex.map(job, range(n_blocks)))
    return LogicalErrorEstimate(plan.n_trials, fails)


def _measure(scheme, alpha, eta, d_list, n_trials, seed, threads) -> ThresholdPoint:
    est = {}
    for d in d_list:
        s = point_seed(seed, d, int(round(eta * 1e9)), int(round(alpha * 1e6)))
        est[d] = run_trials(TrialPlan(scheme, alpha, eta, d, n_trials, s), threads)
    return ThresholdPoint(float(eta), est)


def estimate_threshold(scheme, alpha: float, eta_grid: Sequence[float],
                       d_list: Sequence[int] = (3, 5), n_trials: int = 300_000,
                       seed: int = 0, threads: Optional[int] = None, n_sigma: float = 2.0,
                       patience: Optional[int] = 2,
                       progress: Optional[Callable[[ThresholdPoint], None]] = None
                       ) -> ThresholdEstimate:
    """Largest grid ``eta`` at which ``p_L`` significantly decreases with ``d``.

    With ``patience`` set, the ascending scan stops after that many
    consecutive points where ``p_L`` significantly increases with ``d``.
    """
    grid = [float(e) for e in eta_grid]
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("eta_grid must be strictly ascending")
    if len(d_list) < 2:
        raise ValueError("need at least two code distances")
    scheme = Scheme.parse(scheme).value
    pts, best, streak = [], None, 0
    for eta in grid:
        pt = _measure(scheme, alpha, eta, d_list, n_trials, seed, threads)
        pts.append(pt)
        if progress:
            progress(pt)
        if pt.ordered(n_sigma):
            best = eta
        streak = streak + 1 if pt.reversed(n_sigma) else 0
        if patience and streak >= patience:
            break
    return ThresholdEstimate(scheme, float(alpha), best, pts)


def bisect_threshold(scheme, alpha: float, lo: float, hi: float, steps: int = 6,
                     d_list: Sequence[int] = (3, 5), n_trials: int = 300_000,
                     seed: int = 0, threads: Optional[int] = None,
                     n_sigma: float = 2.0) -> ThresholdEstimate:
    """Bisection form of the ordering rule on ``[lo, hi]``.

    ``lo`` must be significantly ordered; the returned ``eta_th`` is the
    largest probed ``eta`` that is.
    """
    scheme = Scheme.parse(scheme).value
    pts = []
    p_lo = _measure(scheme, alpha, lo, d_list, n_trials, seed, threads)
    pts.append(p_lo)
    if not p_lo.ordered(n_sigma):
        return ThresholdEstimate(scheme, float(alpha), None, pts)
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        pt = _measure(scheme, alpha, mid, d_list, n_trials, seed, threads)
        pts.append(pt)
        if pt.ordered(n_sigma):
            lo = mid
        else:
            hi = mid
    pts.sort(key=lambda p: p.eta)
    return ThresholdEstimate(scheme, float(alpha), lo, pts)


def fit_crossing(estimate: ThresholdEstimate, d_small: int = 3,
                 d_large: int = 5, window: int = 4) -> tuple[float, float]:
    """Crossing of ``p_L(d_large) - p_L(d_small)`` by weighted linear fit.

    Uses the ``window`` points with the smallest ``|gap| / sigma``.  Returns
    ``(eta_cross, sigma)`` with ``sigma`` from first-order propagation of the
    fit covariance.
    """
    rows = []
    for pt in estimate.points:
        a, b = pt.estimates.get(d_small), pt.estimates.get(d_large)
        if a is None or b is None:
            continue
        s = math.hypot(a.stderr, b.stderr)
        if s > 0:
            rows.append((pt.eta, b.p_L - a.p_L, s))
    if len(rows) < 2:
        raise ValueError("need at least two points with nonzero variance")
    rows.sort(key=lambda r: abs(r[1]) / r[2])
    rows = np.array(sorted(rows[:max(2, window)]))
    x, y, s = rows[:, 0], rows[:, 1], rows[:, 2]
    w = 1.0 / s ** 2
    xm = np.sum(w * x) / np.sum(w)
    X = np.stack([np.ones_like(x), x - xm], 1)
    cov = np.linalg.inv(X.T @ (w[:, None] * X))
    c0, c1 = cov @ (X.T @ (w * y))
    if c1 <= 0:
        raise ValueError("gap does not increase with eta near the crossing")
    root = xm - c0 / c1
    # var(root) for root = xm - c0/c1
    g = np.array([-1.0 / c1, c0 / c1 ** 2])
    return float(root), float(math.sqrt(g @ cov @ g))


def scan_alpha(scheme, alpha_grid: Sequence[float], eta_lo: float = 1e-3,
               eta_hi: float = 1.2e-2, steps: int = 6, d_list: Sequence[int] = (3, 5),
               n_trials: int = 100_000, seed: int = 0, threads: Optional[int] = None,
               n_sigma: float = 2.0, progress: Optional[Callable] = None
               ) -> tuple[float, Optional[float], list]:
    """Threshold versus amplitude; returns ``(alpha_star, eta_th_star, table)``."""
    table = []
    for a in alpha_grid:
        est = bisect_threshold(scheme, float(a), eta_lo, eta_hi, steps, d_list, n_trials,
                               seed, threads, n_sigma)
        table.append(est)
        if progress:
            progress(est)
    valid = [e for e in table if e.eta_th is not None]
    if not valid:
        return float(alpha_grid[0]), None, table
    best = max(valid, key=lambda e: e.eta_th)
    return best.alpha, best.eta_th, table


@dataclass
class Extrapolation:
    """Per-distance power-law fits ``p_L = C q^k`` in the per-qubit rate q."""

    q_target: float
    table: dict
    fits: dict
    points: list


def extrapolate_p_L(scheme, alpha: float, eta_op: float, d_list: Sequence[int],
                    eta_fit: Sequence[float] = (5e-4, 1e-3, 2e-3),
                    n_trials: int = 10_000_000, seed: int = 0,
                    threads: Optional[int] = None, min_failures: int = 5,
                    n_fit_trials: int = 300_000) -> Extrapolation:
    """Logical error rates at a low-loss operating point.

    ``p_L`` is simulated directly at ``eta_op`` with ``n_trials`` trials.  A
    distance with at least ``min_failures`` failures keeps the direct
    estimate.  Otherwise ``log p_L`` is fitted linearly in ``log q`` over the
    ``eta_fit`` points (``n_fit_trials`` each, weights ``n_failures``) and
    evaluated at the operating ``q``.
    """
    scheme = Scheme.parse(scheme).value
    q_of = lambda e: float(assign_error_rates(_lattice(3), _rates(scheme, float(alpha), float(e))).q_z.max())
    q_op = q_of(eta_op)
    table, fits, pts = {}, {}, []
    for d in d_list:
        key = lambda e: point_seed(seed, d, int(round(e * 1e9)), int(round(alpha * 1e6)))
        direct = run_trials(TrialPlan(scheme, alpha, eta_op, d, n_trials, key(eta_op)), threads)
        pts.append((d, float(eta_op), direct))
        if direct.n_failures >= min_failures:
            table[d] = direct.p_L
            continue
        use = []
        for eta in eta_fit:
            est = run_trials(TrialPlan(scheme, alpha, eta, d, n_fit_trials, key(eta)), threads)
            pts.append((d, float(eta), est))
            if est.n_failures >= min_failures:
                use.append((math.log(q_of(eta)), math.log(est.p_L), est.n_failures))
        if len(use) < 2:
            raise ValueError(f"too few resolvable points to extrapolate d={d}")
        x, y, w = (np.array(v, dtype=float) for v in zip(*use))
        k, c = np.polyfit(x, y, 1, w=np.sqrt(w))
        fits[d] = (float(math.exp(c)), float(k))
        table[d] = float(math.exp(c + k * math.log(q_op)))
    return Extrapolation(q_op, table, fits, pts)
