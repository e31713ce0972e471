"""Trial simulation and the empirical consistency probability.

A replication simulates one trial (or a pair of independent trials),
applies the overall one-sided test to each, and, if every test rejects,
checks the consistency event. The empirical CP is::

    (# consistent among rejecting replications) / (# rejecting replications)

Replications are grouped in fixed blocks of ``BLOCK_SIZE``; block ``b``
draws from ``RngStream(seed, b)``. Blocks are independent work items and
the reduction is a sum of integer counts, so the estimate depends only on
``(seed, replications)``, never on the number of worker threads.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Literal, Union

import numpy as np

from .consistency_one import CpEstimate, TiePolicy
from .design import BinaryEndpoint, DesignParams, NormalEndpoint, RegionAllocation, StudyPlan
from .errors import DegenerateSimulation
from .stats_core import RngStream

BLOCK_SIZE = 1000
DEFAULT_REPLICATIONS = 10_000


@dataclass
class TrialBatch:
    """Regional summaries for ``size`` simulated trials of one study.

    Arrays have a leading replication axis. ``sum_t``/``sum_c`` hold
    regional response totals (responder counts for binary endpoints).
    ``d_minus`` is NaN when there is a single region.
    """

    n_t: np.ndarray
    n_c: np.ndarray
    sum_t: np.ndarray
    sum_c: np.ndarray
    d: np.ndarray
    d_region: np.ndarray
    d_minus: np.ndarray
    se: np.ndarray
    binary: bool

    @property
    def t_stat(self) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(self.se > 0, self.d / self.se, np.sign(self.d) * np.inf)

    def rejects(self, z_alpha: float) -> np.ndarray:
        # written as D > z*se so a zero variance with D > 0 rejects
        return self.d > z_alpha * self.se

    def region_numerators(self) -> np.ndarray:
        """Exact sign carriers ``a_k n_ck - b_k n_tk`` (binary only)."""
        return self.sum_t.astype(np.int64) * self.n_c - self.sum_c.astype(np.int64) * self.n_t


def simulate_trials(
    rng: RngStream, plan: StudyPlan, alloc: RegionAllocation, size: int, split: str = "total"
) -> TrialBatch:
    """Simulate ``size`` trials of ``plan`` with regions sized by ``alloc``.

    Normal endpoints draw every subject (control mean 0, treatment mean
    ``d``) and estimate ``var(D)`` from the arm sample variances; binary
    endpoints draw regional responder counts and use the Wald variance
    ``p(1-p)/n`` per arm. Arm totals are the realized regional sums, which
    can differ slightly from the plan's under ``split='total'``.
    """
    nt, nc = alloc.arm_sizes(plan, split)
    ep = plan.endpoint
    big_t, big_c = int(nt.sum()), int(nc.sum())
    if isinstance(ep, BinaryEndpoint):
        sum_t = rng.binomial(nt, ep.p_t, size=(size, nt.size))
        sum_c = rng.binomial(nc, ep.p_c, size=(size, nc.size))
        pt_hat = sum_t.sum(axis=1) / big_t
        pc_hat = sum_c.sum(axis=1) / big_c
        var = pt_hat * (1.0 - pt_hat) / big_t + pc_hat * (1.0 - pc_hat) / big_c
        binary = True
    elif isinstance(ep, NormalEndpoint):
        yt = rng.normal(ep.d, math.sqrt(ep.sigma2_t), size=(size, big_t))
        yc = rng.normal(0.0, math.sqrt(ep.sigma2_c), size=(size, big_c))
        sum_t = np.add.reduceat(yt, np.concatenate(([0], np.cumsum(nt)[:-1])), axis=1)
        sum_c = np.add.reduceat(yc, np.concatenate(([0], np.cumsum(nc)[:-1])), axis=1)
        # sigma2_t/N_t + sigma2_c/N_c with sample variances substituted
        var = yt.var(axis=1, ddof=1) / big_t + yc.var(axis=1, ddof=1) / big_c
        binary = False
    else:
        raise TypeError(f"unsupported endpoint {type(ep).__name__}")
    tot_t = sum_t.sum(axis=1)
    tot_c = sum_c.sum(axis=1)
    d = tot_t / big_t - tot_c / big_c
    d_region = sum_t / nt - sum_c / nc
    with np.errstate(divide="ignore", invalid="ignore"):
        d_minus = (tot_t[:, None] - sum_t) / (big_t - nt) - (tot_c[:, None] - sum_c) / (big_c - nc)
    if nt.size == 1:
        d_minus = np.full_like(d_region, np.nan)
    return TrialBatch(nt, nc, sum_t, sum_c, d, d_region, d_minus, np.sqrt(var), binary)


def simulate_trial(rng: RngStream, plan: StudyPlan, alloc: RegionAllocation) -> TrialBatch:
    """One simulated trial (a batch of size 1)."""
    return simulate_trials(rng, plan, alloc, 1)


@dataclass(frozen=True)
class OneStudyScenario:
    """One trial; ``criterion`` 1 = retained effect in ``region``,
    2 = same direction in all regions."""

    plan: StudyPlan
    alloc: RegionAllocation
    criterion: Literal[1, 2] = 1
    region: int = 0


@dataclass(frozen=True)
class TwoStudyScenario:
    """Two independent trials judged on pooled regional estimates."""

    plan1: StudyPlan
    plan2: StudyPlan
    alloc1: RegionAllocation
    alloc2: RegionAllocation
    criterion: Literal[1, 2] = 1
    region: int = 0

    def __post_init__(self) -> None:
        if self.alloc1.k != self.alloc2.k:
            raise ValueError("both studies need the same number of regions")
        if self.plan1.r != self.plan2.r:
            raise ValueError("randomization ratio must match across studies")

    @property
    def weights(self) -> tuple[float, float]:
        n1, n2 = self.plan1.n, self.plan2.n
        return n1 / (n1 + n2), n2 / (n1 + n2)


Scenario = Union[OneStudyScenario, TwoStudyScenario]


@dataclass(frozen=True)
class SimConfig:
    scenario: Scenario
    params: DesignParams
    replications: int = DEFAULT_REPLICATIONS
    seed: int = 0
    tie_policy: TiePolicy = "strict"
    threads: int = 1
    split: str = "total"

    def __post_init__(self) -> None:
        if self.replications < 1:
            raise ValueError("replications must be at least 1")
        if self.tie_policy not in ("strict", "inclusive"):
            raise ValueError(f"unknown tie policy {self.tie_policy!r}")
        if self.scenario.criterion not in (1, 2):
            raise ValueError("criterion must be 1 or 2")
        if self.split not in ("total", "per_arm"):
            raise ValueError(f"unknown split {self.split!r}")


@dataclass(frozen=True)
class SimResult:
    replications: int
    rejections: int
    consistent_given_rejection: int

    @property
    def empirical_cp(self) -> float:
        if self.rejections == 0:
            raise DegenerateSimulation("no replication rejected the null hypothesis")
        return self.consistent_given_rejection / self.rejections

    @property
    def mc_se(self) -> float:
        cp = self.empirical_cp
        return math.sqrt(cp * (1.0 - cp) / self.rejections)

    @property
    def rejection_rate(self) -> float:
        return self.rejections / self.replications

    def to_estimate(self) -> CpEstimate:
        return CpEstimate(
            self.empirical_cp,
            "monte_carlo",
            mc_se=self.mc_se,
            replications=self.replications,
            rejections=self.rejections,
        )


def _positive(x: np.ndarray, tie_policy: TiePolicy) -> np.ndarray:
    return x > 0 if tie_policy == "strict" else x >= 0


def _one_study_block(cfg: SimConfig, rng: RngStream, size: int) -> tuple[int, int]:
    sc: OneStudyScenario = cfg.scenario
    tb = simulate_trials(rng, sc.plan, sc.alloc, size, cfg.split)
    rej = tb.rejects(cfg.params.z_alpha)
    if sc.criterion == 1:
        ok = tb.d_region[:, sc.region] >= cfg.params.pi * tb.d
    elif tb.binary:
        ok = np.all(_positive(tb.region_numerators(), cfg.tie_policy), axis=1)
    else:
        ok = np.all(_positive(tb.d_region, cfg.tie_policy), axis=1)
    return int(rej.sum()), int((rej & ok).sum())


def _two_study_block(cfg: SimConfig, rng: RngStream, size: int) -> tuple[int, int]:
    sc: TwoStudyScenario = cfg.scenario
    b1 = simulate_trials(rng, sc.plan1, sc.alloc1, size, cfg.split)
    b2 = simulate_trials(rng, sc.plan2, sc.alloc2, size, cfg.split)
    z = cfg.params.z_alpha
    rej = b1.rejects(z) & b2.rejects(z)
    w1, w2 = sc.weights
    if sc.criterion == 1:
        k = sc.region
        pooled_k = w1 * b1.d_region[:, k] + w2 * b2.d_region[:, k]
        ok = pooled_k >= cfg.params.pi * (w1 * b1.d + w2 * b2.d)
    elif b1.binary and b2.binary:
        # sign of w1*D_k1 + w2*D_k2 scaled by (N1+N2) n_t1 n_c1 n_t2 n_c2 > 0
        n1, n2 = sc.plan1.n, sc.plan2.n
        s1 = b1.region_numerators() * (b2.n_t * b2.n_c) * n1
        s2 = b2.region_numerators() * (b1.n_t * b1.n_c) * n2
        ok = np.all(_positive(s1 + s2, cfg.tie_policy), axis=1)
    else:
        pooled = w1 * b1.d_region + w2 * b2.d_region
        ok = np.all(_positive(pooled, cfg.tie_policy), axis=1)
    return int(rej.sum()), int((rej & ok).sum())


def resolve_threads(threads: int | None) -> int:
    """Explicit value, else ``MRCT_THREADS``, else 1."""
    if threads is None or threads < 1:
        threads = int(os.environ.get("MRCT_THREADS", "1") or 1)
    return max(1, threads)


def empirical_cp(cfg: SimConfig) -> SimResult:
    """Run ``cfg.replications`` simulated replications and count outcomes.

    Raises:
        DegenerateSimulation: if no replication rejects (CP undefined).
    """
    block_fn = _one_study_block if isinstance(cfg.scenario, OneStudyScenario) else _two_study_block
    n_blocks = -(-cfg.replications // BLOCK_SIZE)

    def run(b: int) -> tuple[int, int]:
        size = min(BLOCK_SIZE, cfg.replications - b * BLOCK_SIZE)
        return block_fn(cfg, RngStream(cfg.seed, b), size)

    threads = resolve_threads(cfg.threads)
    if threads == 1:
        parts = [run(b) for b in range(n_blocks)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run, range(n_blocks)))
    rejections = sum(p[0] for p in parts)
    consistent = sum(p[1] for p in parts)
    result = SimResult(cfg.replications, rejections, consistent)
    if rejections == 0:
        raise DegenerateSimulation(
            f"none of {cfg.replications} replications rejected; empirical CP undefined"
        )
    return result
