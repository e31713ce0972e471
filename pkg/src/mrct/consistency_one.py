"""Consistency probabilities for a single multi-regional trial.

Two consistency events are supported, each conditional on the overall
one-sided test rejecting:

* retained effect: the region of interest keeps at least ``pi`` of the
  overall observed effect, ``D_k >= pi * D``;
* same direction: every regional effect is nonnegative, ``D_k >= 0`` for
  all ``k``.

Under the normal approximation both reduce to one-dimensional integrals
over the standardized overall estimate. Binary endpoints can instead be
evaluated exactly by enumeration or by trial simulation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np
from scipy.signal import convolve

from .design import BinaryEndpoint, DesignParams, RegionAllocation, StudyPlan, overall_sample_size
from .errors import EnumerationBudgetExceeded, UnattainableTarget
from .quadrature import integrate_1d
from .roots import crossing_point, first_grid_index, round_up_to_grid
from .stats_core import binom_pmf_vector, ndtr, npdf

Method = Literal["quadrature", "exact_enum", "monte_carlo"]
TiePolicy = Literal["strict", "inclusive"]

F_LOWER = 1e-4
F_UPPER = 1.0 - 1e-6
ENUMERATION_BUDGET = 1e8
DEFAULT_REPLICATIONS = 10_000


@dataclass(frozen=True)
class CpEstimate:
    """A consistency probability and how it was obtained.

    ``mc_se`` and ``replications`` are set exactly when the method is
    Monte Carlo; for Monte Carlo ``replications`` counts all simulated
    trials and ``rejections`` the ones entering the denominator.
    ``error`` is the quadrature error estimate when available.
    """

    value: float
    method: Method
    mc_se: Optional[float] = None
    replications: Optional[int] = None
    rejections: Optional[int] = None
    error: Optional[float] = None

    def __post_init__(self) -> None:
        if not (0.0 <= self.value <= 1.0):
            raise ValueError(f"CP {self.value!r} outside [0, 1]")
        if (self.mc_se is not None) != (self.method == "monte_carlo"):
            raise ValueError("mc_se must be given exactly for Monte Carlo estimates")

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True)
class FractionSolution:
    """A solved regional fraction.

    ``fraction`` is the reported value: the smallest multiple of 0.001 whose
    CP reaches the target. ``root`` is the unrounded crossing point and
    ``cp`` the CP at ``fraction``.
    """

    fraction: float
    root: float
    cp: float
    target: float

    @property
    def percent(self) -> float:
        return 100.0 * self.fraction


def _quad_estimate(total: float, err: float, power: float) -> CpEstimate:
    value = min(max(total / power, 0.0), 1.0)
    return CpEstimate(value, "quadrature", error=err / power)


def _check_fraction(f: float) -> None:
    if not (0.0 < f <= 1.0):
        raise ValueError(f"regional fraction {f!r} must lie in (0, 1]")


def cp_criterion1(params: DesignParams, f_k: float) -> CpEstimate:
    """CP that region ``k`` retains ``pi`` of the overall effect.

    Normal approximation::

        1/(1-beta) * int_{-z_b}^inf Phi((1-pi)(u + z_a + z_b) / sqrt(1/f_k - 1)) phi(u) du

    Depends only on ``alpha``, ``beta``, ``pi`` and ``f_k``, not on N or K.
    """
    _check_fraction(f_k)
    if f_k == 1.0:
        return CpEstimate(1.0, "quadrature", error=0.0)
    z = params.z_sum
    scale = (1.0 - params.pi) / math.sqrt(1.0 / f_k - 1.0)
    res = integrate_1d(lambda u: ndtr(scale * (u + z)) * npdf(u), -params.z_beta)
    return _quad_estimate(res.value, res.error, params.power)


def solve_fk_criterion1(params: DesignParams, target: float | None = None) -> FractionSolution:
    """Smallest regional fraction whose criterion-I CP reaches the target.

    Raises:
        UnattainableTarget: e.g. ``pi = 1`` with a target above 0.5.
    """
    target = params.target if target is None else target

    def cp(f):
        return cp_criterion1(params, f).value

    sup = cp(F_UPPER)
    if sup < target:
        raise UnattainableTarget(f"target {target} above criterion-I CP for every f_k < 1", sup)
    if cp(F_LOWER) >= target:
        return FractionSolution(F_LOWER, F_LOWER, cp(F_LOWER), target)
    root = crossing_point(cp, target, F_LOWER, F_UPPER)
    value, achieved = round_up_to_grid(cp, target, root, F_LOWER, F_UPPER)
    return FractionSolution(value, root, achieved, target)


def cp_criterion2(params: DesignParams, alloc: RegionAllocation) -> CpEstimate:
    """CP that every region shows a nonnegative effect (normal approximation).

    ``1/(1-beta) * int_{-z_b}^inf prod_k Phi((u + z_a + z_b)/sqrt(1/f_k - 1)) phi(u) du``
    """
    inv = np.array([1.0 / f - 1.0 for f in alloc.fractions])
    inv = inv[inv > 0.0]
    if inv.size == 0:
        return CpEstimate(1.0, "quadrature", error=0.0)
    scales = 1.0 / np.sqrt(inv)[:, None]
    z = params.z_sum

    def integrand(u):
        return np.prod(ndtr(scales * (u + z)), axis=0) * npdf(u)

    res = integrate_1d(integrand, -params.z_beta)
    return _quad_estimate(res.value, res.error, params.power)


def max_cp_criterion2(params: DesignParams, k: int) -> CpEstimate:
    """Largest same-direction CP over allocations of ``k`` regions.

    Attained at equal fractions ``1/k``; decreases as ``k`` grows.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    return cp_criterion2(params, RegionAllocation.equal(k))


def solve_f1_criterion2(params: DesignParams, k: int, target: float | None = None) -> FractionSolution:
    """Smallest ``f_1`` reaching the same-direction target when the other
    ``k-1`` regions share ``1 - f_1`` equally.

    Raises:
        UnattainableTarget: target above the equal-fraction maximum.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    target = params.target if target is None else target
    hi = 1.0 / k

    def cp(f1):
        return cp_criterion2(params, RegionAllocation.equal_rest(f1, k)).value

    best = cp(hi)
    if best < target - 1e-12:
        raise UnattainableTarget(f"target {target} above the K={k} maximum", best)
    if cp(F_LOWER) >= target:
        return FractionSolution(F_LOWER, F_LOWER, cp(F_LOWER), target)
    root = crossing_point(cp, target, F_LOWER, hi)
    value, achieved = round_up_to_grid(cp, target, root, F_LOWER, hi)
    return FractionSolution(value, root, achieved, target)


# ---------------------------------------------------------------------------
# binary endpoint: exact enumeration and simulation


def rejection_region(n_t: int, n_c: int, z_alpha: float) -> np.ndarray:
    """Boolean grid over total responder counts ``(u, v)`` where the
    unpooled-variance Wald statistic exceeds ``z_alpha``.

    With zero estimated variance the test rejects iff ``u/n_t > v/n_c``.
    """
    u = np.arange(n_t + 1)[:, None]
    v = np.arange(n_c + 1)[None, :]
    diff = u / n_t - v / n_c
    var = u * (n_t - u) / n_t**3 + v * (n_c - v) / n_c**3
    return diff > z_alpha * np.sqrt(var)


def regional_indicator(n_t: int, n_c: int, tie_policy: TiePolicy = "strict") -> np.ndarray:
    """``[u/n_t > v/n_c]`` (or ``>=``) over a region's count grid, in exact
    integer arithmetic."""
    u = np.arange(n_t + 1)[:, None]
    v = np.arange(n_c + 1)[None, :]
    lhs = u * n_c
    rhs = v * n_t
    return lhs > rhs if tie_policy == "strict" else lhs >= rhs


def _convolve_all(arrays, budget: float) -> np.ndarray:
    terms = 0.0
    acc_shape = np.ones(arrays[0].ndim, dtype=np.int64)
    for a in arrays:
        terms += float(np.prod(acc_shape)) * a.size
        acc_shape = acc_shape + np.array(a.shape) - 1
    if terms > budget:
        raise EnumerationBudgetExceeded(terms, budget)
    acc = arrays[0]
    for a in arrays[1:]:
        acc = convolve(acc, a)
    return np.clip(acc, 0.0, None)


def _binary_plan(plan: StudyPlan) -> BinaryEndpoint:
    if not isinstance(plan.endpoint, BinaryEndpoint):
        raise TypeError("binary consistency needs a BinaryEndpoint plan")
    return plan.endpoint


def cp_criterion2_binary_exact(
    plan: StudyPlan,
    alloc: RegionAllocation,
    params: DesignParams,
    tie_policy: TiePolicy = "strict",
    budget: float = ENUMERATION_BUDGET,
    split: str = "total",
) -> CpEstimate:
    """Exact same-direction CP for a binary endpoint.

    Sums the product of regional binomial masses over outcomes where every
    regional difference is positive and the overall Wald test rejects, and
    divides by the exact rejection probability. Regional count grids are
    combined by convolution, so the cost is governed by the regional sizes
    rather than a K-fold product.

    Raises:
        EnumerationBudgetExceeded: if the convolutions exceed ``budget`` terms.
    """
    ep = _binary_plan(plan)
    nt, nc = alloc.arm_sizes(plan, split)
    # the realized arm totals define the overall test
    big_t, big_c = int(nt.sum()), int(nc.sum())
    parts = []
    for ntk, nck in zip(nt, nc):
        mass = np.outer(binom_pmf_vector(int(ntk), ep.p_t), binom_pmf_vector(int(nck), ep.p_c))
        parts.append(mass * regional_indicator(int(ntk), int(nck), tie_policy))
    joint = _convolve_all(parts, budget)
    overall = np.outer(binom_pmf_vector(big_t, ep.p_t), binom_pmf_vector(big_c, ep.p_c))
    reject = rejection_region(big_t, big_c, params.z_alpha)
    num = float(np.sum(joint[reject]))
    den = float(np.sum(overall[reject]))
    if den <= 0.0:
        raise ValueError("rejection region has zero probability")
    return CpEstimate(min(num / den, 1.0), "exact_enum")


def cp_criterion2_binary(
    plan: StudyPlan,
    alloc: RegionAllocation,
    params: DesignParams,
    mode: Literal["exact", "monte_carlo"] = "exact",
    replications: int = DEFAULT_REPLICATIONS,
    seed: int | None = None,
    tie_policy: TiePolicy = "strict",
    budget: float = ENUMERATION_BUDGET,
    threads: int = 1,
    split: str = "total",
) -> CpEstimate:
    """Same-direction CP for a binary endpoint, exact or simulated.

    Monte Carlo mode requires ``seed`` and reports the conditional
    proportion of consistent trials among rejecting ones. ``split`` picks
    the regional integerization (see :meth:`RegionAllocation.arm_sizes`).
    """
    if mode == "exact":
        return cp_criterion2_binary_exact(plan, alloc, params, tie_policy, budget, split)
    if mode != "monte_carlo":
        raise ValueError(f"unknown mode {mode!r}")
    if seed is None:
        raise ValueError("Monte Carlo mode needs an explicit seed")
    _binary_plan(plan)
    from .simulate import OneStudyScenario, SimConfig, empirical_cp

    cfg = SimConfig(
        scenario=OneStudyScenario(plan, alloc, criterion=2),
        params=params,
        replications=replications,
        seed=seed,
        tie_policy=tie_policy,
        threads=threads,
        split=split,
    )
    return empirical_cp(cfg).to_estimate()


def solve_f1_criterion2_binary(
    endpoint: BinaryEndpoint,
    params: DesignParams,
    k: int,
    target: float | None = None,
    mode: Literal["exact", "monte_carlo"] = "monte_carlo",
    replications: int = 100_000,
    seed: int | None = None,
    tie_policy: TiePolicy = "strict",
    budget: float = ENUMERATION_BUDGET,
    threads: int = 1,
    split: str = "total",
) -> FractionSolution:
    """Smallest ``f_1`` on the 0.001 grid whose binary same-direction CP
    reaches the target, with the other regions sharing the rest equally.

    The study is sized from ``endpoint`` and ``params``. Integer regional
    sizes make CP a step function of ``f_1`` that need not be monotone:
    with ``split='total'`` an odd regional total gives unequal arms, where
    exact ties are rare, so CP jumps with the parity of the regional
    sizes. The grid is therefore scanned upward rather than bisected.
    Monte Carlo evaluations all reuse ``seed``.
    """
    target = params.target if target is None else target
    plan = overall_sample_size(endpoint, params)
    cache: dict[int, float] = {}

    def cp_at(i: int) -> float:
        if i not in cache:
            alloc = RegionAllocation.equal_rest(i / 1000.0, k)
            cache[i] = cp_criterion2_binary(
                plan, alloc, params, mode, replications, seed, tie_policy, budget, threads, split
            ).value
        return cache[i]

    lo = max(1, math.ceil(1000.0 / min(plan.n_t, plan.n_c)))
    hi = int(1000 // k)
    i = first_grid_index(cp_at, target, lo, hi)
    if i is None:
        best = max(cache.values())
        raise UnattainableTarget(f"target {target} above the binary K={k} maximum", best)
    f = i / 1000.0
    return FractionSolution(f, f, cp_at(i), target)
