"""Consistency probabilities pooled over two independent trials.

Regional and overall effects are pooled with study weights
``w_s = N_s / (N_1 + N_2)``:

    D_k,pool = w_1 D_k^(1) + w_2 D_k^(2),    D_pool = w_1 D^(1) + w_2 D^(2)

and consistency is judged conditional on both trials rejecting. The normal
approximation gives double integrals over the two standardized overall
estimates; with homogeneous studies the retained-effect CP collapses to a
single integral that depends on the fraction pair only through
``c = 1/f^(1) + 1/f^(2)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .consistency_one import (
    ENUMERATION_BUDGET,
    F_LOWER,
    F_UPPER,
    CpEstimate,
    FractionSolution,
    TiePolicy,
    _convolve_all,
    rejection_region,
)
from .design import BinaryEndpoint, DesignParams, RegionAllocation, StudyPlan, overall_sample_size
from .errors import EnumerationBudgetExceeded, UnattainableTarget
from .quadrature import integrate_1d, integrate_2d
from .roots import crossing_point, first_grid_index, round_up_to_grid
from .stats_core import binom_pmf_vector, ndtr, npdf

SigmaSource = Literal["design", "actual"]
SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class FractionPair:
    """Fractions of the region of interest in study 1 and study 2."""

    f1: float
    f2: float

    def __post_init__(self) -> None:
        for name in ("f1", "f2"):
            v = getattr(self, name)
            if not (0.0 < v <= 1.0):
                raise ValueError(f"{name}={v!r} must lie in (0, 1]")

    @property
    def c(self) -> float:
        return 1.0 / self.f1 + 1.0 / self.f2


@dataclass(frozen=True)
class TwoStudyPlan:
    """Two trials sharing the primary endpoint type, alpha, beta and r."""

    study1: StudyPlan
    study2: StudyPlan
    params: DesignParams

    def __post_init__(self) -> None:
        if self.study1.r != self.study2.r:
            raise ValueError("randomization ratio must be the same in both studies")
        if type(self.study1.endpoint) is not type(self.study2.endpoint):
            raise ValueError("both studies need the same endpoint type")
        for s in (self.study1, self.study2):
            if not s.endpoint.d > 0:
                raise ValueError("both study effects must be positive")

    @classmethod
    def from_endpoints(cls, ep1, ep2, params: DesignParams) -> "TwoStudyPlan":
        """Size each study with the overall sample size rule."""
        return cls(overall_sample_size(ep1, params), overall_sample_size(ep2, params), params)

    def swapped(self) -> "TwoStudyPlan":
        return TwoStudyPlan(self.study2, self.study1, self.params)

    def weights(self, sigma_source: SigmaSource = "design") -> tuple[float, float]:
        """``w_s = N_s/(N_1+N_2)``, from unrounded design sizes when
        ``sigma_source='design'`` and both plans carry them."""
        s1, s2 = self.study1, self.study2
        if sigma_source == "design" and s1.n_exact is not None and s2.n_exact is not None:
            n1, n2 = s1.n_exact, s2.n_exact
        else:
            n1, n2 = s1.n, s2.n
        return n1 / (n1 + n2), n2 / (n1 + n2)

    def sigmas(self, sigma_source: SigmaSource = "design") -> tuple[float, float]:
        """Overall-estimate standard deviations ``sigma_d^(s)``.

        ``design`` uses the identity ``sigma_d = d/(z_a + z_b)``; ``actual``
        evaluates ``sqrt(var(D))`` at the integer sizes.
        """
        if sigma_source == "design":
            z = self.params.z_sum
            return self.study1.endpoint.d / z, self.study2.endpoint.d / z
        if sigma_source != "actual":
            raise ValueError(f"unknown sigma source {sigma_source!r}")
        return tuple(math.sqrt(s.variance_factor / s.n) for s in (self.study1, self.study2))

    def scales(self, sigma_source: SigmaSource = "design") -> tuple[float, float, float]:
        """``(w_1 sigma_1, w_2 sigma_2, w_1 d_1 + w_2 d_2)``."""
        w1, w2 = self.weights(sigma_source)
        s1, s2 = self.sigmas(sigma_source)
        m = w1 * self.study1.endpoint.d + w2 * self.study2.endpoint.d
        return w1 * s1, w2 * s2, m


def _pooled_integral(params: DesignParams, a1: float, a2: float, m: float, factor) -> CpEstimate:
    """``1/(1-beta)^2 * iint factor(a1 u + a2 v + m) phi(u) phi(v)`` over
    ``u, v > -z_b``; ``factor`` maps the pooled numerator array to values."""

    def integrand(u, v):
        return factor(a1 * u + a2 * v + m) * npdf(u) * npdf(v)

    lo = -params.z_beta
    res = integrate_2d(integrand, lo, lo)
    power2 = params.power**2
    return CpEstimate(min(max(res.value / power2, 0.0), 1.0), "quadrature", error=res.error / power2)


def _canonical(a1, a2, fs1, fs2):
    # integrand is symmetric under swapping studies; fixing an order makes
    # the iterated quadrature return bit-identical values after a swap
    if (a1, tuple(fs1)) > (a2, tuple(fs2)):
        return a2, a1, fs2, fs1
    return a1, a2, fs1, fs2


def cp_criterion1_pooled(
    plan: TwoStudyPlan,
    pair: FractionPair,
    pi: float | None = None,
    sigma_source: SigmaSource = "design",
) -> CpEstimate:
    """Pooled retained-effect CP for fractions ``pair`` (double integral)."""
    pi = plan.params.pi if pi is None else pi
    a1, a2, m = plan.scales(sigma_source)
    a1, a2, (f1,), (f2,) = _canonical(a1, a2, (pair.f1,), (pair.f2,))
    den = math.sqrt((1.0 / f1 - 1.0) * a1**2 + (1.0 / f2 - 1.0) * a2**2)
    if den == 0.0:
        return CpEstimate(1.0, "quadrature", error=0.0)
    k = (1.0 - pi) / den
    return _pooled_integral(plan.params, a1, a2, m, lambda x: ndtr(k * x))


def cp_homogeneous_c(params: DesignParams, c: float, pi: float | None = None) -> CpEstimate:
    """Homogeneous-study retained-effect CP as a function of ``c``::

        1/(1-beta)^2 * int_{-sqrt2 z_b}^inf
            Phi((1-pi)(sqrt2 x + 2(z_a+z_b)) / sqrt(c - 2)) (2 Phi(x + sqrt2 z_b) - 1) phi(x) dx
    """
    if not c >= 2.0:
        raise ValueError(f"c={c!r} must be at least 2")
    pi = params.pi if pi is None else pi
    z = params.z_sum
    zb = params.z_beta
    if c == 2.0:
        return CpEstimate(1.0, "quadrature", error=0.0)
    k = (1.0 - pi) / math.sqrt(c - 2.0)

    def integrand(x):
        return ndtr(k * (SQRT2 * x + 2.0 * z)) * (2.0 * ndtr(x + SQRT2 * zb) - 1.0) * npdf(x)

    res = integrate_1d(integrand, -SQRT2 * zb)
    power2 = params.power**2
    return CpEstimate(min(max(res.value / power2, 0.0), 1.0), "quadrature", error=res.error / power2)


def cp_criterion1_pooled_homogeneous(
    params: DesignParams, pair: FractionPair, pi: float | None = None
) -> CpEstimate:
    """Single-integral form of :func:`cp_criterion1_pooled` for two studies
    with equal arm variances and equal effects (hence equal weights)."""
    return cp_homogeneous_c(params, pair.c, pi)


@dataclass(frozen=True)
class CSolution:
    """Solution of the homogeneous retained-effect problem.

    ``c_root`` is the exact crossing. ``f_equal`` is the equal-fraction
    design rounded up to 0.001 and ``c = 2 / f_equal`` the value it implies,
    which is what pair enumeration should start from.
    """

    c: float
    c_root: float
    f_equal: float
    cp: float
    target: float


def solve_c_homogeneous(
    params: DesignParams, target: float | None = None, pi: float | None = None
) -> CSolution:
    """``c = 1/f^(1) + 1/f^(2)`` attaining the target homogeneous CP.

    Raises:
        UnattainableTarget: when even ``c -> 2`` (everyone in the region)
            misses the target.
    """
    target = params.target if target is None else target
    pi = params.pi if pi is None else pi
    limit = 1.0 if pi < 1.0 else 0.5
    if target > limit:
        raise UnattainableTarget(f"target {target} above the c->2 supremum", limit)

    def cp_f(f):
        # equal fractions f: c = 2/f; increasing in f
        return cp_homogeneous_c(params, 2.0 / f, pi).value

    if cp_f(F_LOWER) >= target:
        raise ValueError(f"target {target} is met by every allocation (CP >= {cp_f(F_LOWER):.4f})")
    f_root = crossing_point(cp_f, target, F_LOWER, F_UPPER, width=1e-8)
    f_eq, achieved = round_up_to_grid(cp_f, target, f_root, F_LOWER, 1.0)
    return CSolution(2.0 / f_eq, 2.0 / f_root, f_eq, achieved, target)


def enumerate_fraction_pairs(c: float, f1_grid=None) -> list[FractionPair]:
    """Pairs ``(f1, 1/(c - 1/f1))`` sharing the value ``c``.

    The default grid runs from 0.01 to ``2/c`` in steps of 0.01; entries
    that would force ``f2 >= 1`` are skipped with a warning. The combined
    regional share ``f1 + f2`` is smallest at ``f1 = f2 = 2/c``.
    """
    if not c > 2.0:
        raise ValueError(f"c={c!r} must exceed 2")
    if f1_grid is None:
        f1_grid = np.round(np.arange(0.01, 2.0 / c + 1e-12, 0.01), 10)
    pairs = []
    for f1 in f1_grid:
        rest = c - 1.0 / f1
        if not (0.0 < f1 < 1.0) or rest <= 1.0:
            warnings.warn(f"f1={f1} is infeasible for c={c} (needs f2 >= 1); skipped", stacklevel=2)
            continue
        pairs.append(FractionPair(float(f1), 1.0 / rest))
    return pairs


def solve_fk_pooled_equal(
    plan: TwoStudyPlan,
    target: float | None = None,
    pi: float | None = None,
    sigma_source: SigmaSource = "design",
) -> FractionSolution:
    """Common fraction ``f = f^(1) = f^(2)`` attaining the pooled
    retained-effect target."""
    target = plan.params.target if target is None else target

    def cp(f):
        return cp_criterion1_pooled(plan, FractionPair(f, f), pi, sigma_source).value

    sup = cp(F_UPPER)
    if sup < target:
        raise UnattainableTarget(f"target {target} above the pooled criterion-I CP", sup)
    root = crossing_point(cp, target, F_LOWER, F_UPPER)
    value, achieved = round_up_to_grid(cp, target, root, F_LOWER, F_UPPER)
    return FractionSolution(value, root, achieved, target)


def solve_pair_partner(
    plan: TwoStudyPlan,
    f1: float,
    target: float | None = None,
    pi: float | None = None,
    sigma_source: SigmaSource = "design",
) -> FractionSolution:
    """Study-2 fraction that, with study-1 fraction ``f1``, attains the
    target pooled retained-effect CP."""
    target = plan.params.target if target is None else target

    def cp(f2):
        return cp_criterion1_pooled(plan, FractionPair(f1, f2), pi, sigma_source).value

    sup = cp(F_UPPER)
    if sup < target:
        raise UnattainableTarget(f"target {target} unreachable with f1={f1}", sup)
    if cp(F_LOWER) >= target:
        return FractionSolution(F_LOWER, F_LOWER, cp(F_LOWER), target)
    root = crossing_point(cp, target, F_LOWER, F_UPPER, width=1e-6)
    value, achieved = round_up_to_grid(cp, target, root, F_LOWER, F_UPPER)
    return FractionSolution(value, root, achieved, target)


def cp_criterion2_pooled(
    plan: TwoStudyPlan,
    alloc1: RegionAllocation,
    alloc2: RegionAllocation,
    sigma_source: SigmaSource = "design",
) -> CpEstimate:
    """Pooled same-direction CP (double integral of a K-fold product)."""
    if alloc1.k != alloc2.k:
        raise ValueError("both studies need the same number of regions")
    a1, a2, m = plan.scales(sigma_source)
    a1, a2, fs1, fs2 = _canonical(a1, a2, alloc1.fractions, alloc2.fractions)
    dens = np.array([
        math.sqrt((1.0 / f1 - 1.0) * a1**2 + (1.0 / f2 - 1.0) * a2**2) for f1, f2 in zip(fs1, fs2)
    ])
    dens = dens[dens > 0.0]
    if dens.size == 0:
        return CpEstimate(1.0, "quadrature", error=0.0)
    inv = (1.0 / dens).reshape((-1,) + (1, 1))

    def factor(x):
        return np.prod(ndtr(inv * x), axis=0)

    return _pooled_integral(plan.params, a1, a2, m, factor)


def max_cp_criterion2_pooled(plan: TwoStudyPlan, k: int, sigma_source: SigmaSource = "design") -> CpEstimate:
    """Pooled same-direction CP at equal fractions ``1/k`` in both studies."""
    eq = RegionAllocation.equal(k)
    return cp_criterion2_pooled(plan, eq, eq, sigma_source)


def solve_f1_criterion2_pooled(
    plan: TwoStudyPlan,
    k: int,
    target: float | None = None,
    sigma_source: SigmaSource = "design",
) -> FractionSolution:
    """Smallest common ``f_1`` (other regions equal, same in both studies)
    reaching the pooled same-direction target."""
    if k < 2:
        raise ValueError("k must be at least 2")
    target = plan.params.target if target is None else target
    hi = 1.0 / k

    def cp(f1):
        a = RegionAllocation.equal_rest(f1, k)
        return cp_criterion2_pooled(plan, a, a, sigma_source).value

    best = cp(hi)
    if best < target - 1e-12:
        raise UnattainableTarget(f"target {target} above the pooled K={k} maximum", best)
    if cp(F_LOWER) >= target:
        return FractionSolution(F_LOWER, F_LOWER, cp(F_LOWER), target)
    root = crossing_point(cp, target, F_LOWER, hi)
    value, achieved = round_up_to_grid(cp, target, root, F_LOWER, hi)
    return FractionSolution(value, root, achieved, target)


# ---------------------------------------------------------------------------
# binary endpoints


def _pooled_region_indicator(nt1, nc1, nt2, nc2, n1, n2, tie_policy: TiePolicy) -> np.ndarray:
    """``[w1 D_k^(1) + w2 D_k^(2) > 0]`` over the 4-D count grid, exactly."""
    a1 = np.arange(nt1 + 1).reshape(-1, 1, 1, 1)
    b1 = np.arange(nc1 + 1).reshape(1, -1, 1, 1)
    a2 = np.arange(nt2 + 1).reshape(1, 1, -1, 1)
    b2 = np.arange(nc2 + 1).reshape(1, 1, 1, -1)
    s = n1 * (a1 * nc1 - b1 * nt1) * (nt2 * nc2) + n2 * (a2 * nc2 - b2 * nt2) * (nt1 * nc1)
    return s > 0 if tie_policy == "strict" else s >= 0


def cp_criterion2_pooled_binary_exact(
    plan: TwoStudyPlan,
    alloc1: RegionAllocation,
    alloc2: RegionAllocation,
    tie_policy: TiePolicy = "strict",
    budget: float = ENUMERATION_BUDGET,
    split: str = "total",
) -> CpEstimate:
    """Exact pooled same-direction CP for binary endpoints.

    Convolves per-region 4-D count masses ``(a1, b1, a2, b2)`` restricted to
    a positive pooled regional difference, then sums over outcomes where
    both studies' Wald tests reject, divided by the probability that both
    reject. Only practical for very small trials.
    """
    s1, s2 = plan.study1, plan.study2
    e1, e2 = s1.endpoint, s2.endpoint
    if not (isinstance(e1, BinaryEndpoint) and isinstance(e2, BinaryEndpoint)):
        raise TypeError("binary consistency needs BinaryEndpoint plans")
    if alloc1.k != alloc2.k:
        raise ValueError("both studies need the same number of regions")
    nt1, nc1 = alloc1.arm_sizes(s1, split)
    nt2, nc2 = alloc2.arm_sizes(s2, split)
    # realized arm totals define each study's overall test
    t1, c1, t2, c2 = (int(x.sum()) for x in (nt1, nc1, nt2, nc2))
    # the final joint array alone is a lower bound on the work; refuse early
    # rather than allocating 4-D regional masses we could never combine
    joint_size = float((t1 + 1) * (c1 + 1) * (t2 + 1) * (c2 + 1))
    if joint_size > budget:
        raise EnumerationBudgetExceeded(joint_size, budget)
    parts = []
    for a, b, c, d in zip(nt1, nc1, nt2, nc2):
        a, b, c, d = int(a), int(b), int(c), int(d)
        mass = np.einsum(
            "i,j,k,l->ijkl",
            binom_pmf_vector(a, e1.p_t),
            binom_pmf_vector(b, e1.p_c),
            binom_pmf_vector(c, e2.p_t),
            binom_pmf_vector(d, e2.p_c),
        )
        parts.append(mass * _pooled_region_indicator(a, b, c, d, s1.n, s2.n, tie_policy))
    joint = _convolve_all(parts, budget)
    z = plan.params.z_alpha
    rej1 = rejection_region(t1, c1, z)
    rej2 = rejection_region(t2, c2, z)
    omega = rej1[:, :, None, None] & rej2[None, None, :, :]
    num = float(np.sum(joint[omega]))
    p1 = float(np.sum(np.outer(binom_pmf_vector(t1, e1.p_t), binom_pmf_vector(c1, e1.p_c))[rej1]))
    p2 = float(np.sum(np.outer(binom_pmf_vector(t2, e2.p_t), binom_pmf_vector(c2, e2.p_c))[rej2]))
    if p1 * p2 <= 0.0:
        raise ValueError("joint rejection region has zero probability")
    return CpEstimate(min(num / (p1 * p2), 1.0), "exact_enum")


def cp_criterion2_pooled_binary(
    plan: TwoStudyPlan,
    alloc1: RegionAllocation,
    alloc2: RegionAllocation,
    mode: Literal["exact", "monte_carlo"] = "monte_carlo",
    replications: int = 10_000,
    seed: int | None = None,
    tie_policy: TiePolicy = "strict",
    budget: float = ENUMERATION_BUDGET,
    threads: int = 1,
    split: str = "total",
) -> CpEstimate:
    """Pooled same-direction CP for binary endpoints, exact or simulated."""
    if mode == "exact":
        return cp_criterion2_pooled_binary_exact(plan, alloc1, alloc2, tie_policy, budget, split)
    if mode != "monte_carlo":
        raise ValueError(f"unknown mode {mode!r}")
    if seed is None:
        raise ValueError("Monte Carlo mode needs an explicit seed")
    from .simulate import SimConfig, TwoStudyScenario, empirical_cp

    cfg = SimConfig(
        scenario=TwoStudyScenario(plan.study1, plan.study2, alloc1, alloc2, criterion=2),
        params=plan.params,
        replications=replications,
        seed=seed,
        tie_policy=tie_policy,
        threads=threads,
        split=split,
    )
    return empirical_cp(cfg).to_estimate()


def solve_f1_criterion2_pooled_binary(
    plan: TwoStudyPlan,
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
    """Smallest common ``f_1`` on the 0.001 grid reaching the pooled binary
    same-direction target, other regions sharing the rest equally.

    The grid is scanned upward because integer regional sizes make the CP
    non-monotone in ``f_1`` (see :func:`solve_f1_criterion2_binary`).
    """
    target = plan.params.target if target is None else target
    cache: dict[int, float] = {}

    def cp_at(i: int) -> float:
        if i not in cache:
            a = RegionAllocation.equal_rest(i / 1000.0, k)
            cache[i] = cp_criterion2_pooled_binary(
                plan, a, a, mode, replications, seed, tie_policy, budget, threads, split
            ).value
        return cache[i]

    smallest_arm = min(plan.study1.n_t, plan.study1.n_c, plan.study2.n_t, plan.study2.n_c)
    lo = max(1, math.ceil(1000.0 / smallest_arm))
    hi = int(1000 // k)
    i = first_grid_index(cp_at, target, lo, hi)
    if i is None:
        best = max(cache.values())
        raise UnattainableTarget(f"target {target} above the pooled binary K={k} maximum", best)
    f = i / 1000.0
    return FractionSolution(f, f, cp_at(i), target)
