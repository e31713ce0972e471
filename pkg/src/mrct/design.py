"""Design objects and overall sample size.

``DesignParams`` carries the scalar knobs shared by every criterion,
``NormalEndpoint``/``BinaryEndpoint`` describe the primary endpoint, and
``overall_sample_size`` sizes a two-arm study for a one-sided z test.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .stats_core import z_upper

# keeps float noise such as 197.00000000000003 from bumping a ceil
_CEIL_SLACK = 1e-9


def _ceil(x: float) -> int:
    return math.ceil(x - _CEIL_SLACK * max(1.0, abs(x)))


@dataclass(frozen=True)
class DesignParams:
    """Significance, power and consistency settings.

    Attributes:
        alpha: one-sided type-I error, in (0, 0.5).
        beta: type-II error, in (0, 0.5); power is ``1 - beta``.
        pi: share of the overall effect a region must retain, in [0, 1].
        gamma: consistency risk; the target CP is ``1 - gamma``.
        r: treatment-to-control randomization ratio.
    """

    alpha: float = 0.025
    beta: float = 0.2
    pi: float = 0.5
    gamma: float = 0.2
    r: float = 1.0

    def __post_init__(self) -> None:
        checks = {
            "alpha": 0.0 < self.alpha < 0.5,
            "beta": 0.0 < self.beta < 0.5,
            "pi": 0.0 <= self.pi <= 1.0,
            "gamma": 0.0 < self.gamma < 1.0,
            "r": self.r > 0.0 and math.isfinite(self.r),
        }
        ranges = {
            "alpha": "(0, 0.5)",
            "beta": "(0, 0.5)",
            "pi": "[0, 1]",
            "gamma": "(0, 1)",
            "r": "(0, inf)",
        }
        for name, ok in checks.items():
            if not ok:
                raise ValueError(f"{name}={getattr(self, name)!r} outside {ranges[name]}")

    @property
    def z_alpha(self) -> float:
        return z_upper(self.alpha)

    @property
    def z_beta(self) -> float:
        return z_upper(self.beta)

    @property
    def z_sum(self) -> float:
        """``z_{1-alpha} + z_{1-beta}``."""
        return self.z_alpha + self.z_beta

    @property
    def power(self) -> float:
        return 1.0 - self.beta

    @property
    def target(self) -> float:
        return 1.0 - self.gamma

    @property
    def warnings(self) -> list[str]:
        """Guidance-range notes; these never block a computation."""
        out = []
        if self.pi < 0.5:
            out.append(f"pi={self.pi} is below the usual guidance of 0.5")
        if self.target < 0.8:
            out.append(f"target CP {self.target:.3f} is below the usual guidance of 0.8")
        if self.gamma >= 0.5:
            out.append(f"gamma={self.gamma} leaves a target CP of at most 0.5")
        return out


@dataclass(frozen=True)
class NormalEndpoint:
    sigma2_t: float
    sigma2_c: float
    d: float

    kind = "normal"

    def __post_init__(self) -> None:
        if not (self.sigma2_t > 0 and self.sigma2_c > 0):
            raise ValueError("arm variances must be strictly positive")
        if not math.isfinite(self.d):
            raise ValueError("mean difference must be finite")


@dataclass(frozen=True)
class BinaryEndpoint:
    p_t: float
    p_c: float

    kind = "binary"

    def __post_init__(self) -> None:
        for name in ("p_t", "p_c"):
            v = getattr(self, name)
            if not (0.0 < v < 1.0):
                raise ValueError(f"{name}={v!r} must lie in (0, 1)")

    @property
    def sigma2_t(self) -> float:
        return self.p_t * (1.0 - self.p_t)

    @property
    def sigma2_c(self) -> float:
        return self.p_c * (1.0 - self.p_c)

    @property
    def d(self) -> float:
        return self.p_t - self.p_c


Endpoint = Union[NormalEndpoint, BinaryEndpoint]


@dataclass(frozen=True)
class StudyPlan:
    """An endpoint with integer per-arm sizes.

    ``n_c_exact`` keeps the unrounded control-arm size from the sizing rule
    when the plan came from :func:`overall_sample_size`; design-exact
    calculations use it in place of the integer sizes.
    """

    endpoint: Endpoint
    n_t: int
    n_c: int
    r: float = 1.0
    n_c_exact: float | None = None

    def __post_init__(self) -> None:
        if int(self.n_t) != self.n_t or int(self.n_c) != self.n_c:
            raise ValueError("arm sizes must be integers")
        if self.n_t < 2 or self.n_c < 2:
            raise ValueError(f"each arm needs at least 2 subjects, got ({self.n_t}, {self.n_c})")
        if not self.r > 0:
            raise ValueError("r must be positive")

    @property
    def n(self) -> int:
        return self.n_t + self.n_c

    @property
    def n_exact(self) -> float | None:
        if self.n_c_exact is None:
            return None
        return self.n_c_exact * (1.0 + self.r)

    @property
    def variance_factor(self) -> float:
        """``(r+1)(sigma2_t + r sigma2_c)/r``, i.e. ``N var(D)``."""
        e = self.endpoint
        r = self.r
        return (r + 1.0) * (e.sigma2_t + r * e.sigma2_c) / r


def overall_sample_size(endpoint: Endpoint, params: DesignParams) -> StudyPlan:
    """Per-arm sizes for a one-sided level-alpha test with power 1-beta.

    The control arm gets ``ceil((sigma2_t/r + sigma2_c) (z_a + z_b)^2 / d^2)``
    and the treatment arm ``ceil(r * unrounded control size)``. Binary
    endpoints use ``p(1-p)`` arm variances without continuity correction.

    Raises:
        ValueError: if the effect ``d`` is not positive.
    """
    d = endpoint.d
    if not d > 0:
        raise ValueError(f"effect d={d!r} must be positive (no alternative to power)")
    r = params.r
    raw = (endpoint.sigma2_t / r + endpoint.sigma2_c) * params.z_sum**2 / d**2
    return StudyPlan(endpoint, n_t=_ceil(r * raw), n_c=_ceil(raw), r=r, n_c_exact=raw)


def sigma_d(plan: StudyPlan, design_exact: bool = False) -> float:
    """Standard deviation of the overall difference estimator ``D``.

    With ``design_exact`` the unrounded design size is used, which makes
    ``sigma_d == d / (z_a + z_b)`` exactly.
    """
    n = plan.n
    if design_exact:
        if plan.n_exact is None:
            raise ValueError("plan carries no unrounded design size")
        n = plan.n_exact
    return math.sqrt(plan.variance_factor / n)


def apportion(total: int, fractions) -> np.ndarray:
    """Largest-remainder split of ``total`` units by ``fractions``.

    Floors every share, then hands the leftover units to the largest
    fractional parts (ties go to the lower index). The result sums to
    ``total`` exactly.
    """
    raw = np.asarray(fractions, dtype=float) * total
    counts = np.floor(raw + 1e-9).astype(np.int64)
    leftover = int(total - counts.sum())
    if leftover > 0:
        order = np.argsort(-(raw - counts), kind="stable")
        counts[order[:leftover]] += 1
    elif leftover < 0:
        order = np.argsort(raw - counts, kind="stable")
        counts[order[:-leftover]] -= 1
    return counts


@dataclass(frozen=True)
class RegionAllocation:
    """Regional sample fractions ``f_1..f_K`` summing to one."""

    fractions: tuple[float, ...] = field()

    def __post_init__(self) -> None:
        f = tuple(float(x) for x in self.fractions)
        object.__setattr__(self, "fractions", f)
        if len(f) < 1:
            raise ValueError("need at least one region")
        if any(not (0.0 < x <= 1.0) for x in f):
            raise ValueError(f"fractions must lie in (0, 1], got {f}")
        if abs(sum(f) - 1.0) > 1e-9:
            raise ValueError(f"fractions sum to {sum(f)!r}, not 1")

    @property
    def k(self) -> int:
        return len(self.fractions)

    @classmethod
    def equal(cls, k: int) -> "RegionAllocation":
        return cls((1.0 / k,) * k)

    @classmethod
    def equal_rest(cls, f1: float, k: int) -> "RegionAllocation":
        """Region 1 gets ``f1``; the other ``k-1`` regions split the rest."""
        if k < 2:
            raise ValueError("equal_rest needs k >= 2")
        if not (0.0 < f1 < 1.0):
            raise ValueError(f"f1={f1!r} must lie in (0, 1)")
        rest = (1.0 - f1) / (k - 1)
        return cls((f1,) + (rest,) * (k - 1))

    @classmethod
    def region_of_interest(cls, f: float) -> "RegionAllocation":
        """Two-block view ``(f, 1 - f)`` used by the retained-effect criterion."""
        if f >= 1.0:
            return cls((1.0,))
        return cls((f, 1.0 - f))

    def arm_sizes(self, plan: StudyPlan, split: str = "total") -> tuple[np.ndarray, np.ndarray]:
        """Integer regional arm sizes.

        With ``split='total'`` the regional totals ``round(f_k N)`` are
        apportioned by largest remainder and each region is then split
        ``n_c,k = floor(N_k / (1 + r))``, ``n_t,k = N_k - n_c,k`` (exact when
        divisible, control rounded down otherwise). Realized arm totals can
        then differ from the plan's by a few subjects. ``split='per_arm'``
        apportions each arm separately and keeps the planned arm totals.

        Raises:
            ValueError: if any region ends up with an empty arm.
        """
        if split == "total":
            n_k = apportion(plan.n, self.fractions)
            nc = np.floor(n_k / (1.0 + plan.r) + 1e-9).astype(np.int64)
            nt = n_k - nc
        elif split == "per_arm":
            nt = apportion(plan.n_t, self.fractions)
            nc = apportion(plan.n_c, self.fractions)
        else:
            raise ValueError(f"unknown split {split!r}")
        if np.any(nt < 1) or np.any(nc < 1):
            raise ValueError(
                f"allocation {self.fractions} leaves an empty regional arm "
                f"(treatment {nt.tolist()}, control {nc.tolist()})"
            )
        return nt, nc
