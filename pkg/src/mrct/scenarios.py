"""Standard design scenarios and their reproduction.

Six scenario tables cover one and two trials, binary and normal endpoints,
equal and unequal regional fractions under the retained-effect criterion.
Four worked examples cover the same-direction criterion, and one
hypothetical two-trial program combines both sizing and pair enumeration.

Every ``reproduce_*`` function returns a list of flat dict rows suitable
for CSV output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from .consistency_one import (
    cp_criterion1,
    cp_criterion2_binary,
    max_cp_criterion2,
    solve_f1_criterion2,
    solve_f1_criterion2_binary,
    solve_fk_criterion1,
)
from .consistency_two import (
    FractionPair,
    TwoStudyPlan,
    cp_criterion1_pooled,
    cp_criterion2_pooled,
    cp_criterion2_pooled_binary,
    enumerate_fraction_pairs,
    max_cp_criterion2_pooled,
    solve_c_homogeneous,
    solve_f1_criterion2_pooled,
    solve_f1_criterion2_pooled_binary,
    solve_fk_pooled_equal,
)
from .design import (
    BinaryEndpoint,
    DesignParams,
    Endpoint,
    NormalEndpoint,
    RegionAllocation,
    overall_sample_size,
)
from .errors import UnattainableTarget
from .simulate import OneStudyScenario, SimConfig, TwoStudyScenario, empirical_cp

NORMAL_SIGMA2 = 16.0
TABLE_IDS = (1, 2, 3, 4, 5, 6)
EXAMPLE_IDS = (1, 2, 3, 4)
# study-1 fraction grid for the unequal-pair tables, keyed by power
PAIR_F1 = {0.8: (0.100, 0.080), 0.9: (0.090, 0.080)}


@dataclass(frozen=True)
class RowSpec:
    """One scenario-table row before anything is solved.

    ``endpoints`` has one entry for a single trial and two for a pair of
    trials; ``pair_f1`` fixes the study-1 fraction in unequal-pair rows.
    """

    table: int
    power: float
    endpoints: tuple
    pair_f1: Optional[float] = None

    @property
    def params(self) -> DesignParams:
        return DesignParams(alpha=0.025, beta=round(1.0 - self.power, 10))

    @property
    def studies(self) -> int:
        return len(self.endpoints)


def _binary(d: float, p_c: float) -> BinaryEndpoint:
    return BinaryEndpoint(round(p_c + d, 10), p_c)


def _normal(d: float) -> NormalEndpoint:
    return NormalEndpoint(NORMAL_SIGMA2, NORMAL_SIGMA2, d)


def _table_rows(table: int) -> Iterator[RowSpec]:
    for power in (0.8, 0.9):
        if table == 1:
            for d in (0.1, 0.15, 0.2):
                for p_c in (0.5, 0.6, 0.7, 0.8):
                    if d == 0.2 and p_c == 0.8:
                        continue
                    yield RowSpec(1, power, (_binary(d, p_c),))
        elif table == 2:
            for d in (1.0, 1.25, 1.5, 2.0):
                yield RowSpec(2, power, (_normal(d),))
        elif table == 3:
            for d in (0.1, 0.15):
                for pc1, pc2 in ((0.5, 0.5), (0.5, 0.8), (0.8, 0.8)):
                    yield RowSpec(3, power, (_binary(d, pc1), _binary(d, pc2)))
        elif table == 4:
            for d1, d2 in ((1.0, 1.0), (1.0, 2.0), (1.5, 1.5), (2.0, 2.0)):
                yield RowSpec(4, power, (_normal(d1), _normal(d2)))
        elif table == 5:
            for d, p_c in ((0.1, 0.5), (0.1, 0.8), (0.15, 0.5), (0.15, 0.8), (0.2, 0.5), (0.2, 0.7)):
                for f1 in PAIR_F1[power]:
                    yield RowSpec(5, power, (_binary(d, p_c),) * 2, f1)
        elif table == 6:
            for d in (1.0, 1.5, 2.0):
                for f1 in PAIR_F1[power]:
                    yield RowSpec(6, power, (_normal(d),) * 2, f1)
        else:
            raise ValueError(f"unknown table {table!r}; choose from {TABLE_IDS}")


def table_rows(table: int) -> list[RowSpec]:
    """Row specifications of scenario table ``table`` (1-6)."""
    return list(_table_rows(table))


def row_seed(seed: int, table: int, index: int) -> int:
    """Independent per-row seed derived from a master seed."""
    return int(np.random.SeedSequence([seed, table, index]).generate_state(1, np.uint64)[0])


def _endpoint_cols(ep: Endpoint, suffix: str) -> dict:
    if isinstance(ep, BinaryEndpoint):
        return {f"d{suffix}": round(ep.d, 10), f"p_c{suffix}": ep.p_c, f"sigma2{suffix}": ""}
    return {f"d{suffix}": ep.d, f"p_c{suffix}": "", f"sigma2{suffix}": ep.sigma2_t}


def solve_row(row: RowSpec) -> dict:
    """Sizes, fractions and analytic CP for one row (no simulation).

    The analytic CP of two-trial rows is evaluated at the integer sizes,
    which is what a simulation of those sizes estimates.
    """
    params = row.params
    out = {"table": row.table, "power": row.power}
    if row.studies == 1:
        plan = overall_sample_size(row.endpoints[0], params)
        f = solve_fk_criterion1(params).fraction
        out.update(_endpoint_cols(row.endpoints[0], "1"))
        out.update(N1=plan.n, N2="", f1=f, f2="", cp_analytic=cp_criterion1(params, f).value)
        return out
    plan = TwoStudyPlan.from_endpoints(row.endpoints[0], row.endpoints[1], params)
    if row.pair_f1 is None:
        f = solve_fk_pooled_equal(plan).fraction
        pair = FractionPair(f, f)
    else:
        c = solve_c_homogeneous(params).c
        (pair,) = enumerate_fraction_pairs(c, [row.pair_f1])
        pair = FractionPair(pair.f1, round(pair.f2, 3))
    out.update(_endpoint_cols(row.endpoints[0], "1"))
    out.update(_endpoint_cols(row.endpoints[1], "2"))
    out.update(
        N1=plan.study1.n,
        N2=plan.study2.n,
        f1=pair.f1,
        f2=pair.f2,
        cp_analytic=cp_criterion1_pooled(plan, pair, sigma_source="actual").value,
    )
    return out


def simulate_row(row: RowSpec, solved: dict, seed: int, replications: int = 10_000, threads: int = 1):
    """Empirical CP for a solved row; returns a :class:`SimResult`."""
    params = row.params
    if row.studies == 1:
        plan = overall_sample_size(row.endpoints[0], params)
        scenario = OneStudyScenario(plan, RegionAllocation.region_of_interest(solved["f1"]), criterion=1)
    else:
        plan = TwoStudyPlan.from_endpoints(row.endpoints[0], row.endpoints[1], params)
        scenario = TwoStudyScenario(
            plan.study1,
            plan.study2,
            RegionAllocation.region_of_interest(solved["f1"]),
            RegionAllocation.region_of_interest(solved["f2"]),
            criterion=1,
        )
    cfg = SimConfig(scenario, params, replications=replications, seed=seed, threads=threads)
    return empirical_cp(cfg)


def reproduce_table(
    table: int,
    seed: int = 0,
    replications: int = 10_000,
    threads: int = 1,
    simulate: bool = True,
) -> list[dict]:
    """Solve (and optionally simulate) every row of a scenario table."""
    rows = []
    for i, spec in enumerate(table_rows(table)):
        out = solve_row(spec)
        if simulate:
            res = simulate_row(spec, out, row_seed(seed, table, i), replications, threads)
            out.update(
                cp_empirical=res.empirical_cp,
                mc_se=res.mc_se,
                rejections=res.rejections,
                replications=res.replications,
            )
        rows.append(out)
    return rows


# ---------------------------------------------------------------------------
# worked examples

EXAMPLE_PARAMS = DesignParams(alpha=0.05, beta=0.2)
EXAMPLE2_ENDPOINTS = (BinaryEndpoint(0.8, 0.7), BinaryEndpoint(0.7, 0.6))
EXAMPLE4_ENDPOINT = BinaryEndpoint(0.9, 0.8)


def _quantity(example: int, name: str, value: float, **extra) -> dict:
    row = {"example": example, "quantity": name, "value": value}
    row.update(extra)
    return row


def reproduce_example(example: int, seed: int = 0, replications: int = 100_000, threads: int = 1) -> list[dict]:
    """Key quantities of a worked example as ``(quantity, value)`` rows.

    1: one-trial same-direction maxima for K=2..4 and the K=3 ``f_1``.
    2: binary one-trial ``f_1`` by simulation, and the CP at the normal-theory ``f_1``.
    3: two-trial same-direction maxima and the K=3 ``f_1``.
    4: binary two-trial ``f_1`` by simulation, and the CP at the normal-theory ``f_1``.
    """
    p = EXAMPLE_PARAMS
    rows: list[dict] = []
    if example == 1:
        for k in (2, 3, 4):
            rows.append(_quantity(1, f"max_cp_K{k}", max_cp_criterion2(p, k).value))
        sol = solve_f1_criterion2(p, 3)
        rows.append(_quantity(1, "f1_K3", sol.fraction, root=sol.root, cp=sol.cp))
    elif example == 2:
        f_normal = solve_f1_criterion2(p, 3).fraction
        for ep in EXAMPLE2_ENDPOINTS:
            tag = f"pt{ep.p_t}_pc{ep.p_c}"
            sol = solve_f1_criterion2_binary(ep, p, 3, seed=seed, replications=replications, threads=threads)
            rows.append(_quantity(2, f"f1_K3_{tag}", sol.fraction, cp=sol.cp))
        ep = EXAMPLE2_ENDPOINTS[0]
        plan = overall_sample_size(ep, p)
        est = cp_criterion2_binary(
            plan, RegionAllocation.equal_rest(f_normal, 3), p, mode="monte_carlo",
            replications=replications, seed=seed, threads=threads,
        )
        rows.append(_quantity(2, f"cp_at_f1_{f_normal:.3f}_pt{ep.p_t}_pc{ep.p_c}", est.value, mc_se=est.mc_se))
    elif example == 3:
        plan = TwoStudyPlan.from_endpoints(_normal(1.0), _normal(1.0), p)
        for k in (2, 3, 4):
            rows.append(_quantity(3, f"max_cp_K{k}", max_cp_criterion2_pooled(plan, k).value))
        sol = solve_f1_criterion2_pooled(plan, 3)
        rows.append(_quantity(3, "f1_K3", sol.fraction, root=sol.root, cp=sol.cp))
        a = RegionAllocation.equal_rest(sol.fraction, 3)
        cfg = SimConfig(
            TwoStudyScenario(plan.study1, plan.study2, a, a, criterion=2), p,
            replications=min(replications, 10_000), seed=seed, threads=threads,
        )
        res = empirical_cp(cfg)
        rows.append(_quantity(3, "empirical_cp_at_f1", res.empirical_cp, mc_se=res.mc_se))
    elif example == 4:
        f_normal = solve_f1_criterion2_pooled(TwoStudyPlan.from_endpoints(_normal(1.0), _normal(1.0), p), 3).fraction
        plan = TwoStudyPlan.from_endpoints(EXAMPLE4_ENDPOINT, EXAMPLE4_ENDPOINT, p)
        sol = solve_f1_criterion2_pooled_binary(plan, 3, seed=seed, replications=replications, threads=threads)
        rows.append(_quantity(4, "f1_K3", sol.fraction, cp=sol.cp))
        a = RegionAllocation.equal_rest(f_normal, 3)
        est = cp_criterion2_pooled_binary(plan, a, a, seed=seed, replications=replications, threads=threads)
        rows.append(_quantity(4, f"cp_at_f1_{f_normal:.3f}", est.value, mc_se=est.mc_se))
    else:
        raise ValueError(f"unknown example {example!r}; choose from {EXAMPLE_IDS}")
    return rows


# ---------------------------------------------------------------------------
# hypothetical two-trial program

PROGRAM_PARAMS = DesignParams(alpha=0.025, beta=0.1, pi=0.5)
PROGRAM_ENDPOINTS = (NormalEndpoint(0.81, 0.81, 0.4), NormalEndpoint(0.81, 0.81, 0.3))
PROGRAM_TARGETS = {0.8: (0.08, 0.09), 0.9: (0.20, 0.21, 0.22)}


def reproduce_program() -> list[dict]:
    """Two lipid-lowering trials (effects 0.4 and 0.3, SD 0.9, power 0.9).

    Reports the per-study sizes, then for CP targets 0.8 and 0.9 the equal
    fraction and the unequal pairs, both from the homogeneous ``c`` rule
    (``method='homogeneous'``) and from the full double integral with the
    two studies' own weights and effects (``method='heterogeneous'``).
    """
    from .consistency_two import solve_pair_partner

    p = PROGRAM_PARAMS
    plan = TwoStudyPlan.from_endpoints(*PROGRAM_ENDPOINTS, p)
    rows = [
        {"quantity": "N1", "method": "sizing", "target": "", "f1": "", "value": plan.study1.n},
        {"quantity": "N2", "method": "sizing", "target": "", "f1": "", "value": plan.study2.n},
    ]
    for target, grid in PROGRAM_TARGETS.items():
        hom = solve_c_homogeneous(p, target=target)
        rows.append({"quantity": "c", "method": "homogeneous", "target": target, "f1": "", "value": hom.c})
        rows.append({"quantity": "f_equal", "method": "homogeneous", "target": target, "f1": "", "value": hom.f_equal})
        for pair in enumerate_fraction_pairs(hom.c, list(grid)):
            rows.append({"quantity": "f2", "method": "homogeneous", "target": target, "f1": pair.f1,
                         "value": round(pair.f2, 3)})
        het = solve_fk_pooled_equal(plan, target=target)
        rows.append({"quantity": "f_equal", "method": "heterogeneous", "target": target, "f1": "",
                     "value": het.fraction})
        for f1 in grid:
            try:
                sol = solve_pair_partner(plan, f1, target=target)
            except UnattainableTarget:
                continue
            rows.append({"quantity": "f2", "method": "heterogeneous", "target": target, "f1": f1,
                         "value": sol.fraction})
    return rows


def pooling_contrast(n_per_study: int = 396, sigma: float = 4.0, d: float = 1.0) -> dict:
    """One-trial fraction needed for CP ``sqrt(0.8)`` against the pooled
    two-trial fraction for CP 0.8, at alpha 0.05 and power 0.8.

    Two independent trials each with CP ``sqrt(0.8)`` give a joint CP of
    0.8; pooling reaches the same level with a much smaller fraction.
    """
    p = EXAMPLE_PARAMS
    one = solve_fk_criterion1(p, target=math.sqrt(0.8))
    ep = NormalEndpoint(sigma**2, sigma**2, d)
    plan = overall_sample_size(ep, p)
    if plan.n != n_per_study:
        raise ValueError(f"sizing gives N={plan.n}, expected {n_per_study}")
    pooled = solve_fk_pooled_equal(TwoStudyPlan(plan, plan, p))
    return {"one_study_f": one.fraction, "pooled_f": pooled.fraction, "n_per_study": plan.n}
