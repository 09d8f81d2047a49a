"""Degree, genus and dimension computations with independent oracles, and
full singular-locus scans comparing the Jacobian criterion against the
declared rank-locus descriptions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .algebra import SmallPrime, matrix_rank_mod_p_batch
from .catalog import VarietySpec, RankLocusSpec, pinned_coordinate_change
from .projspace import (CompiledSystem, ScanPlan, proj_point_count,
                        scan_system)

DEFAULT_POINT_BUDGET = 100_000_000
_RANK_BLOCK = 1 << 17


class BudgetExceeded(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# degree numerology


def ci_degree(degrees) -> int:
    """Degree of a complete intersection of the given multidegree: the
    product of the degrees."""
    degrees = list(degrees)
    if not degrees or any(int(d) < 1 for d in degrees):
        raise ValueError("need a nonempty list of degrees >= 1")
    out = 1
    for d in degrees:
        out *= int(d)
    return out


def hilbert_ci_degree(degrees, ambient_dim: int) -> int:
    """Independent degree oracle: expand prod(1 - t^d) / (1 - t)^(n+1) and
    take the dim-th finite difference of the tail, which is dim! times the
    leading Hilbert coefficient."""
    degrees = list(int(d) for d in degrees)
    n = int(ambient_dim)
    dim = n - len(degrees)
    if dim < 0:
        raise ValueError("more hypersurfaces than the ambient dimension")
    # numerator coefficients of prod (1 - t^d)
    num = {0: 1}
    for d in degrees:
        nxt: dict[int, int] = {}
        for e, c in num.items():
            nxt[e] = nxt.get(e, 0) + c
            nxt[e + d] = nxt.get(e + d, 0) - c
        num = nxt
    shift = sum(degrees)

    def series_coeff(j: int) -> int:
        # coefficient of t^j in numerator / (1-t)^(n+1)
        total = 0
        for e, c in num.items():
            if e <= j:
                total += c * math.comb(j - e + n, n)
        return total

    values = [series_coeff(shift + k) for k in range(dim + 1)]
    for _ in range(dim):
        values = [b - a for a, b in zip(values, values[1:])]
    return values[0]


_PINNED_CI = (((2, 3), 13), ((2, 2, 2), 15), ((2,), 4))
for _degs, _amb in _PINNED_CI:
    assert ci_degree(_degs) == hilbert_ci_degree(_degs, _amb)


def grassmann_degree(n: int) -> int:
    """Degree of the Plucker-embedded Grassmannian of 2-planes in n-space:
    the number of standard Young tableaux of shape 2 x (n - 2), counted by
    exhaustive enumeration and cross-checked against the hook-length form.
    """
    if n < 4:
        raise ValueError("need n >= 4")
    m = n - 2
    if m > 14:
        raise ValueError("tableau enumeration capped at n = 16")

    def count(r1: int, r2: int) -> int:
        # r1, r2: cells filled so far in each row (rows increase, columns too)
        if r1 == m and r2 == m:
            return 1
        total = 0
        if r1 < m:
            total += count(r1 + 1, r2)
        if r2 < r1:
            total += count(r1, r2 + 1)
        return total

    enumerated = count(0, 0)
    hooks = 1
    for j in range(m):
        hooks *= (m - j + 1) * (m - j)
    closed_form = math.factorial(2 * m) // hooks
    assert enumerated == closed_form, "tableau enumeration disagrees with hook lengths"
    return enumerated


# ---------------------------------------------------------------------------
# dimension estimation from point counts


@dataclass(frozen=True)
class DimensionEstimate:
    counts: dict
    per_prime: dict
    estimated_dim: int
    consistent: bool


def bracket_dimension(count: int, p: int, max_dim: int) -> int:
    """Largest d with #P^d(F_p) <= count (-1 for an empty set).

    The naive nearest-count rule misclassifies these models at p = 2: they
    contain linear subspaces of dimension close to their own, which inflate
    small-prime counts by up to a factor p. Bracketing from below is exact
    for every catalog case at p in {2, 3}.
    """
    if count <= 0:
        return -1
    d = 0
    while d < max_dim and proj_point_count(d + 1, p) <= count:
        d += 1
    return d


def count_points(spec: VarietySpec, p: int, threads: int | None = None,
                 budget: int = DEFAULT_POINT_BUDGET) -> int:
    plan = ScanPlan(spec.ambient_dim, SmallPrime(p))
    if plan.total > budget:
        raise BudgetExceeded(
            f"P^{spec.ambient_dim}(F_{p}) has {plan.total} points, budget {budget}")
    return scan_system(plan, list(spec.generators), threads=threads).matched


def estimate_dimension(spec: VarietySpec, primes, threads: int | None = None,
                       budget: int = DEFAULT_POINT_BUDGET) -> DimensionEstimate:
    """Per-prime point counts and bracket dimension estimates."""
    counts: dict[int, int] = {}
    per_prime: dict[int, int] = {}
    for p in primes:
        p = SmallPrime(p)
        counts[p] = count_points(spec, p, threads=threads, budget=budget)
        per_prime[p] = bracket_dimension(counts[p], p, spec.ambient_dim)
    estimates = set(per_prime.values())
    consistent = len(estimates) == 1
    largest = max(per_prime) if per_prime else None
    estimated = per_prime[largest] if largest is not None else -1
    return DimensionEstimate(counts, per_prime, estimated, consistent)


def two_path_count_check(spec: VarietySpec, p: int,
                         threads: int | None = None) -> tuple:
    """Count the variety twice: from the pinned generators and from the
    generators rewritten through the committed coordinate change. The counts
    agree iff both predicate paths see the same point set cardinality."""
    plan = ScanPlan(spec.ambient_dim, SmallPrime(p))
    direct = scan_system(plan, list(spec.generators), threads=threads).matched
    transformed = scan_system(plan, list(pinned_coordinate_change(spec)),
                              threads=threads).matched
    return direct, transformed


# ---------------------------------------------------------------------------
# singular-locus scans


@dataclass(frozen=True)
class PointSetSummary:
    count: int
    sample: tuple


@dataclass(frozen=True)
class SingularScanReport:
    prime: int
    total_on_variety: int
    jacobian_singular: PointSetSummary
    rank_locus: PointSetSummary | None
    sets_equal: bool | None
    symmetric_difference_sample: tuple
    containment_plane: str | None = None
    containment_holds: bool | None = None


def _jacobian_singular_mask(spec: VarietySpec, pts: np.ndarray, p: int) -> np.ndarray:
    gens = spec.generators
    nv = len(spec.vars)
    codim = spec.ambient_dim - spec.expected_dim
    partials = [g.partial(i) for g in gens for i in range(nv)]
    system = CompiledSystem(partials)
    out = np.zeros(pts.shape[0], dtype=bool)
    for start in range(0, pts.shape[0], _RANK_BLOCK):
        block = pts[start:start + _RANK_BLOCK]
        vals = system.eval_block(block, p)                  # (ngens*nv, B)
        mats = vals.reshape(len(gens), nv, block.shape[0]).transpose(2, 0, 1)
        ranks = matrix_rank_mod_p_batch(mats, p)
        out[start:start + block.shape[0]] = ranks < codim
    return out


def _rank_locus_mask(spec: VarietySpec, locus: RankLocusSpec,
                     pts: np.ndarray, p: int) -> np.ndarray:
    member = np.zeros(pts.shape[0], dtype=bool)
    for branch in locus.branches:
        zero_idx = [spec.var_index(v) for v in branch.zero_vars]
        mask = (pts[:, zero_idx] % p == 0).all(axis=1)
        if mask.any():
            minors = branch.minors()
            system = CompiledSystem(minors)
            vals = system.eval_block(pts, p)
            mask &= (vals == 0).all(axis=0)
        member |= mask
    return member


def singular_scan(spec: VarietySpec, locus: RankLocusSpec | None, p: int,
                  threads: int | None = None,
                  sample_cap: int = 16) -> SingularScanReport:
    """Classify every rational point of the variety as smooth or singular by
    the Jacobian criterion (rank < codimension) and compare with the declared
    rank-locus description; with no description, report the containment of
    the singular set in the distinguished plane instead.
    """
    p = SmallPrime(p)
    plan = ScanPlan(spec.ambient_dim, p)
    _, pts = scan_system(plan, list(spec.generators), threads=threads, collect=True)
    sing = _jacobian_singular_mask(spec, pts, p)
    sing_pts = pts[sing]
    jac_summary = PointSetSummary(
        int(sing.sum()),
        tuple(tuple(r) for r in sing_pts[:sample_cap].tolist()))
    if locus is None:
        plane_name = next(iter(spec.planes)) if spec.planes else None
        holds = None
        if plane_name is not None:
            zero_idx = [spec.var_index(v)
                        for v in spec.planes[plane_name].vanishing_vars]
            holds = bool((sing_pts[:, zero_idx] % p == 0).all()) if len(sing_pts) else True
        return SingularScanReport(p, pts.shape[0], jac_summary, None, None, (),
                                  containment_plane=plane_name,
                                  containment_holds=holds)
    member = _rank_locus_mask(spec, locus, pts, p)
    diff = sing ^ member
    diff_pts = pts[diff]
    return SingularScanReport(
        p, pts.shape[0], jac_summary,
        PointSetSummary(int(member.sum()),
                        tuple(tuple(r) for r in pts[member][:sample_cap].tolist())),
        bool(not diff.any()),
        tuple(tuple(r) for r in diff_pts[:sample_cap].tolist()))
