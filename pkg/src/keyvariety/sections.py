"""Linear sections of catalog varieties: materialize 3-fold models at desk
scale and report their basic invariants.

Random forms come from a committed deterministic generator; all shipped
acceptance seeds are constants. Coefficients are integers in the box
[-p_max, p_max] for the largest scan prime; a draw is rejected and retried
(with the draw count reported) when the forms become dependent over Q or
modulo a scan prime.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .algebra import ParseError, Polynomial, SmallPrime, fraction_matrix_rank, parse_poly
from .catalog import VarietySpec, form_vanishes_on_plane
from .invariants import (DEFAULT_POINT_BUDGET, _jacobian_singular_mask,
                         bracket_dimension)
from .projspace import ScanPlan, scan_system

# committed seeds for the shipped section checks (one per case); the g8 seed
# is shared by the plane-preserving terminality probe
DEFAULT_SECTION_SEEDS = {
    "g4_sigma_bar": 11,
    "g5_sigma_bar": 11,
    "g6q_sigma_bar": 11,
    "g6c_sigma_bar": 11,
    "g8_sigma_bar": 11,
    # plane-preserving terminality probe; validated at p in {2, 3}
    "g8_plane": 17,
}


@dataclass(frozen=True)
class SectionSpec:
    base_case: str
    linear_forms: tuple
    seed: int | None = None
    contains_planes: tuple = ()


@dataclass(frozen=True)
class SectionReport:
    case_id: str
    prime: int
    count: int
    estimated_dim: int
    singular_count: int
    singular_off_plane: int | None
    plane_section_count: int | None


def _forms_independent_over_q(forms: Sequence[Polynomial]) -> bool:
    ring = forms[0].ring_vars
    rows = []
    for f in forms:
        row = [Fraction(0)] * len(ring)
        for e, c in f.terms.items():
            if sum(e) != 1:
                raise ValueError(f"not a linear form: {f}")
            row[list(e).index(1)] = Fraction(c)
        rows.append(row)
    return fraction_matrix_rank(rows) == len(forms)


def _forms_independent_mod_p(forms: Sequence[Polynomial], p: int) -> bool:
    from .algebra import matrix_rank_mod_p
    ring = forms[0].ring_vars
    rows = []
    for f in forms:
        row = [0] * len(ring)
        for e, c in f.terms.items():
            row[list(e).index(1)] = c % p
        rows.append(row)
    return matrix_rank_mod_p(rows, p) == len(forms)


def cut(base: VarietySpec, section: SectionSpec) -> VarietySpec:
    """New spec: base generators plus the section's linear forms, expected
    dimension dropped by the number of forms, metadata inherited."""
    forms = tuple(section.linear_forms)
    if len(forms) > base.expected_dim:
        raise ValueError("section codimension exceeds the variety dimension")
    for f in forms:
        if f.ring_vars != base.vars:
            raise ValueError("section forms live in the wrong ring")
        if f.is_zero() or f.total_degree() != 1:
            raise ValueError(f"not a linear form: {f}")
    if forms and not _forms_independent_over_q(forms):
        raise ValueError("dependent linear forms")
    for name in section.contains_planes:
        plane = base.planes[name]
        for f in forms:
            if not form_vanishes_on_plane(f, plane):
                raise ValueError(f"form {f} does not vanish on plane {name}")
    return VarietySpec(
        case_id=base.case_id + (f"+{len(forms)}cuts" if forms else ""),
        ambient_dim=base.ambient_dim,
        vars=base.vars,
        generators=base.generators + forms,
        planes=base.planes,
        expected_dim=base.expected_dim - len(forms),
        metadata=base.metadata,
        rank_locus=None,
    )


def random_section(base: VarietySpec, codim: int, seed: int,
                   primes: Sequence[int], contains_planes: tuple = ()) -> tuple:
    """Seeded random section of the given codimension.

    Returns (SectionSpec, draws): draws counts the attempts until the forms
    were independent over Q and modulo every scan prime.
    """
    primes = [SmallPrime(p) for p in primes]
    box = max(primes)
    rng = random.Random(seed)
    if contains_planes:
        allowed = set(base.vars)
        for name in contains_planes:
            allowed &= set(base.planes[name].vanishing_vars)
        support = [v for v in base.vars if v in allowed]
    else:
        support = list(base.vars)
    if len(support) < codim:
        raise ValueError("not enough variables to cut this codimension")
    draws = 0
    while True:
        draws += 1
        if draws > 1000:
            raise RuntimeError("could not draw independent forms")
        forms = []
        for _ in range(codim):
            coeffs = {v: rng.randint(-box, box) for v in support}
            f = Polynomial.zero(base.vars)
            for v, c in coeffs.items():
                f = f + Polynomial.variable(base.vars, v) * c
            forms.append(f)
        if any(f.is_zero() for f in forms):
            continue
        if not _forms_independent_over_q(forms):
            continue
        if not all(_forms_independent_mod_p(forms, p) for p in primes):
            continue
        return SectionSpec(base.case_id, tuple(forms), seed, tuple(contains_planes)), draws


def parse_section_file(text: str, ring: Sequence[str]) -> tuple:
    """Section files: one linear form per line, '#' comments."""
    forms = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        f = parse_poly(line, ring)
        if f.total_degree() != 1:
            raise ParseError(f"not a linear form: {line!r}")
        forms.append(f)
    return tuple(forms)


def section_report(spec: VarietySpec, primes: Sequence[int],
                   threads: int | None = None, plane: str | None = None,
                   budget: int = DEFAULT_POINT_BUDGET) -> list:
    """Per-prime profile of a (cut) spec: point count, bracket dimension,
    Jacobian-singular rational points, and - when a plane is tracked - the
    plane-section count and the singular count off the plane."""
    out = []
    for p in primes:
        p = SmallPrime(p)
        plan = ScanPlan(spec.ambient_dim, p)
        if plan.total > budget:
            raise RuntimeError("scan budget exceeded")
        _, pts = scan_system(plan, list(spec.generators), threads=threads,
                             collect=True)
        count = pts.shape[0]
        est = bracket_dimension(count, p, spec.ambient_dim)
        sing = _jacobian_singular_mask(spec, pts, p) if count else \
            np.zeros(0, dtype=bool)
        plane_count = None
        off_plane = None
        if plane is not None:
            zero_idx = [spec.var_index(v)
                        for v in spec.planes[plane].vanishing_vars]
            on_plane = (pts[:, zero_idx] % p == 0).all(axis=1) if count else \
                np.zeros(0, dtype=bool)
            plane_count = int(on_plane.sum())
            off_plane = int((sing & ~on_plane).sum())
        out.append(SectionReport(spec.case_id, p, int(count), est,
                                 int(sing.sum()), off_plane, plane_count))
    return out
