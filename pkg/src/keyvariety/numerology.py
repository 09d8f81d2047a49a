"""Exact divisor-class arithmetic over declared symbol bases and relation
sets, plus the per-case framework constants and normal-bundle bookkeeping.

Divisor symbols are opaque: no intersection products are formed beyond the
scalar curve pairings recorded in the primitivity facts. Rewriting uses the
relations in their declared order, each contributing one pivot symbol.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources

from .catalog import build_case


@dataclass(frozen=True)
class Relation:
    label: str
    vector: dict  # symbol -> Fraction, meaning sum == 0


@dataclass(frozen=True)
class ClassLattice:
    name: str
    basis: tuple
    relations: tuple

    def __post_init__(self):
        for rel in self.relations:
            for sym in rel.vector:
                if sym not in self.basis:
                    raise ValueError(f"relation {rel.label} uses undeclared {sym}")


@dataclass(frozen=True)
class IdentityVerdict:
    identity: str
    ok: bool
    residual: dict
    trace: tuple


_TERM_RE = re.compile(
    r"\s*([+-])?\s*(?:(\d+(?:/\d+)?)\s*\*?\s*)?([a-zA-Z][a-zA-Z0-9]*)?")


def parse_expression(text: str, basis) -> dict:
    """Linear expression over the basis symbols with rational coefficients,
    e.g. "3*M - 3/2*F + E"."""
    vec: dict[str, Fraction] = {}
    pos = 0
    text = text.strip()
    if not text:
        raise ValueError("empty expression")
    first = True
    while pos < len(text):
        m = _TERM_RE.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse expression at: {text[pos:]!r}")
        sign, coeff, sym = m.groups()
        if sign is None and not first:
            raise ValueError(f"missing +/- before: {text[pos:]!r}")
        if coeff is None and sym is None:
            raise ValueError(f"cannot parse expression at: {text[pos:]!r}")
        c = Fraction(coeff) if coeff else Fraction(1)
        if sign == "-":
            c = -c
        if sym is None:
            raise ValueError("constant terms are not divisor classes")
        if sym not in basis:
            raise KeyError(f"undeclared symbol {sym!r}")
        vec[sym] = vec.get(sym, Fraction(0)) + c
        pos = m.end()
        first = False
    return {s: c for s, c in vec.items() if c}


def parse_identity(text: str, basis) -> dict:
    if "==" not in text:
        raise ValueError(f"identity must contain '==': {text!r}")
    lhs, rhs = text.split("==", 1)
    vec = parse_expression(lhs, basis)
    for sym, c in parse_expression(rhs, basis).items():
        vec[sym] = vec.get(sym, Fraction(0)) - c
    return {s: c for s, c in vec.items() if c}


def _echelon(lattice: ClassLattice):
    """Relations in echelon form: ordered (pivot_symbol, row, label)."""
    pivots = []
    for rel in lattice.relations:
        row = dict(rel.vector)
        for sym, prow, _ in pivots:
            c = row.get(sym)
            if c:
                for s2, v2 in prow.items():
                    row[s2] = row.get(s2, Fraction(0)) - c * v2
        row = {s: c for s, c in row.items() if c}
        if not row:
            continue  # dependent relation; consistent, carries no new pivot
        pivot = next(s for s in lattice.basis if row.get(s))
        inv = 1 / row[pivot]
        row = {s: c * inv for s, c in row.items()}
        pivots.append((pivot, row, rel.label))
    return pivots


def reduce_expression(lattice: ClassLattice, vec: dict):
    """Normal form of a symbol vector modulo the relations, with the
    substitution trace."""
    residual = dict(vec)
    trace = []
    for pivot, row, label in _echelon(lattice):
        c = residual.get(pivot)
        if c:
            for sym, v in row.items():
                residual[sym] = residual.get(sym, Fraction(0)) - c * v
            trace.append(f"substituted {pivot} by {label} (coefficient {c})")
    return ({s: c for s, c in residual.items() if c}, tuple(trace))


def verify_identity(lattice: ClassLattice, identity: str) -> IdentityVerdict:
    vec = parse_identity(identity, lattice.basis)
    residual, trace = reduce_expression(lattice, vec)
    return IdentityVerdict(identity, not residual, residual, trace)


# ---------------------------------------------------------------------------
# case lattices

# Fano index of the projection target minus one, per case
LINK_Z = {"g5": 3, "g6q": 2, "g6c": 1, "g8": 1}

# framework constants of the bundle construction for the three unified cases
BUNDLE_CONSTANTS = {
    "g4": dict(dim_A=4, f_A=4, d=2, l=2, N=7),
    "g6q": dict(dim_A=5, f_A=4, d=1, l=1, N=4),
    "g6c": dict(dim_A=4, f_A=3, d=1, l=1, N=4),
}

_SHORT = {"g4_sigma_bar": "g4", "g5_sigma_bar": "g5", "g6q_sigma_bar": "g6q",
          "g6c_sigma_bar": "g6c", "g8_sigma_bar": "g8"}


def _frac(x) -> Fraction:
    return Fraction(x)


@lru_cache(maxsize=None)
def lattice_by_name(name: str) -> ClassLattice:
    case, kind = name.split(".", 1)
    if kind == "link":
        z = LINK_Z[case]
        basis = ("mKY", "Etld", "Ep", "fH")
        rels = (
            Relation("blowup-along-curve",
                     {"mKY": _frac(1), "fH": _frac(-(z + 1)), "Ep": _frac(1)}),
            Relation("exceptional-class-table",
                     {"Ep": _frac(1), "mKY": _frac(-z), "Etld": _frac(z + 1)}),
        )
        return ClassLattice(name, basis, rels)
    if kind == "bundle":
        c = BUNDLE_CONSTANTS[case]
        N, fA, d = c["N"], c["f_A"], c["d"]
        basis = ("mKSig", "H", "LA", "Fa", "LB", "E", "F")
        rels = (
            Relation("bundle-anticanonical",
                     {"mKSig": _frac(1), "H": _frac(-(N + 1)),
                      "LA": _frac(-(fA - 1)), "Fa": _frac(1), "LB": _frac(1)}),
            Relation("blowdown-hyperplane",
                     {"LB": _frac(1), "LA": _frac(-d), "Fa": _frac(1)}),
            Relation("subbundle-divisor",
                     {"E": _frac(1), "H": _frac(-1), "LA": _frac(1)}),
            Relation("exceptional-pullback",
                     {"F": _frac(1), "Fa": _frac(-1)}),
        )
        return ClassLattice(name, basis, rels)
    if kind == "key":
        if case in BUNDLE_CONSTANTS:
            c = BUNDLE_CONSTANTS[case]
            disc = c["dim_A"] - 3
            basis = ("mK", "H", "E", "F", "M")
            rels = (
                Relation("anticanonical-on-flipped-model",
                         {"mK": _frac(1), "H": _frac(-(c["N"] + 1 + disc)),
                          "E": _frac(disc)}),
                Relation("half-point-polarization",
                         {"H": _frac(1), "M": _frac(-1), "F": Fraction(1, 2)}),
            )
            return ClassLattice(name, basis, rels)
        if case == "g8":
            basis = ("mK", "H", "Pt", "M")
            rels = (
                Relation("anticanonical-on-flopped-model",
                         {"mK": _frac(1), "H": _frac(-3)}),
                Relation("half-point-polarization",
                         {"H": _frac(1), "M": _frac(-1), "Pt": Fraction(1, 2)}),
            )
            return ClassLattice(name, basis, rels)
        if case == "g5":
            basis = ("mK", "H", "E", "Pt", "M")
            rels = (
                Relation("anticanonical-after-center-blowup",
                         {"mK": _frac(1), "H": _frac(-10), "E": _frac(4)}),
                Relation("half-point-polarization",
                         {"H": _frac(1), "M": _frac(-1), "Pt": Fraction(1, 2)}),
            )
            return ClassLattice(name, basis, rels)
    if kind == "sarkisov" and case == "g4":
        basis = ("mKZp", "H", "piaL", "pibL", "E1p", "E2p", "ECp",
                 "E1pp", "E2pp", "LB6")
        rels = (
            Relation("anticanonical-is-polarization",
                     {"mKZp": _frac(1), "piaL": _frac(-1)}),
            Relation("hyperplane-restriction",
                     {"H": _frac(1), "piaL": _frac(-1)}),
            Relation("blowdown-hyperplane-restricted",
                     {"piaL": _frac(2), "E1p": _frac(-1), "E2p": _frac(-1),
                      "pibL": _frac(-1)}),
            Relation("blowup-of-base-along-curve",
                     {"mKZp": _frac(1), "pibL": _frac(-2), "ECp": _frac(1)}),
            Relation("strict-transform-1",
                     {"E1p": _frac(1), "E1pp": _frac(-1), "ECp": _frac(1)}),
            Relation("strict-transform-2",
                     {"E2p": _frac(1), "E2pp": _frac(-1), "ECp": _frac(1)}),
            Relation("hyperplane-pullback",
                     {"pibL": _frac(1), "LB6": _frac(-1)}),
        )
        return ClassLattice(name, basis, rels)
    raise KeyError(f"unknown lattice {name!r}")


# ---------------------------------------------------------------------------
# framework constants per case


@dataclass(frozen=True)
class CaseConstants:
    case_id: str
    dim_A: int | None
    f_A: int | None
    d: int | None
    l: int
    N: int | None
    dim_Sigma: int
    fano_index_r: int
    half_point_count: int


_MODEL_DIM_INDEX = {"g8": (5, 3), "g5": (12, 10)}


def case_table_check(case_id: str) -> CaseConstants:
    """Framework constants with every arithmetic identity re-evaluated."""
    short = _SHORT.get(case_id, case_id)
    if short in BUNDLE_CONSTANTS:
        c = BUNDLE_CONSTANTS[short]
        dim_A, f_A, d, l, N = c["dim_A"], c["f_A"], c["d"], c["l"], c["N"]
        consts = CaseConstants(short, dim_A, f_A, d, l, N,
                               dim_A + N, dim_A + N - 2, l)
        if consts.d != consts.f_A - (consts.dim_A - 2) or consts.d <= 0:
            raise AssertionError("framework inequality violated")
        if consts.dim_Sigma != consts.dim_A + consts.N:
            raise AssertionError("model dimension mismatch")
        if consts.fano_index_r != consts.dim_A + consts.N - 2:
            raise AssertionError("index mismatch")
    elif short in _MODEL_DIM_INDEX:
        dim, r = _MODEL_DIM_INDEX[short]
        consts = CaseConstants(short, None, None, None, 1, None, dim, r, 1)
    else:
        raise KeyError(f"unknown case {case_id!r}")
    record = build_case(f"{short}_sigma_bar").metadata
    if record is None or consts.half_point_count != record.num_half_points_N:
        raise AssertionError("half-point count disagrees with the case table")
    return consts


# ---------------------------------------------------------------------------
# normal-bundle and primitivity bookkeeping


@dataclass(frozen=True)
class NormalBundleFact:
    case_id: str
    label: str
    restricted_degree: int  # degree of -K of the big model on the center
    exceptional_dim: int    # the center is P^exceptional_dim
    normal_degree: int
    splitting: tuple


def normal_bundle_ledger(case_id: str) -> list:
    """Stated normal-bundle degrees re-derived from adjunction bookkeeping:
    deg N = deg(-K restricted) - deg(-K of the exceptional projective space).
    """
    short = _SHORT.get(case_id, case_id)
    facts: list[NormalBundleFact] = []
    if short in BUNDLE_CONSTANTS:
        c = BUNDLE_CONSTANTS[short]
        dim_A, N = c["dim_A"], c["N"]
        facts.append(NormalBundleFact(
            short, "contracted-hyperplane", dim_A + N - 2, dim_A + N - 1,
            -2, (-2,)))
        facts.append(NormalBundleFact(
            short, "flip-center-fiber", dim_A - 3, dim_A - 2,
            -2, (-1, -1) + (0,) * N))
    elif short == "g8":
        facts.append(NormalBundleFact(short, "vertex-plane", 3, 4, -2, (-2,)))
    elif short == "g5":
        facts.append(NormalBundleFact(short, "vertex-plane", 10, 11, -2, (-2,)))
        facts.append(NormalBundleFact(
            short, "flip-center-fiber", 4, 5, -2, (-1, -1, 0, 0, 0, 0, 0)))
    else:
        raise KeyError(f"unknown case {case_id!r}")
    for fact in facts:
        if fact.normal_degree != fact.restricted_degree - (fact.exceptional_dim + 1):
            raise AssertionError(f"adjunction bookkeeping broken: {fact}")
        if sum(fact.splitting) != fact.normal_degree:
            raise AssertionError(f"splitting degree mismatch: {fact}")
    return facts


@dataclass(frozen=True)
class PrimitivityFact:
    case_id: str
    polarization_pairing: int  # (2H + exceptional) . flopping curve
    indivisible: bool


def primitivity_checks() -> list:
    """Arithmetic core of the primitivity arguments: the half-polarization
    pairs to -1 with a flopping curve, and -1 admits no divisor >= 2."""
    out = []
    for case in ("g4", "g6q", "g6c", "g8", "g5"):
        h_dot, exc_dot = 0, -1
        value = 2 * h_dot + exc_dot
        out.append(PrimitivityFact(case, value, abs(value) == 1))
    return out


# ---------------------------------------------------------------------------
# shipped identity ledger


@dataclass(frozen=True)
class LedgerRecord:
    lattice: str
    identity: str
    anchor: str
    verdict: IdentityVerdict


def load_ledger_lines(text: str):
    """Parse the ledger file format: '# anchor: ...' comment lines attach to
    the following '<lattice>: lhs == rhs' identity lines."""
    anchor = ""
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line.lstrip("#").strip()
            if body.startswith("anchor:"):
                anchor = body[len("anchor:"):].strip()
            continue
        if ":" not in line:
            raise ValueError(f"ledger line without lattice prefix: {line!r}")
        lattice, identity = line.split(":", 1)
        yield lattice.strip(), identity.strip(), anchor
        anchor = ""


def run_ledger(case: str | None = None):
    """Verify every identity in the shipped ledger file; optionally restrict
    to one case prefix. Returns LedgerRecord list."""
    text = resources.files("keyvariety").joinpath("data/identities.led").read_text()
    records = []
    for lattice_name, identity, anchor in load_ledger_lines(text):
        if case is not None and not lattice_name.startswith(case + "."):
            continue
        lattice = lattice_by_name(lattice_name)
        records.append(LedgerRecord(lattice_name, identity, anchor,
                                    verify_identity(lattice, identity)))
    return records
