"""Exact sparse multivariate polynomial arithmetic and linear algebra mod p.

Field elements are canonical integer residues 0 <= a < p. Polynomials carry
arbitrary-precision integer coefficients; reduction mod p happens only at
evaluation time, so one symbolic catalog serves every scan prime.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

Monomial = tuple  # exponent vector, one slot per ring variable


class ParseError(ValueError):
    """Malformed polynomial text or unknown variable."""


class OffVarietyError(ValueError):
    """A point was required to lie on a variety and does not."""


class SmallPrime(int):
    """A prime modulus 2 <= p <= 2^31, checked by trial division."""

    def __new__(cls, p: int) -> "SmallPrime":
        p = int(p)
        if not 2 <= p <= 2**31:
            raise ValueError(f"prime out of range: {p}")
        if p % 2 == 0 and p != 2:
            raise ValueError(f"not prime: {p}")
        d = 3
        while d * d <= p:
            if p % d == 0:
                raise ValueError(f"not prime: {p}")
            d += 2
        return super().__new__(cls, p)


_VAR_RE = re.compile(r"[a-z][a-z0-9]*")
_TOKEN_RE = re.compile(r"\s*([a-z][a-z0-9]*|\d+|\^|\*|\+|-|−)")


class Polynomial:
    """Sparse polynomial over the integers in a fixed ordered variable list.

    Terms map full-length exponent tuples to nonzero integer coefficients.
    Instances are immutable; all operators return new objects.
    """

    __slots__ = ("ring_vars", "terms", "_hash")

    def __init__(self, ring_vars: Sequence[str], terms: Mapping[Monomial, int] | None = None):
        object.__setattr__(self, "ring_vars", tuple(ring_vars))
        n = len(self.ring_vars)
        clean: dict[Monomial, int] = {}
        for expo, coeff in (terms or {}).items():
            if len(expo) != n:
                raise ValueError(f"exponent vector of length {len(expo)}, expected {n}")
            if any(e < 0 for e in expo):
                raise ValueError("negative exponent")
            coeff = int(coeff)
            if coeff:
                clean[tuple(int(e) for e in expo)] = coeff
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, *a):  # pragma: no cover - immutability guard
        raise AttributeError("Polynomial is immutable")

    # -- constructors -------------------------------------------------
    @classmethod
    def zero(cls, ring_vars: Sequence[str]) -> "Polynomial":
        return cls(ring_vars, {})

    @classmethod
    def constant(cls, ring_vars: Sequence[str], c: int) -> "Polynomial":
        n = len(ring_vars)
        return cls(ring_vars, {(0,) * n: int(c)} if c else {})

    @classmethod
    def variable(cls, ring_vars: Sequence[str], name: str) -> "Polynomial":
        ring_vars = tuple(ring_vars)
        if name not in ring_vars:
            raise ParseError(f"unknown variable {name!r}")
        e = [0] * len(ring_vars)
        e[ring_vars.index(name)] = 1
        return cls(ring_vars, {tuple(e): 1})

    # -- ring operations ----------------------------------------------
    def _check_ring(self, other: "Polynomial") -> None:
        if self.ring_vars != other.ring_vars:
            raise ValueError("mixed polynomial rings")

    def __add__(self, other: "Polynomial") -> "Polynomial":
        self._check_ring(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return Polynomial(self.ring_vars, out)

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.ring_vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, int):
            return Polynomial(self.ring_vars, {e: c * other for e, c in self.terms.items()})
        self._check_ring(other)
        out: dict[Monomial, int] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return Polynomial(self.ring_vars, out)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return (isinstance(other, Polynomial)
                and self.ring_vars == other.ring_vars
                and self.terms == other.terms)

    def __hash__(self) -> int:
        h = self._hash
        if h is None:
            h = hash((self.ring_vars, frozenset(self.terms.items())))
            object.__setattr__(self, "_hash", h)
        return h

    def is_zero(self) -> bool:
        return not self.terms

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def is_homogeneous(self) -> bool:
        degs = {sum(e) for e in self.terms}
        return len(degs) <= 1

    # -- calculus and evaluation ----------------------------------------
    def partial(self, var_index: int) -> "Polynomial":
        if not 0 <= var_index < len(self.ring_vars):
            raise IndexError(f"variable index {var_index} out of range")
        out: dict[Monomial, int] = {}
        for e, c in self.terms.items():
            k = e[var_index]
            if k:
                e2 = list(e)
                e2[var_index] = k - 1
                key = tuple(e2)
                out[key] = out.get(key, 0) + c * k
        return Polynomial(self.ring_vars, out)

    def eval_mod(self, coords: Sequence[int], p: int) -> int:
        if len(coords) != len(self.ring_vars):
            raise ValueError(
                f"point has {len(coords)} coordinates, ring has {len(self.ring_vars)}")
        total = 0
        for e, c in self.terms.items():
            t = c % p
            for x, k in zip(coords, e):
                if k:
                    t = (t * pow(int(x), k, p)) % p
            total += t
        return total % p

    def substitute(self, images: Mapping[str, "Polynomial"]) -> "Polynomial":
        """Substitute variables by polynomials (same target ring for all images)."""
        target = None
        for img in images.values():
            target = img.ring_vars
            break
        if target is None:
            return self
        out = Polynomial.zero(target)
        for e, c in self.terms.items():
            term = Polynomial.constant(target, c)
            for name, k in zip(self.ring_vars, e):
                if not k:
                    continue
                img = images.get(name)
                if img is None:
                    img = Polynomial.variable(target, name)
                for _ in range(k):
                    term = term * img
            out = out + term
        return out

    # -- text form ------------------------------------------------------
    def __str__(self) -> str:
        if not self.terms:
            return "0"
        keys = sorted(self.terms, key=lambda e: (-sum(e), tuple(-x for x in e)))
        parts: list[str] = []
        for e in keys:
            c = self.terms[e]
            factors = []
            for name, k in zip(self.ring_vars, e):
                if k == 1:
                    factors.append(name)
                elif k > 1:
                    factors.append(f"{name}^{k}")
            mag = abs(c)
            if not factors:
                body = str(mag)
            elif mag == 1:
                body = "*".join(factors)
            else:
                body = "*".join([str(mag)] + factors)
            if not parts:
                parts.append(body if c > 0 else f"-{body}")
            else:
                parts.append(("+ " if c > 0 else "- ") + body)
        return " ".join(parts)

    def __repr__(self) -> str:
        return f"Polynomial({str(self)!r}, vars={self.ring_vars!r})"


def parse_poly(text: str, ring_vars: Sequence[str]) -> Polynomial:
    """Parse the ASCII grammar: terms of integer and variable^int factors
    joined by '*', combined with '+'/'-'. A bare "0" is the zero polynomial.
    """
    ring_vars = tuple(ring_vars)
    pos = 0
    tokens: list[str] = []
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"bad character {text[pos]!r} at position {pos}")
        tok = m.group(1)
        tokens.append("-" if tok == "−" else tok)
        pos = m.end()
    if not tokens:
        raise ParseError("empty expression")

    i = 0

    def peek() -> str | None:
        return tokens[i] if i < len(tokens) else None

    def take() -> str:
        nonlocal i
        tok = tokens[i]
        i += 1
        return tok

    def factor() -> Polynomial:
        tok = peek()
        if tok is None:
            raise ParseError("unexpected end of expression")
        if tok.isdigit():
            take()
            return Polynomial.constant(ring_vars, int(tok))
        if _VAR_RE.fullmatch(tok):
            take()
            base = Polynomial.variable(ring_vars, tok)
            if peek() == "^":
                take()
                exp = peek()
                if exp is None or not exp.isdigit():
                    raise ParseError("exponent must be a nonnegative integer")
                take()
                out = Polynomial.constant(ring_vars, 1)
                for _ in range(int(exp)):
                    out = out * base
                return out
            return base
        raise ParseError(f"unexpected token {tok!r}")

    def term() -> Polynomial:
        out = factor()
        while peek() == "*":
            take()
            out = out * factor()
        return out

    sign = 1
    if peek() in ("+", "-"):
        sign = -1 if take() == "-" else 1
    result = term() * sign
    while peek() is not None:
        op = take()
        if op not in ("+", "-"):
            raise ParseError(f"expected + or -, got {op!r}")
        nxt = term()
        result = result + (nxt * (-1 if op == "-" else 1))
    return result


# ---------------------------------------------------------------------------
# projective point representatives


@dataclass(frozen=True)
class PointAffineRep:
    """Normalized projective point: first nonzero coordinate equals 1."""

    coords: tuple

    def __post_init__(self):
        cs = tuple(int(c) for c in self.coords)
        object.__setattr__(self, "coords", cs)
        for c in cs:
            if c == 0:
                continue
            if c != 1:
                raise ValueError(f"representative not normalized: {cs}")
            break
        else:
            raise ValueError("zero vector is not a projective point")

    @classmethod
    def normalize(cls, raw: Sequence[int], p: int) -> "PointAffineRep":
        vals = [int(x) % p for x in raw]
        for v in vals:
            if v:
                inv = pow(v, -1, p)
                return cls(tuple((x * inv) % p for x in vals))
        raise ValueError("zero vector is not a projective point")

    @classmethod
    def parse(cls, text: str) -> "PointAffineRep":
        return cls(tuple(int(t) for t in text.split(":")))

    def serialize(self) -> str:
        return ":".join(str(c) for c in self.coords)

    def __len__(self) -> int:
        return len(self.coords)


def eval_poly(f: Polynomial, pt: PointAffineRep, p: int) -> int:
    """Value of f at the point, as a residue in [0, p)."""
    return f.eval_mod(pt.coords, p)


# ---------------------------------------------------------------------------
# linear algebra over F_p


def matrix_rank_mod_p(rows: Sequence[Sequence[int]], p: int) -> int:
    """Rank of a rectangular integer matrix over F_p by Gaussian elimination."""
    A = [[int(x) % p for x in row] for row in rows]
    m = len(A)
    n = len(A[0]) if m else 0
    rank = 0
    for c in range(n):
        piv = None
        for i in range(rank, m):
            if A[i][c]:
                piv = i
                break
        if piv is None:
            continue
        A[rank], A[piv] = A[piv], A[rank]
        inv = pow(A[rank][c], -1, p)
        A[rank] = [(x * inv) % p for x in A[rank]]
        for i in range(m):
            if i != rank and A[i][c]:
                f = A[i][c]
                A[i] = [(x - f * y) % p for x, y in zip(A[i], A[rank])]
        rank += 1
        if rank == m:
            break
    return rank


def nullspace_mod_p(rows: Sequence[Sequence[int]], p: int) -> list[list[int]]:
    """Basis of the right kernel over F_p."""
    A = [[int(x) % p for x in row] for row in rows]
    m = len(A)
    n = len(A[0]) if m else 0
    pivots: list[int] = []
    r = 0
    for c in range(n):
        piv = None
        for i in range(r, m):
            if A[i][c]:
                piv = i
                break
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = pow(A[r][c], -1, p)
        A[r] = [(x * inv) % p for x in A[r]]
        for i in range(m):
            if i != r and A[i][c]:
                f = A[i][c]
                A[i] = [(x - f * y) % p for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
    basis = []
    free = [c for c in range(n) if c not in pivots]
    for fc in free:
        v = [0] * n
        v[fc] = 1
        for i, c in enumerate(pivots):
            v[c] = (-A[i][fc]) % p
        basis.append(v)
    return basis


def matrix_rank_mod_p_batch(mats: np.ndarray, p: int) -> np.ndarray:
    """Ranks over F_p of a batch of small matrices, shape (B, r, c).

    Vectorized Gaussian elimination across the batch; result matches
    matrix_rank_mod_p row by row.
    """
    A = np.asarray(mats, dtype=np.int64) % p
    B, r, c = A.shape
    if B == 0:
        return np.zeros(0, dtype=np.int64)
    inv_table = np.zeros(p, dtype=np.int64)
    for v in range(1, p):
        inv_table[v] = pow(v, -1, p)
    row = np.zeros(B, dtype=np.int64)
    bidx = np.arange(B)
    ridx = np.arange(r)[None, :]
    for col in range(c):
        col_vals = A[:, :, col]
        eligible = (ridx >= row[:, None]) & (col_vals != 0)
        has = eligible.any(axis=1)
        if not has.any():
            continue
        piv = np.where(has, eligible.argmax(axis=1), 0)
        # swap row[b] <-> piv[b] where a pivot exists
        perm = np.tile(np.arange(r), (B, 1))
        hb = bidx[has]
        perm[hb, row[has]] = piv[has]
        perm[hb, piv[has]] = row[has]
        A = A[bidx[:, None], perm, :]
        safe_row = np.minimum(row, r - 1)
        prow = A[bidx, safe_row, :]
        pv = prow[bidx, col]
        prow_n = (prow * inv_table[pv][:, None]) % p
        A[hb, row[has], :] = prow_n[has]
        factors = np.where((ridx != row[:, None]) & has[:, None], A[:, :, col], 0)
        A = (A - factors[:, :, None] * prow_n[:, None, :]) % p
        row = row + has.astype(np.int64)
    return row


def jacobian_rank(fs: Sequence[Polynomial], pt: PointAffineRep, p: int) -> int:
    """Rank over F_p of the Jacobian of fs at a point of their common zero set.

    Raises OffVarietyError when some f does not vanish at the point.
    """
    coords = pt.coords
    for f in fs:
        if f.eval_mod(coords, p) != 0:
            raise OffVarietyError(f"point {pt.serialize()} not on the variety mod {p}")
    nv = len(coords)
    rows = [[f.partial(i).eval_mod(coords, p) for i in range(nv)] for f in fs]
    return matrix_rank_mod_p(rows, p)


# ---------------------------------------------------------------------------
# exact rational matrices (used for pairing normalization)


def fraction_matrix_rank(M: Sequence[Sequence[Fraction]]) -> int:
    A = [[Fraction(x) for x in row] for row in M]
    m, n = len(A), len(A[0]) if A else 0
    rank = 0
    for c in range(n):
        piv = next((i for i in range(rank, m) if A[i][c] != 0), None)
        if piv is None:
            continue
        A[rank], A[piv] = A[piv], A[rank]
        inv = 1 / A[rank][c]
        A[rank] = [x * inv for x in A[rank]]
        for i in range(m):
            if i != rank and A[i][c] != 0:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[rank])]
        rank += 1
    return rank
