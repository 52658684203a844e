"""Polynomials over F_q^d, variety enumeration, built-in variety families,
and the regularity certifier.

A variety here is always the zero set {x in F_q^d : F(x) = 0} of a single
polynomial, enumerated exhaustively and stored in lexicographic coordinate
order so that every downstream computation is reproducible.
"""

import math
from dataclasses import dataclass

import numpy as np

from .domains import TABLE_MAX, PointDomain, character_sum_table
from .errors import (
    DegenerateFormError,
    DimensionMismatchError,
    EmptyVarietyError,
    SearchSpaceTooLargeError,
    ZeroParameterError,
)
from .field import FieldContext

ENUM_MAX = 10 ** 8
MAX_TOTAL_DEGREE = 64
_EVAL_CHUNK = 1 << 22


@dataclass(frozen=True)
class PolySpec:
    """A polynomial in d variables as a sparse list of monomials.

    terms: tuple of (coefficient encoding, exponent vector); coefficients are
    nonzero field elements and exponent vectors are pairwise distinct.
    """

    d: int
    terms: tuple

    def __post_init__(self):
        seen = set()
        for coeff, exps in self.terms:
            if coeff == 0:
                raise ValueError("zero coefficient in PolySpec term")
            if len(exps) != self.d:
                raise DimensionMismatchError(
                    f"exponent vector {exps} has length {len(exps)}, expected {self.d}")
            if exps in seen:
                raise ValueError(f"duplicate exponent vector {exps}")
            if sum(exps) > MAX_TOTAL_DEGREE:
                raise ValueError(f"total degree {sum(exps)} exceeds {MAX_TOTAL_DEGREE}")
            seen.add(exps)

    def degree(self) -> int:
        return max((sum(e) for _, e in self.terms), default=0)


def sphere_poly(ctx: FieldContext, d: int, j: int) -> PolySpec:
    """x_1^2 + ... + x_d^2 - j, defined for j != 0."""
    if j % ctx.q == 0:
        raise ZeroParameterError("sphere radius j must be nonzero")
    unit = tuple(tuple(2 if i == k else 0 for i in range(d)) for k in range(d))
    terms = [(1, e) for e in unit]
    terms.append((ctx.neg(j), (0,) * d))
    return PolySpec(d, tuple(terms))


def paraboloid_poly(ctx: FieldContext, d: int) -> PolySpec:
    """x_1^2 + ... + x_{d-1}^2 - x_d."""
    terms = [(1, tuple(2 if i == k else 0 for i in range(d)))
             for k in range(d - 1)]
    terms.append((ctx.neg(1), tuple(0 if i < d - 1 else 1 for i in range(d))))
    return PolySpec(d, tuple(terms))


def minkowski_poly(ctx: FieldContext, d: int, j: int) -> PolySpec:
    """x_1 * x_2 * ... * x_d - j, defined for j != 0."""
    if j % ctx.q == 0:
        raise ZeroParameterError("minkowski radius j must be nonzero")
    return PolySpec(d, (((1, (1,) * d)), (ctx.neg(j), (0,) * d)))


def diagonal_poly(ctx: FieldContext, d: int, s: int, coeffs=None) -> PolySpec:
    """a_1 x_1^s + ... + a_d x_d^s with every a_j nonzero, s >= 2."""
    if s < 2:
        raise ValueError(f"diagonal exponent s = {s} must be >= 2")
    if coeffs is None:
        coeffs = (1,) * d
    if len(coeffs) != d or any(c % ctx.q == 0 for c in coeffs):
        raise ValueError("diagonal polynomial needs d nonzero coefficients")
    return PolySpec(d, tuple((int(c), tuple(s if i == k else 0 for i in range(d)))
                             for k, c in enumerate(coeffs)))


def diagonal_shape(spec: PolySpec):
    """Return (s, coeffs) if spec is sum_j a_j x_j^s over all d variables, else None."""
    if len(spec.terms) != spec.d:
        return None
    coeffs = [0] * spec.d
    s = None
    for coeff, exps in spec.terms:
        hot = [i for i, e in enumerate(exps) if e]
        if len(hot) != 1:
            return None
        i = hot[0]
        if s is None:
            s = exps[i]
        if exps[i] != s or coeffs[i] != 0:
            return None
        coeffs[i] = coeff
    if s is None or s < 2 or any(c == 0 for c in coeffs):
        return None
    return s, tuple(coeffs)


def eval_poly(ctx: FieldContext, spec: PolySpec, x) -> int:
    """Exact value of the polynomial at one point."""
    if len(x) != spec.d:
        raise DimensionMismatchError(
            f"point has {len(x)} coordinates, polynomial arity is {spec.d}")
    acc = 0
    for coeff, exps in spec.terms:
        t = coeff
        for xi, e in zip(x, exps):
            if e:
                t = ctx.mul(t, ctx.pow(int(xi), e))
        acc = ctx.add(acc, t)
    return acc


def eval_poly_table(dom: PointDomain, spec: PolySpec) -> np.ndarray:
    """F(x) for every point of F_q^d, in canonical index order."""
    ctx = dom.ctx
    if spec.d != dom.d:
        raise DimensionMismatchError(
            f"polynomial arity {spec.d} != domain dimension {dom.d}")
    pow_tables = {}
    for _, exps in spec.terms:
        for e in exps:
            if e and e not in pow_tables:
                pow_tables[e] = ctx.pow_table(e)
    out = np.zeros(dom.size, dtype=np.int64)
    for coeff, exps in spec.terms:
        term = np.full(dom.size, coeff, dtype=np.int64)
        for j, e in enumerate(exps):
            if e:
                term = ctx.mul_vec(term, pow_tables[e][dom.coord_array(j)])
        out = ctx.add_vec(out, term)
    return out


@dataclass(frozen=True)
class QuadraticForm:
    """Symmetric d x d matrix of field-element encodings; Q(x) = x^T M x."""

    d: int
    matrix: tuple

    def __post_init__(self):
        if len(self.matrix) != self.d or any(len(r) != self.d for r in self.matrix):
            raise DimensionMismatchError("quadratic form matrix must be d x d")
        for i in range(self.d):
            for j in range(self.d):
                if self.matrix[i][j] != self.matrix[j][i]:
                    raise ValueError("quadratic form matrix must be symmetric")

    @classmethod
    def identity(cls, d: int) -> "QuadraticForm":
        return cls(d, tuple(tuple(1 if i == j else 0 for j in range(d)) for i in range(d)))

    @classmethod
    def diagonal(cls, coeffs) -> "QuadraticForm":
        d = len(coeffs)
        return cls(d, tuple(tuple(coeffs[i] if i == j else 0 for j in range(d))
                            for i in range(d)))

    def evaluate(self, ctx: FieldContext, x) -> int:
        if len(x) != self.d:
            raise DimensionMismatchError("point/form dimension mismatch")
        acc = 0
        for i in range(self.d):
            for j in range(self.d):
                m = self.matrix[i][j]
                if m:
                    acc = ctx.add(acc, ctx.mul(m, ctx.mul(int(x[i]), int(x[j]))))
        return acc

    def value_table(self, dom: PointDomain) -> np.ndarray:
        """Q(x) over all of F_q^d in canonical index order."""
        ctx = dom.ctx
        out = np.zeros(dom.size, dtype=np.int64)
        for i in range(self.d):
            xi = dom.coord_array(i)
            for j in range(self.d):
                m = self.matrix[i][j]
                if m:
                    term = ctx.mul_vec(ctx.mul_vec(xi, dom.coord_array(j)),
                                       np.int64(m))
                    out = ctx.add_vec(out, term)
        return out

    def determinant(self, ctx: FieldContext) -> int:
        """Exact determinant over F_q by Gaussian elimination."""
        m = [list(row) for row in self.matrix]
        det = 1
        for col in range(self.d):
            pivot = next((r for r in range(col, self.d) if m[r][col]), None)
            if pivot is None:
                return 0
            if pivot != col:
                m[col], m[pivot] = m[pivot], m[col]
                det = ctx.neg(det)
            det = ctx.mul(det, m[col][col])
            inv = ctx.inv(m[col][col])
            for r in range(col + 1, self.d):
                if m[r][col]:
                    factor = ctx.mul(m[r][col], inv)
                    for c in range(col, self.d):
                        m[r][c] = ctx.sub(m[r][c], ctx.mul(factor, m[col][c]))
        return det

    def require_nondegenerate(self, ctx: FieldContext):
        if self.determinant(ctx) == 0:
            raise DegenerateFormError("quadratic form is degenerate over F_q")


@dataclass(frozen=True)
class Variety:
    """Zero set of a polynomial, points lexicographically ordered.

    spec is None for varieties loaded from a point file.
    """

    spec: PolySpec | None
    d: int
    q: int
    points: tuple  # tuple of coordinate tuples, lexicographically sorted

    @property
    def size(self) -> int:
        return len(self.points)

    def indices(self, dom: PointDomain) -> np.ndarray:
        return dom.indices_of(self.points)

    def save(self, path):
        with open(path, "w") as fh:
            fh.write(f"{self.q} {self.d} {self.size}\n")
            for pt in self.points:
                fh.write(",".join(str(c) for c in pt) + "\n")

    @classmethod
    def load(cls, path) -> "Variety":
        with open(path) as fh:
            header = fh.readline().split()
            if len(header) != 3:
                raise ValueError(f"{path}: expected header 'q d |V|', got {header!r}")
            q, d, size = int(header[0]), int(header[1]), int(header[2])
            pts = []
            for line in fh:
                line = line.strip()
                if line:
                    pts.append(tuple(int(c) for c in line.split(",")))
        if len(pts) != size:
            raise ValueError(f"variety file lists {len(pts)} points, header says {size}")
        if any(len(pt) != d for pt in pts):
            raise ValueError("variety file contains a point of the wrong dimension")
        return cls(spec=None, d=d, q=q, points=tuple(sorted(pts)))


def enumerate_variety(ctx: FieldContext, spec: PolySpec) -> Variety:
    """All and only the zeros of the polynomial, lexicographically ordered."""
    size = ctx.q ** spec.d
    if size > ENUM_MAX:
        raise SearchSpaceTooLargeError(
            f"q^d = {size} exceeds the enumeration budget {ENUM_MAX}")
    dom = PointDomain(ctx, spec.d)
    if size <= TABLE_MAX:
        vals = eval_poly_table(dom, spec)
        idxs = np.nonzero(vals == 0)[0]
    else:
        hits = []
        for lo in range(0, size, _EVAL_CHUNK):
            hi = min(lo + _EVAL_CHUNK, size)
            idx = np.arange(lo, hi, dtype=np.int64)
            vals = _eval_poly_on_indices(ctx, spec, idx)
            hits.append(idx[vals == 0])
        idxs = np.concatenate(hits) if hits else np.zeros(0, dtype=np.int64)
    points = tuple(dom.point_of(int(i)) for i in idxs)
    return Variety(spec=spec, d=spec.d, q=ctx.q, points=points)


def _eval_poly_on_indices(ctx, spec, idx):
    q, d = ctx.q, spec.d
    pow_tables = {e: ctx.pow_table(e)
                  for _, exps in spec.terms for e in exps if e}
    out = np.zeros(idx.shape, dtype=np.int64)
    for coeff, exps in spec.terms:
        term = np.full(idx.shape, coeff, dtype=np.int64)
        for j, e in enumerate(exps):
            if e:
                xj = (idx // q ** (d - 1 - j)) % q
                term = ctx.mul_vec(term, pow_tables[e][xj])
        out = ctx.add_vec(out, term)
    return out


FAMILIES = ("sphere", "paraboloid", "minkowski")


def builtin_variety(ctx: FieldContext, family: str, d: int, j: int | None = None) -> Variety:
    """One of the built-in regular-variety families over F_q^d (d >= 2)."""
    if d < 2:
        raise ValueError(f"built-in families need d >= 2, got d = {d}")
    if family == "sphere":
        spec = sphere_poly(ctx, d, 1 if j is None else j)
    elif family == "paraboloid":
        spec = paraboloid_poly(ctx, d)
    elif family == "minkowski":
        spec = minkowski_poly(ctx, d, 1 if j is None else j)
    else:
        raise ValueError(f"unknown family {family!r}; choose from {FAMILIES}")
    return enumerate_variety(ctx, spec)


DEFAULT_THRESHOLDS = (0.5, 2.0, 3.0)


@dataclass(frozen=True)
class RegularityReport:
    """Measured constants behind the two regularity conditions.

    size_constant    = |V| / q^(d-1)
    fourier_constant = max_{m != 0} |sum_{x in V} chi(-m.x)| / q^((d-1)/2),
    i.e. the nontrivial Fourier coefficients of the indicator rescaled by
    q^((d+1)/2).  The verdict applies the caller's thresholds at this fixed q.
    """

    q: int
    d: int
    size: int
    size_constant: float
    fourier_constant: float
    argmax_m: tuple
    thresholds: tuple
    size_ok: bool
    fourier_ok: bool

    @property
    def verdict(self) -> bool:
        return self.size_ok and self.fourier_ok

    def as_dict(self) -> dict:
        return {
            "q": self.q, "d": self.d, "size": self.size,
            "c1": self.size_constant, "c2": self.fourier_constant,
            "argmax_m": list(self.argmax_m),
            "thresholds": {"c1_lo": self.thresholds[0], "c1_hi": self.thresholds[1],
                           "c2_max": self.thresholds[2]},
            "verdict": "REGULAR" if self.verdict else "NOT_REGULAR",
        }


def regularity_check(ctx: FieldContext, variety: Variety,
                     thresholds=DEFAULT_THRESHOLDS, method: str = "auto") -> RegularityReport:
    """Measure the two regularity constants and apply the thresholds.

    Scans every nonzero frequency m; the maximum modulus is reached at the
    first maximizer in index order (deterministic).  A Parseval identity check
    guards the scan on every invocation.
    """
    if variety.size == 0:
        raise EmptyVarietyError("regularity check needs a nonempty variety")
    dom = PointDomain(ctx, variety.d)
    if dom.size > TABLE_MAX:
        raise SearchSpaceTooLargeError(
            f"q^d = {dom.size} exceeds the m-scan budget {TABLE_MAX}")
    sums = character_sum_table(dom, variety.points, method=method)
    mods = np.abs(sums)
    # Parseval audit: sum_m |sum_x chi(-m.x)|^2 == q^d * |V|
    total = float(np.sum(mods ** 2))
    expected = float(dom.size * variety.size)
    if abs(total - expected) > 1e-6 * expected:
        raise AssertionError(
            f"Parseval audit failed: {total} vs {expected} (scan is inconsistent)")
    mods[0] = -1.0  # exclude m = 0 from the maximum
    arg = int(np.argmax(mods))  # first maximizer in index order
    max_mod = float(mods[arg])
    c1 = variety.size / ctx.q ** (variety.d - 1)
    c2 = max_mod / ctx.q ** ((variety.d - 1) / 2)
    c1_lo, c1_hi, c2_max = thresholds
    return RegularityReport(
        q=ctx.q, d=variety.d, size=variety.size,
        size_constant=c1, fourier_constant=c2,
        argmax_m=dom.point_of(arg), thresholds=tuple(thresholds),
        size_ok=bool(c1_lo <= c1 <= c1_hi), fourier_ok=bool(c2 <= c2_max),
    )
