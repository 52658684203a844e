"""Exact fold counts, k-energies, the distance-count tables nu_k and nu_{P,k},
generalized distance sets, and second-moment/sumset quantities.

Everything on the counting side is exact integer arithmetic: tables switch to
Python-int (object dtype) storage automatically once |E|^k could overflow
int64, so inequality audits always compare an exact integer against a
floating bound.  Convolutions are sparse iterated folds (one np.roll per
point of E), never transform-based, to stay exact.
"""

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .domains import PointDomain
from .errors import (
    BudgetExceededError,
    EmptyXError,
    InconsistentTotalError,
    NotDiagonalError,
    OddKError,
)
from .field import FieldContext
from .geometry import PolySpec, QuadraticForm, diagonal_shape, eval_poly_table
from .spectra import AUDIT_RTOL, Spectrum, affine_cayley_spectrum, euclidean_spectrum

FOLD_BUDGET = 10 ** 9
_INT64_SAFE = 1 << 62


@dataclass(frozen=True)
class CountTable:
    """Exact nonnegative-integer counts over F_q^d ('points') or F_q ('scalars')."""

    kind: str
    d: int
    q: int
    values: np.ndarray

    def total(self) -> int:
        return int(self.values.sum(dtype=object))

    def __getitem__(self, i) -> int:
        return int(self.values[i])

    def to_rows(self):
        for i, v in enumerate(self.values):
            yield i, int(v)


def _table_dtype(e_size: int, j: int):
    return object if e_size ** max(j, 1) >= _INT64_SAFE else np.int64


def fold_counts(dom: PointDomain, E, j: int) -> CountTable:
    """r_j(z) = number of ordered j-tuples from E summing to z, exact.

    Computed by the iterated sparse fold r_j = r_{j-1} (*) 1_E: one cyclic
    shift of the running table per point of E and fold.
    """
    if j < 1:
        raise ValueError(f"fold depth j = {j} must be >= 1")
    pts = list(E)
    cost = len(pts) * dom.size * (j - 1)
    if cost > FOLD_BUDGET:
        raise BudgetExceededError(
            f"fold cost |E|*q^d*(j-1) = {cost} exceeds budget {FOLD_BUDGET}")
    dtype = _table_dtype(len(pts), j)
    r = np.zeros(dom.size, dtype=dtype)
    one = 1 if dtype is object else np.int64(1)
    for pt in pts:
        r[dom.index_of(pt)] += one
    for _ in range(j - 1):
        nxt = np.zeros(dom.size, dtype=dtype)
        for pt in pts:
            nxt += dom.translate_table(r, dom.index_of(pt))
        r = nxt
    table = CountTable(kind="points", d=dom.d, q=dom.ctx.q, values=r)
    assert table.total() == len(pts) ** j, "fold mass conservation violated"
    return table


def lambda_k(dom: PointDomain, E, k: int) -> int:
    """k-energy: ordered k-tuples whose two half-sums agree; sum of r_{k/2}^2."""
    if k % 2 != 0 or k < 2:
        raise OddKError(f"k-energy needs even k >= 2, got k = {k}; "
                        "odd k is handled through the product of neighbours")
    r = fold_counts(dom, E, k // 2).values
    return int(sum(int(v) * int(v) for v in r if v))


@dataclass(frozen=True)
class EnergyProfile:
    """Even k-energies of a point set plus the odd-k neighbour products."""

    size: int
    values: dict          # even k -> Lambda_k
    odd_products: dict    # odd k -> Lambda_{k-1} * Lambda_{k+1}

    def as_dict(self) -> dict:
        return {"size": self.size,
                "lambda": {str(k): v for k, v in sorted(self.values.items())},
                "odd_products": {str(k): v for k, v in sorted(self.odd_products.items())}}


def energy_profile(dom: PointDomain, E, max_k: int) -> EnergyProfile:
    pts = list(E)
    values = {k: lambda_k(dom, pts, k) for k in range(2, max_k + 1, 2)}
    odd = {k: values[k - 1] * values[k + 1]
           for k in range(3, max_k, 2) if k - 1 in values and k + 1 in values}
    return EnergyProfile(size=len(pts), values=values, odd_products=odd)


def _bin_by_value(ctx, values, r, expected_total):
    """nu(t) = sum of r(z) over z with values(z) = t, exact."""
    q = ctx.q
    if r.dtype == np.int64:
        out = np.zeros(q, dtype=np.int64)
        np.add.at(out, values, r)
    else:
        out = np.zeros(q, dtype=object)
        for z in np.nonzero(r)[0]:
            out[values[z]] += int(r[z])
    table = CountTable(kind="scalars", d=1, q=q, values=out)
    assert table.total() == expected_total, "value-binning lost mass"
    return table


def nu_k(dom: PointDomain, E, form: QuadraticForm, k: int) -> CountTable:
    """nu_k(t) = k-tuples from E whose coordinate sum z has Q(z) = t."""
    if k < 1:
        raise ValueError(f"k = {k} must be >= 1")
    form.require_nondegenerate(dom.ctx)
    pts = list(E)
    r = fold_counts(dom, pts, k).values
    qvals = form.value_table(dom)
    return _bin_by_value(dom.ctx, qvals, r, len(pts) ** k)


def nu_P_k(dom: PointDomain, E, X, pspec: PolySpec, k: int) -> CountTable:
    """nu_{P,k}(t) = triples (a, k-tuple) with a in X and a + P(sum) = t."""
    xs = sorted(set(int(a) % dom.ctx.q for a in X))
    if not xs:
        raise EmptyXError("shift set X must be nonempty")
    if diagonal_shape(pspec) is None:
        raise NotDiagonalError("nu_{P,k} needs a diagonal polynomial P")
    pts = list(E)
    r = fold_counts(dom, pts, k).values
    pvals = eval_poly_table(dom, pspec)
    base = _bin_by_value(dom.ctx, pvals, r, len(pts) ** k)
    ctx = dom.ctx
    out = np.zeros(ctx.q, dtype=base.values.dtype)
    for a in xs:
        # nu(t) += base(t - a): shifting by a permutes the scalar domain
        for t in range(ctx.q):
            out[ctx.add(t, a)] += base.values[t]
    table = CountTable(kind="scalars", d=1, q=ctx.q, values=out)
    assert table.total() == len(xs) * len(pts) ** k, "shift-sum lost mass"
    return table


@dataclass(frozen=True)
class DeltaSet:
    """Value set {F(z) : r_k(z) > 0} with coverage flags."""

    values: tuple
    covers_Fq_star: bool
    covers_Fq: bool

    def as_dict(self) -> dict:
        return {"delta": list(self.values), "covers_Fq_star": self.covers_Fq_star,
                "covers_Fq": self.covers_Fq}


def delta_set(dom: PointDomain, E, f, k: int) -> DeltaSet:
    """Generalized distance set of E under F, over k-fold sums.

    f may be a PolySpec or a QuadraticForm.
    """
    pts = list(E)
    r = fold_counts(dom, pts, k).values
    vals = f.value_table(dom) if isinstance(f, QuadraticForm) else eval_poly_table(dom, f)
    support = np.nonzero(r)[0]
    seen = sorted(set(int(vals[z]) for z in support))
    q = dom.ctx.q
    covers_star = len([v for v in seen if v != 0]) == q - 1
    return DeltaSet(values=tuple(seen), covers_Fq_star=covers_star,
                    covers_Fq=len(seen) == q)


def second_moment(table: CountTable) -> int:
    """Exact sum of squared counts."""
    return int(sum(int(v) * int(v) for v in table.values if v))


def sumset_lower_bound(table: CountTable, x_size: int, e_size: int, k: int) -> Fraction:
    """Cauchy-Schwarz lower bound |X|^2 |E|^{2k} / sum_t nu(t)^2 as an exact rational."""
    expected = x_size * e_size ** k
    if table.total() != expected:
        raise InconsistentTotalError(
            f"nu table totals {table.total()}, expected |X|*|E|^k = {expected}")
    sq = second_moment(table)
    if sq == 0:
        return Fraction(0)
    return Fraction(x_size * x_size * e_size ** (2 * k), sq)


def sumset(ctx: FieldContext, X, values) -> tuple:
    """X + values inside F_q, as a sorted tuple of encodings."""
    out = set()
    for a in X:
        for v in values:
            out.add(ctx.add(int(a), int(v)))
    return tuple(sorted(out))


# -- inequality audits ---------------------------------------------------------
#
# Each audit compares exact integer counts against the expander-mixing bound
# with the graph's *measured* second eigenvalue and *exact* degree: in that
# form the inequality is a theorem, so a violation is a hard bug.  The
# normalized variant (degree replaced by q^{d-1}, eigenvalue by its classical
# ceiling) is reported alongside as data, never asserted.


@dataclass(frozen=True)
class InequalityAudit:
    name: str
    deviation: float
    bound: float
    ok: bool
    normalized_deviation: float
    normalized_bound: float
    normalized_ok: bool
    detail: dict

    def as_dict(self) -> dict:
        return {"name": self.name, "deviation": self.deviation, "bound": self.bound,
                "ok": self.ok, "normalized_deviation": self.normalized_deviation,
                "normalized_bound": self.normalized_bound,
                "normalized_ok": self.normalized_ok, **self.detail}


def _verdict(deviation: float, bound: float) -> bool:
    return deviation <= bound + AUDIT_RTOL * bound + 1e-12


def nu_deviation_audit(dom: PointDomain, E, form: QuadraticForm, k: int, t: int,
                       graph: Spectrum, nu_table: CountTable | None = None) -> InequalityAudit:
    """Deviation of nu_k(t) from its mixing main term, for t != 0.

    Even k uses the k-energy; odd k uses the geometric mean of the two
    neighbouring energies.  `graph` must be the spectrum of the t-level
    Euclidean graph; its exact degree feeds the main term.
    """
    if t % dom.ctx.q == 0:
        raise ValueError("deviation audit is stated for t != 0 only")
    pts = list(E)
    if nu_table is None:
        nu_table = nu_k(dom, pts, form, k)
    nu_t = nu_table[t]
    if k % 2 == 0:
        energy = float(lambda_k(dom, pts, k))
        energy_label = {"k_energy": lambda_k(dom, pts, k)}
    else:
        lo = lambda_k(dom, pts, k - 1)
        hi = lambda_k(dom, pts, k + 1)
        energy = math.sqrt(float(lo) * float(hi))
        energy_label = {"k_energy_product": lo * hi}
    e_size = len(pts)
    main = Fraction(graph.degree * e_size ** k, dom.size)
    deviation = abs(float(Fraction(nu_t) - main))
    bound = graph.lambda_mixing * energy
    norm_main = Fraction(e_size ** k, dom.ctx.q)
    norm_dev = abs(float(Fraction(nu_t) - norm_main))
    norm_bound = 2.0 * dom.ctx.q ** ((dom.d - 1) / 2) * energy
    return InequalityAudit(
        name="nu-deviation", deviation=deviation, bound=bound,
        ok=_verdict(deviation, bound),
        normalized_deviation=norm_dev, normalized_bound=norm_bound,
        normalized_ok=_verdict(norm_dev, norm_bound),
        detail={"t": t, "nu_t": nu_t, "k": k, "size": e_size,
                "main": float(main), **energy_label})


def energy_growth_audit(dom: PointDomain, variety, E, k: int) -> InequalityAudit:
    """Even-k energy of E inside a variety V, against the Cayley-graph bound.

    Hard checks: (a) the multiset mixing inequality for the exact edge count
    e between the half-sum multisets, and (b) Lambda_k <= e (every k-tuple
    counted by the energy lands in V because E is contained in V).  The
    normalized gap against |E|^{k-1}/q is reported only.
    """
    if k % 2 != 0 or k < 4:
        raise OddKError(f"energy growth audit needs even k >= 4, got {k}")
    pts = list(E)
    vset = set(variety.points)
    if any(pt not in vset for pt in pts):
        raise ValueError("E must be a subset of the variety")
    from .spectra import cayley_spectrum
    graph = cayley_spectrum(dom.ctx, variety.points, d=dom.d)
    r_half = fold_counts(dom, pts, k // 2).values
    r_less = fold_counts(dom, pts, k // 2 - 1).values
    # e = sum_u r_{k/2-1}(u) * sum_{v in V} r_{k/2}(u + v)
    acc = np.zeros(dom.size, dtype=r_half.dtype)
    for pt in variety.points:
        acc += dom.translate_table(r_half, int(dom.index_neg(dom.index_of(pt))))
    e = int(sum(int(a) * int(b) for a, b in zip(r_less, acc) if a and b))
    lam_k = int(sum(int(v) * int(v) for v in r_half if v))
    lam_km2 = int(sum(int(v) * int(v) for v in r_less if v))
    e_size = len(pts)
    main = Fraction(variety.size * e_size ** (k - 1), dom.size)
    deviation = abs(float(Fraction(e) - main))
    bound = graph.lambda_mixing * math.sqrt(float(lam_km2) * float(lam_k))
    contained = lam_k <= e
    norm_main = Fraction(e_size ** (k - 1), dom.ctx.q)
    norm_dev = abs(float(Fraction(lam_k) - norm_main))
    norm_bound = 2.0 * dom.ctx.q ** ((dom.d - 1) / 2) * math.sqrt(float(lam_km2) * float(lam_k))
    return InequalityAudit(
        name="energy-growth", deviation=deviation, bound=bound,
        ok=_verdict(deviation, bound) and contained,
        normalized_deviation=norm_dev, normalized_bound=norm_bound,
        normalized_ok=_verdict(norm_dev, norm_bound),
        detail={"k": k, "size": e_size, "edge_count": e, "k_energy": lam_k,
                "energy_upper_slack": e - lam_k, "main": float(main)})


def second_moment_audit(dom: PointDomain, E, X, pspec: PolySpec, k: int,
                        graph: Spectrum | None = None) -> InequalityAudit:
    """sum_t nu_{P,k}(t)^2 against |X|^2|E|^{2k}/q + lambda * |X| * (energy term).

    `graph` is the affine Cayley digraph spectrum; passing a precomputed one
    avoids recomputing it across many (E, X) draws.
    """
    pts = list(E)
    xs = sorted(set(int(a) % dom.ctx.q for a in X))
    if graph is None:
        graph, _ = affine_cayley_spectrum(dom.ctx, pspec, dom.d)
    table = nu_P_k(dom, pts, xs, pspec, k)
    sq = second_moment(table)
    if k % 2 == 0:
        lam = lambda_k(dom, pts, k)
        energy_term = float(lam) * float(lam)
        energy_detail = {"k_energy": lam}
    else:
        lo = lambda_k(dom, pts, k - 1)
        hi = lambda_k(dom, pts, k + 1)
        energy_term = float(lo) * float(hi)
        energy_detail = {"k_energy_product": lo * hi}
    e_size, x_size = len(pts), len(xs)
    main = Fraction(x_size ** 2 * e_size ** (2 * k), dom.ctx.q)
    excess = float(Fraction(sq) - main)   # audit is one-sided
    bound = graph.lambda_mixing * x_size * energy_term
    norm_bound = float(dom.ctx.q ** dom.d) * x_size * energy_term
    return InequalityAudit(
        name="second-moment", deviation=max(excess, 0.0), bound=bound,
        ok=_verdict(max(excess, 0.0), bound),
        normalized_deviation=max(excess, 0.0), normalized_bound=norm_bound,
        normalized_ok=_verdict(max(excess, 0.0), norm_bound),
        detail={"k": k, "size": e_size, "x_size": x_size,
                "second_moment": sq, "main": float(main)})


def nu_deviation_audits(dom: PointDomain, E, form: QuadraticForm, k: int,
                        graphs_by_t: dict) -> list:
    """Deviation audits for every t != 0 at once, sharing the fold tables.

    graphs_by_t maps t -> Spectrum of the t-level Euclidean graph.
    """
    pts = list(E)
    table = nu_k(dom, pts, form, k)
    if k % 2 == 0:
        energy = float(lambda_k(dom, pts, k))
        energy_detail = {"k_energy": lambda_k(dom, pts, k)}
    else:
        lo = lambda_k(dom, pts, k - 1)
        hi = lambda_k(dom, pts, k + 1)
        energy = math.sqrt(float(lo) * float(hi))
        energy_detail = {"k_energy_product": lo * hi}
    e_size = len(pts)
    q = dom.ctx.q
    out = []
    for t in range(1, q):
        graph = graphs_by_t[t]
        main = Fraction(graph.degree * e_size ** k, dom.size)
        deviation = abs(float(Fraction(table[t]) - main))
        bound = graph.lambda_mixing * energy
        norm_main = Fraction(e_size ** k, q)
        norm_dev = abs(float(Fraction(table[t]) - norm_main))
        norm_bound = 2.0 * q ** ((dom.d - 1) / 2) * energy
        out.append(InequalityAudit(
            name="nu-deviation", deviation=deviation, bound=bound,
            ok=_verdict(deviation, bound),
            normalized_deviation=norm_dev, normalized_bound=norm_bound,
            normalized_ok=_verdict(norm_dev, norm_bound),
            detail={"t": t, "nu_t": table[t], "k": k, "size": e_size,
                    "main": float(main), **energy_detail}))
    return out


def energy_recursion_ratio(dom: PointDomain, E, k: int) -> dict:
    """Measured constant in the even-k energy recursion: Lambda_k against
    q^{(d-1)(k-2)/2} |E| + |E|^{k-1}/q.  Reported, never asserted."""
    if k % 2 != 0 or k < 2:
        raise OddKError(f"energy recursion ratio needs even k, got {k}")
    pts = list(E)
    lam = lambda_k(dom, pts, k)
    q, d = dom.ctx.q, dom.d
    denom = q ** ((d - 1) * (k - 2) / 2) * len(pts) + len(pts) ** (k - 1) / q
    return {"k": k, "size": len(pts), "k_energy": lam,
            "bound_term": denom, "ratio": float(lam) / denom if denom else math.inf}


def multiset_from_fold(dom: PointDomain, E, j: int) -> Counter:
    """The multiset of j-fold sums of E, as index -> multiplicity."""
    r = fold_counts(dom, E, j).values
    return Counter({int(z): int(r[z]) for z in np.nonzero(r)[0]})
