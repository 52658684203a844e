"""Seeded experiment harness: subset sampling, parameter sweeps, and
theorem-level verdicts with reproducible JSON/CSV reports.

Design rule inherited from the inequality audits: statements that are exact
at fixed q (mixing-type inequalities with measured eigenvalues) are hard
verdicts and count as failures; asymptotic conclusions (coverage of F_q^*,
relative deviation shrinking) are measured and recorded, never asserted.
"""

import csv
import hashlib
import io
import json
import math
import platform
import random
from dataclasses import dataclass, field
from datetime import datetime, timezone
from fractions import Fraction

from . import __version__
from .domains import PointDomain
from .energy import (
    delta_set,
    energy_growth_audit,
    energy_recursion_ratio,
    lambda_k,
    nu_deviation_audits,
    nu_k,
    nu_P_k,
    second_moment,
    second_moment_audit,
    sumset,
    sumset_lower_bound,
)
from .errors import SizeExceedsVarietyError
from .field import FieldContext
from .geometry import (
    QuadraticForm,
    Variety,
    builtin_variety,
    diagonal_poly,
    regularity_check,
)
from .spectra import affine_cayley_spectrum, euclidean_spectrum


def _derive_rng(seed: int, trial: int, salt: str = "subset") -> random.Random:
    """Deterministic per-trial stream: SHA-256 of 'salt:seed:trial' seeds a
    Mersenne Twister.  Documented so reports are portable."""
    digest = hashlib.sha256(f"fqspectra:{salt}:{seed}:{trial}".encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def sample_subset(variety: Variety, size: int, seed: int, trial: int):
    """Uniform random size-subset of the variety's canonical point list.

    The full list is shuffled once per (seed, trial) and the subset is the
    sorted prefix, so identical inputs give identical subsets and larger
    sizes contain smaller ones (nested chains come for free).
    """
    if size > variety.size:
        raise SizeExceedsVarietyError(
            f"requested {size} points from a variety of size {variety.size}")
    if size == variety.size:
        return list(variety.points)
    order = list(variety.points)
    _derive_rng(seed, trial).shuffle(order)
    return sorted(order[:size])


def sample_scalar_subset(q: int, size: int, seed: int, trial: int):
    """Seeded subset of F_q, same prefix-of-shuffle scheme with its own salt."""
    if size >= q:
        return list(range(q))
    order = list(range(q))
    _derive_rng(seed, trial, salt="scalars").shuffle(order)
    return sorted(order[:size])


@dataclass
class ExperimentPlan:
    """Everything needed to reproduce one experiment run."""

    p: int
    n: int = 1
    d: int = 2
    family: str = "sphere"
    j: int = 1
    k: int = 3
    form: str = "identity"          # identity | diag:a1,a2,...
    s: int = 2                      # diagonal exponent for sumset runs
    coeffs: tuple | None = None     # diagonal coefficients, default all 1
    sizes: tuple = (0.5, 1.0, 2.0, 4.0)
    sizes_mode: str = "threshold"   # threshold multiples or absolute counts
    ks: tuple | None = None         # energy experiment k schedule
    x_sizes: tuple = (1,)
    trials: int = 5
    seed: int = 0
    c: float = 0.5                  # sumset verdict: |X+Delta| >= c*q

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.sizes_mode not in ("threshold", "absolute"):
            raise ValueError(f"unknown sizes_mode {self.sizes_mode!r}")

    def context(self) -> FieldContext:
        return FieldContext(self.p, self.n)

    def quadratic_form(self) -> QuadraticForm:
        if self.form == "identity":
            return QuadraticForm.identity(self.d)
        if self.form.startswith("diag:"):
            coeffs = tuple(int(c) for c in self.form[5:].split(","))
            return QuadraticForm.diagonal(coeffs)
        raise ValueError(f"unknown form spec {self.form!r}")

    def threshold(self) -> float:
        q = self.p ** self.n
        return q ** ((self.d - 1) / 2 + 1 / (self.k - 1))

    def resolve_sizes(self, variety_size: int):
        out = []
        for s in self.sizes:
            if self.sizes_mode == "threshold":
                target = int(round(s * self.threshold()))
            else:
                target = int(s)
            out.append(max(0, min(target, variety_size)))
        return out

    def as_dict(self) -> dict:
        return {
            "p": self.p, "n": self.n, "d": self.d, "family": self.family,
            "j": self.j, "k": self.k, "form": self.form, "s": self.s,
            "coeffs": list(self.coeffs) if self.coeffs else None,
            "sizes": list(self.sizes), "sizes_mode": self.sizes_mode,
            "ks": list(self.ks) if self.ks else None,
            "x_sizes": list(self.x_sizes), "trials": self.trials,
            "seed": self.seed, "c": self.c,
        }

    @classmethod
    def from_file(cls, path) -> "ExperimentPlan":
        """Parse the documented flat `key = value` plan format."""
        raw = {}
        with open(path) as fh:
            for line in fh:
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ValueError(f"plan line without '=': {line!r}")
                key, value = (part.strip() for part in line.split("=", 1))
                raw[key] = value
        return cls.from_mapping(raw)

    @classmethod
    def from_mapping(cls, raw: dict) -> "ExperimentPlan":
        kwargs = {}
        int_keys = {"p", "n", "d", "j", "k", "s", "trials", "seed"}
        for key, value in raw.items():
            if key in int_keys:
                kwargs[key] = int(value)
            elif key == "c":
                kwargs[key] = float(value)
            elif key == "sizes":
                kwargs[key] = tuple(float(v) for v in str(value).split(","))
            elif key in ("ks", "x_sizes", "coeffs"):
                kwargs[key] = tuple(int(v) for v in str(value).split(","))
            elif key in ("family", "form", "sizes_mode"):
                kwargs[key] = str(value)
            else:
                raise ValueError(f"unknown plan key {key!r}")
        return cls(**kwargs)


@dataclass
class ExperimentReport:
    """Per-trial records plus aggregates, audit verdicts, and a stamp."""

    kind: str
    plan: dict
    stamp: dict
    regularity: dict | None
    records: list
    aggregates: dict
    hard_failures: int = 0
    notes: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "kind": self.kind, "plan": self.plan, "stamp": self.stamp,
            "regularity": self.regularity, "records": self.records,
            "aggregates": self.aggregates, "hard_failures": self.hard_failures,
            "notes": self.notes,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=True)

    def write_json(self, path):
        with open(path, "w") as fh:
            fh.write(self.to_json() + "\n")

    def csv_columns(self):
        cols = []
        for rec in self.records:
            for key in rec:
                if key not in cols:
                    cols.append(key)
        return cols

    def to_csv(self) -> str:
        buf = io.StringIO()
        cols = self.csv_columns()
        writer = csv.DictWriter(buf, fieldnames=cols)
        writer.writeheader()
        for rec in self.records:
            writer.writerow({k: rec.get(k, "") for k in cols})
        return buf.getvalue()

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            fh.write(self.to_csv())


def _stamp(plan: ExperimentPlan) -> dict:
    return {
        "seed": plan.seed,
        "package_version": __version__,
        "python_version": platform.python_version(),
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }


def _setup(plan: ExperimentPlan):
    ctx = plan.context()
    variety = builtin_variety(ctx, plan.family, plan.d,
                              plan.j if plan.family != "paraboloid" else None)
    dom = PointDomain(ctx, plan.d)
    report = regularity_check(ctx, variety)
    return ctx, dom, variety, report


def coverage_experiment(plan: ExperimentPlan) -> ExperimentReport:
    """Distance-count coverage: nu_k(t) across t, coverage of F_q^*, relative
    deviation from |E|^k/q, size-hypothesis margins, and hard deviation audits."""
    ctx, dom, variety, reg = _setup(plan)
    form = plan.quadratic_form()
    graphs = {}
    for t in range(1, ctx.q):
        spec, check = euclidean_spectrum(ctx, form, t, plan.d)
        graphs[t] = spec
        if not check.within:
            raise AssertionError(f"euclidean graph bound failed at t={t}")
    records = []
    hard_failures = 0
    sizes = plan.resolve_sizes(variety.size)
    k, q = plan.k, ctx.q
    for size_index, size in enumerate(sizes):
        for trial in range(plan.trials):
            E = sample_subset(variety, size, plan.seed, trial)
            rec = {"size_index": size_index, "trial": trial, "size": len(E)}
            table = nu_k(dom, E, form, k)
            nonzero_t = [table[t] for t in range(1, q)]
            rec["min_nu_nonzero_t"] = min(nonzero_t) if nonzero_t else 0
            ds = delta_set(dom, E, form, k)
            rec["covers_Fq_star"] = ds.covers_Fq_star
            rec["covers_Fq"] = ds.covers_Fq
            if len(E) > 0:
                main = len(E) ** k / q
                rec["rel_deviation"] = max(abs(table[t] / main - 1) for t in range(1, q))
                if k % 2 == 0:
                    margin = q ** ((plan.d + 1) / 2) * lambda_k(dom, E, k) / len(E) ** k
                else:
                    lo = lambda_k(dom, E, k - 1)
                    hi = lambda_k(dom, E, k + 1)
                    margin = q ** ((plan.d + 1) / 2) * math.sqrt(lo * hi) / len(E) ** k
                rec["hypothesis_margin"] = margin
                audits = nu_deviation_audits(dom, E, form, k, graphs)
                failures = sum(1 for a in audits if not a.ok)
                rec["audit_failures"] = failures
                rec["max_audit_gap_used"] = max(
                    (a.deviation / a.bound if a.bound else 0.0) for a in audits)
                hard_failures += failures
            else:
                rec["rel_deviation"] = None
                rec["hypothesis_margin"] = None
                rec["audit_failures"] = 0
            records.append(rec)
    nonempty = [r for r in records if r["size"] > 0]
    aggregates = {
        "coverage_rate_star": (sum(1 for r in records if r["covers_Fq_star"])
                               / len(records)) if records else None,
        "mean_rel_deviation": (sum(r["rel_deviation"] for r in nonempty)
                               / len(nonempty)) if nonempty else None,
        "threshold": plan.threshold(),
        "sizes": sizes,
    }
    return ExperimentReport(kind="coverage", plan=plan.as_dict(), stamp=_stamp(plan),
                            regularity=reg.as_dict(), records=records,
                            aggregates=aggregates, hard_failures=hard_failures)


def energy_bound_experiment(plan: ExperimentPlan) -> ExperimentReport:
    """Measured constants in the energy growth bounds for subsets of a variety.

    Trials whose subset violates |E| > q^{(d-1)/2} are recorded as skipped.
    Even k >= 4 additionally runs the hard multiset-mixing audit."""
    ctx, dom, variety, reg = _setup(plan)
    ks = plan.ks or (plan.k,)
    records = []
    hard_failures = 0
    q = ctx.q
    hypothesis_floor = q ** ((plan.d - 1) / 2)
    sizes = plan.resolve_sizes(variety.size)
    for size_index, size in enumerate(sizes):
        for trial in range(plan.trials):
            E = sample_subset(variety, size, plan.seed, trial)
            rec = {"size_index": size_index, "trial": trial, "size": len(E)}
            if len(E) <= hypothesis_floor:
                rec["skipped"] = "SubsetTooSmall"
                records.append(rec)
                continue
            for k in ks:
                if k % 2 == 0:
                    if k == 2:
                        lam2 = lambda_k(dom, E, 2)
                        rec["k2_identity_ok"] = (lam2 == len(E))
                        if lam2 != len(E):
                            hard_failures += 1
                        continue
                    rr = energy_recursion_ratio(dom, E, k)
                    rec[f"k{k}_energy"] = rr["k_energy"]
                    rec[f"k{k}_ratio"] = rr["ratio"]
                    audit = energy_growth_audit(dom, variety, E, k)
                    rec[f"k{k}_audit_ok"] = audit.ok
                    if not audit.ok:
                        hard_failures += 1
                else:
                    lo = lambda_k(dom, E, k - 1)
                    hi = lambda_k(dom, E, k + 1)
                    prod = lo * hi
                    bound = (q ** ((plan.d - 1) * (k - 2)) * len(E) ** 2
                             + q ** (((plan.d - 1) * (k - 3) - 2) / 2) * len(E) ** (k + 1)
                             + len(E) ** (2 * k - 2) / q ** 2)
                    rec[f"k{k}_energy_product"] = prod
                    rec[f"k{k}_ratio"] = float(prod) / bound if bound else math.inf
            records.append(rec)
    ratios = {}
    for k in ks:
        vals = [r[f"k{k}_ratio"] for r in records if f"k{k}_ratio" in r]
        if vals:
            ratios[str(k)] = {"mean": sum(vals) / len(vals), "max": max(vals)}
    aggregates = {"ratios": ratios, "sizes": sizes,
                  "hypothesis_floor": hypothesis_floor}
    return ExperimentReport(kind="energy", plan=plan.as_dict(), stamp=_stamp(plan),
                            regularity=reg.as_dict(), records=records,
                            aggregates=aggregates, hard_failures=hard_failures)


def sumset_experiment(plan: ExperimentPlan) -> ExperimentReport:
    """Shifted distance-set growth |X + Delta| with the exact second-moment
    lower bound, hypothesis margins, and hard mixing/Cauchy-Schwarz audits."""
    ctx, dom, variety, reg = _setup(plan)
    pspec = diagonal_poly(ctx, plan.d, plan.s, plan.coeffs)
    graph, _check = affine_cayley_spectrum(ctx, pspec, plan.d)
    records = []
    hard_failures = 0
    q, k = ctx.q, plan.k
    sizes = plan.resolve_sizes(variety.size)
    for size_index, size in enumerate(sizes):
        for trial in range(plan.trials):
            E = sample_subset(variety, size, plan.seed, trial)
            for x_size in plan.x_sizes:
                X = sample_scalar_subset(q, x_size, plan.seed, trial)
                rec = {"size_index": size_index, "trial": trial,
                       "size": len(E), "x_size": len(X)}
                ds = delta_set(dom, E, pspec, k)
                ss = sumset(ctx, X, ds.values)
                rec["delta_size"] = len(ds.values)
                rec["sumset_size"] = len(ss)
                rec["verdict_cq"] = len(ss) >= plan.c * q
                if len(E) > 0:
                    table = nu_P_k(dom, E, X, pspec, k)
                    bound = sumset_lower_bound(table, len(X), len(E), k)
                    rec["cs_bound"] = float(bound)
                    rec["cs_bound_ok"] = len(ss) >= bound
                    if len(ss) < bound:
                        hard_failures += 1
                    audit = second_moment_audit(dom, E, X, pspec, k, graph=graph)
                    rec["second_moment"] = audit.detail["second_moment"]
                    rec["mixing_audit_ok"] = audit.ok
                    if not audit.ok:
                        hard_failures += 1
                    rec["hypothesis_margin"] = (
                        len(X) * len(E) ** (2 * k - 2)
                        / q ** ((plan.d - 1) * (k - 1) + 2))
                else:
                    rec["cs_bound"] = 0.0
                    rec["cs_bound_ok"] = True
                    rec["hypothesis_margin"] = 0.0
                records.append(rec)
    rates = {}
    if records:
        rates["verdict_rate"] = sum(1 for r in records if r["verdict_cq"]) / len(records)
    aggregates = {"sizes": sizes, "lambda_affine": graph.lambda_second, **rates}
    return ExperimentReport(kind="sumset", plan=plan.as_dict(), stamp=_stamp(plan),
                            regularity=reg.as_dict(), records=records,
                            aggregates=aggregates, hard_failures=hard_failures)
