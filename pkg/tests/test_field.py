import itertools
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fqspectra.errors import (
    DegreeTooLargeError,
    EvenCharacteristicError,
    InverseOfZeroError,
    NotPrimeError,
    OrderTooLargeError,
)
from fqspectra.field import FieldContext, smallest_irreducible


def _poly_eval(coeffs, x, p):
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * x + c) % p
    return acc


def test_prime_field_basics():
    ctx = FieldContext(3)
    assert ctx.q == 3
    assert list(ctx.elements()) == [0, 1, 2]
    assert ctx.mul(2, 2) == 1
    ctx5 = FieldContext(5)
    assert ctx5.inv(2) == 3


def test_f9_modulus_is_smallest_irreducible():
    ctx = FieldContext(3, 2)
    assert ctx.modulus == (1, 0, 1)  # x^2 + 1
    # independent scan: no smaller monic quadratic with nonzero constant term
    # is irreducible over F_3
    for b, c in [(0, 0)]:
        assert any(_poly_eval((c, b, 1), x, 3) == 0 for x in range(3))


def test_f9_multiplication_example():
    ctx = FieldContext(3, 2)
    x = ctx.encode([0, 1])
    assert ctx.mul(x, x) == 2  # x^2 = -1 mod x^2+1


@pytest.mark.parametrize("p,n,exc", [
    (2, 1, EvenCharacteristicError),
    (9, 1, NotPrimeError),
    (3, 5, DegreeTooLargeError),
    (1031, 2, OrderTooLargeError),
])
def test_construction_errors(p, n, exc):
    with pytest.raises(exc):
        FieldContext(p, n)


def test_inverse_of_zero():
    with pytest.raises(InverseOfZeroError):
        FieldContext(5).inv(0)


@pytest.mark.parametrize("p,n", [(3, 1), (3, 2), (5, 2), (3, 3), (7, 1)])
def test_every_nonzero_element_invertible(p, n):
    ctx = FieldContext(p, n)
    for a in range(1, ctx.q):
        assert ctx.mul(a, ctx.inv(a)) == 1


@pytest.mark.parametrize("p,n", [(3, 2), (5, 2), (3, 4), (7, 3)])
def test_modulus_is_irreducible_by_independent_check(p, n):
    coeffs = smallest_irreducible(p, n)
    assert len(coeffs) == n + 1 and coeffs[-1] == 1 and coeffs[0] != 0
    assert all(_poly_eval(coeffs, x, p) != 0 for x in range(p))
    if n == 4:
        # no quadratic factor: long-divide by every monic quadratic
        for b, c in itertools.product(range(p), repeat=2):
            q3 = coeffs[4]
            q2 = (coeffs[3] - b * q3) % p
            q1 = (coeffs[2] - b * q2 - c * q3) % p
            r1 = (coeffs[1] - b * q1 - c * q2) % p
            r0 = (coeffs[0] - c * q1) % p
            assert (r0, r1) != (0, 0)


def test_character_fixed_values():
    ctx = FieldContext(3)
    assert ctx.char(0) == 1.0
    assert abs(ctx.char(1) + ctx.char(2) + 1) < 1e-12
    f9 = FieldContext(3, 2)
    assert abs(sum(f9.char(v) for v in f9.elements())) < 1e-10


@pytest.mark.parametrize("p,n", [(3, 1), (3, 2), (5, 1), (5, 2), (3, 3), (13, 1)])
def test_character_multiplicative_over_addition(p, n):
    ctx = FieldContext(p, n)
    rng = random.Random(20260810)
    for _ in range(1000):
        x = rng.randrange(ctx.q)
        y = rng.randrange(ctx.q)
        assert abs(ctx.char(ctx.add(x, y)) - ctx.char(x) * ctx.char(y)) < 1e-10


@pytest.mark.parametrize("p,n", [(3, 1), (3, 2), (5, 2), (3, 3), (11, 1)])
def test_character_orthogonality(p, n):
    ctx = FieldContext(p, n)
    idx = np.arange(ctx.q, dtype=np.int64)
    for m in range(ctx.q):
        total = ctx.char_vec(ctx.mul_vec(idx, np.int64(m))).sum()
        if m == 0:
            assert total == ctx.q
        else:
            assert abs(total) < 1e-8


@pytest.mark.parametrize("p,n", [(3, 2), (5, 2), (3, 3), (3, 4)])
def test_trace_fibers_have_equal_size(p, n):
    ctx = FieldContext(p, n)
    fibers = np.bincount(ctx.trace_table, minlength=p)
    assert fibers.tolist() == [p ** (n - 1)] * p
    assert np.all(ctx.trace_table < p)


@pytest.mark.parametrize("p,n", [(3, 2), (5, 2), (7, 2)])
def test_frobenius_is_additive(p, n):
    ctx = FieldContext(p, n)
    rng = random.Random(7)
    for _ in range(200):
        x, y = rng.randrange(ctx.q), rng.randrange(ctx.q)
        lhs = ctx.pow(ctx.add(x, y), p)
        rhs = ctx.add(ctx.pow(x, p), ctx.pow(y, p))
        assert lhs == rhs


@given(st.integers(0, 8), st.integers(0, 8), st.integers(0, 8))
@settings(max_examples=200, deadline=None)
def test_field_axioms_f9(a, b, c):
    ctx = FieldContext(3, 2)
    assert ctx.add(a, b) == ctx.add(b, a)
    assert ctx.mul(a, b) == ctx.mul(b, a)
    assert ctx.mul(a, ctx.mul(b, c)) == ctx.mul(ctx.mul(a, b), c)
    assert ctx.mul(a, ctx.add(b, c)) == ctx.add(ctx.mul(a, b), ctx.mul(a, c))
    assert ctx.add(a, 0) == a and ctx.mul(a, 1) == a
    assert ctx.add(a, ctx.neg(a)) == 0


@pytest.mark.parametrize("p,n", [(3, 2), (5, 2), (3, 3)])
def test_log_table_path_matches_polynomial_path(p, n):
    ctx = FieldContext(p, n)
    assert ctx.generator is not None
    for a in range(ctx.q):
        for b in range(ctx.q):
            assert ctx.mul(a, b) == ctx._mul_poly(a, b)


def test_vectorized_ops_match_scalar():
    rng = random.Random(3)
    for p, n in [(3, 1), (3, 2), (5, 2), (3, 3)]:
        ctx = FieldContext(p, n)
        A = np.array([rng.randrange(ctx.q) for _ in range(64)], dtype=np.int64)
        B = np.array([rng.randrange(ctx.q) for _ in range(64)], dtype=np.int64)
        for vec, scal in [(ctx.add_vec, ctx.add), (ctx.sub_vec, ctx.sub),
                          (ctx.mul_vec, ctx.mul)]:
            got = vec(A, B)
            want = [scal(int(a), int(b)) for a, b in zip(A, B)]
            assert got.tolist() == want
        if n >= 2:
            got = ctx._mul_vec_poly(A, B)
            want = [ctx._mul_poly(int(a), int(b)) for a, b in zip(A, B)]
            assert got.tolist() == want


def test_pow_table():
    ctx = FieldContext(5)
    t = ctx.pow_table(3)
    assert t.tolist() == [pow(v, 3, 5) for v in range(5)]
    f9 = FieldContext(3, 2)
    t9 = f9.pow_table(2)
    assert all(t9[v] == f9.mul(v, v) for v in range(9))
