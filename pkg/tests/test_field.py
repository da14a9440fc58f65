from itertools import product

import pytest
from hypothesis import given, strategies as st

from hermskew.field import (
    ZERO,
    DivideByZero,
    FieldTooLarge,
    NonPrime,
    build_field,
    field_for_q,
    field_info,
    is_primitive,
    nu,
    smallest_primitive_poly,
)

SMALL = [(2, 1), (3, 1), (2, 2), (5, 1)]


# independent polynomial arithmetic over GF(p), coefficient lists constant term first

def _mulmod(a, b, mod, p):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = (out[i + j] + x * y) % p
    d = len(mod) - 1
    for k in range(len(out) - 1, d - 1, -1):
        c = out[k]
        if c:
            for i in range(d + 1):
                out[k - d + i] = (out[k - d + i] - c * mod[i]) % p
    return (out + [0] * d)[:d]


def _order_of_x(mod, p):
    d = len(mod) - 1
    one = [1] + [0] * (d - 1)
    x = [0, 1] + [0] * (d - 2)
    cur = list(x)
    for k in range(1, p**d):
        if cur == one:
            return k
        cur = _mulmod(cur, x, mod, p)
    return None


def brute_smallest_primitive(p, d):
    for coeffs in product(range(p), repeat=d):
        mod = list(coeffs) + [1]
        if mod[0] == 0:
            continue
        if _order_of_x(mod, p) == p**d - 1:
            return tuple(mod)


@pytest.mark.parametrize("p,e", SMALL)
def test_modulus_is_smallest_primitive(p, e):
    F = build_field(p, e)
    assert tuple(F.modulus) == brute_smallest_primitive(p, 2 * e)
    assert tuple(F.modulus) == smallest_primitive_poly(p, 2 * e)


def test_known_moduli():
    assert tuple(build_field(2, 1).modulus) == (1, 1, 1)
    assert tuple(build_field(3, 1).modulus) == (2, 1, 1)
    assert tuple(build_field(2, 2).modulus) == (1, 0, 0, 1, 1)


def test_is_primitive_rejects_reducible():
    assert not is_primitive([1, 0, 1], 2)  # (x+1)^2
    assert not is_primitive([1, 1, 1, 1, 1], 2)  # x^5 = 1, order 5


@pytest.mark.parametrize("p,e", SMALL)
def test_mu_order(p, e):
    F = build_field(p, e)
    assert field_info(F)["mu_order"] == F.order - 1
    assert sorted(F.pow(F.mu, k) for k in range(F.order - 1)) == list(range(F.order - 1))


def test_errors():
    with pytest.raises(NonPrime):
        build_field(6, 1)
    with pytest.raises(FieldTooLarge):
        build_field(2, 17)
    F = build_field(3, 1)
    with pytest.raises(DivideByZero):
        F.div(0, ZERO)
    with pytest.raises(ZeroDivisionError):
        F.inv(ZERO)


def test_small_examples():
    F4 = build_field(2, 1)
    assert F4.pow(F4.mu, 3) == 0
    for x in F4.elements():
        assert F4.add(x, x) == ZERO
    F9 = build_field(3, 1)
    assert F9.pow(F9.mu, 4) == F9.neg_one
    assert F9.add(4, 0) == ZERO
    assert F4.frobenius(1, 1) == 2


@pytest.mark.parametrize("p,e", SMALL)
def test_matches_polynomial_arithmetic(p, e):
    # codes are the coefficient vectors of the residues in base p
    F = build_field(p, e)
    d = 2 * e
    mod = list(F.modulus)

    def vec(a):
        c = F.to_code(a)
        return [(c // p**i) % p for i in range(d)]

    for a in F.elements():
        for b in F.elements():
            assert vec(F.add(a, b)) == [(x + y) % p for x, y in zip(vec(a), vec(b))]
            assert vec(F.mul(a, b)) == _mulmod(vec(a), vec(b), mod, p)


@pytest.mark.parametrize("q", [2, 3, 4])
def test_field_axioms_exhaustive(q):
    F = field_for_q(q)
    els = F.elements()
    for a in els:
        assert F.add(a, F.neg(a)) == ZERO
        if a != ZERO:
            assert F.mul(a, F.inv(a)) == 0
        for b in els:
            assert F.add(a, b) == F.add(b, a)
            assert F.mul(a, b) == F.mul(b, a)
            assert F.sub(F.add(a, b), b) == a
            if b != ZERO:
                assert F.mul(F.div(a, b), b) == a


@given(st.sampled_from([2, 3, 4, 5, 7, 8, 9]), st.data())
def test_field_axioms_random(q, data):
    F = field_for_q(q)
    el = st.sampled_from(F.elements())
    a, b, c = data.draw(el), data.draw(el), data.draw(el)
    assert F.add(F.add(a, b), c) == F.add(a, F.add(b, c))
    assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))
    assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
    n = data.draw(st.integers(0, 50))
    expect = 0
    for _ in range(n):
        expect = F.mul(expect, a)
    assert F.pow(a, n) == expect


@pytest.mark.parametrize("q", [2, 3, 4])
def test_frobenius(q):
    F = field_for_q(q)
    e = F.e
    fixed = []
    for a in F.elements():
        assert F.frobenius(F.frobenius(a, e), e) == a
        assert F.frobenius(a, 1) == F.pow(a, F.p)
        if F.frobenius(a, e) == a:
            fixed.append(a)
        for b in F.elements():
            assert F.frobenius(F.add(a, b), 1) == F.add(F.frobenius(a, 1), F.frobenius(b, 1))
            assert F.frobenius(F.mul(a, b), 1) == F.mul(F.frobenius(a, 1), F.frobenius(b, 1))
    assert F.frobenius(ZERO, 3) == ZERO
    assert len(fixed) == q
    assert all(F.in_subfield(a) for a in fixed)


@pytest.mark.parametrize("q", [2, 3, 4])
def test_nu(q):
    F = field_for_q(q)
    v = nu(F)
    assert v == {2: 1, 3: 1, 4: 3}[q]
    assert F.pow(v, q + 1) == F.neg_one
    assert F.pow(v, 2 * (q + 1)) == 0


@pytest.mark.parametrize("q", [2, 3, 4])
def test_norm(q):
    F = field_for_q(q)
    assert F.norm(ZERO) == ZERO
    counts = {}
    for a in F.elements():
        if a == ZERO:
            continue
        n = F.norm(a)
        assert F.in_subfield(n)
        counts[n] = counts.get(n, 0) + 1
    assert len(counts) == q - 1
    assert set(counts.values()) == {q + 1}


def test_modulus_override():
    # x^2 + x + 2 is also primitive over GF(3)
    F = build_field(3, 1, (2, 1, 1))
    G = build_field(3, 1, (2, 2, 1))
    assert tuple(G.modulus) == (2, 2, 1)
    assert F.pow(F.nu, 4) == F.neg_one
    assert G.pow(G.nu, 4) == G.neg_one
    with pytest.raises(Exception):
        build_field(3, 1, (1, 0, 1))
