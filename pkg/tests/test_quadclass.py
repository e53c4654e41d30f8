import itertools
import math

import pytest
from hypothesis import given, strategies as st

from classtower.quadclass import (
    BinaryForm,
    class_group,
    class_number,
    compose,
    field_discriminant,
    form_power,
    principal_form,
    reduce,
    reduced_forms,
    two_class_number,
)

# class numbers of imaginary quadratic fields, from standard tables
KNOWN_H = {-3: 1, -4: 1, -7: 1, -8: 1, -15: 2, -20: 2, -23: 3, -47: 5, -56: 4, -71: 7,
           -84: 4, -163: 1, -199: 9, -420: 8, -5460: 16, -3299: 27, -4027: 9}  # -4027 has type (3,3)

discriminants = st.integers(3, 20_000).map(lambda k: -k).filter(lambda D: D % 4 in (0, 1))


def brute_force_count(D: int) -> int:
    """Primitive reduced forms by scanning (a, b) with c determined."""
    count = 0
    for a in range(1, math.isqrt(-D // 3) + 2):
        for b in range(-a + 1, a + 1):
            if (b * b - D) % (4 * a):
                continue
            c = (b * b - D) // (4 * a)
            if c < a or (c == a and b < 0) or math.gcd(math.gcd(a, b), c) != 1:
                continue
            count += 1
    return count


@pytest.mark.parametrize("D, h", sorted(KNOWN_H.items()))
def test_known_class_numbers(D, h):
    assert class_number(D) == h


def test_reduced_forms_small_cases():
    assert reduced_forms(-15) == [BinaryForm(1, 1, 4), BinaryForm(2, 1, 2)]
    assert reduced_forms(-20) == [BinaryForm(1, 0, 5), BinaryForm(2, 2, 3)]
    assert all(f.is_reduced() for f in reduced_forms(-9999))


def test_non_primitive_forms_excluded():
    # (2,2,2) has discriminant -12 but is not primitive
    assert BinaryForm(2, 2, 2) not in reduced_forms(-12)
    assert class_number(-12) == 1


@pytest.mark.parametrize("D", [0, 5, -5, -6, -1])
def test_invalid_discriminants(D):
    with pytest.raises(ValueError):
        reduced_forms(D)


def test_reduce_rejects_indefinite():
    with pytest.raises(ValueError):
        reduce(BinaryForm(1, 3, 1))


def test_compose_rejects_mismatch():
    with pytest.raises(ValueError):
        compose(principal_form(-15), principal_form(-20))


@given(discriminants)
def test_principal_form_is_identity(D):
    e = principal_form(D)
    for f in reduced_forms(D)[:20]:
        assert compose(f, e) == f
        assert compose(f, f.inverse()) == e


@given(st.integers(-5000, -3), st.integers(1, 60), st.integers(-60, 60))
def test_reduce_preserves_discriminant_and_class(D, a, b):
    if (b * b - D) % (4 * a) or D % 4 not in (0, 1):
        return
    f = BinaryForm(a, b, (b * b - D) // (4 * a))
    r = reduce(f)
    assert r.discriminant == D and r.is_reduced()
    # an equivalent form reduces to the same representative
    g = BinaryForm(f.a, f.b + 2 * f.a, f.a + f.b + f.c)
    assert reduce(g) == r


def test_class_group_examples():
    assert class_group(-15).invariants == (2,)
    assert class_group(-84).invariants == (2, 2)
    assert class_group(-56).invariants == (4,)
    assert class_group(-5460).invariants == (2, 2, 2, 2)
    assert class_group(-3299).invariants == (9, 3)
    assert class_group(-4027).invariants == (3, 3)
    assert class_group(-3).invariants == ()


@given(discriminants.filter(lambda D: class_number(D) <= 120))
def test_invariants_multiply_to_order(D):
    cg = class_group(D)
    assert math.prod(cg.invariants) == cg.order == class_number(D)
    assert all(a % b == 0 for a, b in zip(cg.invariants, cg.invariants[1:]))


@given(discriminants.filter(lambda D: class_number(D) <= 60), st.integers(-30, 30))
def test_form_power_order(D, k):
    h = class_number(D)
    for f in reduced_forms(D)[:5]:
        assert form_power(f, h) == principal_form(D)
        assert form_power(f, k) == form_power(f, k + h)


def test_field_discriminant():
    assert field_discriminant(-1) == -4
    assert field_discriminant(-3) == -3
    assert field_discriminant(-17) == -68
    assert field_discriminant(-55) == -55
    with pytest.raises(ValueError):
        field_discriminant(3)
    with pytest.raises(ValueError):
        field_discriminant(-12)


def test_two_class_number():
    assert two_class_number(-17) == 4  # h(-68) = 4
    assert two_class_number(-5 * 3) == 2
    assert two_class_number(-23) == 1


def group_axioms_hold(D: int) -> bool:
    forms = reduced_forms(D)
    idx = {f: i for i, f in enumerate(forms)}
    h = len(forms)
    table = [[idx[compose(f, g)] for g in forms] for f in forms]
    e = idx[principal_form(D)]
    if any(table[e][i] != i or table[i][e] != i for i in range(h)):
        return False
    if any(e not in row for row in table):
        return False
    if any(table[i][j] != table[j][i] for i in range(h) for j in range(h)):
        return False
    for i, j, k in itertools.product(range(h), repeat=3):
        if table[table[i][j]][k] != table[i][table[j][k]]:
            return False
    return True


@pytest.mark.parametrize("D", [-15, -20, -56, -84, -104, -231, -420, -1155, -3299, -5460])
def test_group_axioms_selected(D):
    assert group_axioms_hold(D)
