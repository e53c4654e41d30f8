from collections import Counter

import numpy as np
import pytest
from hypothesis import given, strategies as st

from classtower.artin import (
    TRIVIAL_KERNEL,
    ArtinPattern,
    Transfer,
    artin_pattern,
    commutator_quotient,
    cycle_type,
    kernel_code,
    layer_count,
    layer_subgroups,
    transfer_kernel,
)
from classtower.pcgroup import closure, derived_subgroup
from classtower.towers import group_G


def random_transversal(G, H, rng):
    """One random element from each right coset H r."""
    seen = np.zeros(G.order, dtype=bool)
    reps = []
    for x in rng.permutation(G.order):
        if not seen[x]:
            h = int(rng.choice(H.elements))
            r = int(G.mul(h, int(x)))
            reps.append(r)
            seen[G.mul(H.elements, r)] = True
    rng.shuffle(reps)
    return reps


@pytest.mark.parametrize("m, n", [(1, 1), (2, 1), (1, 2), (2, 2)])
def test_layers(m, n):
    G = group_G(m, n)
    assert layer_count(G) == 3
    sizes = [len(layer_subgroups(G, k)) for k in range(4)]
    assert sizes == [1, 7, 7, 1]
    Gp = derived_subgroup(G.whole())
    for k in range(4):
        for H in layer_subgroups(G, k):
            assert Gp <= H and H.index_in(G.whole()) == 2**k
    assert layer_subgroups(G, 0)[0] == G.whole()
    assert layer_subgroups(G, 3)[0] == Gp
    with pytest.raises(ValueError):
        layer_subgroups(G, 4)


def test_layer_order_is_canonical():
    G = group_G(2, 2)
    A = commutator_quotient(G)
    keys = [sorted({int(A.reps[A.label[x]]) for x in H.elements}) for H in layer_subgroups(G, 1)]
    assert keys == sorted(keys)


def test_transfer_requires_subgroup_above_derived():
    G = group_G(1, 1)
    small = closure(G, [G.generators[0]])
    with pytest.raises(ValueError):
        Transfer(G, small)


def test_transversal_validation():
    G = group_G(1, 1)
    H = layer_subgroups(G, 1)[0]
    with pytest.raises(ValueError):
        Transfer(G, H, [0, int(H.elements[1])])  # same coset twice
    with pytest.raises(ValueError):
        Transfer(G, H, [0])


def test_transfer_to_whole_group_is_projection():
    G = group_G(2, 1)
    T = Transfer(G, G.whole())
    A = commutator_quotient(G)
    x = np.arange(G.order)
    assert np.array_equal(T(x), A.reps[A.label[x]])


def test_total_kernel_to_derived_subgroup():
    G = group_G(1, 1)
    Gp = derived_subgroup(G.whole())
    assert transfer_kernel(G, Gp).order == G.order
    assert kernel_code(G, transfer_kernel(G, Gp)) == 0


def test_kernel_codes():
    G = group_G(1, 1)
    Gp = derived_subgroup(G.whole())
    assert kernel_code(G, Gp) == TRIVIAL_KERNEL
    for i, H in enumerate(layer_subgroups(G, 1), start=1):
        assert kernel_code(G, H) == i
    code = kernel_code(G, layer_subgroups(G, 2)[0])
    assert isinstance(code, str) and code.startswith("<") and code != TRIVIAL_KERNEL


@pytest.mark.parametrize("m, n", [(1, 1), (2, 1), (1, 2), (3, 2)])
def test_transfer_homomorphism_and_transversal_independence(m, n):
    G = group_G(m, n)
    rng = np.random.default_rng(100 * m + n)
    for k in (1, 2, 3):
        for H in layer_subgroups(G, k):
            base = Transfer(G, H)
            x, y = rng.integers(0, G.order, size=(2, 200))
            # T(xy) = T(x) T(y) modulo H'
            assert np.array_equal(base(G.mul(x, y)), base.reduce[G.mul(base(x), base(y))])
            values = base(np.arange(G.order))
            for _ in range(3):
                other = Transfer(G, H, random_transversal(G, H, rng))
                assert np.array_equal(other(np.arange(G.order)), values)


def test_transfer_factors_through_abelianization():
    G = group_G(2, 2)
    Gp = derived_subgroup(G.whole())
    for H in layer_subgroups(G, 1):
        T = Transfer(G, H)
        for g in (int(v) for v in Gp.elements):
            assert T(g) == 0


def test_pattern_text_round_trip():
    pattern = artin_pattern(group_G(1, 1))
    text = pattern.to_text()
    assert ArtinPattern.from_text(text) == pattern
    assert text.splitlines()[1] == \
        "tau1 = [(2,2),(2,1),(2,1),(1,1,1),(1,1,1),(2,1),(2,1)]; kappa1 = (1 2 3 5 4 6 7)"
    assert artin_pattern(group_G(1, 1)).to_text() == text  # stable


def test_pattern_text_with_explicit_kernels():
    p = ArtinPattern(((( 1, 1),), ((2, 1), (1,))), (("<0>",), ("<0,5>", 0)))
    assert ArtinPattern.from_text(p.to_text()) == p


def test_pattern_shape_validation():
    with pytest.raises(ValueError):
        ArtinPattern((((1,),),), ())
    with pytest.raises(ValueError):
        ArtinPattern((((1,), (1,)),), ((0,),))
    with pytest.raises(ValueError):
        ArtinPattern.from_text("tau0 = [(1)]; kappa1 = (0)")


def test_cycle_type():
    assert cycle_type((1, 2, 3, 5, 4, 6, 7)) == Counter({1: 5, 2: 1})
    assert cycle_type((1, 3, 2, 5, 4, 7, 6)) == Counter({1: 1, 2: 3})
    assert cycle_type((2, 3, 1)) == Counter({3: 1})
    assert cycle_type((1, 1, 2, 2)) is None
    assert cycle_type((0, 1)) is None


@given(st.permutations(list(range(1, 8))))
def test_cycle_type_sums_to_length(perm):
    ct = cycle_type(tuple(perm))
    assert sum(length * count for length, count in ct.items()) == 7
