import itertools
import re
from collections import Counter

import pytest
from hypothesis import given, strategies as st

from classtower.arith import profile_radicand
from classtower.artin import TRIVIAL_KERNEL, artin_pattern, cycle_type
from classtower.towers import (
    Family,
    ThreeStageParams,
    TowerParams,
    build_G,
    group_G,
    params_from_radicand,
    pattern_diffs,
    predicted_pattern2,
    predicted_pattern3,
    three_stage_identifiers,
    tree_position,
)

params = st.builds(TowerParams, st.integers(1, 40), st.integers(1, 40))


def test_params_validation():
    with pytest.raises(ValueError):
        TowerParams(0, 1)
    with pytest.raises(ValueError):
        build_G(1, 0)


@pytest.mark.parametrize("d, mn", [(255, (1, 1)), (935, (1, 2)), (1599, (2, 2)), (1695, (2, 1)), (24415, (3, 3))])
def test_params_from_radicand(d, mn):
    assert params_from_radicand(profile_radicand(d)) == TowerParams(*mn)


@pytest.mark.parametrize("mn, family, j, k, label, symbol, sg", [
    ((1, 1), "mainline-35", 0, 0, "<32,35>", "M_{0,0}", "<32,35>"),
    ((3, 1), "mainline-35", 0, 2, "<32,35>(-#1;1)^2", "M_{0,2}", "<128,984>"),
    ((1, 2), "sequence-V", 0, 0, "<32,34>-#1;2", "V_{0,0}", "<64,175>"),
    ((2, 2), "mainline-34", 0, 0, "<32,34>-#2;2", "M_{1,0}", "<128,445>"),
    ((3, 2), "mainline-34", 0, 1, "<32,34>-#2;2(-#1;1)^1", "M_{1,1}", "<256,5509>"),
    ((2, 3), "sequence-V", 1, 0, "<32,34>(-#2;1)^1-#1;2", "V_{1,0}", "<256,5504>"),
    ((3, 3), "mainline-34", 1, 0, "<32,34>(-#2;1)^1-#2;2", "M_{2,0}", "<512,30600>"),
    ((6, 6), "mainline-34", 4, 0, "<32,34>(-#2;1)^4-#2;2", "M_{5,0}", None),
])
def test_tree_positions(mn, family, j, k, label, symbol, sg):
    pos = tree_position(TowerParams(*mn))
    assert (pos.family, pos.j, pos.k, pos.label, pos.symbol, pos.smallgroup_id) == (family, j, k, label, symbol, sg)


def test_smallgroup_orders_match_group_orders():
    for m, n in itertools.product(range(1, 8), repeat=2):
        sg = tree_position(TowerParams(m, n)).smallgroup_id
        if sg is not None:
            assert int(sg[1:].split(",")[0]) == 2 ** (m + n + 3)


def test_tree_position_injective():
    labels = {tree_position(TowerParams(m, n)).label for m, n in itertools.product(range(1, 30), repeat=2)}
    assert len(labels) == 29 * 29


LABEL = re.compile(r"<32,3[45]>((\(-#[12];1\)\^\d+)|-#[12];[12])*")


@given(params)
def test_label_grammar(p):
    pos = tree_position(p)
    assert LABEL.fullmatch(pos.label)
    # each step raises log2 of the order by its step size
    sizes = sum(int(s) * (int(e) if e else 1)
                for s, e in re.findall(r"-#([12]);\d\)?(?:\^(\d+))?", pos.label))
    assert 5 + sizes == p.m + p.n + 3


@given(params)
def test_predicted_pattern_shape(p):
    pat = predicted_pattern2(p)
    assert [len(t) for t in pat.ttt] == [1, 7, 7, 1]
    assert pat.ttt[0] == ((1, 1, 1),)
    assert pat.ttt[3] == (tuple(sorted((p.m, p.n), reverse=True)),)
    assert pat.tkt[0] == (TRIVIAL_KERNEL,) and pat.tkt[2] == (0,) * 7 and pat.tkt[3] == (0,)
    expected = Counter({1: 5, 2: 1}) if p.n == 1 else Counter({1: 1, 2: 3})
    assert cycle_type(pat.tkt[1]) == expected


def test_predicted_examples():
    assert predicted_pattern2(TowerParams(1, 1)).targets(1) == Counter({(2, 1): 4, (1, 1, 1): 2, (2, 2): 1})
    assert (3, 1) in predicted_pattern2(TowerParams(1, 2)).targets(2)


@pytest.mark.parametrize("m, n", [(1, 1), (3, 1), (2, 3), (3, 2)])
def test_computed_pattern_matches_prediction(m, n):
    p = TowerParams(m, n)
    assert pattern_diffs(artin_pattern(group_G(m, n)), p) == []


def test_pattern_diffs_detects_mismatch():
    computed = artin_pattern(group_G(2, 1))
    assert any(d.startswith("tau3") for d in pattern_diffs(computed, TowerParams(3, 1)))
    assert any(d.startswith("kappa1") for d in pattern_diffs(computed, TowerParams(1, 2)))


@pytest.mark.parametrize("text, family", [("E6", Family.Q), ("e14", Family.Q), ("49", Family.Q),
                                          ("E8-E9", Family.U), ("U", Family.U), ("<729,54>", Family.U)])
def test_family_parse(text, family):
    assert Family.parse(text) is family


def test_family_parse_rejects():
    with pytest.raises(ValueError):
        Family.parse("E7")


def test_three_stage_examples():
    assert three_stage_identifiers(ThreeStageParams(2, Family.U, 2)) == ("<729,54>-#2;2", "<729,54>-#1;2")
    g, meta = three_stage_identifiers(ThreeStageParams(3, Family.Q, 4))
    assert g == "<729,49>(-#2;1-#1;1)^1-#2;4"
    assert meta == "<729,49>(-#1;1-#1;1)^1-#1;4"
    with pytest.raises(ValueError):
        ThreeStageParams(1, Family.Q, 4)
    with pytest.raises(ValueError):
        ThreeStageParams(2, Family.Q, 2)


@given(st.integers(2, 40), st.sampled_from([(Family.Q, v) for v in (4, 5, 6)] + [(Family.U, v) for v in (2, 4, 6)]))
def test_three_stage_label_substitution(u, fv):
    g, meta = three_stage_identifiers(ThreeStageParams(u, *fv))
    assert meta == g.replace("(-#2;1-#1;1)", "(-#1;1-#1;1)")[:-3] + f"1;{fv[1]}"


def test_three_stage_patterns():
    q = predicted_pattern3(ThreeStageParams(2, Family.Q, 4))
    u = predicted_pattern3(ThreeStageParams(2, Family.U, 2))
    assert q.ttt[1] == ((3, 2), (1, 1, 1), (2, 1), (2, 1))
    assert u.ttt[1] == ((2, 1), (3, 2), (2, 1), (2, 1))
    for fam, variants, allowed in ((Family.Q, (4, 5, 6), {0, 1}), (Family.U, (2, 4, 6), {2, 3})):
        for v in variants:
            k1 = predicted_pattern3(ThreeStageParams(5, fam, v)).tkt[1]
            fixed = sum(1 for i, c in enumerate(k1, start=1) if c == i)
            two_cycles = sum(1 for i, c in enumerate(k1, start=1) if c != i and k1[c - 1] == i)
            assert fixed in allowed and two_cycles == 0
            assert cycle_type(k1) is None
