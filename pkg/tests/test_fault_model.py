import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gdnc.block_code import SystematicCode, design_network_code, is_mds, min_distance, rs_generator
from gdnc.errors import BadArguments, BudgetExceeded, ShapeMismatch
from gdnc.fault_model import (
    FaultEvent,
    FaultPattern,
    GdncParams,
    all_events,
    apply_faults,
    composite_distance,
    guaranteed_diversity,
    immune_mask,
)
from gdnc.finite_field import FiniteField
from gdnc.gf_matrix import read_matrix

import oracles


def load(name):
    P, h = read_matrix(f"tests/fixtures/{name}.txt")
    return SystematicCode.from_parity(P), GdncParams(int(h["M"]), int(h["k1"]), int(h["k2"]))


def oracle_field(code):
    return oracles.PolyField(code.field.p, code.field.m, code.field.modulus)


def test_params_shape():
    p = GdncParams(3, 2, 2)
    assert (p.n, p.k, p.num_events, p.max_diversity) == (12, 6, 12, 5)
    assert p.rate == 0.5
    assert p.message_row(2, 1) == 2 and list(p.parity_cols(3)) == [4, 5]
    with pytest.raises(BadArguments):
        GdncParams(1, 1, 1)
    with pytest.raises(ShapeMismatch):
        p.check_code(design_network_code(2, 2, 2))


def test_events_are_disjoint_and_avoid_immune_blocks():
    for M, k1, k2 in [(2, 1, 1), (2, 2, 2), (3, 2, 2), (3, 1, 2)]:
        p = GdncParams(M, k1, k2)
        events = all_events(p)
        assert len(events) == len(set(events)) == k1 * M * (M - 1)
        mask = immune_mask(p)
        assert mask.sum() == M * k1 * k2
        seen = set()
        for e in events:
            ents = e.entries(p)
            assert len(ents) == k2
            assert not any(mask[r, c] for r, c in ents)
            assert seen.isdisjoint(ents)
            seen.update(ents)
        assert len(seen) == (M - 1) * M * k1 * k2


def test_event_validation():
    p = GdncParams(2, 1, 1)
    with pytest.raises(BadArguments):
        FaultPattern([FaultEvent(1, 1, 1)]).entries(p)
    with pytest.raises(BadArguments):
        FaultPattern([FaultEvent(1, 2, 2)]).entries(p)
    assert str(FaultEvent(1, 2, 1)) == "(1->2, t=1)"


def test_indicator_round_trip():
    p = GdncParams(2, 2, 2)
    chi = [1, 0, 0, 1]
    pat = FaultPattern.from_indicator(p, chi)
    assert pat.indicator(p) == chi and pat.count == 2
    with pytest.raises(BadArguments):
        FaultPattern.from_indicator(p, [1, 0])


def test_apply_faults_examples():
    p = GdncParams(2, 2, 2)
    code = design_network_code(2, 2, 2)
    assert apply_faults(code, p, FaultPattern()) is code
    everything = apply_faults(code, p, FaultPattern(all_events(p)))
    assert np.array_equal(everything.P.data != 0, immune_mask(p))
    assert min_distance(everything) == 3
    one = apply_faults(code, p, FaultPattern([FaultEvent(1, 2, 1)]))
    assert min_distance(one) == 3
    assert np.count_nonzero(code.P.data) == 16  # original untouched
    again = apply_faults(one, p, FaultPattern([FaultEvent(1, 2, 1)]))
    assert again == one


def zero_row(code, row, cols):
    return code.with_zeroed([(row, c) for c in cols])


def test_single_row_zeroing_is_exact_on_all_small_rs_codes():
    rng = np.random.default_rng(3)
    for q, (p, m) in [(4, (2, 2)), (8, (2, 3)), (16, (2, 4))]:
        F = FiniteField(p, m)
        for n in range(3, min(8, q + 1) + 1):
            for k in range(1, min(n, 5)):
                code = rs_generator(F, n, k)
                d = n - k + 1
                row = int(rng.integers(k))
                for delta in range(n - k + 1):
                    cols = rng.choice(n - k, size=delta, replace=False)
                    assert min_distance(zero_row(code, row, cols)) == d - delta


def test_zeroing_more_inside_zeroed_columns_keeps_distance():
    code = rs_generator(FiniteField(2, 3), 8, 3)
    first = zero_row(code, 0, [0, 1])
    d1 = min_distance(first)
    assert d1 == code.n - code.k + 1 - 2
    more = first.with_zeroed([(1, 0), (2, 1)])
    assert min_distance(more) == d1


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_any_zeroing_loses_at_most_its_size(seed):
    rng = np.random.default_rng(seed)
    code = rs_generator(FiniteField(2, 3), 7, 3)
    d = min_distance(code)
    count = int(rng.integers(0, 13))
    flat = rng.choice(code.k * (code.n - code.k), size=count, replace=False)
    entries = [(int(i) // (code.n - code.k), int(i) % (code.n - code.k)) for i in flat]
    assert min_distance(code.with_zeroed(entries)) >= d - count


@pytest.mark.parametrize("group", [1, 2, 3])
def test_single_row_fault_trend(group):
    code = rs_generator(FiniteField(2, 4), 10, 3)
    d = min_distance(code)
    values = []
    for faults in range(0, (code.n - code.k) // group + 1):
        cols = range(faults * group)
        values.append(min_distance(zero_row(code, 1, cols)) + faults)
    assert values[0] == d
    if group == 1:
        assert len(set(values)) == 1
    else:
        assert all(b < a for a, b in zip(values, values[1:]))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_weight_of_difference_bound(seed):
    rng = np.random.default_rng(seed)
    code = rs_generator(FiniteField(2, 3), 8, 4)
    F = code.field
    y = code.encode(rng.integers(0, 8, size=4))
    z = code.encode(rng.integers(0, 8, size=4))
    wd = np.count_nonzero(F.sub_arr(y, z))
    assert wd >= np.count_nonzero(y) - np.count_nonzero(z)


@pytest.mark.parametrize("shape", [(2, 1, 1), (2, 2, 2), (3, 1, 1), (2, 1, 2), (3, 1, 2)])
def test_designed_codes_reach_full_diversity(shape):
    p = GdncParams(*shape)
    code = design_network_code(*shape)
    res = composite_distance(code, p)
    assert res.value == p.max_diversity
    assert res.exact
    assert min_distance(apply_faults(code, p, res.witness)) + res.witness.count == res.value


FIXTURES = ["dnc_m2_gf4", "m2_k1_1_k2_1_gf4", "m2_k1_1_k2_2_gf8", "m2_k1_2_k2_2_gf8",
            "m3_k1_1_k2_1_gf8", "m3_k1_1_k2_2_gf16", "nonmds_d3_gf8",
            "nonmds_d4_near_full_gf8", "nonmds_d4_deficient_gf8"]


@pytest.mark.parametrize("name", FIXTURES)
def test_composite_distance_matches_decomposition_oracle(name):
    code, p = load(name)
    value, witness = composite_distance(code, p)
    P = code.P.data
    assert value == oracles.composite_distance(oracle_field(code), P, p.M, p.k1, p.k2)


def test_composite_without_pruning_by_brute_force():
    code, p = load("nonmds_d4_deficient_gf8")
    events = all_events(p)
    best = min(
        min_distance(apply_faults(code, p, FaultPattern(c))) + len(c)
        for r in range(len(events) + 1)
        for c in itertools.combinations(events, r)
    )
    assert composite_distance(code, p).value == best == 3


def test_non_mds_counterexamples():
    code, p = load("nonmds_d3_gf8")
    assert guaranteed_diversity(code, p) == 3
    code, p = load("nonmds_d4_deficient_gf8")
    assert guaranteed_diversity(code, p) < 4
    assert not is_mds(code)


def test_dnc_matrix_reaches_2m_minus_1():
    code, p = load("dnc_m2_gf4")
    assert guaranteed_diversity(code, p) == 3


def test_budget_and_partial_result():
    p = GdncParams(3, 2, 2)
    code = design_network_code(3, 2, 2)
    with pytest.raises(BudgetExceeded) as info:
        composite_distance(code, p, max_patterns=3)
    assert info.value.upper_bound >= p.max_diversity
    part = composite_distance(code, p, max_patterns=3, partial=True)
    assert not part.exact and part.value >= p.max_diversity
