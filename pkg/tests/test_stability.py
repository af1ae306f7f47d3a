import random
from dataclasses import replace

import pytest

from hrcsolve import (
    Matching,
    blocking_pairs_bis,
    blocking_pairs_mm,
    count_blocking_pairs,
    enumerate_matchings,
    is_stable_bis,
    is_stable_mm,
    parse_matching,
    verify_blocking_pair,
)


def brief(bps):
    return [bp.describe() for bp in bps]


def test_every_matching_blocked(no_stable_market):
    inst = no_stable_market
    empty = Matching()
    assert brief(blocking_pairs_mm(inst, empty)) == [
        "Pair3a a,b z1,z2 pos=1",
        "Single c z1 pos=1",
        "Single c z2 pos=2",
    ]
    m1 = parse_matching("a z1\nb z2\n", inst)
    assert brief(blocking_pairs_mm(inst, m1)) == ["Single c z2 pos=2"]
    m2 = parse_matching("c z1\n", inst)
    assert brief(blocking_pairs_mm(inst, m2)) == ["Pair3a a,b z1,z2 pos=1"]
    m3 = parse_matching("c z2\n", inst)
    assert brief(blocking_pairs_mm(inst, m3)) == ["Single c z1 pos=1"]


def test_shared_hospital_couple(bis_only_market):
    inst = bis_only_market
    single_in = parse_matching("r3 h\n", inst)
    couple_in = parse_matching("r1 h\nr2 h\n", inst)
    assert brief(blocking_pairs_mm(inst, Matching())) == [
        "Pair3b r1,r2 h,h pos=1",
        "Single r3 h pos=1",
    ]
    assert brief(blocking_pairs_mm(inst, single_in)) == ["Pair3c r1,r2 h,h pos=1"]
    assert brief(blocking_pairs_mm(inst, couple_in)) == ["Single r3 h pos=1"]
    assert blocking_pairs_bis(inst, single_in) == []
    assert brief(blocking_pairs_bis(inst, couple_in)) == ["Bis1 r3 h pos=1"]
    assert is_stable_bis(inst, single_in)
    assert not is_stable_mm(inst, single_in)


def test_competing_couples(mm_only_market):
    inst = mm_only_market
    first_in = parse_matching("r1 h1\nr2 h1\n", inst)
    second_in = parse_matching("r3 h1\nr4 h1\n", inst)
    split = parse_matching("r3 h1\nr4 h2\n", inst)
    assert brief(blocking_pairs_mm(inst, first_in)) == ["Pair3a r3,r4 h1,h2 pos=2"]
    assert blocking_pairs_mm(inst, second_in) == []
    assert brief(blocking_pairs_mm(inst, split)) == ["CoupleSecond r3,r4 h1,h1 pos=1"]
    assert brief(blocking_pairs_bis(inst, first_in)) == ["Bis3a r3,r4 h1,h2 pos=2"]
    assert brief(blocking_pairs_bis(inst, second_in)) == ["Bis3d-i r1,r2 h1,h1 pos=1"]
    # h1 keeps a free post, so the couple blocks without any witness
    assert brief(blocking_pairs_bis(inst, split)) == ["Bis2b r3,r4 h1,h1 pos=1"]


def test_worked_market_blocks(mixed_market):
    inst = mixed_market
    full = parse_matching("r1 h2\nr2 h3\nr3 h1\nr4 h3\nr5 h1\nr6 h2\n", inst)
    best = parse_matching("r1 h1\nr2 h2\nr3 h1\nr4 h3\nr6 h2\n", inst)
    assert brief(blocking_pairs_mm(inst, full)) == [
        "Pair3a r1,r2 h1,h2 pos=1",
        "CoupleSecond r1,r2 h2,h1 pos=2",
        "Single r6 h1 pos=1",
    ]
    assert count_blocking_pairs(inst, full, "MM") == 3
    assert is_stable_mm(inst, best)


def test_count_rejects_unknown_definition(mixed_market):
    with pytest.raises(ValueError, match="unknown stability definition"):
        count_blocking_pairs(mixed_market, Matching(), "weak")


def test_reports_ordered_by_agent_then_position(tiny_sampler):
    rng = random.Random(1605)
    for _ in range(60):
        inst = tiny_sampler(rng, allow_ties=True)
        for m in enumerate_matchings(inst):
            for bps in (blocking_pairs_mm(inst, m), blocking_pairs_bis(inst, m)):
                keys = [(inst.resident_index(bp.residents[0]), bp.position) for bp in bps]
                assert keys == sorted(keys)


def test_reported_pairs_verify(tiny_sampler):
    rng = random.Random(2281)
    checked = 0
    for _ in range(40):
        inst = tiny_sampler(rng, allow_ties=True)
        for m in enumerate_matchings(inst):
            for bp in blocking_pairs_mm(inst, m) + blocking_pairs_bis(inst, m):
                assert verify_blocking_pair(inst, m, bp), bp.describe()
                checked += 1
    assert checked > 200


def test_tampered_witness_fails(mixed_market):
    inst = mixed_market
    full = parse_matching("r1 h2\nr2 h3\nr3 h1\nr4 h3\nr5 h1\nr6 h2\n", inst)
    bps = blocking_pairs_mm(inst, full)
    for bp in bps:
        assert verify_blocking_pair(inst, full, bp)
    single = next(bp for bp in bps if bp.kind == "Single")
    pair = next(bp for bp in bps if bp.kind == "Pair3a")
    # the lone-resident clause reads the same under both notions, so a
    # cross-notion relabel still verifies
    assert verify_blocking_pair(inst, full, replace(single, kind="Bis1"))
    assert not verify_blocking_pair(inst, full, replace(single, kind="Pair3a"))
    assert not verify_blocking_pair(inst, full, replace(single, position=2))
    assert not verify_blocking_pair(inst, full, replace(pair, kind="Pair3b"))
    assert not verify_blocking_pair(inst, full, replace(pair, hospitals=("h2", "h1")))
    assert not verify_blocking_pair(inst, full, replace(pair, residents=("r3", "r4")))


def test_singles_only_agrees_with_plain_definition(tiny_sampler):
    # without couples both notions coincide with the classic one
    rng = random.Random(977)
    for _ in range(40):
        inst = tiny_sampler(rng, max_couples=0, allow_ties=True)
        ranks = {h.id: {} for h in inst.hospitals}
        for h in inst.hospitals:
            count = 0
            for g in h.prefs:
                for rid in g:
                    ranks[h.id][rid] = count + 1
                count += len(g)
        for m in enumerate_matchings(inst):
            expected = set()
            for rid in inst.single_residents:
                flat, rank_at = [], []
                c = 0
                for g in inst.groups_of(rid):
                    flat.extend(g)
                    rank_at.extend([c + 1] * len(g))
                    c += len(g)
                cur = m.get(rid)
                cur_rank = rank_at[flat.index(cur)] if cur is not None else None
                for pos, (hid, rk) in enumerate(zip(flat, rank_at), start=1):
                    if cur_rank is not None and rk >= cur_rank:
                        continue
                    assigned = m.assignees(hid)
                    if len(assigned) < inst.hospital(hid).capacity or any(
                        ranks[hid][o] > ranks[hid][rid] for o in assigned
                    ):
                        expected.add((rid, pos))
            got_mm = {(bp.residents[0], bp.position) for bp in blocking_pairs_mm(inst, m)}
            got_bis = {(bp.residents[0], bp.position) for bp in blocking_pairs_bis(inst, m)}
            assert got_mm == expected
            assert got_bis == expected
