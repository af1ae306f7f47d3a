import random

import pytest

from hrcsolve import all_stable, enumerate_matchings, max_stable_bruteforce, parse_instance
from hrcsolve.bruteforce import min_blocking_pairs


def canon(m):
    return tuple(sorted(m.assignment.items()))


def test_enumeration_counts(no_stable_market, mm_only_market):
    assert len(list(enumerate_matchings(no_stable_market))) == 4
    assert len(list(enumerate_matchings(mm_only_market))) == 4


def test_enumeration_starts_empty(mixed_market):
    first = next(enumerate_matchings(mixed_market))
    assert first.size() == 0


def test_enumeration_guard():
    lines = ["single s%d: h\n" % i for i in range(19)]
    body = " ".join("s%d" % i for i in range(19))
    inst = parse_instance("".join(lines) + f"hospital h 1: {body}\n")
    with pytest.raises(ValueError, match="enumeration guard"):
        list(enumerate_matchings(inst))
    assert len(list(enumerate_matchings(inst, force=True))) == 20


def test_enumeration_unique_and_valid(tiny_sampler):
    rng = random.Random(31337)
    for _ in range(50):
        inst = tiny_sampler(rng, allow_ties=True)
        seen = set()
        for m in enumerate_matchings(inst):
            key = canon(m)
            assert key not in seen
            seen.add(key)
            loads = {}
            for rid, hid in m.assignment.items():
                loads[hid] = loads.get(hid, 0) + 1
            for hid, n in loads.items():
                assert n <= inst.hospital(hid).capacity


def test_shared_post_pair_needs_two_free(bis_only_market):
    # a couple aiming both members at the one hospital occupies two posts,
    # so with r3 placed first no matching adds the couple on top
    got = {canon(m) for m in enumerate_matchings(bis_only_market)}
    assert got == {
        (),
        (("r3", "h"),),
        (("r1", "h"), ("r2", "h")),
    }


def test_stable_sets(no_stable_market, bis_only_market, mm_only_market, mixed_market):
    assert all_stable(no_stable_market, "MM") == []
    assert all_stable(no_stable_market, "BIS") == []
    assert [canon(m) for m in all_stable(bis_only_market, "BIS")] == [(("r3", "h"),)]
    assert all_stable(bis_only_market, "MM") == []
    assert [canon(m) for m in all_stable(mm_only_market, "MM")] == [
        (("r3", "h1"), ("r4", "h1"))
    ]
    assert all_stable(mm_only_market, "BIS") == []
    assert len(all_stable(mixed_market, "MM")) == 1


def test_max_stable(mixed_market, no_stable_market):
    best = max_stable_bruteforce(mixed_market, "MM")
    assert best is not None
    m, size = best
    assert size == 5
    assert canon(m) == (
        ("r1", "h1"),
        ("r2", "h2"),
        ("r3", "h1"),
        ("r4", "h3"),
        ("r6", "h2"),
    )
    assert max_stable_bruteforce(no_stable_market, "MM") is None


def test_min_blocking_pairs(no_stable_market, mixed_market):
    count, witness = min_blocking_pairs(no_stable_market, "MM")
    assert count == 1
    assert witness.size() >= 1
    count, witness = min_blocking_pairs(mixed_market, "MM")
    assert count == 0


def test_unknown_definition(mixed_market):
    with pytest.raises(ValueError, match="unknown stability definition"):
        all_stable(mixed_market, "strong")
