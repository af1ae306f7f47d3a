"""Shared fixtures: four small markets with known stability behaviour,
plus a sampler for tiny random instances used by property tests."""

import random

import pytest

from hrcsolve import parse_instance

# Couple and single compete for two unit hospitals; every matching,
# including the empty one, is blocked.
NO_STABLE_TEXT = """\
couple a b: z1|z2
single c: z1 z2
hospital z1 1: a c
hospital z2 1: c b
"""

# Couple wants both posts of one hospital, a single sits between the
# members on its list. Stable under the common-witness notion only.
BIS_ONLY_TEXT = """\
couple r1 r2: h|h
single r3: h
hospital h 2: r1 r3 r2
"""

# Two couples aiming at the same two posts. Stable under the
# case-by-case notion only.
MM_ONLY_TEXT = """\
couple r1 r2: h1|h1
couple r3 r4: h1|h1 h1|h2
hospital h1 2: r3 r1 r2 r4
hospital h2 1: r4
"""

# One couple, four singles, three hospitals; a size-6 matching exists
# but the unique stable matching has size 5.
MIXED_TEXT = """\
couple r1 r2: h1|h2 h2|h1 h2|h3
single r3: h1 h3
single r4: h2 h3
single r5: h2 h1
single r6: h1 h2
hospital h1 2: r1 r3 r2 r6 r5
hospital h2 2: r2 r6 r1 r4 r5
hospital h3 2: r4 r3 r2
"""


@pytest.fixture
def no_stable_market():
    return parse_instance(NO_STABLE_TEXT)


@pytest.fixture
def bis_only_market():
    return parse_instance(BIS_ONLY_TEXT)


@pytest.fixture
def mm_only_market():
    return parse_instance(MM_ONLY_TEXT)


@pytest.fixture
def mixed_market():
    return parse_instance(MIXED_TEXT)


def random_tiny_instance(rng: random.Random, max_couples=2, max_singles=4,
                         max_hospitals=4, allow_ties=False):
    """A small random valid instance, at most 8 residents."""
    n_h = rng.randint(2, max_hospitals)
    hids = ["h%d" % (i + 1) for i in range(n_h)]
    n_c = rng.randint(0, max_couples)
    n_s = rng.randint(1 if n_c == 0 else 0, max_singles)
    singles = ["s%d" % (i + 1) for i in range(n_s)]
    couples = [("a%d" % (i + 1), "b%d" % (i + 1)) for i in range(n_c)]

    lines = []
    listed = {h: [] for h in hids}
    for rid in singles:
        hs = rng.sample(hids, rng.randint(1, min(3, n_h)))
        for h in hs:
            listed[h].append(rid)
        lines.append("single {}: {}".format(rid, " ".join(hs)))
    for a, b in couples:
        pool = [(x, y) for x in hids for y in hids]
        pairs = rng.sample(pool, rng.randint(1, 3))
        for x, y in pairs:
            if a not in listed[x]:
                listed[x].append(a)
            if b not in listed[y]:
                listed[y].append(b)
        lines.append("couple {} {}: {}".format(a, b, " ".join("%s|%s" % p for p in pairs)))
    for h in hids:
        apps = listed[h][:]
        rng.shuffle(apps)
        groups = []
        for rid in apps:
            if groups and allow_ties and rng.random() < 0.35:
                groups[-1].append(rid)
            else:
                groups.append([rid])
        body = " ".join(g[0] if len(g) == 1 else "(" + " ".join(g) + ")" for g in groups)
        lines.append("hospital {} {}: {}".format(h, rng.randint(1, 3), body))
    return parse_instance("\n".join(lines) + "\n")


@pytest.fixture
def tiny_sampler():
    return random_tiny_instance
