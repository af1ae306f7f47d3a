"""Seeded random instance generation with popularity skew.

Hospitals get linearly decreasing weights, so low-numbered hospitals
collect more posts and more applications. Resident lists are weighted
samples without replacement; a couple's joint list combines the two
members' individual lists, best combinations first.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .instance import Hospital, Instance


@dataclass
class GenParams:
    residents: int
    couples: int
    hospitals: int
    posts: int
    seed: int
    min_len: int = 5
    max_len: int = 10
    skew: float = 3.0
    ties: float = 0.0


def couple_joint_list(list_a: list[str], list_b: list[str]) -> list[tuple[str, str]]:
    """All pairings of two individual lists, most agreeable first.

    Pairs are compared by how many members sit at the worst involved
    position, then the next worst, and so on; remaining ties go to the
    pair whose first member ranks better, then the second.
    """
    if not list_a or not list_b:
        raise ValueError("couple member lists must be non-empty")
    span = max(len(list_a), len(list_b))
    scored = []
    for i, ha in enumerate(list_a, start=1):
        for j, hb in enumerate(list_b, start=1):
            counts = [0] * span
            counts[i - 1] += 1
            counts[j - 1] += 1
            scored.append((tuple(reversed(counts)), i, j, (ha, hb)))
    scored.sort(key=lambda item: item[:3])
    return [item[3] for item in scored]


def _hospital_weights(n: int, skew: float) -> np.ndarray:
    if n == 1:
        return np.ones(1)
    return skew + (1.0 - skew) * np.arange(n) / (n - 1)


def _allocate_posts(posts: int, weights: np.ndarray) -> np.ndarray:
    """One post each, the rest split proportionally, largest fraction first."""
    n = len(weights)
    extra = posts - n
    ideal = extra * weights / weights.sum()
    base = np.floor(ideal).astype(np.int64)
    order = np.argsort(-(ideal - base), kind="stable")
    out = 1 + base
    for i in order[: extra - int(base.sum())]:
        out[i] += 1
    return out


def _check(p: GenParams) -> None:
    if p.residents < 1:
        raise ValueError("residents must be >= 1")
    if p.couples < 0 or 2 * p.couples > p.residents:
        raise ValueError("need 0 <= 2*couples <= residents")
    if p.hospitals < 1:
        raise ValueError("hospitals must be >= 1")
    if p.posts < p.hospitals:
        raise ValueError("need at least one post per hospital")
    if not 1 <= p.min_len <= p.max_len <= p.hospitals:
        raise ValueError("need 1 <= min_len <= max_len <= hospitals")
    if p.skew < 1.0:
        raise ValueError("skew must be >= 1")
    if not 0.0 <= p.ties <= 1.0:
        raise ValueError("ties must be within [0, 1]")


def generate(p: GenParams) -> Instance:
    """Build a random valid instance from the given parameters."""
    _check(p)
    rng = np.random.default_rng(p.seed)
    hids = ["h%d" % (i + 1) for i in range(p.hospitals)]
    w = _hospital_weights(p.hospitals, p.skew)
    caps = _allocate_posts(p.posts, w)

    rids = ["r%d" % (i + 1) for i in range(p.residents)]
    couples = [(rids[2 * i], rids[2 * i + 1]) for i in range(p.couples)]
    singles = rids[2 * p.couples:]

    # weighted sampling without replacement: the smallest exponential
    # keys win, and sorting them yields the list order
    member_lists: dict[str, list[str]] = {}
    for rid in rids:
        length = int(rng.integers(p.min_len, p.max_len + 1))
        keys = -np.log(rng.random(p.hospitals)) / w
        if length >= p.hospitals:
            chosen = np.argsort(keys, kind="stable")
        else:
            part = np.argpartition(keys, length)[:length]
            chosen = part[np.argsort(keys[part], kind="stable")]
        member_lists[rid] = [hids[i] for i in chosen[:length]]

    single_prefs = {r: [[h] for h in member_lists[r]] for r in singles}
    couple_prefs = {
        (a, b): [[pair] for pair in couple_joint_list(member_lists[a], member_lists[b])]
        for a, b in couples
    }

    applicants: dict[str, list[str]] = {h: [] for h in hids}
    for rid in rids:
        for hid in member_lists[rid]:
            applicants[hid].append(rid)

    hospitals = []
    levels = max(1, round(1.0 / p.ties)) if p.ties > 0 else 0
    for i, hid in enumerate(hids):
        apps = applicants[hid]
        if levels and apps:
            scores = rng.integers(0, levels, size=len(apps))
            prefs = []
            for lvl in range(levels - 1, -1, -1):
                group = [r for r, s in zip(apps, scores) if s == lvl]
                if group:
                    prefs.append(group)
        else:
            prefs = [[r] for r in apps]
        hospitals.append(Hospital(hid, int(caps[i]), prefs))

    return Instance(singles, couples, hospitals, single_prefs, couple_prefs)
