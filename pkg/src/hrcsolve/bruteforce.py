"""Exhaustive matching enumeration, used as ground truth in tests.

Everything here walks the full space of valid matchings, so it is only
usable on tiny instances; callers hit a hard guard past 18 residents
unless they force their way through.
"""

from __future__ import annotations

from .instance import Instance, Matching
from .stability import blocking_pairs_bis, blocking_pairs_mm

ENUMERATION_GUARD = 18


def _pair_finder(definition: str):
    d = definition.upper()
    if d == "MM":
        return blocking_pairs_mm
    if d == "BIS":
        return blocking_pairs_bis
    raise ValueError(f"unknown stability definition {definition!r}")


def enumerate_matchings(inst: Instance, force: bool = False):
    """Yield every valid matching exactly once, the empty one first.

    Agents are filled in declaration order, couples before singles; each
    agent tries unmatched first, then its list positions in order. A
    couple aiming both members at one hospital needs two free posts there.
    """
    n = 2 * len(inst.couples) + len(inst.single_residents)
    if n > ENUMERATION_GUARD and not force:
        raise ValueError(
            f"{n} residents exceeds the enumeration guard ({ENUMERATION_GUARD}); "
            "pass force=True to run anyway"
        )

    agents = [("c", i) for i in range(len(inst.couples))]
    agents += [("s", r) for r in inst.single_residents]
    free = {h.id: h.capacity for h in inst.hospitals}
    assignment: dict[str, str] = {}

    def walk(k: int):
        if k == len(agents):
            yield Matching(dict(assignment))
            return
        kind, who = agents[k]
        yield from walk(k + 1)
        if kind == "s":
            for hid in inst.list_of(who):
                if free[hid] > 0:
                    free[hid] -= 1
                    assignment[who] = hid
                    yield from walk(k + 1)
                    del assignment[who]
                    free[hid] += 1
        else:
            a, b = inst.couples[who]
            for ha, hb in inst.joint_list((a, b)):
                need = 2 if ha == hb else 1
                if free[ha] < need or free[hb] < 1:
                    continue
                free[ha] -= 1
                free[hb] -= 1
                assignment[a] = ha
                assignment[b] = hb
                yield from walk(k + 1)
                del assignment[a]
                del assignment[b]
                free[ha] += 1
                free[hb] += 1

    yield from walk(0)


def all_stable(inst: Instance, definition: str = "MM", force: bool = False) -> list[Matching]:
    """Every stable matching, in enumeration order."""
    finder = _pair_finder(definition)
    return [m for m in enumerate_matchings(inst, force) if not finder(inst, m)]


def max_stable_bruteforce(inst: Instance, definition: str = "MM", force: bool = False):
    """A maximum-size stable matching with its size, or None if none exists.

    Among equal-size optima the first one met in enumeration order wins.
    """
    finder = _pair_finder(definition)
    best = None
    for m in enumerate_matchings(inst, force):
        if finder(inst, m):
            continue
        if best is None or m.size() > best.size():
            best = m
    if best is None:
        return None
    return best, best.size()


def min_blocking_pairs(inst: Instance, definition: str = "MM", force: bool = False):
    """(fewest blocking pairs over all valid matchings, a witness matching)."""
    finder = _pair_finder(definition)
    best = None
    best_m = None
    for m in enumerate_matchings(inst, force):
        k = len(finder(inst, m))
        if best is None or k < best:
            best, best_m = k, m
            if best == 0:
                break
    return best, best_m
