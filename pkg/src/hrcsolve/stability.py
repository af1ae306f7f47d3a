"""Blocking-pair enumeration for both couple-aware stability notions.

Two notions are implemented. The first treats a couple aiming at a single
hospital through free posts and displacement case by case (kinds Single,
CoupleFirst, CoupleSecond, Pair3a..Pair3d). The second, suited to
score-ranked hospital lists, requires the hospital to beat a common
witness with both members when the couple lands together (kinds Bis*).
"""

from __future__ import annotations

from dataclasses import dataclass

from .instance import (
    Instance,
    Matching,
    hospital_ranks,
    position_ranks,
    validate_matching,
)

MM_KINDS = ("Single", "CoupleFirst", "CoupleSecond", "Pair3a", "Pair3b", "Pair3c", "Pair3d")
BIS_KINDS = ("Bis1", "Bis2a", "Bis2b", "Bis3a", "Bis3b", "Bis3c", "Bis3d-i", "Bis3d-ii")


@dataclass(frozen=True)
class BlockingPair:
    kind: str
    residents: tuple[str, ...]
    hospitals: tuple[str, ...]
    position: int

    def describe(self) -> str:
        return "{} {} {} pos={}".format(
            self.kind, ",".join(self.residents), ",".join(self.hospitals), self.position
        )


class _Ctx:
    """Shared per-call state: assignee sets, rank tables, current ranks."""

    def __init__(self, inst: Instance, m: Matching):
        validate_matching(inst, m)
        self.inst = inst
        self.m = m
        self.assigned: dict[str, list[str]] = {h.id: [] for h in inst.hospitals}
        for rid in inst.all_residents():
            hid = m.get(rid)
            if hid is not None:
                self.assigned[hid].append(rid)
        self.ranks = {h.id: hospital_ranks(inst, h.id) for h in inst.hospitals}

    def free_posts(self, hid: str) -> int:
        return self.inst.hospital(hid).capacity - len(self.assigned[hid])

    def prefers_to_some(self, hid: str, rid: str, exclude: str | None = None) -> bool:
        r = self.ranks[hid]
        mine = r[rid]
        return any(r[other] > mine for other in self.assigned[hid] if other != exclude)

    def both_beat_some(self, hid: str, ra: str, rb: str, exclude: str | None = None) -> bool:
        r = self.ranks[hid]
        worst = max(r[ra], r[rb])
        return any(r[other] > worst for other in self.assigned[hid] if other != exclude)


def _single_blocks(ctx: _Ctx, rid: str, kind: str):
    """Clause for a lone resident; identical under both notions."""
    inst = ctx.inst
    hs = inst.list_of(rid)
    pranks = position_ranks(inst, rid)
    cur = ctx.m.get(rid)
    cur_rank = None
    if cur is not None:
        cur_rank = pranks[hs.index(cur)]
    out = []
    for p, hid in enumerate(hs, start=1):
        if cur_rank is not None and pranks[p - 1] >= cur_rank:
            continue
        if ctx.free_posts(hid) > 0 or ctx.prefers_to_some(hid, rid):
            out.append(BlockingPair(kind, (rid,), (hid,), p))
    return out


def _mm_couple_clause(ctx: _Ctx, a: str, b: str, ha: str, hb: str):
    """Returns the firing clause kind for an improving target pair, or None."""
    ma, mb = ctx.m.get(a), ctx.m.get(b)
    if hb == mb and ha != ma:
        ok = ctx.free_posts(ha) > 0 or ctx.prefers_to_some(ha, a, exclude=b)
        return "CoupleFirst" if ok else None
    if ha == ma and hb != mb:
        ok = ctx.free_posts(hb) > 0 or ctx.prefers_to_some(hb, b, exclude=a)
        return "CoupleSecond" if ok else None
    if ha == ma and hb == mb:
        return None
    if ha != hb:
        ok_a = ctx.free_posts(ha) > 0 or ctx.prefers_to_some(ha, a)
        ok_b = ctx.free_posts(hb) > 0 or ctx.prefers_to_some(hb, b)
        return "Pair3a" if ok_a and ok_b else None
    free = ctx.free_posts(ha)
    if free >= 2:
        return "Pair3b"
    if free == 1:
        ok = ctx.prefers_to_some(ha, a) or ctx.prefers_to_some(ha, b)
        return "Pair3c" if ok else None
    # full hospital: two distinct assignees must be beaten, one by each member
    r = ctx.ranks[ha]
    worse_a = {o for o in ctx.assigned[ha] if r[o] > r[a]}
    worse_b = {o for o in ctx.assigned[ha] if r[o] > r[b]}
    if worse_a and worse_b and len(worse_a | worse_b) >= 2:
        return "Pair3d"
    return None


def _bis_couple_clause(ctx: _Ctx, a: str, b: str, ha: str, hb: str):
    inst = ctx.inst
    ma, mb = ctx.m.get(a), ctx.m.get(b)
    if hb == mb and ha != ma:
        if ha != hb:
            ok = ctx.free_posts(ha) > 0 or ctx.prefers_to_some(ha, a, exclude=b)
        else:
            # joining the partner's hospital: the hospital must either have a
            # free post or rate both members above someone it would drop
            ok = ctx.free_posts(ha) > 0 or ctx.both_beat_some(ha, a, b, exclude=b)
        return "Bis2a" if ok else None
    if ha == ma and hb != mb:
        if ha != hb:
            ok = ctx.free_posts(hb) > 0 or ctx.prefers_to_some(hb, b, exclude=a)
        else:
            ok = ctx.free_posts(hb) > 0 or ctx.both_beat_some(hb, a, b, exclude=a)
        return "Bis2b" if ok else None
    if ha == ma and hb == mb:
        return None
    if ha != hb:
        ok_a = ctx.free_posts(ha) > 0 or ctx.prefers_to_some(ha, a)
        ok_b = ctx.free_posts(hb) > 0 or ctx.prefers_to_some(hb, b)
        return "Bis3a" if ok_a and ok_b else None
    free = ctx.free_posts(ha)
    if free >= 2:
        return "Bis3b"
    if free == 1:
        return "Bis3c" if ctx.both_beat_some(ha, a, b) else None
    r = ctx.ranks[ha]
    worst = max(r[a], r[b])
    for other in ctx.assigned[ha]:
        if r[other] <= worst:
            continue
        if inst.is_coupled(other) and ctx.m.get(inst.partner_of(other)) == ha:
            return "Bis3d-i"
    if sum(1 for other in ctx.assigned[ha] if r[other] > worst) >= 2:
        return "Bis3d-ii"
    return None


def _enumerate(inst: Instance, m: Matching, bis: bool) -> list[BlockingPair]:
    ctx = _Ctx(inst, m)
    out: list[BlockingPair] = []
    for idx, (a, b) in enumerate(inst.couples):
        joint = inst.joint_list((a, b))
        pranks = position_ranks(inst, idx)
        cur = None
        if m.get(a) is not None:
            cur = pranks[joint.index((m.get(a), m.get(b)))]
        for p, (ha, hb) in enumerate(joint, start=1):
            if cur is not None and pranks[p - 1] >= cur:
                continue
            if bis:
                kind = _bis_couple_clause(ctx, a, b, ha, hb)
            else:
                kind = _mm_couple_clause(ctx, a, b, ha, hb)
            if kind is not None:
                out.append(BlockingPair(kind, (a, b), (ha, hb), p))
    for rid in inst.single_residents:
        out.extend(_single_blocks(ctx, rid, "Bis1" if bis else "Single"))
    return out


def blocking_pairs_mm(inst: Instance, m: Matching) -> list[BlockingPair]:
    """Every blocking pair under the case-by-case couple notion."""
    return _enumerate(inst, m, bis=False)


def blocking_pairs_bis(inst: Instance, m: Matching) -> list[BlockingPair]:
    """Every blocking pair under the common-witness couple notion."""
    return _enumerate(inst, m, bis=True)


def is_stable_mm(inst: Instance, m: Matching) -> bool:
    return not blocking_pairs_mm(inst, m)


def is_stable_bis(inst: Instance, m: Matching) -> bool:
    return not blocking_pairs_bis(inst, m)


def count_blocking_pairs(inst: Instance, m: Matching, definition: str = "MM") -> int:
    d = definition.upper()
    if d == "MM":
        return len(blocking_pairs_mm(inst, m))
    if d == "BIS":
        return len(blocking_pairs_bis(inst, m))
    raise ValueError(f"unknown stability definition {definition!r}")


def verify_blocking_pair(inst: Instance, m: Matching, bp: BlockingPair) -> bool:
    """Re-evaluate a reported witness from scratch against (inst, m)."""
    ctx = _Ctx(inst, m)
    if bp.kind in ("Single", "Bis1"):
        if len(bp.residents) != 1 or len(bp.hospitals) != 1:
            return False
        rid = bp.residents[0]
        if not inst.is_single(rid):
            return False
        hs = inst.list_of(rid)
        if not 1 <= bp.position <= len(hs) or hs[bp.position - 1] != bp.hospitals[0]:
            return False
        found = _single_blocks(ctx, rid, bp.kind)
        return any(x.position == bp.position for x in found)

    if len(bp.residents) != 2 or len(bp.hospitals) != 2:
        return False
    couple = (bp.residents[0], bp.residents[1])
    if couple not in inst.couple_prefs:
        return False
    a, b = couple
    joint = inst.joint_list(couple)
    if not 1 <= bp.position <= len(joint) or joint[bp.position - 1] != bp.hospitals:
        return False
    pranks = position_ranks(inst, couple)
    if m.get(a) is not None:
        cur = pranks[joint.index((m.get(a), m.get(b)))]
        if pranks[bp.position - 1] >= cur:
            return False
    ha, hb = bp.hospitals
    if bp.kind in MM_KINDS:
        return _mm_couple_clause(ctx, a, b, ha, hb) == bp.kind
    if bp.kind in BIS_KINDS:
        return _bis_couple_clause(ctx, a, b, ha, hb) == bp.kind
    return False
