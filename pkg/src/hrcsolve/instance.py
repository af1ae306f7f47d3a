"""Instance and matching data model, preference ranks, text formats."""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field


@dataclass
class Hospital:
    id: str
    capacity: int
    prefs: list[list[str]]  # rank groups, best first; singletons when strict


@dataclass
class Matching:
    """A partial assignment of residents to hospitals."""

    assignment: dict[str, str] = field(default_factory=dict)

    def get(self, rid: str) -> str | None:
        return self.assignment.get(rid)

    def size(self) -> int:
        return len(self.assignment)

    def assignees(self, hid: str) -> list[str]:
        return [r for r, h in self.assignment.items() if h == hid]


@dataclass
class Instance:
    single_residents: list[str]
    couples: list[tuple[str, str]]
    hospitals: list[Hospital]
    single_prefs: dict[str, list[list[str]]]
    couple_prefs: dict[tuple[str, str], list[list[tuple[str, str]]]]

    # derived lookups, filled in __post_init__
    _hosp: dict[str, Hospital] = field(init=False, repr=False, compare=False, default_factory=dict)
    _couple_idx: dict[str, int] = field(init=False, repr=False, compare=False, default_factory=dict)
    _member_side: dict[str, int] = field(init=False, repr=False, compare=False, default_factory=dict)

    def __post_init__(self):
        self._hosp = {h.id: h for h in self.hospitals}
        self._couple_idx = {}
        self._member_side = {}
        for idx, (a, b) in enumerate(self.couples):
            self._couple_idx[a] = idx
            self._couple_idx[b] = idx
            self._member_side[a] = 0
            self._member_side[b] = 1

    # --- basic lookups ---

    def hospital(self, hid: str) -> Hospital:
        try:
            return self._hosp[hid]
        except KeyError:
            raise ValueError(f"unknown hospital {hid!r}") from None

    def is_single(self, rid: str) -> bool:
        return rid in self.single_prefs

    def is_coupled(self, rid: str) -> bool:
        return rid in self._couple_idx

    def couple_index_of(self, rid: str) -> int:
        return self._couple_idx[rid]

    def partner_of(self, rid: str) -> str:
        a, b = self.couples[self._couple_idx[rid]]
        return b if rid == a else a

    def all_residents(self) -> list[str]:
        """Residents in global index order: couple members first, then singles."""
        out = []
        for a, b in self.couples:
            out.append(a)
            out.append(b)
        out.extend(self.single_residents)
        return out

    def resident_index(self, rid: str) -> int:
        if rid in self._couple_idx:
            return 2 * self._couple_idx[rid] + self._member_side[rid]
        return 2 * len(self.couples) + self.single_residents.index(rid)

    # --- individual (projected) preference structure ---

    def groups_of(self, rid: str) -> list[list[str]]:
        """Rank groups of hospitals on the resident's individual list.

        For a coupled resident this is the projection of the couple's joint
        list onto the member's side, so the same hospital may appear in
        several groups or twice within one group.
        """
        if rid in self.single_prefs:
            return [list(g) for g in self.single_prefs[rid]]
        side = self._member_side[rid]
        joint = self.couple_prefs[self.couples[self._couple_idx[rid]]]
        return [[pair[side] for pair in g] for g in joint]

    def list_of(self, rid: str) -> list[str]:
        """Flattened individual list, positions 1..l in reading order."""
        return [h for g in self.groups_of(rid) for h in g]

    def joint_groups(self, couple: tuple[str, str]) -> list[list[tuple[str, str]]]:
        return self.couple_prefs[couple]

    def joint_list(self, couple: tuple[str, str]) -> list[tuple[str, str]]:
        return [pair for g in self.couple_prefs[couple] for pair in g]

    def is_strict(self) -> bool:
        for h in self.hospitals:
            if any(len(g) > 1 for g in h.prefs):
                return False
        for groups in self.single_prefs.values():
            if any(len(g) > 1 for g in groups):
                return False
        for groups in self.couple_prefs.values():
            if any(len(g) > 1 for g in groups):
                return False
        return True


# --- ranks and positions ---


def rank_of_resident(inst: Instance, hid: str, rid: str) -> int:
    """Rank of rid on hid's list: one plus the number of strictly better residents."""
    count = 0
    for group in inst.hospital(hid).prefs:
        if rid in group:
            return count + 1
        count += len(group)
    raise ValueError(f"hospital {hid!r} does not rank resident {rid!r}")


def hospital_ranks(inst: Instance, hid: str) -> dict[str, int]:
    """Rank of every listed resident at hid, computed in one pass."""
    ranks = {}
    count = 0
    for group in inst.hospital(hid).prefs:
        for rid in group:
            ranks[rid] = count + 1
        count += len(group)
    return ranks


def projected_position(inst: Instance, couple_index: int, p: int) -> tuple[str, str]:
    """The hospital pair at 1-based position p of the couple's joint list."""
    couple = inst.couples[couple_index]
    flat = inst.joint_list(couple)
    if not 1 <= p <= len(flat):
        raise ValueError(f"position {p} out of range for couple {couple}")
    return flat[p - 1]


def _agent_groups(inst: Instance, agent) -> list[list]:
    """Rank groups for a single resident id, couple member id, or couple index."""
    if isinstance(agent, int):
        return inst.joint_groups(inst.couples[agent])
    if isinstance(agent, tuple):
        return inst.joint_groups(agent)
    return inst.groups_of(agent)


def p_plus(inst: Instance, agent, p: int) -> int:
    """Largest 1-based position sharing position p's rank group."""
    groups = _agent_groups(inst, agent)
    end = 0
    for g in groups:
        start = end + 1
        end += len(g)
        if start <= p <= end:
            return end
    raise ValueError(f"position {p} out of range")


def rank_at(inst: Instance, agent, p: int) -> int:
    """Count-based rank of the entry at 1-based position p of the agent's list."""
    groups = _agent_groups(inst, agent)
    end = 0
    for g in groups:
        start = end + 1
        end += len(g)
        if start <= p <= end:
            return start
    raise ValueError(f"position {p} out of range")


def position_ranks(inst: Instance, agent) -> list[int]:
    """rank_at for every position, as a list indexed by position-1."""
    out = []
    count = 0
    for g in _agent_groups(inst, agent):
        out.extend([count + 1] * len(g))
        count += len(g)
    return out


# --- parsing and serialization ---


def _tokenize_groups(body: str, lineno: int) -> list[list[str]]:
    """Split a preference body into rank groups; parentheses mark ties."""
    spaced = body.replace("(", " ( ").replace(")", " ) ")
    tokens = spaced.split()
    groups: list[list[str]] = []
    current: list[str] | None = None
    for tok in tokens:
        if tok == "(":
            if current is not None:
                raise ValueError(f"line {lineno}: nested '(' in preference list")
            current = []
        elif tok == ")":
            if current is None:
                raise ValueError(f"line {lineno}: unmatched ')'")
            if not current:
                raise ValueError(f"line {lineno}: empty tie group")
            groups.append(current)
            current = None
        else:
            if current is None:
                groups.append([tok])
            else:
                current.append(tok)
    if current is not None:
        raise ValueError(f"line {lineno}: unclosed '('")
    return groups


def _parse_pair(tok: str, lineno: int) -> tuple[str, str]:
    parts = tok.split("|")
    if len(parts) != 2 or not parts[0] or not parts[1]:
        raise ValueError(f"line {lineno}: bad hospital pair {tok!r}, expected h1|h2")
    return (parts[0], parts[1])


def parse_instance(text: str) -> Instance:
    """Parse the line-oriented instance format.

    Directives, one per line ('#' starts a comment):
      single <rid>: <hospitals, ties in parens>
      couple <rid> <rid>: <h1|h2 pairs, ties in parens>
      hospital <hid> <capacity>: <residents, ties in parens>
    """
    singles: list[str] = []
    couples: list[tuple[str, str]] = []
    hospitals: list[Hospital] = []
    single_prefs: dict[str, list[list[str]]] = {}
    couple_prefs: dict[tuple[str, str], list[list[tuple[str, str]]]] = {}
    seen_residents: set[str] = set()
    seen_hospitals: set[str] = set()

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise ValueError(f"line {lineno}: expected ':' in {line!r}")
        head, body = line.split(":", 1)
        fields = head.split()
        kind = fields[0]

        if kind == "single":
            if len(fields) != 2:
                raise ValueError(f"line {lineno}: expected 'single <rid>:'")
            rid = fields[1]
            if rid in seen_residents:
                raise ValueError(f"line {lineno}: duplicate resident {rid!r}")
            seen_residents.add(rid)
            groups = _tokenize_groups(body, lineno)
            flat = [h for g in groups for h in g]
            if len(set(flat)) != len(flat):
                raise ValueError(f"line {lineno}: duplicate hospital in list of {rid!r}")
            singles.append(rid)
            single_prefs[rid] = groups

        elif kind == "couple":
            if len(fields) != 3:
                raise ValueError(f"line {lineno}: expected 'couple <rid> <rid>:'")
            a, b = fields[1], fields[2]
            if a == b:
                raise ValueError(f"line {lineno}: couple members must differ, got {a!r} twice")
            for rid in (a, b):
                if rid in seen_residents:
                    raise ValueError(f"line {lineno}: duplicate resident {rid!r}")
                seen_residents.add(rid)
            groups = [[_parse_pair(tok, lineno) for tok in g] for g in _tokenize_groups(body, lineno)]
            flat = [pair for g in groups for pair in g]
            if len(set(flat)) != len(flat):
                raise ValueError(f"line {lineno}: duplicate pair in list of couple ({a},{b})")
            couples.append((a, b))
            couple_prefs[(a, b)] = groups

        elif kind == "hospital":
            if len(fields) != 3:
                raise ValueError(f"line {lineno}: expected 'hospital <hid> <capacity>:'")
            hid = fields[1]
            if hid in seen_hospitals:
                raise ValueError(f"line {lineno}: duplicate hospital {hid!r}")
            try:
                cap = int(fields[2])
            except ValueError:
                raise ValueError(f"line {lineno}: bad capacity {fields[2]!r}") from None
            if cap < 1:
                raise ValueError(f"line {lineno}: capacity of {hid!r} must be >= 1")
            seen_hospitals.add(hid)
            groups = _tokenize_groups(body, lineno)
            flat = [r for g in groups for r in g]
            if len(set(flat)) != len(flat):
                raise ValueError(f"line {lineno}: duplicate resident in list of {hid!r}")
            hospitals.append(Hospital(hid, cap, groups))

        else:
            raise ValueError(f"line {lineno}: unknown directive {kind!r}")

    if not seen_residents:
        raise ValueError("no residents declared")

    inst = Instance(singles, couples, hospitals, single_prefs, couple_prefs)
    _validate(inst)
    return inst


def _validate(inst: Instance) -> None:
    hosp_ids = {h.id for h in inst.hospitals}

    listed_at: dict[str, set[str]] = {h.id: set() for h in inst.hospitals}
    for h in inst.hospitals:
        for group in h.prefs:
            for rid in group:
                if not (inst.is_single(rid) or inst.is_coupled(rid)):
                    raise ValueError(f"hospital {h.id!r} lists unknown resident {rid!r}")
                listed_at[h.id].add(rid)

    for rid in inst.all_residents():
        wants = set(inst.list_of(rid))
        for hid in wants:
            if hid not in hosp_ids:
                raise ValueError(f"resident {rid!r} lists unknown hospital {hid!r}")
            if rid not in listed_at[hid]:
                raise ValueError(
                    f"reciprocity violated: {rid!r} lists {hid!r} but {hid!r} does not rank {rid!r}"
                )
        for hid, backs in listed_at.items():
            if rid in backs and hid not in wants:
                raise ValueError(
                    f"reciprocity violated: {hid!r} ranks {rid!r} but {rid!r} does not list {hid!r}"
                )


def _fmt_groups(groups: list[list[str]]) -> str:
    parts = []
    for g in groups:
        if len(g) == 1:
            parts.append(g[0])
        else:
            parts.append("(" + " ".join(g) + ")")
    return " ".join(parts)


def serialize_instance(inst: Instance) -> str:
    lines = []
    for rid in inst.single_residents:
        lines.append(f"single {rid}: {_fmt_groups(inst.single_prefs[rid])}")
    for couple in inst.couples:
        groups = [["{}|{}".format(*pair) for pair in g] for g in inst.couple_prefs[couple]]
        lines.append(f"couple {couple[0]} {couple[1]}: {_fmt_groups(groups)}")
    for h in inst.hospitals:
        lines.append(f"hospital {h.id} {h.capacity}: {_fmt_groups(h.prefs)}")
    return "\n".join(lines) + "\n"


def parse_matching(text: str, inst: Instance) -> Matching:
    """Parse '<rid> <hid>' lines; residents not mentioned are unmatched."""
    assignment: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) != 2:
            raise ValueError(f"line {lineno}: expected '<rid> <hid>'")
        rid, hid = fields
        if rid in assignment:
            raise ValueError(f"line {lineno}: resident {rid!r} assigned twice")
        assignment[rid] = hid
    m = Matching(assignment)
    validate_matching(inst, m)
    return m


def serialize_matching(inst: Instance, m: Matching) -> str:
    lines = []
    for rid in inst.all_residents():
        hid = m.get(rid)
        if hid is not None:
            lines.append(f"{rid} {hid}")
    return "\n".join(lines) + ("\n" if lines else "")


def validate_matching(inst: Instance, m: Matching) -> None:
    """Raise ValueError unless m is a valid matching for inst."""
    load: dict[str, int] = {}
    for rid, hid in m.assignment.items():
        if not (inst.is_single(rid) or inst.is_coupled(rid)):
            raise ValueError(f"matching assigns unknown resident {rid!r}")
        if hid not in inst._hosp:
            raise ValueError(f"matching assigns unknown hospital {hid!r}")
        load[hid] = load.get(hid, 0) + 1

    for hid, n in load.items():
        cap = inst.hospital(hid).capacity
        if n > cap:
            raise ValueError(f"hospital {hid!r} over capacity: {n} > {cap}")

    for rid in inst.single_residents:
        hid = m.get(rid)
        if hid is not None and hid not in inst.list_of(rid):
            raise ValueError(f"single {rid!r} assigned unacceptable hospital {hid!r}")

    for couple in inst.couples:
        a, b = couple
        ha, hb = m.get(a), m.get(b)
        if (ha is None) != (hb is None):
            raise ValueError(f"couple ({a},{b}) must be jointly assigned or jointly unassigned")
        if ha is not None and (ha, hb) not in inst.joint_list(couple):
            raise ValueError(f"couple ({a},{b}) assigned pair ({ha},{hb}) not on its joint list")


# --- structural checks ---


@dataclass
class DualMarketResult:
    is_dual: bool
    residents_first: list[str]
    residents_second: list[str]
    hospitals_first: list[str]
    hospitals_second: list[str]
    witness: str | None = None


def check_dual_market(inst: Instance) -> DualMarketResult:
    """Try to split the market so first members of couples use only one
    hospital side, second members only the other, and each single stays
    within one side."""
    side: dict[str, int] = {}  # forced side per union-find root, 1 or 2
    parent: dict[str, str] = {h.id: h.id for h in inst.hospitals}

    def find(x: str) -> str:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def force(hid: str, s: int) -> bool:
        root = find(hid)
        if side.get(root, s) != s:
            return False
        side[root] = s
        return True

    for couple in inst.couples:
        for pair in inst.joint_list(couple):
            if not force(pair[0], 1):
                return DualMarketResult(False, [], [], [], [], witness=pair[0])
            if not force(pair[1], 2):
                return DualMarketResult(False, [], [], [], [], witness=pair[1])

    for rid in inst.single_residents:
        hs = inst.list_of(rid)
        for hid in hs[1:]:
            ra, rb = find(hs[0]), find(hid)
            if ra == rb:
                continue
            sa, sb = side.get(ra), side.get(rb)
            if sa is not None and sb is not None and sa != sb:
                return DualMarketResult(False, [], [], [], [], witness=rid)
            parent[rb] = ra
            if sb is not None:
                side[ra] = sb

    h1 = [h.id for h in inst.hospitals if side.get(find(h.id), 1) == 1]
    h2 = [h.id for h in inst.hospitals if side.get(find(h.id), 1) == 2]
    r1 = [c[0] for c in inst.couples]
    r2 = [c[1] for c in inst.couples]
    for rid in inst.single_residents:
        hs = inst.list_of(rid)
        s = side.get(find(hs[0]), 1) if hs else 1
        (r1 if s == 1 else r2).append(rid)
    return DualMarketResult(True, r1, r2, h1, h2)


@dataclass
class MasterListResult:
    ok: bool
    resident_order: list[str] | None
    hospital_order: list[str] | None
    pair_order: list[tuple[str, str]] | None
    cycle: list | None = None
    failed_family: str | None = None


def _master_order(lists: list[list[list]]):
    """Topological order consistent with every list, or a cycle.

    Edges join consecutive rank groups within each list; ties impose
    nothing. Returns (order, None) or (None, cycle).
    """
    succ: dict = {}
    indeg: dict = {}

    def node(x):
        if x not in succ:
            succ[x] = set()
            indeg[x] = 0

    for groups in lists:
        for g in groups:
            for x in g:
                node(x)
        for ga, gb in zip(groups, groups[1:]):
            for a in ga:
                for b in gb:
                    if b not in succ[a]:
                        succ[a].add(b)
                        node(b)
                        indeg[b] += 1

    heap = [x for x in succ if indeg[x] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        x = heapq.heappop(heap)
        order.append(x)
        for y in sorted(succ[x]):
            indeg[y] -= 1
            if indeg[y] == 0:
                heapq.heappush(heap, y)
    if len(order) == len(succ):
        return order, None

    # every leftover node keeps a leftover predecessor, so walking
    # predecessors must revisit a node; that loop is the witness
    left = {x for x in succ if indeg[x] > 0}
    x = min(left)
    seen_at = {}
    path = []
    while x not in seen_at:
        seen_at[x] = len(path)
        path.append(x)
        x = min(p for p in left if x in succ[p])
    cycle = path[seen_at[x]:]
    cycle.reverse()
    return None, cycle


def check_master_list(inst: Instance) -> MasterListResult:
    """Check whether all three list families could be drawn from master orders."""
    res_order, res_cycle = _master_order([h.prefs for h in inst.hospitals])
    hosp_order, hosp_cycle = _master_order([inst.single_prefs[r] for r in inst.single_residents])
    pair_order, pair_cycle = _master_order([inst.couple_prefs[c] for c in inst.couples])

    if res_cycle is not None:
        return MasterListResult(False, None, hosp_order, pair_order, res_cycle, "residents")
    if hosp_cycle is not None:
        return MasterListResult(False, res_order, None, pair_order, hosp_cycle, "hospitals")
    if pair_cycle is not None:
        return MasterListResult(False, res_order, hosp_order, None, pair_cycle, "pairs")
    return MasterListResult(True, res_order, hosp_order, pair_order)


def split_components(inst: Instance) -> list[Instance]:
    """Split into acceptability-connected sub-instances.

    Nodes are agents and hospitals; a single is tied to every hospital it
    lists and a couple to both coordinates of every joint pair. Matchings
    and blocking pairs never cross components.
    """
    parent: dict = {}

    def find(x):
        parent.setdefault(x, x)
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        parent[find(y)] = find(x)

    for h in inst.hospitals:
        find(("h", h.id))
    for rid in inst.single_residents:
        find(("s", rid))
        for hid in inst.list_of(rid):
            union(("s", rid), ("h", hid))
    for idx, couple in enumerate(inst.couples):
        find(("c", idx))
        for pair in inst.joint_list(couple):
            union(("c", idx), ("h", pair[0]))
            union(("c", idx), ("h", pair[1]))

    buckets: dict = {}
    order: list = []

    def bucket(root):
        if root not in buckets:
            buckets[root] = {"singles": [], "couples": [], "hospitals": []}
            order.append(root)
        return buckets[root]

    for idx, couple in enumerate(inst.couples):
        bucket(find(("c", idx)))["couples"].append(couple)
    for rid in inst.single_residents:
        bucket(find(("s", rid)))["singles"].append(rid)
    for h in inst.hospitals:
        bucket(find(("h", h.id)))["hospitals"].append(h)

    out = []
    for root in order:
        b = buckets[root]
        out.append(
            Instance(
                single_residents=list(b["singles"]),
                couples=list(b["couples"]),
                hospitals=[Hospital(h.id, h.capacity, [list(g) for g in h.prefs]) for h in b["hospitals"]],
                single_prefs={r: [list(g) for g in inst.single_prefs[r]] for r in b["singles"]},
                couple_prefs={c: [list(g) for g in inst.couple_prefs[c]] for c in b["couples"]},
            )
        )
    return out
