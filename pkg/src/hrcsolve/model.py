"""Binary integer programs whose feasible points are the stable matchings.

One 0/1 variable per (resident, list position) plus an unmatched slot,
and helper variables recording when a hospital is filled by residents it
rates at least as well as a given rank. All coefficients are integers;
rows that would carry a denominator are multiplied through by it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .instance import Instance, Matching, hospital_ranks, validate_matching

SENSE_LE = -1
SENSE_EQ = 0
SENSE_GE = 1

_SENSE_TEXT = {SENSE_LE: "<=", SENSE_EQ: "=", SENSE_GE: ">="}


@dataclass
class BinaryProgram:
    """Rows stored compressed: row i covers var_idx[indptr[i]:indptr[i+1]]."""

    var_names: list[str]
    indptr: np.ndarray
    var_idx: np.ndarray
    coefs: np.ndarray
    sense: np.ndarray
    rhs: np.ndarray
    objective: np.ndarray
    n_decision: int
    row_kind: list[str]
    row_key: list[tuple]

    @property
    def n_vars(self) -> int:
        return len(self.var_names)

    @property
    def n_rows(self) -> int:
        return len(self.rhs)

    def row(self, i: int):
        lo, hi = self.indptr[i], self.indptr[i + 1]
        terms = [(int(v), int(c)) for v, c in zip(self.var_idx[lo:hi], self.coefs[lo:hi])]
        return terms, int(self.sense[i]), int(self.rhs[i])

    def row_index(self, kind: str, key: tuple) -> int:
        for i, (k, y) in enumerate(zip(self.row_kind, self.row_key)):
            if k == kind and y == key:
                return i
        raise ValueError(f"no row {kind}{key}")

    def violated_rows(self, values) -> list[int]:
        """Indices of rows the 0/1 vector breaks."""
        v = np.asarray(values, dtype=np.int64)
        out = []
        for i in range(self.n_rows):
            lo, hi = self.indptr[i], self.indptr[i + 1]
            lhs = int(self.coefs[lo:hi] @ v[self.var_idx[lo:hi]])
            s, r = int(self.sense[i]), int(self.rhs[i])
            ok = lhs <= r if s == SENSE_LE else (lhs == r if s == SENSE_EQ else lhs >= r)
            if not ok:
                out.append(i)
        return out

    def satisfies(self, values) -> bool:
        return not self.violated_rows(values)


@dataclass
class ModelMap:
    """Bidirectional variable correspondence for one compiled instance."""

    inst: Instance
    inclusive: bool  # rank sums reach rank q itself (tie-aware compilation)
    x_index: dict[tuple[str, int], int]
    alpha_index: dict[tuple[str, int], int]
    beta_index: dict[tuple[str, int], int]
    x_meta: list[tuple[str, int]]
    n_decision: int
    _ranks: dict = field(default_factory=dict, repr=False, compare=False)

    def hospital_rank(self, hid: str, rid: str) -> int:
        if hid not in self._ranks:
            self._ranks[hid] = hospital_ranks(self.inst, hid)
        return self._ranks[hid][rid]

    def rank_slots(self, hid: str, q: int) -> list[tuple[str, int]]:
        """All (resident, position) slots aiming at hid from rank q."""
        out = []
        for rid in self.inst.all_residents():
            flat = self.inst.list_of(rid)
            for p, h in enumerate(flat, start=1):
                if h == hid and self.hospital_rank(hid, rid) == q:
                    out.append((rid, p))
        return out


def _position_ends(groups) -> list[int]:
    """For each 1-based position, the last position of its rank group."""
    ends = []
    end = 0
    for g in groups:
        end += len(g)
        ends.extend([end] * len(g))
    return ends


class _Builder:
    def __init__(self, inst: Instance, inclusive: bool):
        self.inst = inst
        self.inclusive = inclusive
        self.residents = inst.all_residents()
        self.flat = {r: inst.list_of(r) for r in self.residents}
        self.ranks = {h.id: hospital_ranks(inst, h.id) for h in inst.hospitals}

        self.x_index: dict[tuple[str, int], int] = {}
        self.x_meta: list[tuple[str, int]] = []
        self.names: list[str] = []
        for rid in self.residents:
            for p in range(1, len(self.flat[rid]) + 2):
                self.x_index[(rid, p)] = len(self.names)
                self.names.append(f"x[{rid},{p}]")
                self.x_meta.append((rid, p))
        self.n_decision = len(self.names)

        # position -> end of its tie group, per agent (strict: identity)
        self.ends: dict[str, list[int]] = {}
        for rid in inst.single_residents:
            self.ends[rid] = _position_ends(inst.single_prefs[rid])
        for couple in inst.couples:
            e = _position_ends(inst.couple_prefs[couple])
            self.ends[couple[0]] = e
            self.ends[couple[1]] = e

        # per hospital: rank level -> [(x var, resident)] in resident order
        self.level_slots: dict[str, dict[int, list[tuple[int, str]]]] = {
            h.id: {} for h in inst.hospitals
        }
        for rid in self.residents:
            for p, h in enumerate(self.flat[rid], start=1):
                q = self.ranks[h][rid]
                self.level_slots[h].setdefault(q, []).append((self.x_index[(rid, p)], rid))

        self.rows_kind: list[str] = []
        self.rows_key: list[tuple] = []
        self.rows_terms: list[list[tuple[int, int]]] = []
        self.rows_sense: list[int] = []
        self.rows_rhs: list[int] = []

    # --- term helpers ---

    def x(self, rid: str, p: int) -> int:
        return self.x_index[(rid, p)]

    def tail(self, rid: str, p: int) -> list[int]:
        """Vars for every position strictly worse than p's tie group."""
        start = self.ends[rid][p - 1] if self.inclusive else p
        return [self.x(rid, q) for q in range(start + 1, len(self.flat[rid]) + 2)]

    def prefix_slots(self, hid: str, q: int, exclude=()) -> list[int]:
        """Slot vars of residents ranked ahead of q at hid (with q itself
        when compiling tie-aware), minus excluded residents' slots."""
        limit_ok = (lambda lv: lv <= q) if self.inclusive else (lambda lv: lv < q)
        out = []
        for lv in sorted(self.level_slots[hid]):
            if not limit_ok(lv):
                break
            for var, rid in self.level_slots[hid][lv]:
                if rid not in exclude:
                    out.append(var)
        return out

    def all_slots(self, hid: str) -> list[int]:
        out = []
        for lv in sorted(self.level_slots[hid]):
            out.extend(var for var, _ in self.level_slots[hid][lv])
        return out

    def add(self, kind: str, key: tuple, terms, sense: int, rhs: int) -> None:
        merged: dict[int, int] = {}
        for var, coef in terms:
            merged[var] = merged.get(var, 0) + coef
        self.rows_kind.append(kind)
        self.rows_key.append(key)
        self.rows_terms.append(sorted((v, c) for v, c in merged.items() if c != 0))
        self.rows_sense.append(sense)
        self.rows_rhs.append(rhs)

    # --- row families, in emission order ---

    def emit(self) -> tuple[BinaryProgram, ModelMap]:
        inst = self.inst
        cap = {h.id: h.capacity for h in inst.hospitals}

        # helper variables wanted by the packed couple rows
        alpha_pairs: set[tuple[str, int]] = set()
        beta_pairs: set[tuple[str, int]] = set()
        for a, b in inst.couples:
            for ha, hb in inst.joint_list((a, b)):
                qa, qb = self.ranks[ha][a], self.ranks[hb][b]
                if ha != hb:
                    alpha_pairs.add((ha, qa))
                    alpha_pairs.add((hb, qb))
                elif cap[ha] >= 2:
                    alpha_pairs.add((ha, max(qa, qb)))
                    beta_pairs.add((ha, min(qa, qb)))

        horder = {h.id: i for i, h in enumerate(inst.hospitals)}
        alpha_index = {}
        for hid, q in sorted(alpha_pairs, key=lambda t: (horder[t[0]], t[1])):
            alpha_index[(hid, q)] = len(self.names)
            self.names.append(f"alpha[{hid},{q}]")
        beta_index = {}
        for hid, q in sorted(beta_pairs, key=lambda t: (horder[t[0]], t[1])):
            beta_index[(hid, q)] = len(self.names)
            self.names.append(f"beta[{hid},{q}]")

        for rid in self.residents:
            terms = [(self.x(rid, p), 1) for p in range(1, len(self.flat[rid]) + 2)]
            self.add("assign", (rid,), terms, SENSE_EQ, 1)

        for a, b in inst.couples:
            for p in range(1, len(self.flat[a]) + 2):
                self.add("couple", (a, b, p), [(self.x(a, p), 1), (self.x(b, p), -1)], SENSE_EQ, 0)

        for h in inst.hospitals:
            self.add("capacity", (h.id,), [(v, 1) for v in self.all_slots(h.id)], SENSE_LE, h.capacity)

        for rid in inst.single_residents:
            for p, h in enumerate(self.flat[rid], start=1):
                q = self.ranks[h][rid]
                terms = [(v, cap[h]) for v in self.tail(rid, p)]
                terms += [(v, -1) for v in self.prefix_slots(h, q, exclude=(rid,))]
                self.add("stab1", (rid, p), terms, SENSE_LE, 0)

        self._couple_move_rows("stab2a", mover=0)
        self._couple_move_rows("stab2b", mover=1)

        for a, b in inst.couples:
            joint = inst.joint_list((a, b))
            for p, (ha, hb) in enumerate(joint, start=1):
                if ha == hb:
                    continue
                qa, qb = self.ranks[ha][a], self.ranks[hb][b]
                terms = [(v, 1) for v in self.tail(a, p)]
                terms.append((alpha_index[(ha, qa)], 1))
                terms.append((alpha_index[(hb, qb)], 1))
                self.add("stab3a", (a, b, p), terms, SENSE_LE, 2)

        for a, b in inst.couples:
            joint = inst.joint_list((a, b))
            for p, (ha, hb) in enumerate(joint, start=1):
                if ha != hb or cap[ha] < 2:
                    continue
                c = cap[ha]
                q = min(self.ranks[ha][a], self.ranks[ha][b])
                terms = [(v, c * (c - 1)) for v in self.tail(a, p)]
                terms += [(v, -(c - 1)) for v in self.all_slots(ha)]
                terms += [(v, -1) for v in self.prefix_slots(ha, q, exclude=(a, b))]
                self.add("stab3bc", (a, b, p), terms, SENSE_LE, 0)

        for a, b in inst.couples:
            joint = inst.joint_list((a, b))
            for p, (ha, hb) in enumerate(joint, start=1):
                if ha != hb or cap[ha] < 2:
                    continue
                qa, qb = self.ranks[ha][a], self.ranks[ha][b]
                terms = [(v, 1) for v in self.tail(a, p)]
                terms.append((alpha_index[(ha, max(qa, qb))], 1))
                terms.append((beta_index[(ha, min(qa, qb))], 1))
                self.add("stab3d", (a, b, p), terms, SENSE_LE, 2)

        for (hid, q), var in alpha_index.items():
            terms = [(var, cap[hid])] + [(v, 1) for v in self.prefix_slots(hid, q)]
            self.add("alpha_def", (hid, q), terms, SENSE_GE, cap[hid])

        for (hid, q), var in beta_index.items():
            terms = [(var, cap[hid] - 1)] + [(v, 1) for v in self.prefix_slots(hid, q)]
            self.add("beta_def", (hid, q), terms, SENSE_GE, cap[hid] - 1)

        for a, b in inst.couples:
            joint = inst.joint_list((a, b))
            for p, (ha, hb) in enumerate(joint, start=1):
                if ha == hb and cap[ha] == 1:
                    self.add("forbid", (a, b, p), [(self.x(a, p), 1)], SENSE_LE, 0)

        objective = np.zeros(len(self.names), dtype=np.int64)
        for rid in self.residents:
            for p in range(1, len(self.flat[rid]) + 1):
                objective[self.x(rid, p)] = 1

        nnz = sum(len(t) for t in self.rows_terms)
        indptr = np.zeros(len(self.rows_terms) + 1, dtype=np.int64)
        var_idx = np.zeros(nnz, dtype=np.int32)
        coefs = np.zeros(nnz, dtype=np.int64)
        at = 0
        for i, terms in enumerate(self.rows_terms):
            for v, c in terms:
                var_idx[at] = v
                coefs[at] = c
                at += 1
            indptr[i + 1] = at

        program = BinaryProgram(
            var_names=self.names,
            indptr=indptr,
            var_idx=var_idx,
            coefs=coefs,
            sense=np.array(self.rows_sense, dtype=np.int8),
            rhs=np.array(self.rows_rhs, dtype=np.int64),
            objective=objective,
            n_decision=self.n_decision,
            row_kind=self.rows_kind,
            row_key=self.rows_key,
        )
        mp = ModelMap(
            inst=inst,
            inclusive=self.inclusive,
            x_index=dict(self.x_index),
            alpha_index=alpha_index,
            beta_index=beta_index,
            x_meta=list(self.x_meta),
            n_decision=self.n_decision,
        )
        return program, mp

    def _couple_move_rows(self, kind: str, mover: int) -> None:
        """Rows forbidding one member an upgrade while the other stays put.

        mover 0: the first member heads for the pair's first hospital, the
        second stays; mover 1 the other way round. When both coordinates
        name one hospital the stayer already fills a post there, so the
        bar drops to capacity minus one and the stayer's own slots are
        left out of the count.
        """
        inst = self.inst
        cap = {h.id: h.capacity for h in inst.hospitals}
        for a, b in inst.couples:
            joint = inst.joint_list((a, b))
            l = len(joint)
            for p1, pair in enumerate(joint, start=1):
                target = pair[mover]
                stay_h = pair[1 - mover]
                stayer = (a, b)[1 - mover]
                moving = (a, b)[mover]
                gate_from = self.ends[a][p1 - 1] if self.inclusive else p1
                gate = [
                    p2
                    for p2 in range(gate_from + 1, l + 1)
                    if joint[p2 - 1][1 - mover] == stay_h
                ]
                if not gate:
                    continue
                q = self.ranks[target][moving]
                if target != stay_h:
                    terms = [(self.x(stayer, p2), cap[target]) for p2 in gate]
                    terms += [(v, -1) for v in self.prefix_slots(target, q, exclude=(moving,))]
                elif cap[target] >= 2:
                    terms = [(self.x(stayer, p2), cap[target] - 1) for p2 in gate]
                    terms += [
                        (v, -1)
                        for v in self.prefix_slots(target, q, exclude=(moving, stayer))
                    ]
                else:
                    continue
                self.add(kind, (a, b, p1), terms, SENSE_LE, 0)


def build_hr(inst: Instance) -> tuple[BinaryProgram, ModelMap]:
    """Program for a couple-free instance: assignment, capacity, and the
    no-better-hospital rows."""
    if inst.couples:
        raise ValueError("instance contains couples; use build_hrc")
    if not inst.is_strict():
        raise ValueError("instance has ties; use build_hrct")
    return _Builder(inst, inclusive=False).emit()


def build_hrc(inst: Instance) -> tuple[BinaryProgram, ModelMap]:
    """Full couple-aware program over strict lists."""
    if not inst.is_strict():
        raise ValueError("instance has ties; use build_hrct")
    return _Builder(inst, inclusive=False).emit()


def build_hrct(inst: Instance) -> tuple[BinaryProgram, ModelMap]:
    """Tie-aware variant: rank sums include the rank itself and position
    sums skip whole tie groups. On strict input the feasible set matches
    build_hrc exactly."""
    return _Builder(inst, inclusive=True).emit()


def encode(mp: ModelMap, m: Matching) -> np.ndarray:
    """0/1 vector for a matching, helper variables at their minima."""
    inst = mp.inst
    validate_matching(inst, m)
    vec = np.zeros(_n_vars(mp), dtype=np.int8)
    for rid in inst.all_residents():
        flat = inst.list_of(rid)
        hid = m.get(rid)
        if hid is None:
            p = len(flat) + 1
        elif inst.is_single(rid):
            p = flat.index(hid) + 1
        else:
            couple = inst.couples[inst.couple_index_of(rid)]
            pair = (m.get(couple[0]), m.get(couple[1]))
            p = inst.joint_list(couple).index(pair) + 1
        vec[mp.x_index[(rid, p)]] = 1

    filled = {h.id: {} for h in inst.hospitals}
    for rid, hid in m.assignment.items():
        q = mp.hospital_rank(hid, rid)
        filled[hid][q] = filled[hid].get(q, 0) + 1

    def better_count(hid: str, q: int) -> int:
        if mp.inclusive:
            return sum(n for lv, n in filled[hid].items() if lv <= q)
        return sum(n for lv, n in filled[hid].items() if lv < q)

    for (hid, q), var in mp.alpha_index.items():
        vec[var] = 1 if better_count(hid, q) < inst.hospital(hid).capacity else 0
    for (hid, q), var in mp.beta_index.items():
        vec[var] = 1 if better_count(hid, q) < inst.hospital(hid).capacity - 1 else 0
    return vec


def _n_vars(mp: ModelMap) -> int:
    n = mp.n_decision
    if mp.alpha_index:
        n = max(n, max(mp.alpha_index.values()) + 1)
    if mp.beta_index:
        n = max(n, max(mp.beta_index.values()) + 1)
    return n


def decode(mp: ModelMap, values) -> Matching:
    """Matching named by the x part of a 0/1 vector."""
    v = np.asarray(values)
    assignment: dict[str, str] = {}
    for rid in mp.inst.all_residents():
        flat = mp.inst.list_of(rid)
        hit = [p for p in range(1, len(flat) + 2) if v[mp.x_index[(rid, p)]]]
        if len(hit) != 1:
            raise ValueError(f"resident {rid!r} holds {len(hit)} positions")
        if hit[0] <= len(flat):
            assignment[rid] = flat[hit[0] - 1]
    return Matching(assignment)


def dump_lp(p: BinaryProgram) -> str:
    """One constraint per line, integer coefficients throughout."""
    def term(v, c):
        sign = "+" if c >= 0 else "-"
        mag = abs(c)
        coef = "" if mag == 1 else f"{mag} "
        return f"{sign} {coef}{p.var_names[v]}"

    lines = []
    obj = " ".join(term(v, int(c)) for v, c in enumerate(p.objective) if c)
    lines.append(f"max: {obj}")
    for i in range(p.n_rows):
        terms, sense, rhs = p.row(i)
        body = " ".join(term(v, c) for v, c in terms) or "0"
        name = "{}[{}]".format(p.row_kind[i], ",".join(str(k) for k in p.row_key[i]))
        lines.append(f"{name}: {body} {_SENSE_TEXT[sense]} {rhs}")
    return "\n".join(lines) + "\n"
