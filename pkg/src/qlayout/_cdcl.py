"""Conflict-driven search core over 0/1 columns.

Consumes the same lowered rows the MILP path uses: linear constraints over
binary columns with integral coefficients. Rows whose normalized form is a
plain disjunction are propagated with two watched literals; the remaining
pseudo-Boolean rows are propagated by counting (track the largest value the
left side can still reach; when that dips below the bound plus a literal's
weight, the literal is forced). Conflicts are analyzed to a
first-unique-implication-point clause, which is learned and drives
non-chronological backjumping. Activity-ordered decisions with phase
saving, Luby restarts, and periodic deletion of inactive learned clauses
round out a standard small CDCL engine.

Everything is deterministic: ties break on index, no randomization.

Literal convention: literal 2*c asserts column c is 1, literal 2*c+1
asserts it is 0. A literal is "false" once its column is assigned the
other way. Reasons are encoded as non-negative clause indices or
-(pb_index + 2); -1 marks a decision.
"""

from __future__ import annotations

import heapq
import math
import time

import numpy as np

_UNSET = -1


class CdclUnsupported(Exception):
    """Row not expressible over integral binary literals."""


def _as_int(x: float, what: str) -> int:
    r = round(x)
    if abs(x - r) > 1e-9:
        raise CdclUnsupported(f"non-integral {what}: {x!r}")
    return int(r)


class Searcher:
    """Incremental CDCL over a fixed column set.

    Constraints may be added between search() calls (the search state is
    rewound to the root first). search() returns "sat", "unsat", or
    "timeout"; after "sat", model() holds a full 0/1 column vector.
    """

    def __init__(self, nvars: int):
        self.nvars = nvars
        self.val: list[int] = [_UNSET] * nvars
        self.saved: list[int] = [0] * nvars
        self.level: list[int] = [0] * nvars
        self.reason: list[int] = [-1] * nvars
        self.pos: list[int] = [0] * nvars
        self.act: list[float] = [0.0] * nvars
        self.act_inc = 1.0
        self.order: list[tuple[float, int]] = [(0.0, v) for v in range(nvars)]
        heapq.heapify(self.order)
        self.trail: list[int] = []
        self.qhead = 0
        self.dl = 0
        self.num_assigned = 0
        # clause store (original and learned) under two-literal watches
        self.clauses: list[list[int] | None] = []
        self.cl_act: list[float] = []
        self.cl_learned: list[bool] = []
        self.cl_inc = 1.0
        self.watches: list[list[int]] = [[] for _ in range(2 * nvars)]
        self.n_learned = 0
        # pseudo-Boolean rows under counting propagation
        self.pb_lits: list[list[int]] = []
        self.pb_coefs: list[list[int]] = []
        self.pb_b: list[int] = []
        self.pb_maxpos: list[int] = []
        self.pb_maxcoef: list[int] = []
        self.occ: list[list[tuple[int, int]]] = [[] for _ in range(2 * nvars)]
        self.hard_unsat = False
        self._pending_pb: list[int] = []
        self._pending_cl: list[int] = []
        self._model: np.ndarray | None = None
        self.conflicts = 0
        self.decisions = 0
        self.propagations = 0

    # -- construction -------------------------------------------------------

    def add_linear(self, coeffs: dict[int, float], lb: float, ub: float) -> None:
        """Register lb <= sum coef*x <= ub (either bound may be infinite)."""
        items = [(c, _as_int(v, "coefficient")) for c, v in coeffs.items() if v]
        if ub != math.inf:
            self._add_ge([(-cf, col) for col, cf in items], -_as_int(ub, "bound"))
        if lb != -math.inf:
            self._add_ge([(cf, col) for col, cf in items], _as_int(lb, "bound"))

    def _add_ge(self, terms: list[tuple[int, int]], b: int) -> None:
        # normalize to positive coefficients over literals
        lits, coefs = [], []
        for cf, col in terms:
            if cf > 0:
                lits.append(2 * col)
                coefs.append(cf)
            elif cf < 0:
                lits.append(2 * col + 1)
                coefs.append(-cf)
                b += -cf
        if b <= 0:
            return
        if sum(coefs) < b:
            self.hard_unsat = True
            return
        coefs = [min(cf, b) for cf in coefs]
        if b == 1:
            # watches are registered by _root_scan once live lits are known
            self._pending_cl.append(self._new_clause(lits, learned=False,
                                                     register=False))
        elif b == len(lits) - 1 and all(cf == 1 for cf in coefs):
            # "all but one": equivalent to pairwise disjunctions, which give
            # conflict analysis short reasons where a counting row would not
            for i in range(len(lits)):
                for j in range(i + 1, len(lits)):
                    self._pending_cl.append(self._new_clause(
                        [lits[i], lits[j]], learned=False, register=False))
        else:
            self._attach_pb(lits, coefs, b)

    def _new_clause(self, lits: list[int], learned: bool,
                    register: bool = True) -> int:
        ci = len(self.clauses)
        self.clauses.append(lits)
        self.cl_act.append(0.0)
        self.cl_learned.append(learned)
        if learned:
            self.n_learned += 1
        if register and len(lits) >= 2:
            self.watches[lits[0]].append(ci)
            self.watches[lits[1]].append(ci)
        return ci

    def _attach_pb(self, lits: list[int], coefs: list[int], b: int) -> None:
        pi = len(self.pb_lits)
        self.pb_lits.append(lits)
        self.pb_coefs.append(coefs)
        self.pb_b.append(b)
        self.pb_maxcoef.append(max(coefs))
        # count everything not currently false; undone pops re-add their coef
        mp = 0
        for lit, cf in zip(lits, coefs):
            if not self._lit_false(lit):
                mp += cf
            self.occ[lit].append((pi, cf))
        self.pb_maxpos.append(mp)
        self._pending_pb.append(pi)

    # -- assignment plumbing -------------------------------------------------

    def _lit_true(self, lit: int) -> bool:
        return self.val[lit >> 1] == 1 - (lit & 1)

    def _lit_false(self, lit: int) -> bool:
        v = self.val[lit >> 1]
        return v != _UNSET and v != 1 - (lit & 1)

    def _assign(self, lit: int, reason: int) -> None:
        v = lit >> 1
        value = 1 - (lit & 1)
        self.val[v] = value
        self.saved[v] = value
        self.level[v] = self.dl
        self.reason[v] = reason
        self.pos[v] = len(self.trail)
        self.trail.append(lit)
        self.num_assigned += 1

    def _flush_queue(self) -> None:
        maxpos, occ = self.pb_maxpos, self.occ
        while self.qhead < len(self.trail):
            for pi, cf in occ[self.trail[self.qhead] ^ 1]:
                maxpos[pi] -= cf
            self.qhead += 1

    def _backtrack(self, bl: int) -> None:
        self._flush_queue()
        trail, val, level = self.trail, self.val, self.level
        maxpos, occ = self.pb_maxpos, self.occ
        while trail and level[trail[-1] >> 1] > bl:
            lit = trail.pop()
            v = lit >> 1
            for pi, cf in occ[lit ^ 1]:
                maxpos[pi] += cf
            val[v] = _UNSET
            self.num_assigned -= 1
            heapq.heappush(self.order, (-self.act[v], v))
        self.dl = bl
        self.qhead = len(trail)

    # -- propagation ---------------------------------------------------------

    def _scan_pb(self, pi: int) -> bool:
        """Force literals a tight row demands; False when already violated."""
        slack = self.pb_maxpos[pi] - self.pb_b[pi]
        if slack < 0:
            return False
        # queued-but-unapplied falsifications keep slack conservative here;
        # genuine violations surface when the queue applies their counts
        val = self.val
        for lit, cf in zip(self.pb_lits[pi], self.pb_coefs[pi]):
            if cf > slack and val[lit >> 1] == _UNSET:
                self._assign(lit, -(pi + 2))
        return True

    def _propagate(self) -> int | None:
        """Returns a reason code of a conflicting constraint, or None."""
        val = self.val
        clauses = self.clauses
        while self.qhead < len(self.trail):
            lit = self.trail[self.qhead]
            self.qhead += 1
            self.propagations += 1
            fl = lit ^ 1
            row = self.occ[fl]
            if row:
                maxpos, pb_b, pb_maxcoef = self.pb_maxpos, self.pb_b, self.pb_maxcoef
                conflict = None
                triggers = None
                for pi, cf in row:
                    mp = maxpos[pi] - cf
                    maxpos[pi] = mp
                    slack = mp - pb_b[pi]
                    if slack < 0:
                        if conflict is None:
                            conflict = pi
                    elif slack < pb_maxcoef[pi]:
                        if triggers is None:
                            triggers = [pi]
                        else:
                            triggers.append(pi)
                if conflict is not None:
                    self._flush_queue()
                    return -(conflict + 2)
                if triggers is not None:
                    for pi in triggers:
                        if not self._scan_pb(pi):
                            self._flush_queue()
                            return -(pi + 2)
            # two-watch pass over clauses watching the falsified literal
            ws = self.watches[fl]
            out = 0
            i = 0
            n = len(ws)
            while i < n:
                ci = ws[i]
                i += 1
                cl = clauses[ci]
                if cl is None:
                    continue  # deleted; drop the stale watch entry
                if cl[0] == fl:
                    cl[0], cl[1] = cl[1], fl
                first = cl[0]
                fv = val[first >> 1]
                if fv != _UNSET and fv == 1 - (first & 1):
                    ws[out] = ci
                    out += 1
                    continue  # satisfied by the other watch
                moved = False
                for j in range(2, len(cl)):
                    other = cl[j]
                    ov = val[other >> 1]
                    if ov == _UNSET or ov == 1 - (other & 1):
                        cl[1], cl[j] = other, fl
                        self.watches[other].append(ci)
                        moved = True
                        break
                if moved:
                    continue
                ws[out] = ci
                out += 1
                if fv == _UNSET:
                    self._assign(first, ci)
                else:
                    while i < n:  # keep the unvisited watch entries
                        ws[out] = ws[i]
                        out += 1
                        i += 1
                    del ws[out:]
                    self._flush_queue()
                    return ci
            del ws[out:]
        return None

    # -- conflict analysis ---------------------------------------------------

    def _reason_lits(self, code: int, skip_var: int, before: int) -> list[int]:
        """Falsified literals explaining a propagation or conflict; only
        assignments preceding trail position `before` qualify (later
        falsifications sit above the resolution frontier)."""
        lits = self.clauses[code] if code >= 0 else self.pb_lits[-code - 2]
        if code >= 0 and self.cl_learned[code]:
            self.cl_act[code] += self.cl_inc
        out = []
        for lit in lits:
            v = lit >> 1
            if v == skip_var or not self._lit_false(lit):
                continue
            if self.pos[v] >= before:
                continue
            out.append(lit)
        return out

    def _analyze(self, code: int) -> tuple[list[int], int]:
        seen = [False] * self.nvars
        learned: list[int] = []
        bumped: list[int] = []
        counter = 0
        for lit in self._reason_lits(code, -1, len(self.trail)):
            v = lit >> 1
            if not seen[v] and self.level[v] > 0:
                seen[v] = True
                bumped.append(v)
                if self.level[v] == self.dl:
                    counter += 1
                else:
                    learned.append(lit)
        idx = len(self.trail) - 1
        uip = None
        while True:
            while idx >= 0 and not seen[self.trail[idx] >> 1]:
                idx -= 1
            if idx < 0:
                raise AssertionError("conflict analysis lost the trail")
            lit = self.trail[idx]
            v = lit >> 1
            idx -= 1
            counter -= 1
            if counter == 0:
                uip = lit ^ 1
                break
            for rl in self._reason_lits(self.reason[v], v, self.pos[v]):
                rv = rl >> 1
                if not seen[rv] and self.level[rv] > 0:
                    seen[rv] = True
                    bumped.append(rv)
                    if self.level[rv] == self.dl:
                        counter += 1
                    else:
                        learned.append(rl)
        self.act_inc /= 0.95
        if self.act_inc > 1e100:
            self.act = [a * 1e-100 for a in self.act]
            self.act_inc *= 1e-100
            self.order = [(-self.act[v], v) for v in range(self.nvars)
                          if self.val[v] == _UNSET]
            heapq.heapify(self.order)
        act, inc = self.act, self.act_inc
        push = heapq.heappush
        for v in bumped:
            act[v] += inc
            push(self.order, (-act[v], v))
        self.cl_inc /= 0.999
        bj = max((self.level[l >> 1] for l in learned), default=0)
        return [uip] + learned, int(bj)

    # -- learned-clause housekeeping ------------------------------------------

    def _reduce_db(self) -> None:
        """Drop the least active half of the learned clauses."""
        cands = []
        for ci, cl in enumerate(self.clauses):
            if cl is None or not self.cl_learned[ci] or len(cl) <= 2:
                continue
            v = cl[0] >> 1
            if self.val[v] != _UNSET and self.reason[v] == ci:
                continue  # locked: currently the reason of its first watch
            cands.append((self.cl_act[ci], ci))
        cands.sort()
        for _, ci in cands[: len(cands) // 2]:
            self.clauses[ci] = None  # watch lists drop stale refs lazily
            self.n_learned -= 1
        if self.cl_inc > 1e100:
            scale = 1e-100
            self.cl_act = [a * scale for a in self.cl_act]
            self.cl_inc *= scale

    # -- main loop -----------------------------------------------------------

    def _root_scan(self) -> bool:
        """Propagate pending rows at the root; False means unsat.

        Pending clauses may carry literals already false at level 0, so the
        two watch slots are chosen among live literals here; root-false
        literals stay in the tail and are skipped by the watch loop."""
        for pi in self._pending_pb:
            if not self._scan_pb(pi) or self._propagate() is not None:
                return False
        for ci in self._pending_cl:
            cl = self.clauses[ci]
            live = [l for l in cl if not self._lit_false(l)]
            if not live:
                return False
            if len(live) == 1:
                if not self._lit_true(live[0]):
                    self._assign(live[0], ci)
                    if self._propagate() is not None:
                        return False
                continue
            dead = [l for l in cl if self._lit_false(l)]
            cl[:] = live + dead
            self.watches[cl[0]].append(ci)
            self.watches[cl[1]].append(ci)
        self._pending_pb = []
        self._pending_cl = []
        return True

    def boost(self, var: int, amount: float = 1.0,
              phase: int | None = None) -> None:
        """Raise a variable's decision priority; optionally seed its phase.

        A pre-search hint only: callers that know which columns drive reward
        (objective columns, say) can steer early decisions toward them.
        """
        if not (0 <= var < self.nvars):
            raise ValueError(f"variable {var} out of range")
        self.act[var] += amount
        heapq.heappush(self.order, (-self.act[var], var))
        if phase is not None:
            self.saved[var] = 1 if phase else 0

    def _decide(self) -> None:
        order, val, act = self.order, self.val, self.act
        while order:
            a, v = heapq.heappop(order)
            if val[v] == _UNSET and -a == act[v]:
                self.dl += 1
                self.decisions += 1
                self._assign(2 * v + (1 - self.saved[v]), -1)
                return
        # activities drifted; rebuild and retry
        self.order = [(-act[v], v) for v in range(self.nvars)
                      if val[v] == _UNSET]
        heapq.heapify(self.order)
        a, v = heapq.heappop(self.order)
        self.dl += 1
        self.decisions += 1
        self._assign(2 * v + (1 - self.saved[v]), -1)

    @staticmethod
    def _luby(i: int) -> int:
        # 1-based Luby sequence 1 1 2 1 1 2 4 ...
        while True:
            k = i.bit_length()
            if i == (1 << k) - 1:
                return 1 << (k - 1)
            i = i - (1 << (k - 1)) + 1

    def search(self, deadline: float | None = None) -> str:
        if self.hard_unsat:
            return "unsat"
        self._backtrack(0)
        if not self._root_scan():
            return "unsat"
        restart_idx = 1
        budget = 128 * self._luby(restart_idx)
        since_restart = 0
        reduce_at = 2000
        while True:
            code = self._propagate()
            if code is not None:
                self.conflicts += 1
                since_restart += 1
                if self.dl == 0:
                    return "unsat"
                lits, bj = self._analyze(code)
                self._backtrack(bj)
                if len(lits) > 1:
                    # watch a literal of the backjump level alongside the
                    # asserted one, so backtracking unassigns both watches
                    for j in range(1, len(lits)):
                        if self.level[lits[j] >> 1] == bj:
                            lits[1], lits[j] = lits[j], lits[1]
                            break
                ci = self._new_clause(lits, learned=True)
                self._assign(lits[0], ci)
                if self.conflicts % 256 == 0 and deadline is not None \
                        and time.monotonic() > deadline:
                    return "timeout"
                if self.n_learned >= reduce_at:
                    self._reduce_db()
                    reduce_at += 500
                if since_restart >= budget:
                    restart_idx += 1
                    budget = 128 * self._luby(restart_idx)
                    since_restart = 0
                    self._backtrack(0)
                continue
            if self.num_assigned == self.nvars:
                self._model = np.array(self.val, dtype=np.int8)
                return "sat"
            self._decide()

    def model(self) -> np.ndarray:
        if self._model is None:
            raise RuntimeError("no model captured")
        return self._model
