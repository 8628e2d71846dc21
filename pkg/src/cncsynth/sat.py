"""SAT backend: CNF instances, an internal CDCL solver, DIMACS interop with
external solvers, and blocking clauses for solution enumeration.

The internal solver is complete and deterministic: branching uses variable
activities with ascending-index tie-breaking (or pure ascending index in
"index" mode) with phase saving, learns 1UIP clauses, and restarts on a
Luby schedule.  Structural variables are allocated first by the encoder, so
initial decisions start in the structural core.
"""

from __future__ import annotations

import heapq
import subprocess
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path


@dataclass(frozen=True)
class CnfInstance:
    """An immutable CNF formula.  ``comments`` are carried into DIMACS output;
    ``groups`` map clause index ranges to the constraint group that produced
    them."""

    num_vars: int
    clauses: tuple[tuple[int, ...], ...]
    comments: tuple[str, ...] = ()
    groups: tuple[tuple[str, int, int], ...] = ()

    def extended(self, extra: list[tuple[int, ...]], label: str = "added") -> "CnfInstance":
        """Copy-on-extend: a new instance with ``extra`` clauses appended."""
        n = len(self.clauses)
        return CnfInstance(
            self.num_vars,
            self.clauses + tuple(tuple(c) for c in extra),
            self.comments,
            self.groups + ((label, n, n + len(extra)),),
        )


@dataclass(frozen=True)
class SolverLimits:
    conflicts: int | None = None
    wall_seconds: float | None = None


@dataclass(frozen=True)
class SolverConfig:
    engine: str = "internal"  # "internal" or a path to an external solver
    seed: int = 0
    limits: SolverLimits = SolverLimits()
    branching: str = "vsids"  # "vsids" (activity, index tie-break) or "index"


@dataclass
class SolveStats:
    conflicts: int = 0
    decisions: int = 0
    propagations: int = 0
    solve_seconds: float = 0.0


SAT, UNSAT, RESOURCE_LIMIT = "SAT", "UNSAT", "RESOURCE_LIMIT"


@dataclass
class SolveResult:
    status: str  # SAT | UNSAT | RESOURCE_LIMIT
    assignment: dict[int, bool] | None = None
    stats: SolveStats = field(default_factory=SolveStats)


class SolverError(Exception):
    pass


def check_assignment(cnf: CnfInstance, assignment: dict[int, bool]) -> bool:
    return all(any(assignment.get(abs(l), False) == (l > 0) for l in clause)
               for clause in cnf.clauses)


# --- Internal CDCL solver ----------------------------------------------------

class _Cdcl:
    """Conflict-driven clause learning with two-watched-literal propagation,
    a dedicated binary-implication graph, 1UIP learning with local clause
    minimization, phase saving and Luby restarts.

    Branching is deterministic: ``vsids`` (the default) uses exponential
    variable activities with ties broken by ascending variable index, so a
    given formula always produces the same run; ``index`` always picks the
    lowest-indexed unassigned variable.
    """

    def __init__(self, num_vars: int, limits: SolverLimits,
                 branching: str = "vsids", default_phase: bool = True):
        nv = num_vars
        self.nv = nv
        # val[lit + nv]: 1 if the literal is true, -1 false, 0 unassigned.
        self.val = [0] * (2 * nv + 1)
        self.level = [0] * (nv + 1)
        # reason[v]: None (decision/unit), an int ``other`` meaning the binary
        # clause (implied, other), or the full clause as a list.
        self.reason: list = [None] * (nv + 1)
        self.phase = [default_phase] * (nv + 1)
        # bin_imp[lit + nv]: literals implied when ``lit`` becomes true.
        self.bin_imp: list[list[int]] = [[] for _ in range(2 * nv + 1)]
        self.watches: list[list[tuple[int, list[int]]]] = [[] for _ in range(2 * nv + 1)]
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.branching = branching
        self.head_var = 1
        self.activity = [0.0] * (nv + 1)
        self.var_inc = 1.0
        self.inv_decay = 1.0 / 0.8
        self.restart_base = 256
        self.heap: list[tuple[float, int]] = [(0.0, v) for v in range(1, nv + 1)]
        self.seen = [False] * (nv + 1)
        self.learnts: list[list[int]] = []
        self.limits = limits
        self.stats = SolveStats()
        self.ok = True
        self.warm_start = False

    def value(self, lit: int) -> int:
        return self.val[lit + self.nv]

    def add_clause(self, lits: tuple[int, ...]) -> None:
        """Add an original clause (call before solving only)."""
        seen = set()
        out = []
        for l in lits:
            if -l in seen:
                return  # tautology
            if l not in seen:
                seen.add(l)
                out.append(l)
        if not out:
            self.ok = False
            return
        if len(out) == 1:
            if not self.enqueue(out[0], None):
                self.ok = False
            return
        if len(out) == 2:
            a, b = out
            self.bin_imp[-a + self.nv].append(b)
            self.bin_imp[-b + self.nv].append(a)
            return
        c = out
        self.watches[c[0] + self.nv].append((c[1], c))
        self.watches[c[1] + self.nv].append((c[0], c))

    def add_blocking_clause(self, lits: tuple[int, ...]) -> None:
        """Add a clause between solve calls.  Backtracks to level 0 and
        simplifies against the root-level assignment so the watch invariant
        holds."""
        self.cancel_until(0)
        nv = self.nv
        val = self.val
        out = []
        for l in lits:
            v = val[l + nv]
            if v == 1:
                return  # already satisfied at the root level
            if v == 0:
                out.append(l)
        if not out:
            self.ok = False
            return
        if len(out) == 1:
            if not self.enqueue(out[0], None):
                self.ok = False
            return
        if len(out) == 2:
            a, b = out
            self.bin_imp[-a + nv].append(b)
            self.bin_imp[-b + nv].append(a)
            return
        self.watches[out[0] + nv].append((out[1], out))
        self.watches[out[1] + nv].append((out[0], out))

    def enqueue(self, lit: int, reason) -> bool:
        nv = self.nv
        v = self.val[lit + nv]
        if v == 1:
            return True
        if v == -1:
            return False
        var = lit if lit > 0 else -lit
        self.val[lit + nv] = 1
        self.val[-lit + nv] = -1
        self.level[var] = len(self.trail_lim)
        self.reason[var] = reason
        self.trail.append(lit)
        return True

    def propagate(self):
        """Unit propagation; returns a conflicting clause (list) or None."""
        nv = self.nv
        val = self.val
        level = self.level
        reason = self.reason
        trail = self.trail
        bin_imp = self.bin_imp
        watches = self.watches
        cur_level = len(self.trail_lim)
        props = 0
        while self.qhead < len(trail):
            p = trail[self.qhead]
            self.qhead += 1
            props += 1
            for q in bin_imp[p + nv]:
                vq = val[q + nv]
                if vq == 0:
                    var = q if q > 0 else -q
                    val[q + nv] = 1
                    val[-q + nv] = -1
                    level[var] = cur_level
                    reason[var] = -p
                    trail.append(q)
                elif vq < 0:
                    self.stats.propagations += props
                    return [q, -p]
            false_lit = -p
            widx = false_lit + nv
            ws = watches[widx]
            keep = []
            i, n = 0, len(ws)
            while i < n:
                w = ws[i]
                i += 1
                blocker = w[0]
                if val[blocker + nv] > 0:
                    keep.append(w)
                    continue
                c = w[1]
                if c[0] == false_lit:
                    c[0] = c[1]
                    c[1] = false_lit
                first = c[0]
                fv = val[first + nv]
                if fv > 0:
                    keep.append((first, c))
                    continue
                moved = False
                for k in range(2, len(c)):
                    ck = c[k]
                    if val[ck + nv] >= 0:
                        c[1] = ck
                        c[k] = false_lit
                        watches[ck + nv].append((first, c))
                        moved = True
                        break
                if moved:
                    continue
                keep.append((first, c))
                if fv < 0:
                    keep.extend(ws[i:])
                    watches[widx] = keep
                    self.stats.propagations += props
                    return c
                var = first if first > 0 else -first
                val[first + nv] = 1
                val[-first + nv] = -1
                level[var] = cur_level
                reason[var] = c
                trail.append(first)
            watches[widx] = keep
        self.stats.propagations += props
        return None

    def analyze(self, conflict) -> tuple[list[int], int]:
        """1UIP learning with local minimization; returns (clause, backjump
        level)."""
        seen = self.seen
        level = self.level
        trail = self.trail
        reason = self.reason
        activity = self.activity
        var_inc = self.var_inc
        learnt: list[int] = [0]
        to_clear: list[int] = []
        counter = 0
        idx = len(trail) - 1
        cur_level = len(self.trail_lim)
        r = conflict
        while True:
            lits = (r,) if type(r) is int else r
            for q in lits:
                v = q if q > 0 else -q
                if not seen[v] and level[v] > 0:
                    seen[v] = True
                    to_clear.append(v)
                    activity[v] += var_inc
                    if level[v] == cur_level:
                        counter += 1
                    else:
                        learnt.append(q)
            while True:
                p = trail[idx]
                idx -= 1
                pv = p if p > 0 else -p
                if seen[pv]:
                    break
            counter -= 1
            if counter == 0:
                break
            r = reason[pv]
        learnt[0] = -p
        # Local minimization: drop literals implied by other clause literals.
        if len(learnt) > 2:
            out = [learnt[0]]
            for q in learnt[1:]:
                v = q if q > 0 else -q
                rq = reason[v]
                if rq is None:
                    out.append(q)
                    continue
                if type(rq) is int:
                    u = rq if rq > 0 else -rq
                    if not (seen[u] or level[u] == 0):
                        out.append(q)
                    continue
                for l in rq:
                    u = l if l > 0 else -l
                    if u != v and not seen[u] and level[u] > 0:
                        out.append(q)
                        break
            learnt = out
        for v in to_clear:
            seen[v] = False
        if activity[pv] > 1e100:
            self._rescale_activity()
        self.var_inc *= self.inv_decay
        if len(learnt) == 1:
            return learnt, 0
        # Backjump to the second-highest decision level in the clause.
        max_i, max_level = 1, level[abs(learnt[1])]
        for i in range(2, len(learnt)):
            li = level[abs(learnt[i])]
            if li > max_level:
                max_i, max_level = i, li
        learnt[1], learnt[max_i] = learnt[max_i], learnt[1]
        return learnt, max_level

    def _rescale_activity(self) -> None:
        nv = self.nv
        self.activity = [a * 1e-100 for a in self.activity]
        self.var_inc *= 1e-100
        self.heap = [(-self.activity[v], v) for v in range(1, nv + 1)
                     if self.val[v + nv] == 0]
        heapq.heapify(self.heap)

    def cancel_until(self, target_level: int) -> None:
        if len(self.trail_lim) <= target_level:
            return
        nv = self.nv
        val = self.val
        heap_push = heapq.heappush
        heap = self.heap
        activity = self.activity
        bound = self.trail_lim[target_level]
        for k in range(len(self.trail) - 1, bound - 1, -1):
            lit = self.trail[k]
            var = lit if lit > 0 else -lit
            self.phase[var] = lit > 0
            val[lit + nv] = 0
            val[-lit + nv] = 0
            self.reason[var] = None
            heap_push(heap, (-activity[var], var))
            if var < self.head_var:
                self.head_var = var
        del self.trail[bound:]
        del self.trail_lim[target_level:]
        self.qhead = len(self.trail)

    def _pick_branch_var(self) -> int:
        """Next decision variable, or 0 if all are assigned."""
        nv = self.nv
        val = self.val
        if self.branching == "index":
            v = self.head_var
            while v <= nv and val[v + nv] != 0:
                v += 1
            self.head_var = v
            return v if v <= nv else 0
        heap = self.heap
        activity = self.activity
        heap_pop = heapq.heappop
        heap_push = heapq.heappush
        while heap:
            act, v = heap_pop(heap)
            if val[v + nv] != 0:
                continue
            if -act != activity[v]:  # stale entry; requeue at current activity
                heap_push(heap, (-activity[v], v))
                continue
            return v
        return 0

    def _reduce_learnts(self) -> None:
        """Drop the longer half of the learned clauses (reason clauses are
        kept) and rebuild the watch lists."""
        locked = set()
        for lit in self.trail:
            r = self.reason[lit if lit > 0 else -lit]
            if type(r) is list:
                locked.add(id(r))
        order = sorted(range(len(self.learnts)),
                       key=lambda i: len(self.learnts[i]))
        keep_n = len(order) // 2
        kept = {id(self.learnts[i]) for i in order[:keep_n]} | locked
        dropped = {id(c) for c in self.learnts} - kept
        self.learnts = [c for c in self.learnts if id(c) in kept]
        for w in self.watches:
            w[:] = [(b, c) for (b, c) in w if id(c) not in dropped]

    # Deterministic sequential portfolio for vsids mode: each segment runs
    # with a fixed decay factor and default polarity for a conflict budget,
    # keeping learned clauses across segments; budgets double every cycle,
    # so the search is complete and reproducible.
    PORTFOLIO = ((0.8, True), (0.8, False), (0.95, True), (0.75, False),
                 (0.85, True), (0.95, False))
    SEGMENT_BUDGET = 6000

    def solve(self) -> SolveResult:
        if not self.ok or self.propagate() is not None:
            return SolveResult(UNSAT, stats=self.stats)
        start = time.monotonic()
        if self.branching == "index":
            result = self._search(start, None)
            assert result is not None
            return result
        nv = self.nv
        budget = self.SEGMENT_BUDGET
        seg = 0
        warm = self.warm_start
        self.warm_start = False
        while True:
            decay, polarity = self.PORTFOLIO[seg % len(self.PORTFOLIO)]
            self.cancel_until(0)
            self.inv_decay = 1.0 / decay
            if warm and seg == 0:
                # Continuation solve: keep activities and saved phases so the
                # search resumes near the previous solution.
                self.heap = [(-self.activity[v], v) for v in range(1, nv + 1)
                             if self.val[v + nv] == 0]
                heapq.heapify(self.heap)
            else:
                self.var_inc = 1.0
                self.activity = [0.0] * (nv + 1)
                self.phase = [polarity] * (nv + 1)
                self.heap = [(0.0, v) for v in range(1, nv + 1)
                             if self.val[v + nv] == 0]
            result = self._search(start, self.stats.conflicts + budget)
            if result is not None:
                return result
            seg += 1
            if seg % len(self.PORTFOLIO) == 0:
                budget *= 2

    def _search(self, start: float, segment_limit: int | None) -> SolveResult | None:
        """Run CDCL until an answer, a global limit (both as SolveResult), or
        the segment's conflict budget (None)."""
        restart_base = self.restart_base
        luby_idx = 1
        conflicts_until_restart = restart_base * _luby(luby_idx)
        max_learnts = 20000
        while True:
            conflict = self.propagate()
            if conflict is not None:
                self.stats.conflicts += 1
                if not self.trail_lim:
                    return SolveResult(UNSAT, stats=self.stats)
                learnt, back_level = self.analyze(conflict)
                self.cancel_until(back_level)
                if len(learnt) == 1:
                    if not self.enqueue(learnt[0], None):
                        return SolveResult(UNSAT, stats=self.stats)
                elif len(learnt) == 2:
                    a, b = learnt
                    self.bin_imp[-a + self.nv].append(b)
                    self.bin_imp[-b + self.nv].append(a)
                    if not self.enqueue(a, b):
                        return SolveResult(UNSAT, stats=self.stats)
                else:
                    self.learnts.append(learnt)
                    self.watches[learnt[0] + self.nv].append((learnt[1], learnt))
                    self.watches[learnt[1] + self.nv].append((learnt[0], learnt))
                    if not self.enqueue(learnt[0], learnt):
                        return SolveResult(UNSAT, stats=self.stats)
                conflicts_until_restart -= 1
                lim = self.limits
                if lim.conflicts is not None and self.stats.conflicts >= lim.conflicts:
                    return SolveResult(RESOURCE_LIMIT, stats=self.stats)
                if lim.wall_seconds is not None and self.stats.conflicts % 128 == 0 \
                        and time.monotonic() - start > lim.wall_seconds:
                    return SolveResult(RESOURCE_LIMIT, stats=self.stats)
                if segment_limit is not None and self.stats.conflicts >= segment_limit:
                    return None
                if len(self.learnts) > max_learnts:
                    self._reduce_learnts()
                    max_learnts += max_learnts // 2
                continue
            if conflicts_until_restart <= 0:
                luby_idx += 1
                conflicts_until_restart = restart_base * _luby(luby_idx)
                self.cancel_until(0)
                continue
            v = self._pick_branch_var()
            if v == 0:
                nv = self.nv
                model = {u: self.val[u + nv] == 1 for u in range(1, nv + 1)}
                self.stats.solve_seconds = time.monotonic() - start
                return SolveResult(SAT, model, self.stats)
            self.stats.decisions += 1
            self.trail_lim.append(len(self.trail))
            self.enqueue(v if self.phase[v] else -v, None)


def _luby(i: int) -> int:
    """The i-th term (1-based) of the Luby restart sequence 1,1,2,1,1,2,4,..."""
    while True:
        k = i.bit_length()
        if i == (1 << k) - 1:
            return 1 << (k - 1)
        i -= (1 << (k - 1)) - 1


def solve(cnf: CnfInstance, cfg: SolverConfig = SolverConfig(),
          assumptions: list[int] | None = None) -> SolveResult:
    """Solve a CNF instance.  SAT answers are re-verified against every clause
    before being returned."""
    if cfg.engine == "internal":
        solver = _Cdcl(cnf.num_vars, cfg.limits, branching=cfg.branching,
                       default_phase=not (cfg.seed & 1))
        for clause in cnf.clauses:
            solver.add_clause(clause)
        if assumptions:
            for lit in assumptions:
                solver.add_clause((lit,))
        result = solver.solve()
    else:
        result = _solve_external(cnf, cfg, assumptions)
    if result.status == SAT:
        assert result.assignment is not None
        work = cnf if not assumptions else cnf.extended([(l,) for l in assumptions])
        if not check_assignment(work, result.assignment):
            raise SolverError("solver returned an assignment that does not satisfy the formula")
    return result


def _solve_external(cnf: CnfInstance, cfg: SolverConfig,
                    assumptions: list[int] | None) -> SolveResult:
    work = cnf if not assumptions else cnf.extended([(l,) for l in assumptions])
    with tempfile.NamedTemporaryFile("w", suffix=".cnf", delete=False) as fh:
        fh.write(emit_dimacs(work))
        path = fh.name
    try:
        proc = subprocess.run([cfg.engine, path], capture_output=True, text=True)
    except OSError as exc:
        raise SolverError(f"cannot run external solver {cfg.engine!r}: {exc}") from exc
    finally:
        Path(path).unlink(missing_ok=True)
    # Conventional exit codes: 10 SAT, 20 UNSAT; fall back to the 's' line.
    return parse_dimacs_result(proc.stdout)


# --- DIMACS ------------------------------------------------------------------

def emit_dimacs(cnf: CnfInstance) -> str:
    lines = [f"c {c}" if c else "c" for c in cnf.comments]
    lines.append(f"p cnf {cnf.num_vars} {len(cnf.clauses)}")
    for clause in cnf.clauses:
        lines.append(" ".join(str(l) for l in clause) + " 0")
    return "\n".join(lines) + "\n"


def parse_dimacs(text: str) -> CnfInstance:
    """Parse DIMACS CNF (clauses may span lines; 'c' lines are kept as
    comments)."""
    comments: list[str] = []
    num_vars = None
    declared_clauses = None
    clauses: list[tuple[int, ...]] = []
    pending: list[int] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("c"):
            comments.append(line[1:].strip())
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise SolverError(f"bad DIMACS header: {line!r}")
            num_vars, declared_clauses = int(parts[2]), int(parts[3])
            continue
        if line.startswith("%"):
            break
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                clauses.append(tuple(pending))
                pending = []
            else:
                pending.append(lit)
    if pending:
        clauses.append(tuple(pending))
    if num_vars is None:
        raise SolverError("missing DIMACS header")
    if declared_clauses is not None and declared_clauses != len(clauses):
        raise SolverError(f"header declares {declared_clauses} clauses, found {len(clauses)}")
    return CnfInstance(num_vars, tuple(clauses), tuple(comments))


def parse_dimacs_result(text: str) -> SolveResult:
    """Parse SAT-competition style solver output ('s' and 'v' lines)."""
    status = None
    lits: list[int] = []
    for raw in text.splitlines():
        line = raw.strip()
        if line.startswith("s "):
            verdict = line[2:].strip().upper()
            if verdict == "SATISFIABLE":
                status = SAT
            elif verdict == "UNSATISFIABLE":
                status = UNSAT
            elif verdict in ("UNKNOWN", "INDETERMINATE"):
                status = RESOURCE_LIMIT
            else:
                raise SolverError(f"unrecognized solver verdict {verdict!r}")
        elif line.startswith("v ") or line == "v":
            lits.extend(int(t) for t in line[1:].split())
    if status is None:
        raise SolverError("solver output contains no 's' line")
    if status != SAT:
        return SolveResult(status)
    assignment = {abs(l): l > 0 for l in lits if l != 0}
    if not assignment:
        raise SolverError("SAT result without 'v' assignment lines")
    return SolveResult(SAT, assignment)


def iter_assignments(cnf: CnfInstance, cfg: SolverConfig = SolverConfig(),
                     projection: list[int] | None = None):
    """Yield SolveResults for successive solutions, blocking each one on the
    ``projection`` variables (all variables when None).  The final non-SAT
    result (UNSAT when the space is exhausted, or RESOURCE_LIMIT) is yielded
    last.  With the internal engine the search is incremental: learned
    clauses and saved phases carry over between solutions."""
    proj = sorted(set(projection)) if projection else list(range(1, cnf.num_vars + 1))
    if not proj:
        raise ValueError("projection must not be empty")
    if cfg.engine != "internal":
        work = cnf
        while True:
            result = solve(work, cfg)
            yield result
            if result.status != SAT:
                return
            work = block(work, result.assignment, proj)
    solver = _Cdcl(cnf.num_vars, cfg.limits, branching=cfg.branching,
                   default_phase=not (cfg.seed & 1))
    for clause in cnf.clauses:
        solver.add_clause(clause)
    blocked: list[tuple[int, ...]] = []
    while True:
        result = solver.solve()
        if result.status == SAT:
            assert result.assignment is not None
            work = cnf.extended(blocked) if blocked else cnf
            if not check_assignment(work, result.assignment):
                raise SolverError("solver returned an assignment that does not satisfy the formula")
        yield result
        if result.status != SAT:
            return
        clause = tuple(-v if result.assignment[v] else v for v in proj)
        blocked.append(clause)
        solver.add_blocking_clause(clause)
        solver.warm_start = True


def block(cnf: CnfInstance, assignment: dict[int, bool], projection: list[int]) -> CnfInstance:
    """Append a clause excluding ``assignment`` restricted to ``projection``,
    so later solutions differ on at least one projected variable."""
    if not projection:
        raise ValueError("projection must not be empty")
    clause = tuple(-v if assignment[v] else v for v in sorted(set(projection)))
    return cnf.extended([clause], label="blocking")
