"""Witness enumeration and whole-program verdicts.

For every basic execution the checker streams well-formed witnesses: an
``rf`` choice for each read, a total ``mo`` per atomic location and, for
models that declare one, a total order over the witness set.  A program is
Undefined when some consistent candidate is faulty; otherwise its outcomes
are the final states of the consistent candidates.
"""

from __future__ import annotations

import itertools
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .catdsl import Binary, Constraint, Evaluator, Expr, Ident, ModelDef, Verdict, eval_model
from .events import Execution, ExecutionError, Witness, execution_env, wf_candidate
from .frontend import DEFAULT_BASIC_CAP, DEFAULT_UNROLL, EnumConfig, LitmusError, LitmusProgram, ResourceError, enumerate_basic
from .relalg import Relation

DEFAULT_CANDIDATE_CAP = 10**7
WORKERS_ENV = "LITMUS_AXIOM_WORKERS"


class CheckTimeout(Exception):
    """The configured wall-clock budget ran out."""


@dataclass(frozen=True)
class CheckConfig:
    unroll: int = DEFAULT_UNROLL
    basic_cap: int = DEFAULT_BASIC_CAP
    candidate_cap: Optional[int] = DEFAULT_CANDIDATE_CAP
    workers: Optional[int] = None
    fast: bool = False
    no_prune: bool = False
    timeout: Optional[float] = None
    value_domain_override: Optional[dict] = None


def default_workers() -> int:
    raw = os.environ.get(WORKERS_ENV)
    if raw is None:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"{WORKERS_ENV} must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ValueError(f"{WORKERS_ENV} must be a positive integer, got {raw!r}")
    return n


# ---------------------------------------------------------------- witnesses


def rf_choices(x: Execution) -> list[list[int]]:
    """For each read (ascending id), the writes it may read from."""
    out = []
    for r, lr in enumerate(x.labels):
        if not lr.is_read:
            continue
        out.append(
            [w for w, lw in enumerate(x.labels) if lw.is_write and lw.loc.name == lr.loc.name and lw.wval == lr.rval]
        )
    return out


def mo_groups(x: Execution) -> list[list[int]]:
    """Writes that mo must order totally, one list per atomic location."""
    groups: dict[str, list[int]] = {}
    for e, lab in enumerate(x.labels):
        if lab.is_write and lab.loc.atomic:
            groups.setdefault(lab.loc.name, []).append(e)
    return [g for g in groups.values() if len(g) > 1]


def _rf_relations(x: Execution) -> Iterator[Relation]:
    reads = [e for e, l in enumerate(x.labels) if l.is_read]
    n = x.n
    for srcs in itertools.product(*rf_choices(x)):
        rows = [0] * n
        for r, w in zip(reads, srcs):
            rows[w] |= 1 << r
        yield Relation(n, tuple(rows))


def _mo_relations(x: Execution) -> Iterator[Relation]:
    n = x.n
    groups = mo_groups(x)
    for orders in itertools.product(*(itertools.permutations(g) for g in groups)):
        rows = [0] * n
        for order in orders:
            seen = 0
            for e in reversed(order):
                rows[e] |= seen
                seen |= 1 << e
        yield Relation(n, tuple(rows))


def _witness_members(m: ModelDef, x: Execution) -> list[int]:
    env = execution_env(x)
    return list(m.witness_decls[0].over.eval(env))


def witness_count(x: Execution, m: ModelDef) -> int:
    total = math.prod(len(c) for c in rf_choices(x))
    total *= math.prod(math.factorial(len(g)) for g in mo_groups(x))
    if m.needs_S:
        total *= math.factorial(len(_witness_members(m, x)))
    return total


def enumerate_witnesses(x: Execution, m: ModelDef, cap: Optional[int] = DEFAULT_CANDIDATE_CAP) -> Iterator[Witness]:
    """Every well-formed witness of ``x``, in lexicographic rank order."""
    if cap is not None and witness_count(x, m) > cap:
        raise ResourceError(f"{witness_count(x, m)} candidates exceed the cap of {cap}")
    members = _witness_members(m, x) if m.needs_S else None
    mos = list(_mo_relations(x))
    for rf in _rf_relations(x):
        for mo in mos:
            if members is None:
                yield Witness(rf, mo)
            else:
                for order in itertools.permutations(members):
                    yield Witness(rf, mo, Relation.from_order(x.n, order))


def check_execution(x: Execution, w: Witness, m: ModelDef, require_wf: bool = True) -> Verdict:
    """Verdict for one candidate; ``require_wf`` rejects ill-formed witnesses."""
    if require_wf and not wf_candidate(x, w, m.needs_S):
        raise ExecutionError("candidate is not well-formed")
    return eval_model(m, x, w)


# ---------------------------------------------------------------- S pruning


def _chain(e: Expr) -> list[Expr]:
    if isinstance(e, Binary) and e.op == ";":
        return _chain(e.left) + _chain(e.right)
    return [e]


@dataclass(frozen=True)
class _Prunable:
    """``irreflexive(S ; R)`` or ``irreflexive((S \\ (M ; S)) ; R)``."""

    rest: tuple[Expr, ...]
    guard: Optional[tuple[Expr, ...]]  # M as a ; chain, or None


def _prunable(c: Constraint, wn: str) -> Optional[_Prunable]:
    if c.predicate != "irreflexive":
        return None
    items = _chain(c.expr)
    head, rest = items[0], tuple(items[1:])
    if not rest or any(wn in r.deps for r in rest):
        return None
    if isinstance(head, Ident) and head.name == wn:
        return _Prunable(rest, None)
    if isinstance(head, Binary) and head.op == "\\" and isinstance(head.left, Ident) and head.left.name == wn:
        sub = _chain(head.right)
        if len(sub) >= 2 and isinstance(sub[-1], Ident) and sub[-1].name == wn:
            guard = tuple(sub[:-1])
            if not any(wn in g.deps for g in guard):
                return _Prunable(rest, guard)
    return None


def _eval_chain(items, env) -> Relation:
    r = items[0].eval(env)
    for it in items[1:]:
        r = r.compose(it.eval(env))
    return r


# ---------------------------------------------------------------- per execution


@dataclass
class ExecResult:
    index: int
    outcomes: dict = field(default_factory=dict)  # Outcome -> consistent candidates
    candidates: int = 0
    consistent: int = 0
    faulty: int = 0
    ub_axioms: set = field(default_factory=set)


@dataclass(frozen=True, order=True)
class Outcome:
    registers: tuple[tuple[str, int], ...]
    memory: tuple[tuple[str, int], ...]

    def items(self) -> tuple[tuple[str, int], ...]:
        return self.registers + self.memory

    def text(self) -> str:
        return "; ".join(f"{k}={v}" for k, v in self.items())


def _reg_keys(p: LitmusProgram) -> dict[tuple[int, str], str]:
    return {(t, r): key for t, r, key in p.register_keys()}


def outcome_of(x: Execution, mo: Relation, keys: dict) -> Outcome:
    regs = tuple((keys[(t, r)], v) for t, rs in enumerate(x.regs) for r, v in rs)
    final: dict[str, int] = {}
    for e, lab in enumerate(x.labels):
        # mo relates only same-location writes, so the maximum has no successor
        if lab.is_write and lab.loc.atomic and not mo.rows[e]:
            final[lab.loc.name] = lab.wval
    return Outcome(regs, tuple(sorted(final.items())))


class _ExecutionChecker:
    def __init__(self, x: Execution, m: ModelDef, cfg: CheckConfig, keys: dict, deadline: Optional[float]):
        self.x, self.m, self.cfg, self.keys, self.deadline = x, m, cfg, keys, deadline
        self.ev = Evaluator(m, x)
        self.stop = False

    def _tick(self) -> None:
        if self.deadline is not None and time.time() > self.deadline:
            raise CheckTimeout("time budget exhausted")

    def _count(self, res: ExecResult) -> None:
        res.candidates += 1
        cap = self.cfg.candidate_cap
        if cap is not None and res.candidates > cap:
            raise ResourceError(f"more than {cap} candidates for one execution")
        if res.candidates % 256 == 0:
            self._tick()

    def _record(self, res: ExecResult, v: Verdict, outcome: Outcome) -> None:
        if not v.consistent:
            return
        res.consistent += 1
        res.outcomes[outcome] = res.outcomes.get(outcome, 0) + 1
        if v.faulty:
            res.faulty += 1
            res.ub_axioms.update(v.ub_axioms)
            if self.cfg.fast:
                self.stop = True

    def run(self, index: int) -> ExecResult:
        res = ExecResult(index)
        x, m, cfg = self.x, self.m, self.cfg
        if cfg.no_prune and cfg.candidate_cap is not None:
            total = witness_count(x, m)
            if total > cfg.candidate_cap:
                raise ResourceError(f"{total} candidates exceed the cap of {cfg.candidate_cap}")
        mos = list(_mo_relations(x))
        members = _witness_members(m, x) if m.needs_S else None
        for rf in _rf_relations(x):
            for mo in mos:
                if self.stop:
                    return res
                env = self.ev.stage(rf, mo)
                outcome = outcome_of(x, mo, self.keys)
                if members is None:
                    self._count(res)
                    self._record(res, self.ev.verdict(env), outcome)
                elif cfg.no_prune:
                    self._naive_S(env, members, outcome, res)
                else:
                    self._pruned_S(env, members, outcome, res)
        return res

    def _naive_S(self, env, members, outcome, res) -> None:
        n = self.x.n
        for order in itertools.permutations(members):
            if self.stop:
                return
            self._count(res)
            full = self.ev.stage_S(env, Relation.from_order(n, order))
            self._record(res, self.ev.verdict(full), outcome)

    def _pruned_S(self, env, members, outcome, res) -> None:
        rfmo_failed = [c.name for c in self.ev.rfmo_constraints if not c.holds(env)]
        if rfmo_failed:
            # no S can repair an S-independent failure
            return
        wn = self.m.witness_name
        n = self.x.n
        plain_rows, guarded = [0] * n, []
        for c in self.ev.s_constraints:
            pr = _prunable(c, wn)
            if pr is None:
                continue
            rows = _eval_chain(pr.rest, env).rows
            if pr.guard is None:
                plain_rows = [a | b for a, b in zip(plain_rows, rows)]
            else:
                guarded.append((_eval_chain(pr.guard, env).rows, rows))
        k = len(members)
        order: list[int] = []

        def extend(placed: int) -> None:
            if self.stop:
                return
            if len(order) == k:
                self._count(res)
                full = self.ev.stage_S(env, Relation.from_order(n, order))
                self._record(res, self.ev.verdict(full, rfmo_failed), outcome)
                return
            for b in members:
                bit = 1 << b
                if placed & bit or plain_rows[b] & placed:
                    continue
                bad = False
                for mrows, rrows in guarded:
                    rb = rrows[b] & placed
                    while rb:
                        low = rb & -rb
                        a = low.bit_length() - 1
                        if not mrows[a] & placed:
                            bad = True
                            break
                        rb ^= low
                    if bad:
                        break
                if bad:
                    continue
                order.append(b)
                extend(placed | bit)
                order.pop()

        extend(0)


def check_one(x: Execution, m: ModelDef, cfg: CheckConfig, keys: dict, index: int = 0,
              deadline: Optional[float] = None) -> ExecResult:
    return _ExecutionChecker(x, m, cfg, keys, deadline).run(index)


def _worker(args) -> ExecResult:
    x, m, cfg, keys, index, deadline = args
    return check_one(x, m, cfg, keys, index, deadline)


# ---------------------------------------------------------------- program verdict


@dataclass
class CheckReport:
    test: str
    model: str
    undefined: bool
    outcomes: dict  # Outcome -> multiplicity, sorted by outcome text
    truncated: bool
    basic_executions: int
    candidates: int
    consistent: int
    faulty: int
    ub_axioms: tuple[str, ...]
    seconds: float
    query: Optional[tuple] = None
    query_witnessed: Optional[bool] = None

    @property
    def verdict(self) -> str:
        return "Undefined" if self.undefined else "Defined"

    @property
    def states(self) -> int:
        return len(self.outcomes)

    def outcome_lines(self) -> list[str]:
        return sorted(o.text() for o in self.outcomes)


def _satisfies(o: Outcome, query: tuple, aliases: dict) -> bool:
    vals = dict(o.items())
    for key, want in query:
        k = aliases.get(key, key)
        if k not in vals:
            raise LitmusError(f"query mentions unknown register or location {key!r}")
        if vals[k] != want:
            return False
    return True


def _query_aliases(p: LitmusProgram) -> dict[str, str]:
    out = {}
    for t, r, key in p.register_keys():
        out[f"{t}:{r}"] = key
        out[f"T{t}:{r}"] = key
    return out


def allowed(p: LitmusProgram, m: ModelDef, cfg: CheckConfig = CheckConfig()) -> CheckReport:
    """Enumerate every candidate of ``p`` and judge it under ``m``."""
    start = time.time()
    deadline = start + cfg.timeout if cfg.timeout is not None else None
    basic = enumerate_basic(p, EnumConfig(cfg.unroll, cfg.basic_cap, cfg.value_domain_override))
    keys = _reg_keys(p)
    workers = cfg.workers if cfg.workers is not None else default_workers()
    results: list[ExecResult] = []
    if workers > 1 and len(basic) > 1 and not cfg.fast:
        jobs = [(x, m, cfg, keys, i, deadline) for i, x in enumerate(basic)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_worker, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        for i, x in enumerate(basic):
            r = check_one(x, m, cfg, keys, i, deadline)
            results.append(r)
            if cfg.fast and r.faulty:
                break
    results.sort(key=lambda r: r.index)

    merged: dict[Outcome, int] = {}
    ub: set[str] = set()
    for r in results:
        for o, c in r.outcomes.items():
            merged[o] = merged.get(o, 0) + c
        ub |= r.ub_axioms
    outcomes = dict(sorted(merged.items(), key=lambda kv: kv[0].text()))
    witnessed = None
    if p.query is not None:
        aliases = _query_aliases(p)
        witnessed = any(_satisfies(o, p.query, aliases) for o in outcomes)
    faulty = sum(r.faulty for r in results)
    return CheckReport(
        test=p.name,
        model=m.name,
        undefined=faulty > 0,
        outcomes=outcomes,
        truncated=basic.truncated,
        basic_executions=len(basic),
        candidates=sum(r.candidates for r in results),
        consistent=sum(r.consistent for r in results),
        faulty=faulty,
        ub_axioms=tuple(c.name for c in m.undefined() if c.name in ub),
        seconds=time.time() - start,
        query=p.query,
        query_witnessed=witnessed,
    )
