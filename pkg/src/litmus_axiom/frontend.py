"""Litmus-test parsing and enumeration of basic executions.

A litmus file looks like::

    test SB c11
    atomic int x;
    atomic int y;
    { store(x, 1); r1 = load(y); } || { store(y, 1); r2 = load(x); }
    exists (r1 == 0 /\\ r2 == 0)

OpenCL tests declare a region for every location and may separate threads
with ``|||`` (new work-group) and ``||||`` (new device).

Read values are guessed from each location's value domain (its initial value
plus everything the program can store there) and are validated later by the
reads-from enumeration.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterator, Optional, Union

from .events import (
    VALUE_MAX,
    VALUE_MIN,
    Execution,
    Kind,
    Label,
    Location,
    Order,
    Scope,
)

DEFAULT_UNROLL = 2
DEFAULT_BASIC_CAP = 10**6


class LitmusError(Exception):
    def __init__(self, msg: str, line: int = 0, col: int = 0):
        self.line, self.col = line, col
        super().__init__(f"{line}:{col}: {msg}" if line else msg)


class ResourceError(Exception):
    """An enumeration exceeded its configured cap."""


# ---------------------------------------------------------------- AST


@dataclass(frozen=True)
class Const:
    value: int


@dataclass(frozen=True)
class Reg:
    name: str


@dataclass(frozen=True)
class Load:
    loc: Location
    ord: Optional[Order]  # None for a non-atomic ``*x``
    scope: Optional[Scope] = None


@dataclass(frozen=True)
class FetchInc:
    loc: Location
    ord: Order
    scope: Optional[Scope] = None


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "ExprT"
    right: "ExprT"


@dataclass(frozen=True)
class Cond:
    test: "ExprT"
    then: "ExprT"
    other: "ExprT"


ExprT = Union[Const, Reg, Load, FetchInc, BinOp, Cond]


@dataclass(frozen=True)
class Store:
    loc: Location
    value: ExprT
    ord: Optional[Order]  # None for a non-atomic ``*x = e``
    scope: Optional[Scope] = None


@dataclass(frozen=True)
class Assign:
    reg: str
    value: ExprT


@dataclass(frozen=True)
class Eval:
    value: ExprT


@dataclass(frozen=True)
class FenceStmt:
    kind: Kind
    ord: Order
    scope: Optional[Scope] = None


@dataclass(frozen=True)
class If:
    test: ExprT
    then: tuple
    other: tuple = ()


@dataclass(frozen=True)
class While:
    test: ExprT
    body: tuple


Stmt = Union[Store, Assign, Eval, FenceStmt, If, While]


@dataclass(frozen=True)
class Thread:
    index: int
    device: int
    group: int
    body: tuple
    registers: tuple[str, ...]


@dataclass(frozen=True)
class LitmusProgram:
    name: str
    language: str  # "c11" or "opencl"
    locations: tuple[Location, ...]
    inits: dict
    threads: tuple[Thread, ...]
    query: Optional[tuple] = None  # ((key, value), ...)

    @property
    def shape(self) -> tuple[int, int, int]:
        """(devices, work-groups, threads)."""
        devices = {t.device for t in self.threads}
        groups = {(t.device, t.group) for t in self.threads}
        return len(devices), len(groups), len(self.threads)

    def location(self, name: str) -> Location:
        for l in self.locations:
            if l.name == name:
                return l
        raise KeyError(name)

    def register_keys(self) -> list[tuple[int, str, str]]:
        """(thread, register, display key) for every register, in thread order."""
        names = [r for t in self.threads for r in t.registers]
        unique = len(names) == len(set(names))
        return [(t.index, r, r if unique else f"{t.index}:{r}") for t in self.threads for r in t.registers]


# ---------------------------------------------------------------- lexer

_TOKEN = re.compile(
    r"""(?P<ws>[ \t\r\n]+)
      | (?P<comment>//[^\n]*|\#[^\n]*)
      | (?P<int>\d+)
      | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
      | (?P<op>\|\|\|\||\|\|\||\|\||/\\|==|!=|[{}()\[\];,=?:+\-*])""",
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _lex(text: str) -> list[_Tok]:
    toks = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise LitmusError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind, s = m.lastgroup, m.group()
        if kind not in ("ws", "comment"):
            toks.append(_Tok(kind, s, line, pos - line_start + 1))
        nl = s.count("\n")
        if nl:
            line += nl
            line_start = pos + s.rindex("\n") + 1
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


_ORDERS = {
    "RLX": Order.RLX, "relaxed": Order.RLX, "memory_order_relaxed": Order.RLX,
    "ACQ": Order.ACQ, "acquire": Order.ACQ, "memory_order_acquire": Order.ACQ,
    "REL": Order.REL, "release": Order.REL, "memory_order_release": Order.REL,
    "AR": Order.AR, "acq_rel": Order.AR, "memory_order_acq_rel": Order.AR,
    "SC": Order.SC, "seq_cst": Order.SC, "memory_order_seq_cst": Order.SC,
}
_CONSUME = {"CON", "consume", "memory_order_consume"}
_SCOPES = {
    "WI": Scope.WI, "work_item": Scope.WI, "memory_scope_work_item": Scope.WI,
    "WG": Scope.WG, "work_group": Scope.WG, "memory_scope_work_group": Scope.WG,
    "DV": Scope.DV, "device": Scope.DV, "memory_scope_device": Scope.DV,
    "ALL": Scope.ALL, "all_svm_devices": Scope.ALL, "memory_scope_all_svm_devices": Scope.ALL,
}
_FENCE_REGIONS = {"G": Kind.FG, "L": Kind.FL, "GL": Kind.FGL}
_REGIONS = ("global", "local", "global_fgb")
_OPS_ALLOWED = {
    "store": {Order.RLX, Order.REL, Order.SC},
    "load": {Order.RLX, Order.ACQ, Order.SC},
    "fetch_inc": set(Order),
    "fence": {Order.RLX, Order.ACQ, Order.REL, Order.SC},
}
_RESERVED = {"test", "if", "else", "while", "store", "load", "fetch_inc", "fence", "exists", "int", "atomic"}


class _Parser:
    def __init__(self, text: str, allow_wi: bool):
        self.toks = _lex(text)
        self.i = 0
        self.allow_wi = allow_wi
        self.language = "c11"
        self.locs: dict[str, Location] = {}
        self.inits: dict[str, int] = {}
        self.regs: list[str] = []

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def advance(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg: str, tok: Optional[_Tok] = None) -> LitmusError:
        tok = tok or self.tok
        return LitmusError(msg, tok.line, tok.col)

    def accept(self, text: str) -> bool:
        if self.tok.text == text and self.tok.kind != "eof":
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> _Tok:
        if self.tok.text != text or self.tok.kind == "eof":
            raise self.error(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        return self.advance()

    def ident(self) -> _Tok:
        if self.tok.kind != "ident":
            raise self.error(f"expected an identifier, found {self.tok.text or 'end of input'!r}")
        return self.advance()

    def integer(self) -> int:
        neg = self.accept("-")
        if self.tok.kind != "int":
            raise self.error("expected an integer")
        v = int(self.advance().text)
        v = -v if neg else v
        if not VALUE_MIN <= v <= VALUE_MAX:
            raise self.error(f"integer {v} out of range")
        return v

    # top level

    def program(self) -> LitmusProgram:
        self.expect("test")
        name = self.ident().text
        lang = self.ident()
        if lang.text not in ("c11", "opencl"):
            raise self.error("language must be c11 or opencl", lang)
        self.language = lang.text
        while self.tok.text != "{":
            self.declaration()
        threads = self.threads()
        query = None
        qtok = self.tok
        if self.accept("exists"):
            query = self.query()
        if self.tok.kind != "eof":
            raise self.error(f"unexpected {self.tok.text!r} after program")
        prog = LitmusProgram(name, self.language, tuple(self.locs.values()), dict(self.inits), threads, query)
        if query is not None:
            known = {l.name for l in prog.locations if l.atomic}
            for t, r, key in prog.register_keys():
                known |= {key, f"{t}:{r}", f"T{t}:{r}"}
            for key, _ in query:
                if key not in known:
                    raise self.error(f"query mentions unknown register or atomic location {key!r}", qtok)
        _check_local_confinement(prog)
        return prog

    def declaration(self) -> None:
        start = self.tok
        region = "c11"
        if self.tok.text in _REGIONS:
            region = self.advance().text
        if self.language == "opencl" and region == "c11":
            raise self.error("OpenCL locations need a region (global, local or global_fgb)", start)
        if self.language == "c11" and region != "c11":
            raise self.error("C11 locations take no region", start)
        atomic = self.accept("atomic")
        self.expect("int")
        self.accept("*")
        nt = self.ident()
        if nt.text in self.locs or nt.text in _RESERVED:
            raise self.error(f"cannot declare {nt.text!r}", nt)
        init = 0
        if self.accept("="):
            init = self.integer()
        self.expect(";")
        self.locs[nt.text] = Location(nt.text, atomic, region)
        self.inits[nt.text] = init

    def threads(self) -> tuple[Thread, ...]:
        out = []
        device = group = 0
        while True:
            self.regs = []
            body = self.block()
            out.append(Thread(len(out), device, group, body, tuple(self.regs)))
            sep = self.tok.text
            if sep == "||":
                pass
            elif sep == "|||":
                group += 1
            elif sep == "||||":
                device += 1
                group = 0
            else:
                break
            if self.language == "c11" and sep != "||":
                raise self.error("C11 tests have one device and one work-group; use ||")
            self.advance()
        return tuple(out)

    def query(self) -> tuple:
        self.expect("(")
        atoms = []
        while True:
            t = self.tok
            if t.kind == "int" and self.toks[self.i + 1].text == ":":
                self.advance()
            else:
                self.ident()
            key = t.text
            if self.accept(":"):
                key = f"{key}:{self.ident().text}"
            self.expect("==")
            atoms.append((key, self.integer()))
            if not self.accept("/\\"):
                break
        self.expect(")")
        return tuple(atoms)

    # statements

    def block(self) -> tuple:
        self.expect("{")
        stmts = []
        while not self.accept("}"):
            stmts.append(self.statement())
        return tuple(stmts)

    def body(self) -> tuple:
        if self.tok.text == "{":
            return self.block()
        return (self.statement(),)

    def statement(self) -> Stmt:
        t = self.tok
        if t.text == "{":
            inner = self.block()
            return If(Const(1), inner)
        if t.text == "if":
            self.advance()
            self.expect("(")
            test = self.expr()
            self.expect(")")
            then = self.body()
            other = self.body() if self.accept("else") else ()
            return If(test, then, other)
        if t.text == "while":
            self.advance()
            self.expect("(")
            test = self.expr()
            self.expect(")")
            return While(test, self.body())
        if t.text == "store":
            self.advance()
            self.expect("(")
            loc = self.location(atomic=True)
            self.expect(",")
            value = self.expr()
            ord_, scope = self.annotations("store")
            self.expect(")")
            self.expect(";")
            return Store(loc, value, ord_, scope)
        if t.text == "fence":
            return self.fence()
        if t.text == "*":
            self.advance()
            loc = self.location(atomic=False)
            self.expect("=")
            value = self.expr()
            self.expect(";")
            return Store(loc, value, None)
        if t.kind == "ident" and self.toks[self.i + 1].text == "=" and t.text not in _RESERVED:
            if t.text in self.locs:
                raise self.error(f"{t.text} is a location; write through store() or *{t.text}")
            self.advance()
            self.advance()
            value = self.expr()
            self.expect(";")
            if t.text not in self.regs:
                self.regs.append(t.text)
            return Assign(t.text, value)
        value = self.expr()
        self.expect(";")
        return Eval(value)

    def fence(self) -> FenceStmt:
        self.advance()
        self.expect("(")
        kind = Kind.F
        if self.language == "opencl":
            rt = self.ident()
            if rt.text not in _FENCE_REGIONS:
                raise self.error("OpenCL fences name their regions: G, L or GL", rt)
            kind = _FENCE_REGIONS[rt.text]
            self.expect(",")
            ord_ = self.order("fence")
            scope = self.scope() if self.accept(",") else Scope.DV
        else:
            ord_ = self.order("fence")
            scope = None
            if self.tok.text == ",":
                raise self.error("C11 fences take no scope")
        self.expect(")")
        self.expect(";")
        return FenceStmt(kind, ord_, scope)

    def location(self, atomic: bool) -> Location:
        t = self.ident()
        loc = self.locs.get(t.text)
        if loc is None:
            raise self.error(f"undeclared location {t.text!r}", t)
        if loc.atomic != atomic:
            if atomic:
                raise self.error(f"atomic operation on non-atomic location {t.text}", t)
            raise self.error(f"non-atomic access to atomic location {t.text}", t)
        return loc

    def order(self, op: str) -> Order:
        t = self.ident()
        if t.text in _CONSUME:
            raise self.error("the consume memory order is not supported", t)
        if t.text not in _ORDERS:
            raise self.error(f"unknown memory order {t.text!r}", t)
        o = _ORDERS[t.text]
        if o not in _OPS_ALLOWED[op]:
            raise self.error(f"memory order {o.value} is not permitted on {op}", t)
        return o

    def scope(self) -> Scope:
        t = self.ident()
        if t.text not in _SCOPES:
            raise self.error(f"unknown memory scope {t.text!r}", t)
        s = _SCOPES[t.text]
        if s is Scope.WI and not self.allow_wi:
            raise self.error("work-item scope needs allow_wi", t)
        return s

    def annotations(self, op: str) -> tuple[Order, Optional[Scope]]:
        ord_ = Order.SC
        scope = Scope.DV if self.language == "opencl" else None
        if self.accept(","):
            ord_ = self.order(op)
            if self.accept(","):
                if self.language == "c11":
                    raise self.error("C11 atomics take no scope")
                scope = self.scope()
        return ord_, scope

    # expressions: ternary < equality < additive < unary < primary

    def expr(self) -> ExprT:
        test = self.equality()
        if self.accept("?"):
            then = self.expr()
            self.expect(":")
            other = self.expr()
            return Cond(test, then, other)
        return test

    def equality(self) -> ExprT:
        left = self.additive()
        while self.tok.text in ("==", "!="):
            op = self.advance().text
            left = BinOp(op, left, self.additive())
        return left

    def additive(self) -> ExprT:
        left = self.unary()
        while self.tok.text in ("+", "-"):
            op = self.advance().text
            left = BinOp(op, left, self.unary())
        return left

    def unary(self) -> ExprT:
        if self.accept("-"):
            return BinOp("-", Const(0), self.unary())
        return self.primary()

    def primary(self) -> ExprT:
        t = self.tok
        if t.kind == "int":
            return Const(self.integer())
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        if self.accept("*"):
            return Load(self.location(atomic=False), None)
        if t.text in ("load", "fetch_inc"):
            op = self.advance().text
            self.expect("(")
            loc = self.location(atomic=True)
            ord_, scope = self.annotations(op)
            self.expect(")")
            return (Load if op == "load" else FetchInc)(loc, ord_, scope)
        if t.kind == "ident" and t.text not in _RESERVED:
            if t.text in self.locs:
                raise self.error(f"{t.text} is a location; read it with load() or *{t.text}")
            self.advance()
            if t.text not in self.regs:
                self.regs.append(t.text)
            return Reg(t.text)
        raise self.error(f"unexpected {t.text or 'end of input'!r} in expression")


def _accessed(stmts) -> Iterator[Location]:
    def expr(e):
        if isinstance(e, (Load, FetchInc)):
            yield e.loc
        elif isinstance(e, BinOp):
            yield from expr(e.left)
            yield from expr(e.right)
        elif isinstance(e, Cond):
            yield from expr(e.test)
            yield from expr(e.then)
            yield from expr(e.other)

    for s in stmts:
        if isinstance(s, Store):
            yield s.loc
            yield from expr(s.value)
        elif isinstance(s, (Assign, Eval)):
            yield from expr(s.value)
        elif isinstance(s, If):
            yield from expr(s.test)
            yield from _accessed(s.then)
            yield from _accessed(s.other)
        elif isinstance(s, While):
            yield from expr(s.test)
            yield from _accessed(s.body)


def _check_local_confinement(p: LitmusProgram) -> None:
    owner: dict[str, tuple[int, int]] = {}
    for t in p.threads:
        for loc in _accessed(t.body):
            if loc.region != "local":
                continue
            g = (t.device, t.group)
            if owner.setdefault(loc.name, g) != g:
                raise LitmusError(f"local location {loc.name} is accessed from two work-groups")


def parse_litmus(text: str, allow_wi: bool = False) -> LitmusProgram:
    return _Parser(text, allow_wi).program()


# ---------------------------------------------------------------- enumeration


@dataclass(frozen=True)
class EnumConfig:
    unroll: int = DEFAULT_UNROLL
    cap: int = DEFAULT_BASIC_CAP
    value_domain_override: Optional[dict] = None


@dataclass
class BasicSet:
    executions: list[Execution]
    truncated: bool
    domains: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.executions)

    def __iter__(self):
        return iter(self.executions)


def _check_value(v: int) -> int:
    if not VALUE_MIN <= v <= VALUE_MAX:
        raise LitmusError(f"value {v} overflows the supported integer range")
    return v


class _ThreadRunner:
    """Explores every control-flow path of one thread under given read domains."""

    def __init__(self, thread: Thread, domains: dict, unroll: int, collect: bool = False):
        self.thread = thread
        self.domains = domains
        self.unroll = unroll
        # collecting mode ignores branch outcomes so every store site is reached
        self.collect = collect
        self.truncated = False

    def paths(self) -> list[tuple[tuple[Label, ...], dict]]:
        regs = {r: 0 for r in self.thread.registers}
        return [(evs, dict(rs)) for evs, rs in self.block(self.thread.body, ((), tuple(regs.items())))]

    # a state is (events, registers-as-item-tuple)

    def block(self, stmts, st) -> Iterator:
        if not stmts:
            yield st
            return
        for st2 in self.stmt(stmts[0], st):
            yield from self.block(stmts[1:], st2)

    def stmt(self, s, st) -> Iterator:
        if isinstance(s, Store):
            for v, (evs, regs) in self.expr(s.value, st):
                if s.ord is None:
                    lab = Label(Kind.Wna, s.loc, wval=v)
                else:
                    lab = Label(Kind.W, s.loc, wval=v, ord=s.ord, scope=s.scope)
                yield evs + (lab,), regs
        elif isinstance(s, Assign):
            for v, (evs, regs) in self.expr(s.value, st):
                d = dict(regs)
                d[s.reg] = v
                yield evs, tuple(d.items())
        elif isinstance(s, Eval):
            for _, st2 in self.expr(s.value, st):
                yield st2
        elif isinstance(s, FenceStmt):
            evs, regs = st
            yield evs + (Label(s.kind, ord=s.ord, scope=s.scope),), regs
        elif isinstance(s, If):
            for v, st2 in self.expr(s.test, st):
                if self.collect:
                    yield from self.block(s.then, st2)
                    yield from self.block(s.other, st2)
                else:
                    yield from self.block(s.then if v else s.other, st2)
        elif isinstance(s, While):
            yield from self.loop(s, st, 0)
        else:  # pragma: no cover
            raise TypeError(s)

    def loop(self, s: While, st, done: int) -> Iterator:
        for v, st2 in self.expr(s.test, st):
            if not v or self.collect:
                yield st2
            if v or self.collect:
                if done >= self.unroll:
                    self.truncated = True
                    continue
                for st3 in self.block(s.body, st2):
                    yield from self.loop(s, st3, done + 1)

    def expr(self, e, st) -> Iterator[tuple[int, tuple]]:
        if isinstance(e, Const):
            yield e.value, st
        elif isinstance(e, Reg):
            yield dict(st[1]).get(e.name, 0), st
        elif isinstance(e, Load):
            evs, regs = st
            for v in sorted(self.domains[e.loc.name]):
                if e.ord is None:
                    lab = Label(Kind.Rna, e.loc, rval=v)
                else:
                    lab = Label(Kind.R, e.loc, rval=v, ord=e.ord, scope=e.scope)
                yield v, (evs + (lab,), regs)
        elif isinstance(e, FetchInc):
            evs, regs = st
            for v in sorted(self.domains[e.loc.name]):
                lab = Label(Kind.RMW, e.loc, rval=v, wval=_check_value(v + 1), ord=e.ord, scope=e.scope)
                yield v, (evs + (lab,), regs)
        elif isinstance(e, BinOp):
            for a, st2 in self.expr(e.left, st):
                for b, st3 in self.expr(e.right, st2):
                    if e.op == "+":
                        yield _check_value(a + b), st3
                    elif e.op == "-":
                        yield _check_value(a - b), st3
                    elif e.op == "==":
                        yield int(a == b), st3
                    else:
                        yield int(a != b), st3
        elif isinstance(e, Cond):
            for c, st2 in self.expr(e.test, st):
                if self.collect:
                    yield from self.expr(e.then, st2)
                    yield from self.expr(e.other, st2)
                else:
                    yield from self.expr(e.then if c else e.other, st2)
        else:  # pragma: no cover
            raise TypeError(e)


def _write_sites(stmts, unroll: int) -> int:
    """Upper bound on write events along any single path."""

    def expr(e) -> int:
        if isinstance(e, FetchInc):
            return 1
        if isinstance(e, BinOp):
            return expr(e.left) + expr(e.right)
        if isinstance(e, Cond):
            return expr(e.test) + max(expr(e.then), expr(e.other))
        return 0

    total = 0
    for s in stmts:
        if isinstance(s, Store):
            total += 1 + expr(s.value)
        elif isinstance(s, (Assign, Eval)):
            total += expr(s.value)
        elif isinstance(s, If):
            total += expr(s.test) + max(_write_sites(s.then, unroll), _write_sites(s.other, unroll))
        elif isinstance(s, While):
            total += (unroll + 1) * expr(s.test) + unroll * _write_sites(s.body, unroll)
    return total


def _thread_paths(p: LitmusProgram, domains: dict, unroll: int, collect: bool = False):
    paths, truncated = [], False
    for t in p.threads:
        runner = _ThreadRunner(t, domains, unroll, collect)
        paths.append(runner.paths())
        truncated |= runner.truncated
    return paths, truncated


def value_domains(p: LitmusProgram, unroll: int = DEFAULT_UNROLL) -> dict[str, set[int]]:
    """Initial value plus every value any store site can produce, to a fixpoint.

    Branch conditions are ignored here, so stores guarded by values that
    only a later round discovers are still counted.  Each round admits
    values produced by one more link of a write-to-read chain, so the number
    of rounds is bounded by the writes on a path.
    """
    domains = {l.name: {p.inits[l.name]} for l in p.locations}
    rounds = sum(_write_sites(t.body, unroll) for t in p.threads)
    for _ in range(rounds):
        paths, _ = _thread_paths(p, domains, unroll, collect=True)
        grown = {k: set(v) for k, v in domains.items()}
        for thread_paths in paths:
            for evs, _regs in thread_paths:
                for lab in evs:
                    if lab.is_write:
                        grown[lab.loc.name].add(lab.wval)
        if grown == domains:
            break
        domains = grown
    return domains


def enumerate_basic(p: LitmusProgram, cfg: EnumConfig = EnumConfig()) -> BasicSet:
    if cfg.value_domain_override is not None:
        domains = {l.name: {p.inits[l.name]} for l in p.locations}
        for k, vs in cfg.value_domain_override.items():
            domains[k] = set(vs)
    else:
        domains = value_domains(p, cfg.unroll)
    paths, truncated = _thread_paths(p, domains, cfg.unroll)
    total = 1
    for ps in paths:
        total *= len(ps)
    if total > cfg.cap:
        raise ResourceError(f"{total} basic executions exceed the cap of {cfg.cap}")

    used = set()
    for t in p.threads:
        used.update(l.name for l in _accessed(t.body))
    init_locs = [l for l in p.locations if l.name in used]
    init = [Label(Kind.Wna, l, wval=p.inits[l.name]) for l in init_locs]
    names = [f"init_{l.name}" for l in init_locs]
    groups = [(t.device, t.group) for t in p.threads]

    executions = []
    for combo in itertools.product(*paths):
        threads = [evs for evs, _ in combo]
        ev_names = names + [f"T{t}.{k}" for t, evs in enumerate(threads) for k in range(len(evs))]
        executions.append(
            Execution.from_threads(
                init, threads, groups, ev_names, [regs for _, regs in combo], language=p.language
            )
        )
    return BasicSet(executions, truncated, domains)
