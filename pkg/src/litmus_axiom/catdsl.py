"""A small cat-style language for memory-model definitions.

Grammar (one statement per line; newlines inside brackets are ignored)::

    let NAME = EXPR
    acyclic EXPR as NAME | irreflexive EXPR as NAME | empty EXPR as NAME
    undefined_unless empty EXPR as NAME
    witness NAME linear over EXPR

Binary operators bind, loosest first: ``|``, ``\\``, ``&``, ``;``, ``*``;
all are left-associative.  Prefix ``~`` (complement) binds looser than the
postfix operators ``^-1``, ``?`` and ``+``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Optional

from .events import BASE_NAMES, WITNESS_NAMES, Execution, Value, Witness, base_env, execution_env
from .relalg import EventSet, Relation

SET, REL = "set", "rel"
CONSISTENCY, UNDEFINED = "consistency", "undefined"
PREDICATES = ("acyclic", "irreflexive", "empty")
KEYWORDS = frozenset({"let", "as", "witness", "linear", "over", "undefined_unless", *PREDICATES})


class ModelError(Exception):
    def __init__(self, msg: str, line: int = 0, col: int = 0):
        self.line, self.col = line, col
        super().__init__(f"{line}:{col}: {msg}" if line else msg)


class ModelSyntaxError(ModelError):
    pass


class UnknownIdentifier(ModelError):
    pass


class RecursiveBinding(ModelError):
    pass


# ---------------------------------------------------------------- AST


class Expr:
    typ: str
    deps: frozenset

    def eval(self, env: dict) -> Value:
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class Ident(Expr):
    name: str
    typ: str
    deps: frozenset

    def eval(self, env):
        return env[self.name]

    def __str__(self):
        return self.name


@dataclass(frozen=True, eq=False)
class Bracket(Expr):
    arg: Expr
    typ: str = REL

    @property
    def deps(self):
        return self.arg.deps

    def eval(self, env):
        return self.arg.eval(env).identity()

    def __str__(self):
        return f"[{self.arg}]"


@dataclass(frozen=True, eq=False)
class Unary(Expr):
    op: str
    arg: Expr

    @property
    def typ(self):
        return self.arg.typ

    @property
    def deps(self):
        return self.arg.deps

    def eval(self, env):
        v = self.arg.eval(env)
        op = self.op
        if op == "~":
            return v.complement()
        if op == "^-1":
            return v.inverse()
        if op == "?":
            return v.optional()
        return v.closure()

    def __str__(self):
        return f"~{self.arg}" if self.op == "~" else f"({self.arg}){self.op}"


@dataclass(frozen=True, eq=False)
class Binary(Expr):
    op: str
    left: Expr
    right: Expr

    @property
    def typ(self):
        return REL if self.op in ("*", ";") else self.left.typ

    @property
    def deps(self):
        return self.left.deps | self.right.deps

    def eval(self, env):
        a = self.left.eval(env)
        b = self.right.eval(env)
        op = self.op
        if op == ";":
            return a.compose(b)
        if op == "|":
            return a | b
        if op == "&":
            return a & b
        if op == "\\":
            return a - b
        return a.product(b)

    def __str__(self):
        return f"({self.left} {self.op} {self.right})"


@dataclass(frozen=True)
class Binding:
    name: str
    expr: Expr


@dataclass(frozen=True)
class Constraint:
    tag: str
    predicate: str
    expr: Expr
    name: str

    def holds(self, env: dict) -> bool:
        r = self.expr.eval(env)
        if self.predicate == "acyclic":
            return r.acyclic()
        if self.predicate == "irreflexive":
            return r.irreflexive()
        return r.is_empty() if isinstance(r, Relation) else not r


@dataclass(frozen=True)
class WitnessDecl:
    name: str
    over: Expr


@dataclass(frozen=True)
class ModelDef:
    name: str
    bindings: tuple[Binding, ...]
    constraints: tuple[Constraint, ...]
    witness_decls: tuple[WitnessDecl, ...] = ()

    @property
    def witness_name(self) -> Optional[str]:
        return self.witness_decls[0].name if self.witness_decls else None

    @property
    def needs_S(self) -> bool:
        return bool(self.witness_decls)

    def consistency(self) -> tuple[Constraint, ...]:
        return tuple(c for c in self.constraints if c.tag == CONSISTENCY)

    def undefined(self) -> tuple[Constraint, ...]:
        return tuple(c for c in self.constraints if c.tag == UNDEFINED)

    def binding(self, name: str) -> Binding:
        for b in self.bindings:
            if b.name == name:
                return b
        raise KeyError(name)

    def constraint(self, name: str) -> Constraint:
        for c in self.constraints:
            if c.name == name:
                return c
        raise KeyError(name)


# ---------------------------------------------------------------- lexer

_TOKEN = re.compile(
    r"""(?P<ws>[ \t\r]+)
      | (?P<comment>\#[^\n]*)
      | (?P<nl>\n)
      | (?P<inv>\^-1)
      | (?P<ident>[A-Za-z_][A-Za-z0-9_']*(?:-[A-Za-z0-9_']+)*)
      | (?P<op>[\[\]()?+~;&\\|*=])""",
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Tok:
    kind: str  # "ident", "op", "nl", "eof"
    text: str
    line: int
    col: int


def _lex(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    line, line_start, depth, pos = 1, 0, 0, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        col = pos - line_start + 1
        if not m:
            raise ModelSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        s = m.group()
        pos = m.end()
        if kind == "nl":
            if depth == 0:
                toks.append(_Tok("nl", s, line, col))
            line += 1
            line_start = pos
        elif kind in ("ident", "op", "inv"):
            if s in "([":
                depth += 1
            elif s in ")]":
                depth = max(0, depth - 1)
            toks.append(_Tok("ident" if kind == "ident" else "op", s, line, col))
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


# ---------------------------------------------------------------- parser

_BINARY = {"|": 1, "\\": 2, "&": 3, ";": 4, "*": 5}
_POSTFIX = ("^-1", "?", "+")


class _Parser:
    def __init__(self, text: str, name: str):
        self.toks = _lex(text)
        self.i = 0
        self.name = name
        # name -> (type, witness deps)
        self.scope: dict[str, tuple[str, frozenset]] = {
            k: (t, frozenset({k}) if k in WITNESS_NAMES else frozenset()) for k, t in BASE_NAMES.items()
        }
        self.bindings: list[Binding] = []
        self.constraints: list[Constraint] = []
        self.witnesses: list[WitnessDecl] = []
        self.defining: Optional[str] = None

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def advance(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg: str, tok: Optional[_Tok] = None, cls=ModelSyntaxError):
        tok = tok or self.tok
        return cls(msg, tok.line, tok.col)

    def expect(self, text: str) -> _Tok:
        if self.tok.text != text:
            raise self.error(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        return self.advance()

    def expect_name(self) -> _Tok:
        t = self.tok
        if t.kind != "ident" or t.text in KEYWORDS:
            raise self.error(f"expected a name, found {t.text or 'end of input'!r}")
        return self.advance()

    def parse(self) -> ModelDef:
        while self.tok.kind != "eof":
            if self.tok.kind == "nl":
                self.advance()
                continue
            self.statement()
            if self.tok.kind not in ("nl", "eof"):
                raise self.error(f"unexpected {self.tok.text!r} after statement")
        return ModelDef(self.name, tuple(self.bindings), tuple(self.constraints), tuple(self.witnesses))

    def statement(self) -> None:
        t = self.tok
        if t.text == "let":
            self.advance()
            nt = self.expect_name()
            if nt.text in self.scope:
                raise self.error(f"{nt.text!r} is already defined", nt)
            self.expect("=")
            self.defining = nt.text
            expr = self.expr()
            self.defining = None
            self.bindings.append(Binding(nt.text, expr))
            self.scope[nt.text] = (expr.typ, expr.deps)
        elif t.text == "witness":
            self.advance()
            nt = self.expect_name()
            if nt.text in self.scope:
                raise self.error(f"{nt.text!r} is already defined", nt)
            self.expect("linear")
            self.expect("over")
            over = self.expr()
            if over.typ != SET:
                raise self.error("witness must be linear over a set", t)
            if self.witnesses:
                raise self.error("at most one witness declaration is supported", t)
            self.witnesses.append(WitnessDecl(nt.text, over))
            self.scope[nt.text] = (REL, frozenset({nt.text}))
        elif t.text == "undefined_unless":
            self.advance()
            self.constraint(UNDEFINED)
        elif t.text in PREDICATES:
            self.constraint(CONSISTENCY)
        else:
            raise self.error(f"unexpected {t.text or 'end of input'!r} at start of statement")

    def constraint(self, tag: str) -> None:
        pt = self.tok
        if pt.text not in PREDICATES:
            raise self.error("expected acyclic, irreflexive or empty")
        self.advance()
        expr = self.expr()
        if pt.text != "empty" and expr.typ != REL:
            raise self.error(f"{pt.text} needs a relation", pt)
        if self.tok.text != "as":
            raise self.error("constraint needs a name: '... as NAME'")
        self.advance()
        nt = self.expect_name()
        if any(c.name == nt.text for c in self.constraints):
            raise self.error(f"duplicate constraint name {nt.text!r}", nt)
        self.constraints.append(Constraint(tag, pt.text, expr, nt.text))

    # expressions

    def expr(self, min_prec: int = 1) -> Expr:
        left = self.prefix()
        while self.tok.kind == "op" and self.tok.text in _BINARY and _BINARY[self.tok.text] >= min_prec:
            opt = self.advance()
            prec = _BINARY[opt.text]
            right = self.expr(prec + 1)
            left = self.binary(opt, left, right)
        return left

    def binary(self, opt: _Tok, left: Expr, right: Expr) -> Expr:
        op = opt.text
        if op in (";",):
            if left.typ != REL or right.typ != REL:
                raise self.error("';' composes relations", opt)
        elif op == "*":
            if left.typ != SET or right.typ != SET:
                raise self.error("'*' takes two sets", opt)
        elif left.typ != right.typ:
            raise self.error(f"'{op}' mixes a set and a relation", opt)
        return Binary(op, left, right)

    def prefix(self) -> Expr:
        if self.tok.text == "~":
            self.advance()
            return Unary("~", self.prefix())
        return self.postfix()

    def postfix(self) -> Expr:
        e = self.atom()
        while self.tok.kind == "op" and self.tok.text in _POSTFIX:
            opt = self.advance()
            if e.typ != REL:
                raise self.error(f"'{opt.text}' applies to relations", opt)
            e = Unary(opt.text, e)
        return e

    def atom(self) -> Expr:
        t = self.tok
        if t.text == "(":
            self.advance()
            e = self.expr()
            self.expect(")")
            return e
        if t.text == "[":
            self.advance()
            e = self.expr()
            rt = self.expect("]")
            if e.typ != SET:
                raise self.error("[s] needs a set", rt)
            return Bracket(e)
        if t.kind == "ident" and t.text not in KEYWORDS:
            self.advance()
            if t.text == self.defining:
                raise self.error(f"recursive binding {t.text!r}", t, RecursiveBinding)
            if t.text not in self.scope:
                raise self.error(f"unknown identifier {t.text!r}", t, UnknownIdentifier)
            typ, deps = self.scope[t.text]
            return Ident(t.text, typ, deps)
        raise self.error(f"unexpected {t.text or 'end of input'!r} in expression")


def parse_model(text: str, name: str = "model") -> ModelDef:
    return _Parser(text, name).parse()


# ---------------------------------------------------------------- evaluation


@dataclass(frozen=True)
class Verdict:
    consistent: bool
    faulty: bool
    failed_axioms: tuple[str, ...]
    ub_axioms: tuple[str, ...] = ()


def _run(constraints: Iterable[Constraint], env: dict) -> list[str]:
    return [c.name for c in constraints if not c.holds(env)]


def eval_model(m: ModelDef, x: Execution, w: Witness) -> Verdict:
    """Judge one candidate; assumes it is well-formed."""
    env = base_env(x, w)
    if m.needs_S:
        if w.S is None:
            raise ModelError(f"model {m.name} needs an S witness")
        env[m.witness_name] = w.S
    for b in m.bindings:
        env[b.name] = b.expr.eval(env)
    failed = _run(m.consistency(), env)
    if failed:
        return Verdict(False, False, tuple(failed))
    ub = _run(m.undefined(), env)
    return Verdict(True, bool(ub), (), tuple(ub))


class Evaluator:
    """Staged evaluation of one model over one execution.

    Bindings and constraints are split by the witness relations they mention,
    so those independent of ``rf``/``mo`` are computed once per execution and
    those independent of ``S`` once per ``(rf, mo)``.
    """

    def __init__(self, m: ModelDef, x: Execution):
        self.model = m
        self.x = x
        wn = m.witness_name
        s_dep = (lambda e: wn in e.deps) if wn else (lambda e: False)
        self.static_bindings = [b for b in m.bindings if not b.expr.deps]
        self.rfmo_bindings = [b for b in m.bindings if b.expr.deps and not s_dep(b.expr)]
        self.s_bindings = [b for b in m.bindings if s_dep(b.expr)]
        cons = m.consistency()
        self.rfmo_constraints = [c for c in cons if not s_dep(c.expr)]
        self.s_constraints = [c for c in cons if s_dep(c.expr)]
        env = execution_env(x)
        for b in self.static_bindings:
            env[b.name] = b.expr.eval(env)
        self.static_env = env

    def stage(self, rf: Relation, mo: Relation) -> dict:
        env = dict(self.static_env)
        env["rf"] = rf
        env["mo"] = mo
        for b in self.rfmo_bindings:
            env[b.name] = b.expr.eval(env)
        return env

    def stage_S(self, env: dict, S: Relation) -> dict:
        env = dict(env)
        env[self.model.witness_name] = S
        for b in self.s_bindings:
            env[b.name] = b.expr.eval(env)
        return env

    def witness_set(self, env: dict) -> EventSet:
        return self.model.witness_decls[0].over.eval(env)

    def verdict(self, env: dict, rfmo_failed: Optional[list] = None) -> Verdict:
        """Verdict for a fully staged env (S bound if the model declares it)."""
        failed = rfmo_failed if rfmo_failed is not None else _run(self.rfmo_constraints, env)
        failed = set(failed) | set(_run(self.s_constraints, env))
        if failed:
            ordered = tuple(c.name for c in self.model.consistency() if c.name in failed)
            return Verdict(False, False, ordered)
        ub = _run(self.model.undefined(), env)
        return Verdict(True, bool(ub), (), tuple(ub))
