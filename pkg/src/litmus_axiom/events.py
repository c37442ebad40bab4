"""Executions, candidate witnesses, well-formedness and the base environment."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Sequence, Union

from .relalg import EventSet, Relation

VALUE_MIN = -(2**31)
VALUE_MAX = 2**31 - 1


class ExecutionError(ValueError):
    """An execution or label violates a structural invariant."""


class Order(str, enum.Enum):
    RLX = "RLX"
    ACQ = "ACQ"
    REL = "REL"
    AR = "AR"
    SC = "SC"


class Scope(str, enum.Enum):
    WI = "WI"
    WG = "WG"
    DV = "DV"
    ALL = "ALL"


class Kind(str, enum.Enum):
    Wna = "Wna"
    W = "W"
    Rna = "Rna"
    R = "R"
    RMW = "RMW"
    F = "F"
    FG = "FG"
    FL = "FL"
    FGL = "FGL"


REGIONS = ("c11", "global", "local", "global_fgb")

READS = frozenset({Kind.Rna, Kind.R, Kind.RMW})
WRITES = frozenset({Kind.Wna, Kind.W, Kind.RMW})
FENCES = frozenset({Kind.F, Kind.FG, Kind.FL, Kind.FGL})
ATOMICS = frozenset({Kind.W, Kind.R, Kind.RMW}) | FENCES

# orders each kind may carry
_ALLOWED_ORDERS = {
    Kind.W: {Order.RLX, Order.REL, Order.SC},
    Kind.R: {Order.RLX, Order.ACQ, Order.SC},
    Kind.RMW: set(Order),
    Kind.F: {Order.RLX, Order.ACQ, Order.REL, Order.SC},
    Kind.FG: {Order.RLX, Order.ACQ, Order.REL, Order.SC},
    Kind.FL: {Order.RLX, Order.ACQ, Order.REL, Order.SC},
    Kind.FGL: {Order.RLX, Order.ACQ, Order.REL, Order.SC},
}


@dataclass(frozen=True)
class Location:
    name: str
    atomic: bool
    region: str = "c11"

    def __post_init__(self):
        if self.region not in REGIONS:
            raise ExecutionError(f"unknown region {self.region!r}")


@dataclass(frozen=True)
class Label:
    kind: Kind
    loc: Optional[Location] = None
    rval: Optional[int] = None
    wval: Optional[int] = None
    ord: Optional[Order] = None
    scope: Optional[Scope] = None

    def __post_init__(self):
        k = self.kind
        if (self.loc is None) != (k in FENCES):
            raise ExecutionError(f"{k.value}: location presence mismatch")
        if (self.rval is None) == (k in READS):
            raise ExecutionError(f"{k.value}: read value presence mismatch")
        if (self.wval is None) == (k in WRITES):
            raise ExecutionError(f"{k.value}: write value presence mismatch")
        if k in ATOMICS:
            if self.ord is None:
                raise ExecutionError(f"{k.value}: atomic event needs a memory order")
            if self.ord not in _ALLOWED_ORDERS[k]:
                raise ExecutionError(f"{k.value}: memory order {self.ord.value} not permitted")
        elif self.ord is not None or self.scope is not None:
            raise ExecutionError(f"{k.value}: non-atomic event carries order/scope")
        # Wna on an atomic location is legal only as an initial event
        if self.loc is not None and self.loc.atomic != (k in ATOMICS) and k is not Kind.Wna:
            what = "atomic" if self.loc.atomic else "non-atomic"
            raise ExecutionError(f"{k.value} on {what} location {self.loc.name}")
        if k in (Kind.FG, Kind.FL, Kind.FGL) and self.scope is None:
            raise ExecutionError(f"{k.value}: OpenCL fence needs a scope")
        for v in (self.rval, self.wval):
            if v is not None and not VALUE_MIN <= v <= VALUE_MAX:
                raise ExecutionError(f"value {v} out of range")

    @property
    def is_read(self) -> bool:
        return self.kind in READS

    @property
    def is_write(self) -> bool:
        return self.kind in WRITES

    @property
    def is_fence(self) -> bool:
        return self.kind in FENCES

    @property
    def is_atomic(self) -> bool:
        return self.kind in ATOMICS

    def __str__(self) -> str:
        parts = []
        if self.loc is not None:
            parts.append(self.loc.name)
        if self.rval is not None:
            parts.append(str(self.rval))
        if self.wval is not None:
            parts.append(str(self.wval))
        if self.ord is not None:
            parts.append(self.ord.value)
        if self.scope is not None:
            parts.append(self.scope.value)
        return f"{self.kind.value}({','.join(parts)})"


def W(loc, v, o=Order.SC, s=None):
    return Label(Kind.W, loc, wval=v, ord=Order(o), scope=s and Scope(s))


def R(loc, v, o=Order.SC, s=None):
    return Label(Kind.R, loc, rval=v, ord=Order(o), scope=s and Scope(s))


def Wna(loc, v):
    return Label(Kind.Wna, loc, wval=v)


def Rna(loc, v):
    return Label(Kind.Rna, loc, rval=v)


def RMW(loc, v, v2, o=Order.SC, s=None):
    return Label(Kind.RMW, loc, rval=v, wval=v2, ord=Order(o), scope=s and Scope(s))


def Fence(o=Order.SC, kind=Kind.F, s=None):
    return Label(Kind(kind), ord=Order(o), scope=s and Scope(s))


@dataclass(frozen=True)
class Execution:
    """The graph ``(E, I, lbl, thd, wg, dv, sb)``; events are ``0..n-1``.

    ``regs`` carries each thread's final register file and ``names`` optional
    human-readable event names; neither participates in the axioms.
    """

    labels: tuple[Label, ...]
    init: EventSet
    thd: Relation
    wg: Relation
    dv: Relation
    sb: Relation
    names: Optional[tuple[str, ...]] = None
    regs: tuple[tuple[tuple[str, int], ...], ...] = ()
    language: str = "c11"

    @property
    def n(self) -> int:
        return len(self.labels)

    @classmethod
    def from_threads(
        cls,
        init: Sequence[Label],
        threads: Sequence[Sequence[Label]],
        groups: Optional[Sequence[tuple[int, int]]] = None,
        names: Optional[Sequence[str]] = None,
        regs: Sequence[dict] = (),
        language: Optional[str] = None,
    ) -> "Execution":
        """Lay out initial events then threads in order; sb is program order.

        ``groups[t]`` is the ``(device, work_group)`` of thread ``t``; by
        default every thread shares one work-group on one device.
        """
        labels = list(init)
        tid = [-1] * len(init)
        for t, body in enumerate(threads):
            labels.extend(body)
            tid.extend([t] * len(body))
        n = len(labels)
        if groups is None:
            groups = [(0, 0)] * len(threads)
        thd = [0] * n
        wg = [0] * n
        dv = [0] * n
        sb = [0] * n
        for i in range(n):
            if tid[i] < 0:
                continue
            di, wi = groups[tid[i]]
            for j in range(n):
                if tid[j] < 0:
                    continue
                dj, wj = groups[tid[j]]
                if tid[j] == tid[i]:
                    thd[i] |= 1 << j
                    if j > i:
                        sb[i] |= 1 << j
                if (dj, wj) == (di, wi):
                    wg[i] |= 1 << j
                if dj == di:
                    dv[i] |= 1 << j
        if language is None:
            language = "c11" if all(l.loc is None or l.loc.region == "c11" for l in labels) else "opencl"
        x = cls(
            labels=tuple(labels),
            init=EventSet.of(n, range(len(init))),
            thd=Relation(n, tuple(thd)),
            wg=Relation(n, tuple(wg)),
            dv=Relation(n, tuple(dv)),
            sb=Relation(n, tuple(sb)),
            names=tuple(names) if names is not None else None,
            regs=tuple(tuple(sorted(r.items())) for r in regs),
            language=language,
        )
        x.validate()
        return x

    def name(self, e: int) -> str:
        return self.names[e] if self.names else f"e{e}"

    def event(self, name: str) -> int:
        if not self.names:
            raise KeyError(name)
        return self.names.index(name)

    def validate(self) -> None:
        n = self.n
        for r in (self.thd, self.wg, self.dv, self.sb):
            if r.n != n:
                raise ExecutionError("relation universe differs from event count")
        non_init = EventSet.full(n) - self.init
        seen_locs = set()
        for e in self.init:
            lab = self.labels[e]
            if lab.kind is not Kind.Wna:
                raise ExecutionError(f"initial event {self.name(e)} is not a plain write")
            if lab.loc.name in seen_locs:
                raise ExecutionError(f"two initial events for {lab.loc.name}")
            seen_locs.add(lab.loc.name)
        for e in non_init:
            lab = self.labels[e]
            if lab.kind is Kind.Wna and lab.loc.atomic:
                raise ExecutionError(f"non-atomic write to atomic location {lab.loc.name}")
            if lab.loc is not None and lab.loc.name not in seen_locs:
                raise ExecutionError(f"no initial event for location {lab.loc.name}")
        ident_non_init = non_init.identity()
        for name, r in (("thd", self.thd), ("wg", self.wg), ("dv", self.dv)):
            if (r - non_init.product(non_init)) != Relation.empty(n):
                raise ExecutionError(f"{name} relates initial events")
            if (ident_non_init - r) != Relation.empty(n):
                raise ExecutionError(f"{name} is not reflexive on non-initial events")
            if r != r.inverse() or (r.compose(r) - r) != Relation.empty(n):
                raise ExecutionError(f"{name} is not an equivalence")
        if (self.thd - self.wg) != Relation.empty(n) or (self.wg - self.dv) != Relation.empty(n):
            raise ExecutionError("thread hierarchy violated: need thd <= wg <= dv")
        if (self.sb - self.thd) != Relation.empty(n):
            raise ExecutionError("sb relates events of different threads")
        if not self.sb.irreflexive() or (self.sb.compose(self.sb) - self.sb) != Relation.empty(n):
            raise ExecutionError("sb is not a strict partial order")
        for i in non_init:
            li = self.labels[i].loc
            if li is None or li.region != "local":
                continue
            for j in non_init:
                lj = self.labels[j].loc
                if lj is not None and lj.name == li.name and (i, j) not in self.wg:
                    raise ExecutionError(f"local location {li.name} accessed by two work-groups")


@dataclass(frozen=True)
class Witness:
    rf: Relation
    mo: Relation
    S: Optional[Relation] = None


Value = Union[EventSet, Relation]

# names bound by base_env and whether they denote sets or relations
BASE_NAMES: dict[str, str] = {
    "E": "set", "I": "set", "R": "set", "W": "set", "F": "set", "A": "set",
    "RLX": "set", "ACQ": "set", "REL": "set", "AR": "set", "SC": "set",
    "WI": "set", "WG": "set", "DV": "set", "ALL": "set",
    "nal": "set", "G": "set", "L": "set", "fgb": "set",
    "E2": "rel", "id": "rel", "loc": "rel", "val": "rel",
    "sb": "rel", "thd": "rel", "wg": "rel", "dv": "rel",
    "rf": "rel", "mo": "rel",
}
WITNESS_NAMES = frozenset({"rf", "mo"})


def execution_env(x: Execution) -> dict[str, Value]:
    """Every base name that does not depend on the witness."""
    n = x.n
    masks = {k: 0 for k in ("R", "W", "F", "A", "nal", "G", "L", "fgb")}
    orders = {o.value: 0 for o in Order}
    scopes = {s.value: 0 for s in Scope}
    same_loc = [0] * n
    by_loc: dict[str, int] = {}
    for e, lab in enumerate(x.labels):
        bit = 1 << e
        if lab.is_read:
            masks["R"] |= bit
        if lab.is_write:
            masks["W"] |= bit
        if lab.is_fence:
            masks["F"] |= bit
            if lab.kind in (Kind.FG, Kind.FGL):
                masks["G"] |= bit
            if lab.kind in (Kind.FL, Kind.FGL):
                masks["L"] |= bit
        else:
            by_loc[lab.loc.name] = by_loc.get(lab.loc.name, 0) | bit
            if not lab.loc.atomic:
                masks["nal"] |= bit
            region = lab.loc.region
            if region in ("c11", "global", "global_fgb"):
                masks["G"] |= bit
            if region == "global_fgb":
                masks["fgb"] |= bit
            if region == "local":
                masks["L"] |= bit
        if lab.is_atomic:
            masks["A"] |= bit
            orders[lab.ord.value] |= bit
            if lab.scope is not None:
                scopes[lab.scope.value] |= bit
    val = [0] * n
    for e, lab in enumerate(x.labels):
        if not lab.is_fence:
            same_loc[e] = by_loc[lab.loc.name]
        if lab.is_write:
            for f, lf in enumerate(x.labels):
                if lf.is_read and lf.rval == lab.wval:
                    val[e] |= 1 << f
    env: dict[str, Value] = {"E": EventSet.full(n), "I": x.init}
    for k, m in {**masks, **orders, **scopes}.items():
        env[k] = EventSet(n, m)
    env.update(
        E2=Relation.full(n),
        id=Relation.ident(n),
        loc=Relation(n, tuple(same_loc)),
        val=Relation(n, tuple(val)),
        sb=x.sb,
        thd=x.thd,
        wg=x.wg,
        dv=x.dv,
    )
    return env


def base_env(x: Execution, w: Witness) -> dict[str, Value]:
    env = execution_env(x)
    env["rf"] = w.rf
    env["mo"] = w.mo
    if w.S is not None:
        env["S"] = w.S
    return env


def mo_domain(x: Execution) -> Relation:
    """``=loc & W^2 \\ nal^2 \\ id``: the pairs WfMo requires mo to order."""
    env = execution_env(x)
    W_, nal = env["W"], env["nal"]
    return (env["loc"] & W_.product(W_)) - nal.product(nal) - env["id"]


def wf_candidate(x: Execution, w: Witness, needs_S: bool) -> bool:
    n = x.n
    for r in (w.rf, w.mo) + ((w.S,) if w.S is not None else ()):
        if r.n != n:
            return False
    env = execution_env(x)
    Rs, Ws = env["R"], env["W"]
    # WfRf
    if not (w.rf - (env["loc"] & env["val"])).is_empty():
        return False
    if not (w.rf - Ws.product(Rs)).is_empty():
        return False
    inv = w.rf.inverse()
    for r in Rs:
        if bin(inv.rows[r]).count("1") != 1:
            return False
    # WfMo
    if (w.mo | w.mo.inverse()) != mo_domain(x) or not w.mo.acyclic():
        return False
    # WfS
    if not needs_S:
        return w.S is None
    if w.S is None:
        return False
    SC = env["SC"]
    return w.S.acyclic() and (w.S | w.S.inverse()) == SC.product(SC) - env["id"]
