"""Golden litmus tests and hand-drawn candidate executions.

Litmus programs live in ``corpus/*.litmus``; ``corpus/manifest.json`` pairs
each case with a model and its expected result.  Pinned candidates are
built here event-for-event, with events named ``a``, ``b``, ... in drawing
order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Callable, Optional

from .catdsl import Verdict
from .checker import CheckConfig, CheckReport, allowed, check_execution
from .events import (
    Execution,
    Fence,
    Kind,
    Location,
    R,
    W,
    Witness,
    Wna,
    Rna,
)
from .frontend import LitmusProgram, parse_litmus
from .models import get_model
from .relalg import Relation


def _rel(x: Execution, pairs) -> Relation:
    return Relation.from_pairs(x.n, [(x.event(a), x.event(b)) for a, b in pairs])


def _order(x: Execution, names) -> Relation:
    return Relation.from_order(x.n, [x.event(e) for e in names])


def sc_chain_candidate(with_S: bool = True) -> tuple[Execution, Witness]:
    """Four threads over atomic x and y; S runs f, g, h, i."""
    x_, y_ = Location("x", True), Location("y", True)
    x = Execution.from_threads(
        [Wna(x_, 0), Wna(y_, 0)],
        [
            [W(x_, 1, "RLX")],
            [R(x_, 1, "RLX"), R(x_, 2, "RLX")],
            [W(x_, 2, "SC"), R(y_, 0, "SC")],
            [W(y_, 1, "SC"), R(x_, 1, "SC")],
        ],
        names="abcdefghi",
    )
    rf = _rel(x, [("b", "g"), ("c", "d"), ("f", "e"), ("c", "i")])
    mo = _order(x, "acf") | _order(x, "bh")
    return x, Witness(rf, mo, _order(x, "fghi") if with_S else None)


def fence_gl_candidate(drawn_mo: bool = True) -> tuple[Execution, Witness]:
    """Fenced local-flag message passing with a stale read of x.

    The drawing orders the two non-atomic writes to x in mo; well-formed mo
    leaves them unordered (``drawn_mo=False``).
    """
    x_, y_ = Location("x", False, "global"), Location("y", True, "local")
    x = Execution.from_threads(
        [Wna(x_, 0), Wna(y_, 0)],
        [
            [Wna(x_, 1), Fence("REL", Kind.FGL, "WG"), W(y_, 1, "RLX", "WG")],
            [R(y_, 1, "RLX", "WG"), Fence("ACQ", Kind.FGL, "WG"), Rna(x_, 0)],
        ],
        names="abcdefgh",
        language="opencl",
    )
    rf = _rel(x, [("e", "f"), ("a", "h")])
    mo = _order(x, "be")
    if drawn_mo:
        mo = mo | _order(x, "ac")
    return x, Witness(rf, mo)


def twisted_sb_candidate() -> tuple[Execution, Witness]:
    """Twisted store buffering over two devices with both SC loads stale."""
    x_, y_ = Location("x", True, "global"), Location("y", True, "global")
    z1, z2 = Location("z1", True, "global_fgb"), Location("z2", True, "global_fgb")
    x = Execution.from_threads(
        [Wna(x_, 0), Wna(y_, 0), Wna(z1, 0), Wna(z2, 0)],
        [
            [W(x_, 1, "SC", "DV"), W(z1, 1, "REL", "ALL")],
            [R(z2, 1, "ACQ", "ALL"), R(x_, 0, "SC", "DV")],
            [W(y_, 1, "SC", "DV"), W(z2, 1, "REL", "ALL")],
            [R(z1, 1, "ACQ", "ALL"), R(y_, 0, "SC", "DV")],
        ],
        groups=[(0, 0), (0, 1), (1, 0), (1, 1)],
        names=["ix", "iy", "iz1", "iz2", *"abcdefgh"],
        language="opencl",
    )
    rf = _rel(x, [("b", "g"), ("f", "c"), ("ix", "d"), ("iy", "h")])
    mo = _order(x, ["ix", "a"]) | _order(x, ["iy", "e"]) | _order(x, ["iz1", "b"]) | _order(x, ["iz2", "f"])
    return x, Witness(rf, mo)


PINNED: dict[str, Callable[..., tuple[Execution, Witness]]] = {
    "sc_chain": sc_chain_candidate,
    "fence_gl": fence_gl_candidate,
    "twisted_sb": twisted_sb_candidate,
}


def pinned(name: str, **kw) -> tuple[Execution, Witness]:
    return PINNED[name](**kw)


# ---------------------------------------------------------------- manifest


def litmus_text(fname: str) -> str:
    return resources.files("litmus_axiom").joinpath("corpus", fname).read_text(encoding="utf-8")


def load_litmus(fname: str, allow_wi: bool = False) -> LitmusProgram:
    return parse_litmus(litmus_text(fname), allow_wi=allow_wi)


@dataclass(frozen=True)
class GoldenCase:
    id: str
    about: str
    model: str
    expect: dict
    litmus: Optional[str] = None
    pinned: Optional[str] = None
    pinned_args: dict = field(default_factory=dict)
    new_incl: bool = False
    allow_wi: bool = False
    require_wf: bool = True


def corpus() -> list[GoldenCase]:
    raw = json.loads(litmus_text("manifest.json"))
    return [GoldenCase(**c) for c in raw["cases"]]


def _judge_pinned(case: GoldenCase) -> Verdict:
    m = get_model(case.model, case.new_incl)
    x, w = pinned(case.pinned, **case.pinned_args)
    if not m.needs_S and w.S is not None:
        w = Witness(w.rf, w.mo)
    return check_execution(x, w, m, require_wf=case.require_wf)


def run_case(case: GoldenCase, cfg: CheckConfig = CheckConfig()) -> tuple[bool, str]:
    """Evaluate one case; returns (matches expectation, observed summary)."""
    exp = case.expect
    if case.pinned is not None:
        v = _judge_pinned(case)
        observed = {"consistent": v.consistent, "failed": list(v.failed_axioms), "faulty": v.faulty}
        ok = v.consistent == exp["consistent"]
        if "failed" in exp:
            ok &= list(v.failed_axioms) == exp["failed"]
        if "failed_includes" in exp:
            ok &= set(exp["failed_includes"]) <= set(v.failed_axioms)
        if "faulty" in exp:
            ok &= v.faulty == exp["faulty"]
        return ok, json.dumps(observed, sort_keys=True)

    p = load_litmus(case.litmus, case.allow_wi)
    rep: CheckReport = allowed(p, get_model(case.model, case.new_incl), cfg)
    observed = {"verdict": rep.verdict, "states": rep.states, "query": rep.query_witnessed, "ub": list(rep.ub_axioms)}
    ok = True
    if "verdict" in exp:
        ok &= rep.verdict == exp["verdict"]
    if "states" in exp:
        ok &= rep.states == exp["states"]
    if "query" in exp:
        ok &= rep.query_witnessed == exp["query"]
    if "ub" in exp:
        ok &= list(rep.ub_axioms) == exp["ub"]
    return ok, json.dumps(observed, sort_keys=True)
