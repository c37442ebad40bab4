import itertools

import pytest
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from litmus_axiom.checker import (
    CheckConfig,
    CheckTimeout,
    allowed,
    check_execution,
    enumerate_witnesses,
    witness_count,
)
from litmus_axiom.catdsl import eval_model
from litmus_axiom.cli import generate_sb
from litmus_axiom.corpus import load_litmus
from litmus_axiom.events import ExecutionError, Witness, wf_candidate
from litmus_axiom.frontend import ResourceError, enumerate_basic, parse_litmus
from litmus_axiom.models import get_model
from litmus_axiom.relalg import Relation

SIMP = get_model("c11_simp")
ORIG = get_model("c11_orig")
PARTIAL = get_model("c11_partial")


def c11(body: str) -> str:
    return f"test T c11\natomic int x;\natomic int y;\n{body}\n"


def witness_key(w: Witness):
    return (w.rf, w.mo, w.S)


# -------------------------------------------------------------- counting


def test_sb_witness_count():
    p = parse_litmus(generate_sb(2))
    (x,) = [x for x in enumerate_basic(p) if x.regs == ((("r1", 0),), (("r2", 0),))]
    # each read has one source; each location has two mo orders
    assert witness_count(x, SIMP) == 4
    # four SC events give 4! orders for S on top
    assert witness_count(x, ORIG) == 4 * 24
    assert len(list(enumerate_witnesses(x, ORIG))) == 96


def test_single_write_count():
    (x,) = enumerate_basic(parse_litmus(c11("{ store(x, 1); }")))
    # both mo orders are candidates; coherence rejects the one with init last
    assert witness_count(x, SIMP) == 2
    verdicts = [check_execution(x, w, SIMP).consistent for w in enumerate_witnesses(x, SIMP)]
    assert sorted(verdicts) == [False, True]
    (x2,) = enumerate_basic(parse_litmus(c11("{ store(x, 1); } || { store(x, 2); }")))
    assert witness_count(x2, SIMP) == 6


def test_enumeration_cap():
    (x,) = enumerate_basic(parse_litmus(c11("{ store(x, 1); } || { store(x, 2); }")))
    with pytest.raises(ResourceError):
        list(enumerate_witnesses(x, SIMP, cap=5))


# -------------------------------------------------------------- exhaustiveness


def naive_witnesses(x, with_S: bool):
    """Generate every rf function, every mo subset of write pairs and every
    linear order over every event subset, then keep the well-formed ones."""
    n = x.n
    reads = [e for e, l in enumerate(x.labels) if l.is_read]
    writes = [e for e, l in enumerate(x.labels) if l.is_write]
    wpairs = [(a, b) for a in writes for b in writes if a != b]
    rfs = [
        Relation.from_pairs(n, zip(srcs, reads))
        for srcs in itertools.product(range(n), repeat=len(reads))
    ]
    mos = [
        Relation.from_pairs(n, [p for p, keep in zip(wpairs, bits) if keep])
        for bits in itertools.product((0, 1), repeat=len(wpairs))
    ]
    Ss = [None]
    if with_S:
        Ss = [
            Relation.from_order(n, order)
            for k in range(n + 1)
            for sub in itertools.combinations(range(n), k)
            for order in itertools.permutations(sub)
        ]
    out = set()
    for rf in rfs:
        for mo in mos:
            if not wf_candidate(x, Witness(rf, mo), False):
                continue
            for S in Ss:
                w = Witness(rf, mo, S)
                if wf_candidate(x, w, with_S):
                    out.add(witness_key(w))
    return out


EXHAUSTIVE_PROGRAMS = [
    c11("{ store(x, 1); } || { r = load(x); s = load(y); }"),
    c11("{ store(x, 1); store(x, 2); } || { r = load(x); }"),
    c11("{ r = fetch_inc(x); } || { store(x, 1, RLX); }"),
    c11("{ store(x, 1, REL); } || { r = load(x, ACQ); s = load(y, RLX); }"),
]


@pytest.mark.parametrize("src", EXHAUSTIVE_PROGRAMS)
def test_enumeration_matches_generate_and_filter(src):
    for x in enumerate_basic(parse_litmus(src)):
        got = [witness_key(w) for w in enumerate_witnesses(x, SIMP)]
        assert len(got) == len(set(got))
        assert set(got) == naive_witnesses(x, False)


def test_enumeration_with_S_matches_generate_and_filter():
    src = c11("{ store(x, 1); } || { r = load(x); }")
    for x in enumerate_basic(parse_litmus(src)):
        got = [witness_key(w) for w in enumerate_witnesses(x, ORIG)]
        assert len(got) == len(set(got))
        assert set(got) == naive_witnesses(x, True)


# -------------------------------------------------------------- pruning


ORDERS = ("RLX", "REL", "SC")
LOAD_ORDERS = ("RLX", "ACQ", "SC")


@st.composite
def small_programs(draw):
    nthreads = draw(st.integers(2, 3))
    threads = []
    for _ in range(nthreads):
        ops = []
        for _ in range(draw(st.integers(1, 2))):
            loc = draw(st.sampled_from("xy"))
            kind = draw(st.sampled_from(("store", "load", "fence", "inc")))
            if kind == "store":
                ops.append(f"store({loc}, {draw(st.integers(1, 2))}, {draw(st.sampled_from(ORDERS))});")
            elif kind == "load":
                ops.append(f"r{len(threads)}_{len(ops)} = load({loc}, {draw(st.sampled_from(LOAD_ORDERS))});")
            elif kind == "fence":
                ops.append(f"fence({draw(st.sampled_from(('ACQ', 'REL', 'SC')))});")
            else:
                ops.append(f"r{len(threads)}_{len(ops)} = fetch_inc({loc}, {draw(st.sampled_from(('RLX', 'AR', 'SC')))});")
        threads.append("{ " + " ".join(ops) + " }")
    return c11(" || ".join(threads))


NAIVE_BUDGET = 20_000


def nominal(p, m):
    return sum(witness_count(x, m) for x in enumerate_basic(p))


def summary(rep):
    return rep.outcomes, rep.undefined, rep.consistent, rep.faulty, rep.ub_axioms


@given(small_programs())
@settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
def test_pruning_preserves_results(src):
    p = parse_litmus(src)
    assume(nominal(p, ORIG) <= NAIVE_BUDGET)
    pruned = allowed(p, ORIG, CheckConfig(workers=1))
    naive = allowed(p, ORIG, CheckConfig(workers=1, no_prune=True))
    assert summary(pruned) == summary(naive)
    assert pruned.candidates <= naive.candidates


@given(small_programs())
@settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
def test_model_relationships(src):
    p = parse_litmus(src)
    assume(nominal(p, ORIG) <= NAIVE_BUDGET)
    cfg = CheckConfig(workers=1)
    orig, partial, simp = (allowed(p, m, cfg) for m in (ORIG, PARTIAL, SIMP))
    assert set(orig.outcomes) == set(partial.outcomes)
    assert orig.undefined == partial.undefined
    assert set(simp.outcomes) <= set(partial.outcomes)


@pytest.mark.parametrize("fname", ["mixed_orders.litmus", "sb3.litmus"])
def test_pruning_on_corpus(fname):
    p = load_litmus(fname)
    pruned = allowed(p, ORIG, CheckConfig(workers=1))
    naive = allowed(p, ORIG, CheckConfig(workers=1, no_prune=True))
    assert summary(pruned) == summary(naive)


# -------------------------------------------------------------- program level


@pytest.mark.parametrize("n", [2, 3, 4])
def test_sb_states_and_multiplicity(n):
    rep = allowed(parse_litmus(generate_sb(n)), SIMP, CheckConfig(workers=1))
    assert rep.states == 2**n - 1
    assert rep.query_witnessed is False and not rep.undefined
    # each outcome has exactly one consistent rf/mo pair
    assert set(rep.outcomes.values()) == {1}


def test_workers_give_identical_reports():
    p = load_litmus("mixed_orders.litmus")
    one = allowed(p, PARTIAL, CheckConfig(workers=1))
    two = allowed(p, PARTIAL, CheckConfig(workers=2))
    assert summary(one) == summary(two)
    assert list(one.outcomes) == list(two.outcomes)
    assert one.candidates == two.candidates


def test_workers_from_environment(monkeypatch):
    from litmus_axiom.checker import default_workers

    monkeypatch.setenv("LITMUS_AXIOM_WORKERS", "3")
    assert default_workers() == 3
    monkeypatch.delenv("LITMUS_AXIOM_WORKERS")
    assert default_workers() == 1


def test_fast_mode_stops_on_fault():
    p = parse_litmus("test R c11\nint d;\n{ *d = 1; } || { r = *d; }\n")
    full = allowed(p, SIMP, CheckConfig(workers=1))
    fast = allowed(p, SIMP, CheckConfig(workers=1, fast=True))
    assert full.undefined and fast.undefined and full.ub_axioms == ("Dr",)
    assert fast.candidates < full.candidates


def test_timeout():
    with pytest.raises(CheckTimeout):
        allowed(parse_litmus(generate_sb(5)), ORIG, CheckConfig(workers=1, no_prune=True, timeout=0.2, candidate_cap=None))


def test_candidate_cap():
    with pytest.raises(ResourceError):
        allowed(parse_litmus(generate_sb(4)), ORIG, CheckConfig(workers=1, no_prune=True, candidate_cap=1000))


def test_check_execution_agrees_with_stream():
    p = load_litmus("mixed_orders.litmus")
    x = enumerate_basic(p).executions[7]
    for w in enumerate_witnesses(x, PARTIAL):
        v = check_execution(x, w, PARTIAL)
        assert v == check_execution(x, w, PARTIAL)
    bad = Witness(Relation.empty(x.n), Relation.empty(x.n))
    with pytest.raises(ExecutionError):
        check_execution(x, bad, PARTIAL)
    assert check_execution(x, bad, PARTIAL, require_wf=False) == eval_model(PARTIAL, x, bad)


def test_query_aliases():
    p = parse_litmus(c11("{ r = load(x); } || { r = load(y); }\nexists (0:r == 0 /\\ T1:r == 0)"))
    assert allowed(p, SIMP, CheckConfig(workers=1)).query_witnessed
