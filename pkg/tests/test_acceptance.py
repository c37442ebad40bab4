"""Acceptance criteria 1-7, each at its stated tolerance.

Every criterion prints one ``CRITERION n: PASS|FAIL`` line, both when the
test runs and again in the pytest terminal summary.  Run standalone with
``python tests/test_acceptance.py``.
"""

import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from litmus_axiom.catdsl import Evaluator  # noqa: E402
from litmus_axiom.checker import CheckConfig, allowed, enumerate_witnesses  # noqa: E402
from litmus_axiom.cli import bench, generate_sb  # noqa: E402
from litmus_axiom.corpus import corpus, load_litmus, run_case  # noqa: E402
from litmus_axiom.events import wf_candidate  # noqa: E402
from litmus_axiom.frontend import enumerate_basic, parse_litmus  # noqa: E402
from litmus_axiom.models import get_model  # noqa: E402
from litmus_axiom.oracle import RandomCandidateSpec, gen_candidate, run_oracle  # noqa: E402

SEEDS = 10_000


def record(n: int, ok: bool, detail: str) -> None:
    line = f"CRITERION {n}: {'PASS' if ok else 'FAIL'} {detail}"
    print(line, flush=True)
    try:
        from conftest import ACCEPTANCE
    except ImportError:  # standalone run
        return
    ACCEPTANCE[n] = line


# ---------------------------------------------------------------- criteria


def criterion_1():
    m = get_model("c11_simp")
    t0 = time.perf_counter()
    parts, ok = [], True
    for n in range(2, 6):
        rep = allowed(parse_litmus(generate_sb(n)), m, CheckConfig(workers=1))
        zero = any(all(v == 0 for k, v in o.registers) for o in rep.outcomes)
        good = rep.states == 2**n - 1 and not zero and rep.query_witnessed is False
        ok &= good
        parts.append(f"N={n}:{rep.states}")
    secs = time.perf_counter() - t0
    ok &= secs < 60
    return ok, f"SB states {' '.join(parts)}, all-zero absent, {secs:.1f}s (<60s)"


def criterion_2():
    (simp,) = bench(["c11_simp"], [4], repeats=3)
    budget = min(300.0, max(100 * simp.mean_seconds, 1.0))
    (orig,) = bench(["c11_orig"], [4], timeout=budget, no_prune=True)
    (pruned,) = bench(["c11_orig"], [4], timeout=300.0)
    simp_ok = not simp.timed_out and simp.mean_seconds < 10 and simp.states == 15
    blowup = orig.timed_out or orig.mean_seconds >= 100 * simp.mean_seconds
    orig_txt = f"timed out at {budget:.1f}s" if orig.timed_out else f"{orig.mean_seconds:.2f}s"
    pruned_txt = "timed out" if pruned.timed_out else f"{pruned.mean_seconds:.2f}s"
    return simp_ok and blowup, (
        f"N=4 c11_simp {simp.mean_seconds:.3f}s; c11_orig full S enumeration {orig_txt} "
        f"(>=100x needed); c11_orig with prefix pruning {pruned_txt}"
    )


def criterion_3():
    t0 = time.perf_counter()
    bad = [c.id for c in corpus() if not run_case(c, CheckConfig(workers=1))[0]]
    secs = time.perf_counter() - t0
    n = len(corpus())
    return not bad and secs < 30, f"{n - len(bad)}/{n} golden cases match, {secs:.1f}s (<30s)" + (
        f"; mismatches {bad}" if bad else ""
    )


def criterion_4():
    want = {"sb_fgb_scoped", "twisted_sb_scoped"}
    cases = [c for c in corpus() if c.id in want]
    results = {c.id: run_case(c, CheckConfig(workers=1)) for c in cases}
    ok = len(cases) == 2 and all(r[0] for r in results.values())
    return ok, "; ".join(f"{k} {v[1]}" for k, v in sorted(results.items()))


def criterion_5():
    rep = run_oracle(SEEDS, max_events=6, max_sc=5, checks=("order", "partial", "simp"))
    v = rep.violations
    ok = rep.instances == SEEDS and v["order"] == v["partial"] == v["simp"] == 0
    return ok, (
        f"{rep.instances} candidates: order {v['order']}, partial {v['partial']}, simp {v['simp']} violations, "
        f"{rep.seconds:.1f}s"
    )


def criterion_6():
    rep = run_oracle(SEEDS, max_events=6, max_sc=5, checks=("transcription",))
    d = rep.violations["transcription"]
    return rep.instances == SEEDS and d == 0, f"{rep.instances} candidates, {d} discrepancies, {rep.seconds:.1f}s"


def criterion_7():
    from test_checker import EXHAUSTIVE_PROGRAMS, naive_witnesses, witness_key
    from test_models import rs_oracle

    failures = []
    # well-formedness closure: generator output and every enumerated witness
    for mode in ("c11", "opencl"):
        for seed in range(SEEDS):
            x, w = gen_candidate(RandomCandidateSpec(seed, max_events=6, scope_mode=mode))
            if not wf_candidate(x, w, False):
                failures.append(f"wf:{mode}:{seed}")
    for fname in ("sb2.litmus", "mixed_orders.litmus"):
        m = get_model("c11_orig")
        for x in enumerate_basic(load_litmus(fname)).executions[:6]:
            failures += [f"wf:{fname}" for w in enumerate_witnesses(x, m) if not wf_candidate(x, w, True)][:1]
    # release sequences
    simp = get_model("c11_simp")
    rs_checked = 0
    for seed in range(3000):
        x, w = gen_candidate(RandomCandidateSpec(seed, max_events=8, max_locations=1))
        if sum(l.is_write for l in x.labels) > 6:
            continue
        env = Evaluator(simp, x).stage(w.rf, w.mo)
        if set(env["rs"].pairs()) != rs_oracle(x, set(w.mo.pairs())):
            failures.append(f"rs:{seed}")
        rs_checked += 1
    # exhaustiveness
    execs = 0
    for src in EXHAUSTIVE_PROGRAMS:
        for x in enumerate_basic(parse_litmus(src)):
            got = [witness_key(w) for w in enumerate_witnesses(x, simp)]
            if len(got) != len(set(got)) or set(got) != naive_witnesses(x, False):
                failures.append(f"enum:{src!r}")
            execs += 1
    return not failures, (
        f"wf closure {2 * SEEDS} candidates, rs oracle {rs_checked} executions, "
        f"enumeration {execs} executions; {len(failures)} failures" + (f" {failures[:5]}" if failures else "")
    )


CRITERIA = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5, 6: criterion_6, 7: criterion_7}


@pytest.mark.slow
@pytest.mark.parametrize("n", sorted(CRITERIA))
def test_criterion(n):
    ok, detail = CRITERIA[n]()
    record(n, ok, detail)
    assert ok, detail


if __name__ == "__main__":
    results = []
    for n, fn in sorted(CRITERIA.items()):
        ok, detail = fn()
        record(n, ok, detail)
        results.append(ok)
    sys.exit(0 if all(results) else 1)
