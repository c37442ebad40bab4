"""Command-line driver: ``run``, ``bench``, ``oracle`` and ``gen-sb``."""

from __future__ import annotations

import argparse
import csv
import io
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from .catdsl import ModelError
from .checker import DEFAULT_CANDIDATE_CAP, CheckConfig, CheckReport, CheckTimeout, allowed, default_workers
from .events import ExecutionError
from .frontend import DEFAULT_BASIC_CAP, DEFAULT_UNROLL, LitmusError, ResourceError, parse_litmus
from .models import BUILTIN, resolve
from .oracle import CHECKS, run_oracle

EXIT_DEFINED, EXIT_ERROR, EXIT_UNDEFINED = 0, 1, 2
BENCH_TIMEOUT = 300.0
BENCH_COLUMNS = ("model", "N", "mean_seconds", "states", "timed_out")


def generate_sb(n: int) -> str:
    """Store buffering over ``n`` threads; thread i stores x_{i mod n + 1}, loads x_i."""
    if not 2 <= n <= 10:
        raise ValueError("SB size must be between 2 and 10")
    lines = [f"test SB{n} c11"]
    lines += [f"atomic int x{i};" for i in range(1, n + 1)]
    lines.append("\n|| ".join(f"{{ store(x{i % n + 1}, 1); r{i} = load(x{i}); }}" for i in range(1, n + 1)))
    lines.append("exists (" + " /\\ ".join(f"r{i} == 0" for i in range(1, n + 1)) + ")")
    return "\n".join(lines) + "\n"


def format_text(rep: CheckReport) -> str:
    lines = [
        f"Test {rep.test} model={rep.model}",
        f"Undefined: {'yes' if rep.undefined else 'no'}",
        f"States {rep.states}",
        *rep.outcome_lines(),
    ]
    if rep.query_witnessed is not None:
        lines.append(f"Query: {'witnessed' if rep.query_witnessed else 'not-witnessed'}")
    if rep.truncated:
        lines.append("Truncated: yes")
    return "\n".join(lines) + "\n"


def format_csv(rep: CheckReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("test", "model", "undefined", "outcome", "count"))
    for o, count in rep.outcomes.items():
        w.writerow((rep.test, rep.model, int(rep.undefined), o.text(), count))
    return buf.getvalue()


# ---------------------------------------------------------------- bench


@dataclass(frozen=True)
class BenchRow:
    model: str
    N: int
    mean_seconds: float
    states: Optional[int]
    timed_out: bool


def bench(
    models: Sequence[str],
    ns: Sequence[int],
    repeats: int = 1,
    timeout: float = BENCH_TIMEOUT,
    no_prune: bool = False,
    workers: Optional[int] = None,
) -> list[BenchRow]:
    """Time each model on SB(N); once a model times out, larger N are not run."""
    rows = []
    for name in models:
        m = resolve(name)
        gave_up = False
        for n in ns:
            if gave_up:
                rows.append(BenchRow(name, n, timeout, None, True))
                continue
            p = parse_litmus(generate_sb(n))
            times, states = [], None
            for _ in range(repeats):
                cfg = CheckConfig(no_prune=no_prune, timeout=timeout, candidate_cap=None, workers=workers)
                t0 = time.perf_counter()
                try:
                    rep = allowed(p, m, cfg)
                except CheckTimeout:
                    gave_up = True
                    break
                times.append(time.perf_counter() - t0)
                states = rep.states
            if gave_up:
                rows.append(BenchRow(name, n, timeout, None, True))
            else:
                rows.append(BenchRow(name, n, sum(times) / len(times), states, False))
    return rows


def bench_csv(rows: Sequence[BenchRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(BENCH_COLUMNS)
    for r in rows:
        w.writerow((r.model, r.N, f"{r.mean_seconds:.6f}", "" if r.states is None else r.states, int(r.timed_out)))
    return buf.getvalue()


def _parse_range(text: str) -> list[int]:
    out: list[int] = []
    for part in text.split(","):
        if "-" in part:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return out


# ---------------------------------------------------------------- argparse


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="litmus-axiom", description="Axiomatic memory-model simulator for litmus tests.")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="check a litmus test against a model")
    run.add_argument("litmus", help="litmus file")
    sel = run.add_mutually_exclusive_group(required=True)
    sel.add_argument("--model", choices=BUILTIN, help="builtin model")
    sel.add_argument("--cat", metavar="PATH", help="model file")
    run.add_argument("--unroll", type=int, default=DEFAULT_UNROLL)
    run.add_argument("--cap", type=int, default=DEFAULT_BASIC_CAP, help="basic-execution cap")
    run.add_argument("--candidate-cap", type=int, default=DEFAULT_CANDIDATE_CAP)
    run.add_argument("--workers", type=int, default=None)
    run.add_argument("--timeout", type=float, default=None)
    run.add_argument("--new-incl", action="store_true", help="one-sided scope inclusion")
    run.add_argument("--fast", action="store_true", help="stop at the first faulty candidate")
    run.add_argument("--no-prune", action="store_true", help="enumerate every total order")
    run.add_argument("--allow-wi", action="store_true", help="accept work-item scope")
    run.add_argument("--format", choices=("text", "csv"), default="text")

    b = sub.add_parser("bench", help="time models on SB(N)")
    b.add_argument("--models", default="c11_orig,c11_simp")
    b.add_argument("--n", default="2-6", help="sizes, e.g. 2-6 or 2,4")
    b.add_argument("--repeats", type=int, default=1)
    b.add_argument("--timeout", type=float, default=BENCH_TIMEOUT)
    b.add_argument("--no-prune", action="store_true")
    b.add_argument("--workers", type=int, default=None)
    b.add_argument("--out", help="write CSV here instead of stdout")

    o = sub.add_parser("oracle", help="random checks of the SC-order equivalences")
    o.add_argument("--seeds", type=int, default=1000)
    o.add_argument("--max-events", type=int, default=6)
    o.add_argument("--max-sc", type=int, default=5)
    o.add_argument("--start", type=int, default=0)
    o.add_argument("--workers", type=int, default=None)

    g = sub.add_parser("gen-sb", help="print the N-thread store-buffering test")
    g.add_argument("n", type=int)
    return ap


def _cmd_run(a) -> int:
    text = Path(a.litmus).read_text(encoding="utf-8")
    p = parse_litmus(text, allow_wi=a.allow_wi)
    m = resolve(a.model or a.cat, a.new_incl)
    cfg = CheckConfig(
        unroll=a.unroll,
        basic_cap=a.cap,
        candidate_cap=a.candidate_cap,
        workers=a.workers,
        fast=a.fast,
        no_prune=a.no_prune,
        timeout=a.timeout,
    )
    rep = allowed(p, m, cfg)
    sys.stdout.write(format_text(rep) if a.format == "text" else format_csv(rep))
    return EXIT_UNDEFINED if rep.undefined else EXIT_DEFINED


def _cmd_bench(a) -> int:
    rows = bench(a.models.split(","), _parse_range(a.n), a.repeats, a.timeout, a.no_prune, a.workers)
    out = bench_csv(rows)
    if a.out:
        Path(a.out).write_text(out, encoding="utf-8")
    else:
        sys.stdout.write(out)
    return 0


def _cmd_oracle(a) -> int:
    workers = a.workers if a.workers is not None else default_workers()
    rep = run_oracle(a.seeds, a.max_events, a.max_sc, a.start, workers)
    rate = rep.instances / rep.seconds if rep.seconds else float("inf")
    print(f"instances {rep.instances}")
    for c in CHECKS:
        seeds = rep.failing_seeds[c][:10]
        print(f"{c} violations {rep.violations[c]}" + (f" seeds {seeds}" if seeds else ""))
    print(f"violations {rep.total_violations}")
    print(f"throughput {rate:.1f} instances/s")
    return 0 if rep.total_violations == 0 else 1


def main(argv: Optional[Sequence[str]] = None) -> int:
    a = _build_parser().parse_args(argv)
    try:
        if a.command == "run":
            return _cmd_run(a)
        if a.command == "bench":
            return _cmd_bench(a)
        if a.command == "oracle":
            return _cmd_oracle(a)
        sys.stdout.write(generate_sb(a.n))
        return 0
    except (LitmusError, ModelError, ExecutionError, ResourceError, CheckTimeout, OSError, ValueError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
