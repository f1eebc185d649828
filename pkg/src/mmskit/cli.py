"""Command-line interface.

Subcommands:

  allocate       run the randomized allocation pipeline on an instance file
  mms            exact maximin share and witness partition per agent
  check-lp       encode the relaxation and verify feasibility exactly
  concentration  inequality checkers (proposition, talagrand, schechtman,
                 eh-bound, tightness, lower-bound, lemma, discussion)
  bench          corpus benchmark with CSV (and optional SVG) reports

Exit codes: 0 when every assertion holds, 1 when any checked inequality or
invariant fails, 2 on usage errors (bad flags, unreadable or invalid input).
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .allocation import AlgoParams, allocate_prepared, check_feasible, instance_from_json, prepare
from .concentration import (
    SampleSpec,
    TalagrandInput,
    check_concentration,
    check_expectation_bound,
    check_expectation_lower_bound,
    check_schechtman_tail,
    check_talagrand_corollary,
    exact_value_distribution,
    max_expected_distance,
    schechtman_bound,
    sparse_binomial_example,
    staircase_expectation,
)
from .harness import CorpusSpec, bench_corpus, random_valuation, render_report_csv
from .items import ItemSet
from .mms import exact_mms
from .rng import make_rng
from .valuations import Additive, NearTwo, Staircase


class UsageError(Exception):
    """Bad input from the user (exit code 2)."""


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, ItemSet):
        return x.members()
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(i) for i in x]
    if isinstance(x, (bool, int, str)) or x is None:
        return x
    if isinstance(x, float):
        return x
    return str(x)


def _print_json(obj) -> None:
    print(json.dumps(_jsonable(obj), indent=2))


def _write_outputs(args, verb: str, report: dict) -> None:
    payload = _jsonable(report)
    if getattr(args, "json_out", None):
        with open(args.json_out, "w") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
    if getattr(args, "out_dir", None):
        import os

        os.makedirs(args.out_dir, exist_ok=True)
        with open(os.path.join(args.out_dir, f"concentration-{verb}.json"), "w") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
        with open(os.path.join(args.out_dir, f"concentration-{verb}.csv"), "w") as fh:
            fh.write("key,value\n")
            for key, value in payload.items():
                cell = json.dumps(value) if isinstance(value, (dict, list)) else str(value)
                cell = cell.replace('"', "'")
                fh.write(f'{key},"{cell}"\n')


def _load_instance(path: str):
    try:
        if path == "-":
            data = json.load(sys.stdin)
        else:
            with open(path) as fh:
                data = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read instance file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"instance file is not valid JSON: {exc}") from exc
    try:
        return instance_from_json(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"invalid instance: {exc}") from exc


def _parse_log_base(text: str):
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError as exc:
        raise UsageError(f"invalid --log-base {text!r}") from exc


# -- allocate -------------------------------------------------------------------


def _cmd_allocate(args) -> int:
    inst = _load_instance(args.instance)
    try:
        params = AlgoParams.for_instance(
            inst.n,
            seed=args.seed,
            copies=args.t_override,
            log_base=_parse_log_base(args.log_base),
            rounding_strategy=args.strategy,
        )
        prep = prepare(inst, params)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    alloc = allocate_prepared(prep)
    diag = alloc.diagnostics

    taken = 0
    ok = True
    for bundle in alloc.bundles.values():
        if bundle.bits & taken:
            ok = False
        taken |= bundle.bits
    if taken & alloc.pool.bits or (taken | alloc.pool.bits) != inst.items.bits:
        ok = False

    report = {
        "t": params.copies,
        "threshold": str(params.threshold),
        "strategy": params.rounding_strategy,
        "seed": params.seed,
        "assignments": {a: b.members() for a, b in alloc.bundles.items()},
        "pool": alloc.pool.members(),
        "values": diag.values,
        "mms": diag.mms,
        "ratios": diag.ratios,
        "preassigned": [[a, e] for a, e in diag.assignments],
        "partition_valid": ok,
    }
    if args.output == "csv":
        lines = ["agent,items,value,mms,ratio"]
        for a in sorted(alloc.bundles):
            items = ";".join(str(e) for e in alloc.bundles[a].members())
            lines.append(
                f"{a},{items},{diag.values[a]},{diag.mms[a]},{diag.ratios[a]}"
            )
        pool_items = ";".join(str(e) for e in alloc.pool.members())
        lines.append(f"(pool),{pool_items},,,")
        print("\n".join(lines))
    else:
        _print_json(report)
    return 0 if ok else 1


# -- mms ------------------------------------------------------------------------


def _cmd_mms(args) -> int:
    inst = _load_instance(args.instance)
    out = {"m": inst.m, "n": inst.n, "agents": []}
    for agent in inst.agents:
        try:
            res = exact_mms(agent.valuation, inst.m, inst.n, items=inst.items)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        out["agents"].append(
            {
                "id": agent.id,
                "mms": str(res.value),
                "partition": [part.members() for part in res.partition],
            }
        )
    _print_json(out)
    return 0


# -- check-lp ---------------------------------------------------------------------


def _cmd_check_lp(args) -> int:
    inst = _load_instance(args.instance)
    try:
        params = AlgoParams.for_instance(
            inst.n, seed=args.seed, copies=args.t_override
        )
        prep = prepare(inst, params)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if prep.single_agent or prep.reduced is None or prep.reduced.n == 0:
        _print_json(
            {
                "feasible": True,
                "violations": [],
                "note": "no relaxation needed (no agents remain after preprocessing)"
                if not prep.single_agent
                else "single agent, no relaxation built",
            }
        )
        return 0
    sol = prep.solution
    violations = check_feasible(sol)
    item_sums_exact = all(
        sol.item_weight(e) == 1 for e in prep.reduced.items.members()
    )
    agent_sums_exact = all(
        sol.agent_weight(i) == 1 for i in range(prep.reduced.n)
    )
    report = {
        "feasible": not violations,
        "violations": violations,
        "entries": len(sol.entries),
        "agents": prep.reduced.n,
        "preassigned": [[a, e] for a, e in prep.assignments],
        "item_sums_exactly_one": item_sums_exact,
        "agent_sums_exactly_one": agent_sums_exact,
    }
    _print_json(report)
    return 0 if not violations and item_sums_exact else 1


# -- concentration verbs ----------------------------------------------------------


def _verb_proposition(args) -> dict:
    rng = make_rng(args.seed)
    m = args.m if args.m is not None else 8
    if not 1 <= m <= 10:
        raise UsageError("--m must be in 1..10 for the proposition verb")
    cases = args.trials
    worst_margin = None
    failures = 0
    for _ in range(cases):
        v = random_valuation(rng, "table", m)
        probs = [Fraction(int(rng.integers(0, 17)), 16) for _ in range(m)]
        rep = check_expectation_bound(v, SampleSpec(probs))
        margin = rep.bound - rep.expectation
        if worst_margin is None or margin < worst_margin:
            worst_margin = margin
        if not rep.holds:
            failures += 1
    return {
        "verb": "proposition",
        "cases": cases,
        "m": m,
        "failures": failures,
        "worst_margin": worst_margin,
        "holds": failures == 0,
    }


def _verb_talagrand(args) -> dict:
    rng = make_rng(args.seed)
    n = args.m if args.m is not None else 5
    if not 1 <= n <= 10:
        raise UsageError("--m must be in 1..10 for the talagrand verb")
    cases = args.trials
    failures = 0
    degenerate = 0
    for _ in range(cases):
        q = args.q if args.q is not None else int(rng.integers(1, 4))
        families = []
        for _ in range(q):
            size = int(rng.integers(1, 9))
            masks = sorted({int(rng.integers(0, 1 << n)) for _ in range(size)})
            families.append(tuple(ItemSet(b, n) for b in masks))
        probs = [Fraction(int(rng.integers(1, 16)), 16) for _ in range(n)]
        rep = check_talagrand_corollary(TalagrandInput(n, tuple(probs), tuple(families)))
        if rep.degenerate:
            degenerate += 1
        if not rep.holds:
            failures += 1
    return {
        "verb": "talagrand",
        "cases": cases,
        "n": n,
        "q": args.q,
        "failures": failures,
        "degenerate": degenerate,
        "holds": failures == 0,
    }


def _verb_schechtman(args) -> dict:
    m = 6
    v = Additive([Fraction(1)] * m)
    spec = SampleSpec([Fraction(1, 2)] * m)
    dist = exact_value_distribution(v, spec)
    median = dist.median
    tails = []
    all_hold = True
    for k in (0, 1, 2):
        rep = check_schechtman_tail(v, spec, c=[median, median], k=k, b=Fraction(1))
        tails.append({"k": k, "lhs": rep.lhs, "rhs": rep.rhs, "holds": rep.holds})
        all_hold = all_hold and rep.holds
    two_way = schechtman_bound(2, [Fraction(1, 2), Fraction(2, 3)], 1)
    three_way = schechtman_bound(3, [Fraction(1, 2)] * 3, 1)
    remark_ok = two_way == Fraction(3, 4) and three_way == Fraction(8, 9)
    return {
        "verb": "schechtman",
        "median": median,
        "tails": tails,
        "bound_q2": two_way,
        "bound_q3": three_way,
        "remark_values_ok": remark_ok,
        "holds": all_hold and remark_ok,
    }


def _verb_eh_bound(args) -> dict:
    value, witness = max_expected_distance(Fraction(1, 2), 4)
    expected = {2: Fraction(1, 8), 3: Fraction(3, 8)}
    pinned_ok = value == Fraction(11, 8) and witness == expected
    saturated, _ = max_expected_distance(1, 4)
    return {
        "verb": "eh-bound",
        "maximum": value,
        "witness": {str(k): v for k, v in sorted(witness.items())},
        "pinned_case_ok": pinned_ok,
        "all_mass_at_zero": saturated,
        "holds": pinned_ok and saturated == 0,
    }


def _verb_tightness(args) -> dict:
    e_large, median = staircase_expectation(3, 40000)
    in_window = 4.45 <= e_large <= 4.50
    gaps = []
    for s in (400, 1600, 6400):
        e_s, _ = staircase_expectation(3, s)
        gaps.append(float(Fraction(3, 2) * 3 - e_s))
    shrinking = gaps[0] > gaps[1] > gaps[2]
    return {
        "verb": "tightness",
        "expectation": float(e_large),
        "median": median,
        "window": [4.45, 4.50],
        "in_window": in_window,
        "gaps": gaps,
        "gaps_shrink": shrinking,
        "holds": in_window and median == 3 and shrinking,
    }


def _verb_lower_bound(args) -> dict:
    rng = make_rng(args.seed)
    m = args.m if args.m is not None else 8
    if not 1 <= m <= 10:
        raise UsageError("--m must be in 1..10 for the lower-bound verb")
    cases = args.trials
    failures = 0
    for _ in range(cases):
        v = random_valuation(rng, "table", m)
        t = int(rng.integers(1, 4))
        rep = check_expectation_lower_bound(v, t, rng=rng, partition_samples=20)
        if not (rep.holds and rep.partition_holds):
            failures += 1
    counter = NearTwo(20)
    dist = exact_value_distribution(counter, SampleSpec([Fraction(3, 4)] * 20))
    would_be = Fraction(3, 2)  # v(S)/t at the non-integer t = 4/3
    return {
        "verb": "lower-bound",
        "cases": cases,
        "m": m,
        "failures": failures,
        "counterexample_expectation": dist.expectation,
        "counterexample_bound": would_be,
        "counterexample_fails": dist.expectation < would_be,
        "holds": failures == 0 and dist.expectation < would_be,
    }


def _verb_lemma(args) -> dict:
    results = []
    v1 = Additive([Fraction(1)] * 4)
    rep1 = check_concentration(v1, 1, SampleSpec.uniform(Fraction(1), 4))
    results.append({"case": "t=1 keeps everything", "probability": rep1.probability,
                    "mode": rep1.mode, "holds": rep1.holds})
    v2 = Additive([Fraction(1)] * 46)
    rep2 = check_concentration(v2, 2, SampleSpec.uniform(Fraction(1, 2), 46))
    results.append({"case": "46 unit items, t=2", "probability": rep2.probability,
                    "mode": rep2.mode, "holds": rep2.holds})
    v3 = Staircase(9, 24)
    rep3 = check_concentration(
        v3,
        3,
        SampleSpec.uniform(Fraction(1, 3), 24),
        trials=max(args.trials, 1000),
        mode="monte-carlo",
        rng=make_rng(args.seed),
    )
    results.append({"case": "staircase small items, t=3", "probability": rep3.probability,
                    "mode": rep3.mode, "slack": rep3.slack, "holds": rep3.holds})
    return {
        "verb": "lemma",
        "cases": results,
        "holds": all(r["holds"] for r in results),
    }


def _verb_discussion(args) -> dict:
    expectation, median = sparse_binomial_example(10000)
    ratio = expectation / median
    small_e, small_median = sparse_binomial_example(2)
    return {
        "verb": "discussion",
        "expectation": expectation,
        "median": median,
        "ratio": ratio,
        "ratio_below_23_8": ratio < Fraction(23, 8),
        "size_two_median": small_median,
        "holds": expectation == Fraction(839, 500)
        and median == 1
        and ratio < Fraction(23, 8),
    }


_VERBS = {
    "proposition": _verb_proposition,
    "talagrand": _verb_talagrand,
    "schechtman": _verb_schechtman,
    "eh-bound": _verb_eh_bound,
    "tightness": _verb_tightness,
    "lower-bound": _verb_lower_bound,
    "lemma": _verb_lemma,
    "discussion": _verb_discussion,
}


def _cmd_concentration(args) -> int:
    report = _VERBS[args.verb](args)
    _print_json(report)
    _write_outputs(args, args.verb, report)
    return 0 if report["holds"] else 1


# -- bench ------------------------------------------------------------------------


def _cmd_bench(args) -> int:
    spec = CorpusSpec(seed=args.seed, count=args.count)
    stats, paths = bench_corpus(
        spec,
        trials=args.trials,
        out_dir=args.out_dir,
        svg=args.svg,
    )
    if args.out_dir:
        for path in paths:
            print(f"wrote {path}")
    else:
        sys.stdout.write(render_report_csv(stats))
    return 0


# -- parser -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                        help="master seed (default 0)")
    shared.add_argument("--trials", type=int, default=argparse.SUPPRESS,
                        help="trial or case count (default 500)")
    shared.add_argument("--out-dir", default=argparse.SUPPRESS,
                        help="directory for report files")

    parser = argparse.ArgumentParser(
        prog="mmskit",
        parents=[shared],
        description="Randomized maximin-share allocation and its inequality checks.",
    )
    parser.set_defaults(seed=0, trials=500, out_dir=None)
    sub = parser.add_subparsers(dest="command", required=True)

    p_alloc = sub.add_parser("allocate", parents=[shared],
                             help="run the allocation pipeline on an instance")
    p_alloc.add_argument("--instance", required=True,
                         help="instance JSON file ('-' for stdin)")
    p_alloc.add_argument("--t-override", type=int, default=None,
                         help="override the number of rounding copies")
    p_alloc.add_argument("--log-base", default="2",
                         help="logarithm base for the copy count (default 2)")
    p_alloc.add_argument("--strategy", default="uniform-requester",
                         help="rounding strategy name")
    p_alloc.add_argument("--output", choices=("json", "csv"), default="json")
    p_alloc.set_defaults(handler=_cmd_allocate)

    p_mms = sub.add_parser("mms", parents=[shared],
                           help="exact maximin share per agent")
    p_mms.add_argument("--instance", required=True)
    p_mms.set_defaults(handler=_cmd_mms)

    p_lp = sub.add_parser("check-lp", parents=[shared],
                          help="encode the relaxation and check feasibility")
    p_lp.add_argument("--instance", required=True)
    p_lp.add_argument("--t-override", type=int, default=None,
                      help="override the number of rounding copies")
    p_lp.set_defaults(handler=_cmd_check_lp)

    p_con = sub.add_parser("concentration", parents=[shared],
                           help="run one inequality checker")
    p_con.add_argument("verb", choices=sorted(_VERBS))
    p_con.add_argument("--m", type=int, default=None,
                       help="universe size for randomized verbs")
    p_con.add_argument("--q", type=int, default=None,
                       help="number of families (talagrand verb)")
    p_con.add_argument("--json-out", default=None,
                       help="also write the JSON report to this file")
    p_con.set_defaults(handler=_cmd_concentration)

    p_bench = sub.add_parser("bench", parents=[shared],
                             help="run the pinned corpus benchmark")
    p_bench.add_argument("--count", type=int, default=1,
                         help="instances per corpus cell (default 1)")
    p_bench.add_argument("--svg", action="store_true",
                         help="also emit the success-vs-t chart")
    p_bench.set_defaults(handler=_cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
