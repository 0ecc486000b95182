"""Command-line front end.

Subcommands: ``analyze`` (verdict + expected dimension), ``coeffs``
(equation coefficients by either route), ``transform`` (model rewrites),
``sweep-trees`` (exhaustive tree validation) and ``selftest`` (randomized
cross-checks of every symbolic identity).

Exit codes: 0 success, 1 usage error, 2 invalid or out-of-scope model,
3 internal error or failed self-check.  With the same seed and inputs the
JSON output is byte-identical between runs.
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys

from . import families
from .determinant import IdentityCheckError, IoEquation, check_minor_identities, io_equation
from .forests import forest_sums_by_size, lhs_coefficients, \
    nonconstant_counts, rhs_coefficients
from .graphs import flip_into_leak, strip_outgoing
from .identify import (
    DEFAULT_SEED,
    DEFAULT_TRIALS,
    NoInputError,
    NotStronglyConnectedError,
    coefficient_map,
    decide_identifiability,
    expected_dimension,
    generic_rank,
    verdict_to_dict,
)
from .model import Model, ModelValidationError, distance, load_model, model_to_dict
from .poly import Poly
from .transforms import ALL_KINDS, RankRelationError, Transform, apply_transform, \
    verify_rank_relation, KIND_ADD_LEAF_MOVE_IN, KIND_ADD_LEAF_MOVE_OUT

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INVALID_MODEL = 2
EXIT_INTERNAL = 3

_SWEEP_HARD_CAP = 6


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _emit(obj, as_json: bool, text_lines):
    if as_json:
        print(json.dumps(obj, sort_keys=True, indent=2))
    else:
        for line in text_lines:
            print(line)


# ---------------------------------------------------------------------
# coeffs


def _deriv_name(base: str, k: int) -> str:
    if k == 0:
        return base
    if k <= 3:
        return base + "'" * k
    return f"{base}^({k})"


def render_equation(eq: IoEquation, n_compartments: int) -> str:
    """The equation in readable form.

    The printed right-hand coefficients are the net ones: the detached
    sign times the raw minor determinant, i.e. exactly the stored
    nonnegative polynomials.
    """
    y = "y" if n_compartments == 1 else f"y{eq.out}"
    n = eq.n
    lhs = []
    for k in range(n, -1, -1):
        c = eq.lhs[k]
        if not c:
            continue
        name = _deriv_name(y, k)
        if c == Poly.one():
            lhs.append(name)
        else:
            lhs.append(f"({c.text()})*{name}")
    rhs = []
    for j in sorted(eq.rhs):
        sign, ds = eq.rhs[j]
        u = "u" if n_compartments == 1 else f"u{j}"
        for k in range(n - 1, -1, -1):
            d = ds[k]
            if not d:
                continue
            name = _deriv_name(u, k)
            if d == Poly.one():
                rhs.append(name)
            else:
                rhs.append(f"({d.text()})*{name}")
    return " + ".join(lhs) + " = " + (" + ".join(rhs) if rhs else "0")


def _forest_io_equation(m: Model, out: int) -> IoEquation:
    cs = lhs_coefficients(m)
    lhs = tuple(cs) + (Poly.one(),)
    rhs = {}
    for j in sorted(m.inputs):
        sign, ds = rhs_coefficients(m, out, j)
        rhs[j] = (sign, tuple(ds))
    return IoEquation(out, lhs, rhs)


def _equations_match(a: IoEquation, b: IoEquation) -> bool:
    return (a.out == b.out and a.lhs == b.lhs
            and sorted(a.rhs) == sorted(b.rhs)
            and all(a.rhs[j] == b.rhs[j] for j in a.rhs))


def cmd_coeffs(args) -> int:
    m = load_model(args.model)
    if not m.inputs:
        print("error: model has no inputs", file=sys.stderr)
        return EXIT_INVALID_MODEL
    outputs = []
    lines = [f"model: {m.n} compartments, {m.param_count()} parameters"]
    for out in sorted(m.outputs):
        if args.method == "det":
            eq = io_equation(m, out)
        elif args.method == "forest":
            eq = _forest_io_equation(m, out)
        else:
            eq = _forest_io_equation(m, out)
            det_eq = io_equation(m, out)
            if not _equations_match(eq, det_eq):
                print("internal error: forest and determinant coefficients "
                      f"disagree for output {out}", file=sys.stderr)
                return EXIT_INTERNAL
        lines.append(f"output {out}")
        lines.append(f"  {render_equation(eq, m.n)}")
        for k in range(eq.n, -1, -1):
            lines.append(f"  c{k} = {eq.lhs[k].text()}")
        entry = {"output": out,
                 "equation": render_equation(eq, m.n),
                 "lhs": [c.text() for c in eq.lhs],
                 "inputs": []}
        for j in sorted(eq.rhs):
            sign, ds = eq.rhs[j]
            lines.append(f"  input {j}: sign {'+1' if sign > 0 else '-1'}")
            for k in range(eq.n - 1, -1, -1):
                lines.append(f"  d{k} = {ds[k].text()}")
            entry["inputs"].append({"input": j, "sign": sign,
                                    "d": [d.text() for d in ds]})
        outputs.append(entry)
    _emit({"method": args.method, "compartments": m.n,
           "params": m.param_count(), "outputs": outputs},
          args.json, lines)
    return EXIT_OK


# ---------------------------------------------------------------------
# analyze


def cmd_analyze(args) -> int:
    m = load_model(args.model)
    verdict = decide_identifiability(m, trials=args.trials, seed=args.seed,
                                     force_rank=args.force_rank)
    report = verdict_to_dict(verdict, m)
    if m.inputs:
        dim = expected_dimension(m, trials=args.trials, seed=args.seed)
        report["expected_dimension"] = {
            "image_dim": dim.image_dim,
            "expected": dim.expected,
            "has_expected_dimension": dim.has_expected_dimension,
        }
    else:
        report["expected_dimension"] = None
    lines = [
        f"verdict: {report['verdict']}",
        f"method: {report['method']}",
        f"params: {report['params']}  coeffs: {report['coeffs']}",
    ]
    if verdict.rank_report is not None:
        lines.append(f"rank: {verdict.rank_report.rank} "
                     f"(over {len(verdict.rank_report.trials)} trial(s))")
    if verdict.criteria:
        lines.append(f"criteria: {json.dumps(verdict.criteria, sort_keys=True)}")
    if report["expected_dimension"] is not None:
        d = report["expected_dimension"]
        lines.append(f"image dimension: {d['image_dim']} of expected "
                     f"{d['expected']} -> "
                     f"{'expected dimension' if d['has_expected_dimension'] else 'dimension deficient'}")
    _emit(report, args.json, lines)
    return EXIT_OK


# ---------------------------------------------------------------------
# transform


def cmd_transform(args) -> int:
    m = load_model(args.model)
    at = args.at
    if at is None and args.op in (KIND_ADD_LEAF_MOVE_IN, KIND_ADD_LEAF_MOVE_OUT) \
            and len(m.inputs) == 1 and m.inputs == m.outputs:
        (at,) = m.inputs
    if at is None:
        print("error: --at is required for this operation", file=sys.stderr)
        return EXIT_USAGE
    result = apply_transform(m, Transform(args.op, at))
    obj = {
        "model": model_to_dict(result.model),
        "guarantee": result.guarantee,
        "theorem": result.theorem,
        "details": result.details,
    }
    lines = [
        json.dumps(model_to_dict(result.model), separators=(", ", ": ")),
        f"guarantee: {result.guarantee or 'none'}",
        f"theorem: {result.theorem}",
    ]
    _emit(obj, args.json, lines)
    return EXIT_OK


# ---------------------------------------------------------------------
# sweep-trees


def _leak_sets(n: int, max_size: int):
    for size in range(min(max_size, n) + 1):
        yield from itertools.combinations(range(1, n + 1), size)


def run_tree_sweep(max_n: int, trials: int, seed: int) -> dict:
    """Exhaustive tree comparison: Jacobian rank versus the tree theorem.

    Iterates every labeled tree on up to max_n vertices, every input and
    output placement and every leak set of size at most 2, and compares
    the rank verdict against the tree classifier (identifiable iff
    distance <= 1 and leaks <= 1).  Returns a summary dict with any
    disagreements (expected none).
    """
    from .identify import IDENTIFIABLE, classify_tree

    per_n = {}
    disagreements = []
    total = identifiable = 0
    for n in range(1, max_n + 1):
        count = 0
        for und in families.labeled_trees(n):
            for inp in range(1, n + 1):
                for out in range(1, n + 1):
                    for leaks in _leak_sets(n, 2):
                        m = families.bidirectional_tree_model(
                            n, und, [inp], [out], leaks)
                        cm = coefficient_map(m)
                        rank = generic_rank(cm, trials=trials, seed=seed).rank
                        by_rank = rank == cm.p
                        by_tree = classify_tree(m).status == IDENTIFIABLE
                        if by_rank != by_tree:
                            disagreements.append({
                                "n": n, "edges": sorted(und), "in": inp,
                                "out": out, "leak": sorted(leaks),
                                "rank": rank, "params": cm.p,
                            })
                        count += 1
                        total += 1
                        identifiable += by_rank
        per_n[str(n)] = count
    return {"max_n": max_n, "trials": trials, "seed": seed, "models": total,
            "identifiable": identifiable,
            "unidentifiable": total - identifiable,
            "per_n": per_n, "disagreements": disagreements}


def cmd_sweep_trees(args) -> int:
    if args.max_n > _SWEEP_HARD_CAP:
        print(f"error: --max-n larger than {_SWEEP_HARD_CAP} is not supported",
              file=sys.stderr)
        return EXIT_USAGE
    summary = run_tree_sweep(args.max_n, args.trials, args.seed)
    lines = [f"trees swept up to n={summary['max_n']}: "
             f"{summary['models']} models "
             f"({summary['identifiable']} identifiable, "
             f"{summary['unidentifiable']} unidentifiable)"]
    for n, cnt in sorted(summary["per_n"].items()):
        lines.append(f"  n={n}: {cnt} models")
    lines.append(f"disagreements: {len(summary['disagreements'])}")
    for d in summary["disagreements"]:
        lines.append(f"  {json.dumps(d, sort_keys=True)}")
    _emit(summary, args.json, lines)
    return EXIT_OK if not summary["disagreements"] else EXIT_INTERNAL


# ---------------------------------------------------------------------
# selftest


_FIXTURE_EXPECTATIONS = {
    "k3_leak": "unidentifiable",
    "four_edge_sc": "unidentifiable",
    "cycle3_out3": "identifiable",
    "cycle3_two_leaks": "identifiable",
    "chorded_cycle3": "identifiable",
    "chorded_cycle3_leaf": "identifiable",
    "chorded_cycle3_leaf_out4": "identifiable",
    "cat3_leak1": "identifiable",
    "cat4_in4_leak1": "identifiable",
    "cat2_in1_out2": "identifiable",
}

_SELFTEST_RANDOM_MODELS = 20
_SELFTEST_RELATION_MODELS = 6


def _check_io_equivalence(m: Model, failures: list):
    for out in sorted(m.outputs):
        forest_eq = _forest_io_equation(m, out)
        det_eq = io_equation(m, out)
        if not _equations_match(forest_eq, det_eq):
            failures.append(f"io mismatch: {model_to_dict(m)} output {out}")


def _check_counts(m: Model, failures: list):
    lhs_n, rhs_n = nonconstant_counts(m)
    cs = lhs_coefficients(m)
    (out,) = m.outputs
    (inp,) = m.inputs
    _sign, ds = rhs_coefficients(m, out, inp)
    got_lhs = sum(not c.is_constant() for c in cs)
    got_rhs = sum(not d.is_constant() for d in ds)
    if (got_lhs, got_rhs) != (lhs_n, rhs_n):
        failures.append(f"count mismatch: {model_to_dict(m)}: "
                        f"({got_lhs},{got_rhs}) != ({lhs_n},{rhs_n})")
    if not m.leaks and cs[0]:
        failures.append(f"c0 nonzero for leakless model {model_to_dict(m)}")
    if inp == out and ds[m.n - 1] != Poly.one():
        failures.append(f"d_(n-1) != 1 with input = output {model_to_dict(m)}")
    if inp != out:
        length = int(distance(m, inp, out))
        if any(ds[m.n - k] for k in range(1, length + 1)):
            failures.append(f"leading d's nonzero {model_to_dict(m)}")


def _check_flip_equality(m: Model, failures: list):
    for i in m.compartments():
        direct = forest_sums_by_size(strip_outgoing(m, i), pair=(i, i))
        flipped = forest_sums_by_size(flip_into_leak(m, i))
        if direct[:len(flipped)] != flipped:
            failures.append(f"flip sums differ at {i}: {model_to_dict(m)}")


def run_selftest(seed: int, trials: int) -> dict:
    """Randomized cross-checks of the package's symbolic identities."""
    import random

    failures: list[str] = []
    fixtures = {}
    ref = families.reference_models()
    for name in sorted(ref):
        m = ref[name]
        verdict = decide_identifiability(m, trials=trials, seed=seed)
        rank_verdict = decide_identifiability(m, trials=trials, seed=seed,
                                              force_rank=True)
        fixtures[name] = {
            "verdict": verdict.status,
            "method": verdict.method,
            "rank": rank_verdict.rank_report.rank,
        }
        if verdict.status != _FIXTURE_EXPECTATIONS[name]:
            failures.append(f"fixture {name}: verdict {verdict.status}")
        if rank_verdict.status != _FIXTURE_EXPECTATIONS[name]:
            failures.append(f"fixture {name}: rank verdict {rank_verdict.status}")
        _check_io_equivalence(m, failures)

    rng = random.Random(seed)
    for _ in range(_SELFTEST_RANDOM_MODELS):
        n = rng.randrange(2, 6)
        m = families.random_strongly_connected_model(rng, n)
        _check_io_equivalence(m, failures)
        _check_counts(m, failures)
        _check_flip_equality(m, failures)

    relation_checks = 0
    for _ in range(_SELFTEST_RELATION_MODELS):
        n = rng.randrange(2, 5)
        m = families.random_strongly_connected_model(rng, n, leak_prob=0.0,
                                                     same_io=True)
        try:
            check_minor_identities(m)
            kind = KIND_ADD_LEAF_MOVE_OUT if rng.random() < 0.5 \
                else KIND_ADD_LEAF_MOVE_IN
            (at,) = m.inputs
            verify_rank_relation(m, Transform(kind, at), trials=trials,
                                 seed=seed)
            relation_checks += 1
        except (IdentityCheckError, RankRelationError) as exc:
            failures.append(f"identity failure: {exc} on {model_to_dict(m)}")

    return {
        "seed": seed,
        "trials": trials,
        "fixtures": fixtures,
        "random_models": _SELFTEST_RANDOM_MODELS,
        "relation_models": relation_checks,
        "failures": failures,
        "ok": not failures,
    }


def cmd_selftest(args) -> int:
    summary = run_selftest(args.seed, args.trials)
    lines = [f"fixtures: {len(summary['fixtures'])} checked"]
    for name, info in sorted(summary["fixtures"].items()):
        lines.append(f"  {name}: {info['verdict']} ({info['method']}, "
                     f"rank {info['rank']})")
    lines.append(f"random models: {summary['random_models']}")
    lines.append(f"leaf/rank relation models: {summary['relation_models']}")
    for f in summary["failures"]:
        lines.append(f"FAIL {f}")
    lines.append("selftest " + ("PASS" if summary["ok"] else "FAIL"))
    _emit(summary, args.json, lines)
    return EXIT_OK if summary["ok"] else EXIT_INTERNAL


# ---------------------------------------------------------------------
# argument plumbing


def build_parser() -> _Parser:
    parser = _Parser(prog="compident",
                     description="identifiability of linear compartmental "
                                 "models from graph structure")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_model=True):
        if with_model:
            p.add_argument("model", help="path to a model JSON file")
        p.add_argument("--json", action="store_true", help="JSON output")
        p.add_argument("--seed", type=int, default=DEFAULT_SEED)
        p.add_argument("--trials", type=int, default=DEFAULT_TRIALS,
                       help="random evaluation trials for rank computations")

    p = sub.add_parser("analyze", help="identifiability and expected dimension")
    common(p)
    p.add_argument("--force-rank", action="store_true",
                   help="skip structural shortcuts, use Jacobian rank only")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("coeffs", help="input-output equation coefficients")
    common(p)
    p.add_argument("--method", choices=("forest", "det", "both"),
                   default="both",
                   help="coefficient route; 'both' cross-checks them")
    p.set_defaults(func=cmd_coeffs)

    p = sub.add_parser("transform", help="rewrite a model, report guarantees")
    common(p)
    p.add_argument("--op", choices=ALL_KINDS, required=True)
    p.add_argument("--at", type=int, default=None,
                   help="compartment the operation applies to")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("sweep-trees",
                       help="exhaustively validate the tree classification")
    common(p, with_model=False)
    p.add_argument("--max-n", type=int, default=5, dest="max_n")
    p.set_defaults(func=cmd_sweep_trees)

    p = sub.add_parser("selftest", help="randomized identity cross-checks")
    common(p, with_model=False)
    p.set_defaults(func=cmd_selftest)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        return code if isinstance(code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except ModelValidationError as exc:
        print(f"invalid model: {exc}", file=sys.stderr)
        return EXIT_INVALID_MODEL
    except (NotStronglyConnectedError, NoInputError) as exc:
        print(f"model out of scope: {exc}", file=sys.stderr)
        return EXIT_INVALID_MODEL
    except FileNotFoundError as exc:
        print(f"cannot read model: {exc}", file=sys.stderr)
        return EXIT_INVALID_MODEL
    except (IdentityCheckError, RankRelationError) as exc:
        print(f"internal identity failure: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID_MODEL
    except Exception as exc:  # pragma: no cover - catch-all for exit contract
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
