"""Identifiability verdicts: coefficient maps, generic rank, classifiers.

A model's coefficient map sends its parameter vector to the vector of all
non-constant input-output coefficients.  The model is generically locally
identifiable exactly when the Jacobian of that map has full column rank
at a generic parameter point, and it has expected dimension when the rank
reaches min(parameter count, coefficient count).

Rank at a generic point is computed by evaluating the Jacobian at random
points over large prime fields.  Rank at any concrete point is a lower
bound for the generic rank, so a full-rank observation is conclusive; a
rank drop at a random point requires the point to lie on the zero set of
every top-order minor, which by the Schwartz-Zippel bound happens with
probability at most (total minor degree)/prime per trial -- with 61-bit
primes and independent trials over distinct moduli, a spurious
"unidentifiable" answer is negligible.  Reported ranks are monotone in
the number of trials (the maximum over trials is returned).

The full verdict pipeline tries cheap structural certificates first: the
parameter-versus-coefficient counting bound, the bidirectional-tree
classification, and the inductively-strongly-connected sufficiency test;
the Jacobian rank is the fallback that always applies.  Every shortcut
can be bypassed (``force_rank``) to re-derive a verdict from rank alone.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional, Tuple

from .families import is_bidirectional_tree
from .forests import lhs_coefficients, rhs_coefficients
from .model import Model, distance, inductively_strong_order, is_strongly_connected, param_vector
from .poly import PRIMES, FieldPoint, Param, Poly

DEFAULT_SEED = 20240101
DEFAULT_TRIALS = 3

IDENTIFIABLE = "identifiable"
UNIDENTIFIABLE = "unidentifiable"
NO_PARAMETERS = "no_parameters"

METHOD_RANK = "jacobian_rank"
METHOD_COUNT = "count_criterion"
METHOD_TREE = "tree_theorem"
METHOD_ISC = "isc_theorem"
METHOD_CONVENTION = "convention"


class NotStronglyConnectedError(ValueError):
    """Verdicts are only defined for strongly connected models."""


class NoInputError(ValueError):
    """The coefficient map needs at least one input."""


@dataclass(frozen=True)
class CoefficientMap:
    """Ordered non-constant coefficients of all input-output equations.

    Order: outputs ascending; per output the left-side coefficients by
    descending derivative order, then per input (ascending) the
    right-side coefficients by descending order.  Constants (0 and 1) are
    excluded by a symbolic degree test, never by counting formulas.
    """

    entries: Tuple[Poly, ...]
    labels: Tuple[str, ...]
    params: Tuple[Param, ...]

    @property
    def m(self) -> int:
        return len(self.entries)

    @property
    def p(self) -> int:
        return len(self.params)


@dataclass(frozen=True)
class TrialResult:
    prime: int
    seed: int
    rank: int


@dataclass(frozen=True)
class RankReport:
    """Generic-rank evidence: the max observed rank and the trial log."""

    rank: int
    trials: Tuple[TrialResult, ...]
    p: int
    m: int


@dataclass(frozen=True)
class Verdict:
    status: str                      # identifiable | unidentifiable | no_parameters
    method: str
    rank_report: Optional[RankReport]
    criteria: dict


@dataclass(frozen=True)
class DimReport:
    image_dim: int
    expected: int
    has_expected_dimension: bool
    rank_report: RankReport


def coefficient_map(m: Model) -> CoefficientMap:
    """Build the coefficient map from the forest formulas."""
    if not m.inputs:
        raise NoInputError("model has no inputs")
    params = param_vector(m)
    cs = lhs_coefficients(m)
    entries: list[Poly] = []
    labels: list[str] = []
    for out in sorted(m.outputs):
        for k in range(m.n - 1, -1, -1):
            if not cs[k].is_constant():
                entries.append(cs[k])
                labels.append(f"y{out}.c{k}")
        for inp in sorted(m.inputs):
            _sign, ds = rhs_coefficients(m, out, inp)
            for k in range(m.n - 1, -1, -1):
                if not ds[k].is_constant():
                    entries.append(ds[k])
                    labels.append(f"y{out}.u{inp}.d{k}")
    return CoefficientMap(tuple(entries), tuple(labels), params)


def _jacobian_mod_point(cm: CoefficientMap, point: FieldPoint) -> list[list[int]]:
    """All partial derivatives of every entry, evaluated at the point.

    Uses the product-rule shortcut: for a term c*x^e*R the partial with
    respect to x is e/x times the term's value, and the point coordinates
    are nonzero mod the prime by construction.  Agrees exactly with
    evaluating the formal derivative polynomials (property-tested).
    """
    p = point.prime
    col = {par: k for k, par in enumerate(cm.params)}
    inv = {par: pow(v, p - 2, p) for par, v in point.values.items()}
    rows = []
    for f in cm.entries:
        row = [0] * len(cm.params)
        for mono, c in f.terms.items():
            val = c % p
            for par, e in mono:
                v = point.values[par]
                val = val * (v if e == 1 else pow(v, e, p)) % p
            for par, e in mono:
                j = col[par]
                row[j] = (row[j] + e * val * inv[par]) % p
        rows.append(row)
    return rows


def _rank_mod(rows: list[list[int]], p: int) -> int:
    """Gaussian elimination rank over the prime field."""
    if not rows:
        return 0
    M = [row[:] for row in rows]
    n_rows, n_cols = len(M), len(M[0])
    rank = 0
    for c in range(n_cols):
        pivot = None
        for i in range(rank, n_rows):
            if M[i][c] % p:
                pivot = i
                break
        if pivot is None:
            continue
        M[rank], M[pivot] = M[pivot], M[rank]
        inv = pow(M[rank][c], p - 2, p)
        M[rank] = [x * inv % p for x in M[rank]]
        for i in range(rank + 1, n_rows):
            f = M[i][c] % p
            if f:
                M[i] = [(a - f * b) % p for a, b in zip(M[i], M[rank])]
        rank += 1
        if rank == n_rows:
            break
    return rank


def generic_rank(cm: CoefficientMap, trials: int = DEFAULT_TRIALS,
                 seed: int = DEFAULT_SEED) -> RankReport:
    """Max Jacobian rank over random evaluations, one prime per trial.

    Each trial draws a uniform point with nonzero coordinates from its own
    deterministic RNG seeded by (seed, trial index).  Trials stop early
    once the rank reaches min(p, m): no further trial can raise it, so the
    reported rank is unchanged and stays monotone in the trial budget.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    cap = min(cm.p, cm.m)
    results: list[TrialResult] = []
    best = 0
    for t in range(trials):
        prime = PRIMES[t % len(PRIMES)]
        trial_seed = seed + t
        rng = random.Random(trial_seed)
        point = FieldPoint.random(cm.params, prime, rng)
        r = _rank_mod(_jacobian_mod_point(cm, point), prime)
        results.append(TrialResult(prime, trial_seed, r))
        if r > best:
            best = r
        if best == cap:
            break
    return RankReport(best, tuple(results), cm.p, cm.m)


def count_criterion(m: Model) -> Optional[dict]:
    """Parameters-versus-coefficients bound; returns evidence when it fires.

    For a strongly connected model with one input and one output the
    coefficient count is known in closed form, so having strictly more
    parameters forces the map to be infinite-to-one.  A None result says
    nothing about identifiability.
    """
    if len(m.inputs) != 1 or len(m.outputs) != 1:
        raise ValueError("count criterion requires one input and one output")
    if not is_strongly_connected(m):
        raise ValueError("count criterion requires a strongly connected model")
    (inp,) = m.inputs
    (out,) = m.outputs
    n, edge_count, leak_count = m.n, len(m.edges), len(m.leaks)
    p = edge_count + leak_count
    length = 0 if inp == out else int(distance(m, inp, out))
    if m.leaks and inp == out:
        case, bound = 1, 2 * n - 1
    elif m.leaks:
        case, bound = 2, 2 * n - length
    elif inp == out:
        case, bound = 3, 2 * n - 2
    else:
        case, bound = 4, 2 * n - length - 1
    count = p if m.leaks else edge_count
    if count > bound:
        return {"case": case, "params": count, "bound": bound,
                "distance": length, "leaks": leak_count}
    return None


def classify_tree(m: Model) -> Verdict:
    """Bidirectional-tree classification (exact iff condition).

    A bidirectional tree model with one input and one output is
    identifiable exactly when the input-to-output distance is at most 1
    and there is at most one leak.
    """
    if not is_bidirectional_tree(m):
        raise ValueError("model graph is not a bidirectional tree")
    if len(m.inputs) != 1 or len(m.outputs) != 1:
        raise ValueError("tree classification requires one input and one output")
    (inp,) = m.inputs
    (out,) = m.outputs
    dist = int(distance(m, inp, out))
    ok = dist <= 1 and len(m.leaks) <= 1
    return Verdict(
        status=IDENTIFIABLE if ok else UNIDENTIFIABLE,
        method=METHOD_TREE,
        rank_report=None,
        criteria={"distance": dist, "leaks": len(m.leaks)},
    )


def isc_sufficiency(m: Model) -> Optional[tuple[int, ...]]:
    """Inductively-strongly-connected sufficiency; witness ordering or None.

    Fires for models with input and output together in one compartment i,
    at most one leak, at most 2n-2 edges, and a vertex ordering rooted at
    i whose prefixes all induce strongly connected subgraphs.  Firing
    certifies identifiability; not firing says nothing.

    The edge bound is required for soundness: with input equal to output
    the coefficient map has at most 2n-1 coordinates, so a model with
    more than 2n-2 edges (plus a possible leak) has more parameters than
    coefficients and cannot be identifiable, no matter how connected.
    """
    if (len(m.inputs) == 1 and m.inputs == m.outputs and len(m.leaks) <= 1
            and len(m.edges) <= 2 * m.n - 2):
        (i,) = m.inputs
        return inductively_strong_order(m, i)
    return None


def decide_identifiability(m: Model, *, trials: int = DEFAULT_TRIALS,
                           seed: int = DEFAULT_SEED,
                           force_rank: bool = False) -> Verdict:
    """Full verdict pipeline for a strongly connected model.

    Refuses models that are not strongly connected (the rank criterion is
    only known to characterize identifiability there).  Models without
    parameters are identifiable by convention and reported as such.
    """
    if not is_strongly_connected(m):
        raise NotStronglyConnectedError(
            "identifiability verdicts are limited to strongly connected models")
    if m.param_count() == 0:
        return Verdict(NO_PARAMETERS, METHOD_CONVENTION, None, {})
    if not m.inputs:
        raise NoInputError("model has no inputs")

    single_io = len(m.inputs) == 1 and len(m.outputs) == 1
    if not force_rank:
        if single_io:
            fired = count_criterion(m)
            if fired is not None:
                return Verdict(UNIDENTIFIABLE, METHOD_COUNT, None, fired)
            if is_bidirectional_tree(m):
                return classify_tree(m)
        witness = isc_sufficiency(m)
        if witness is not None:
            return Verdict(IDENTIFIABLE, METHOD_ISC, None,
                           {"witness_order": list(witness)})

    cm = coefficient_map(m)
    report = generic_rank(cm, trials=trials, seed=seed)
    status = IDENTIFIABLE if report.rank == cm.p else UNIDENTIFIABLE
    return Verdict(status, METHOD_RANK, report, {})


def expected_dimension(m: Model, *, trials: int = DEFAULT_TRIALS,
                       seed: int = DEFAULT_SEED) -> DimReport:
    """Image dimension of the coefficient map versus min(p, m)."""
    cm = coefficient_map(m)
    report = generic_rank(cm, trials=trials, seed=seed)
    expected = min(cm.p, cm.m)
    return DimReport(
        image_dim=report.rank,
        expected=expected,
        has_expected_dimension=report.rank == expected,
        rank_report=report,
    )


def verdict_to_dict(v: Verdict, m: Model) -> dict:
    """Stable-keyed JSON form of a verdict (golden-test friendly)."""
    try:
        cm_len = coefficient_map(m).m
    except NoInputError:
        cm_len = None
    return {
        "verdict": v.status,
        "method": v.method,
        "rank": v.rank_report.rank if v.rank_report else None,
        "params": m.param_count(),
        "coeffs": cm_len,
        "trials": [
            {"prime": str(t.prime), "seed": t.seed, "rank": t.rank}
            for t in (v.rank_report.trials if v.rank_report else ())
        ],
        "criteria": v.criteria,
    }
