"""Shared fixtures and independent oracles for the test suite.

The oracles here deliberately re-derive results from first principles --
subset enumeration for forests, boolean-matrix closure for connectivity,
exact rational elimination for ranks -- so the package's algorithms are
checked against genuinely different computations, not against themselves.
"""

from __future__ import annotations

import itertools
import os
from fractions import Fraction

import pytest

from compident.graphs import AuxGraph
from compident.model import Model
from compident.poly import Poly

FIXTURES_DIR = os.path.join(os.path.dirname(__file__), os.pardir, "fixtures")


@pytest.fixture
def fixtures_dir() -> str:
    return os.path.abspath(FIXTURES_DIR)


# ---------------------------------------------------------------------
# forest oracle: filter *all* edge subsets by the definition


def _is_incoming_forest(nodes, edges) -> bool:
    sources = [e[0] for e in edges]
    if len(sources) != len(set(sources)):
        return False  # some node has two outgoing edges
    parent = {v: v for v in nodes}

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    for (s, t, _lab) in edges:
        rs, rt = find(s), find(t)
        if rs == rt:
            return False  # undirected cycle
        parent[rs] = rt
    return True


def brute_force_forests(g: AuxGraph, j: int, pair=None) -> list[frozenset[int]]:
    """All j-edge spanning incoming forests as frozensets of edge indices."""
    out = []
    for subset in itertools.combinations(range(len(g.edges)), j):
        chosen = [g.edges[k] for k in subset]
        if not _is_incoming_forest(g.nodes, chosen):
            continue
        if pair is not None:
            parent = {v: v for v in g.nodes}

            def find(x):
                while parent[x] != x:
                    x = parent[x]
                return x

            for (s, t, _lab) in chosen:
                parent[find(s)] = find(t)
            if find(pair[0]) != find(pair[1]):
                continue
        out.append(frozenset(subset))
    return out


def undirected_components(g: AuxGraph, edge_indices) -> list[set[int]]:
    parent = {v: v for v in g.nodes}

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    for k in edge_indices:
        s, t, _lab = g.edges[k]
        rs, rt = find(s), find(t)
        if rs != rt:
            parent[rs] = rt
    groups: dict[int, set[int]] = {}
    for v in g.nodes:
        groups.setdefault(find(v), set()).add(v)
    return list(groups.values())


# ---------------------------------------------------------------------
# connectivity oracle: transitive closure by boolean matrix powering


def closure_strongly_connected(n: int, edges) -> bool:
    reach = [[i == j for j in range(n)] for i in range(n)]
    for (f, t) in edges:
        reach[f - 1][t - 1] = True
    for k in range(n):
        rk = reach[k]
        for i in range(n):
            if reach[i][k]:
                ri = reach[i]
                for j in range(n):
                    if rk[j]:
                        ri[j] = True
    return all(all(row) for row in reach)


# ---------------------------------------------------------------------
# rank oracle: exact rational Jacobian rank at a concrete point


def _term_partial_at(mono, coeff, var, point) -> Fraction:
    exps = dict(mono)
    if var not in exps:
        return Fraction(0)
    value = Fraction(coeff) * exps[var]
    for p, e in mono:
        value *= Fraction(point[p]) ** (e - 1 if p == var else e)
    return value


def rational_jacobian_rank(entries, params, point) -> int:
    """Rank over the rationals of the Jacobian at the given point.

    Differentiates term by term and eliminates with Fractions; shares no
    code with the modular path used by the package.
    """
    rows = []
    for f in entries:
        row = []
        for var in params:
            val = Fraction(0)
            for mono, c in f.terms.items():
                val += _term_partial_at(mono, c, var, point)
            row.append(val)
        rows.append(row)
    rank = 0
    n_rows = len(rows)
    n_cols = len(params)
    for c in range(n_cols):
        pivot = next((i for i in range(rank, n_rows) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        pv = rows[rank][c]
        for i in range(rank + 1, n_rows):
            if rows[i][c] != 0:
                factor = rows[i][c] / pv
                rows[i] = [a - factor * b for a, b in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def rational_generic_rank(entries, params, rng, attempts: int = 3) -> int:
    best = 0
    for _ in range(attempts):
        point = {p: Fraction(rng.randrange(1, 10 ** 6), rng.randrange(1, 97))
                 for p in params}
        best = max(best, rational_jacobian_rank(entries, params, point))
    return best


# ---------------------------------------------------------------------
# small model shorthand


def mk(n, edges, ins, outs, leaks=()) -> Model:
    return Model.create(n, edges, ins, outs, leaks)


def poly_of(*params) -> Poly:
    """Monomial from parameter tuples, e.g. poly_of((0,2),(1,3))."""
    return Poly.monomial(params)
