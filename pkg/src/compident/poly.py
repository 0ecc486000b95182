"""Exact multivariate polynomial arithmetic over the integers.

Every symbolic object in this package is built from rate parameters
``a_ij`` (flow from compartment j into compartment i, with i = 0 meaning a
leak).  A parameter is a pair of ints ``(i, j)``; a monomial is a sorted
tuple of ``(param, exponent)`` pairs; a polynomial maps monomials to
nonzero integer coefficients:

    Param    = (i, j)                         # the label a_ij
    Monomial = ((param, exp), ...)            # sorted by param, exps >= 1
    Poly.terms = {Monomial: int}              # no zero coefficients stored

Coefficients are arbitrary-precision ints, so all identities checked by
the test suite are exact.  There is no floating point anywhere in the
symbolic path.

``LambdaPoly`` wraps a dense vector of :class:`Poly` coefficients indexed
by the degree of an extra distinguished variable ``lambda``, which stands
for the differentiation operator d/dt when input-output equations are
written in operator form.  Its degree is bounded by the matrix size, so a
dense representation is the right shape (the parameter monomials stay
sparse).

``FieldPoint`` assigns every parameter a nonzero residue modulo a large
prime; evaluating polynomials at such points drives the generic-rank
computation.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, Tuple

Param = Tuple[int, int]
Monomial = Tuple[Tuple[Param, int], ...]

# Hard-coded 61-bit primes for generic-point evaluation.  Distinct trials
# use distinct moduli so that a single unlucky point cannot masquerade as
# a rank drop across all trials.
PRIMES: tuple[int, ...] = (
    2305843009213693951,  # 2^61 - 1
    2305843009213693921,
    2305843009213693907,
)


def param_name(param: Param) -> str:
    """Render a parameter, e.g. ``(0, 2) -> 'a02'``.

    Indices of 10 or more get underscore separators to stay unambiguous.
    """
    i, j = param
    if i < 10 and j < 10:
        return f"a{i}{j}"
    return f"a{i}_{j}"


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    exps: dict[Param, int] = dict(a)
    for p, e in b:
        exps[p] = exps.get(p, 0) + e
    return tuple(sorted(exps.items()))


def _mono_sort_key(mono: Monomial):
    # Graded order: total degree first, then the flattened parameter list
    # (a parameter with exponent e is repeated e times) compared
    # lexicographically.  Used for canonical rendering and leading terms.
    flat: list[Param] = []
    deg = 0
    for p, e in mono:
        deg += e
        flat.extend([p] * e)
    return (-deg, tuple(flat))


class Poly:
    """Sparse exact polynomial in the ``a_ij`` parameters."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, int] | None = None):
        self.terms: dict[Monomial, int] = {
            m: c for m, c in (terms or {}).items() if c != 0
        }

    # -- constructors -------------------------------------------------
    @staticmethod
    def zero() -> "Poly":
        return Poly()

    @staticmethod
    def const(c: int) -> "Poly":
        return Poly({(): c}) if c else Poly()

    @staticmethod
    def one() -> "Poly":
        return Poly.const(1)

    @staticmethod
    def var(param: Param) -> "Poly":
        return Poly({((param, 1),): 1})

    @staticmethod
    def monomial(params: Iterable[Param], coeff: int = 1) -> "Poly":
        """Product of the given parameters (with multiplicity) times coeff."""
        exps: dict[Param, int] = {}
        for p in params:
            exps[p] = exps.get(p, 0) + 1
        return Poly({tuple(sorted(exps.items())): coeff})

    # -- ring operations ----------------------------------------------
    def __add__(self, other: "Poly") -> "Poly":
        if not self.terms:
            return other
        if not other.terms:
            return self
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = s
            elif m in out:
                del out[m]
        res = Poly.__new__(Poly)
        res.terms = out
        return res

    def __neg__(self) -> "Poly":
        res = Poly.__new__(Poly)
        res.terms = {m: -c for m, c in self.terms.items()}
        return res

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        if not self.terms or not other.terms:
            return Poly()
        out: dict[Monomial, int] = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                m = _mono_mul(ma, mb)
                s = out.get(m, 0) + ca * cb
                if s:
                    out[m] = s
                elif m in out:
                    del out[m]
        res = Poly.__new__(Poly)
        res.terms = out
        return res

    def __pow__(self, e: int) -> "Poly":
        if e < 0:
            raise ValueError("negative power of a polynomial")
        out = Poly.one()
        for _ in range(e):
            out = out * self
        return out

    def scale(self, c: int) -> "Poly":
        if c == 0:
            return Poly()
        res = Poly.__new__(Poly)
        res.terms = {m: c * v for m, v in self.terms.items()}
        return res

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Poly) and self.terms == other.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    # -- queries -------------------------------------------------------
    def degree(self) -> int:
        """Total degree; 0 for constants including the zero polynomial."""
        deg = 0
        for m in self.terms:
            deg = max(deg, sum(e for _, e in m))
        return deg

    def is_constant(self) -> bool:
        return all(m == () for m in self.terms)

    def constant_value(self) -> int:
        """The constant term (the whole value if is_constant())."""
        return self.terms.get((), 0)

    def params(self) -> set[Param]:
        out: set[Param] = set()
        for m in self.terms:
            for p, _ in m:
                out.add(p)
        return out

    def coefficients(self) -> list[int]:
        return list(self.terms.values())

    # -- calculus and evaluation ----------------------------------------
    def derivative(self, param: Param) -> "Poly":
        """Formal partial derivative with respect to one parameter."""
        out: dict[Monomial, int] = {}
        for m, c in self.terms.items():
            for idx, (p, e) in enumerate(m):
                if p != param:
                    continue
                if e == 1:
                    dm = m[:idx] + m[idx + 1:]
                else:
                    dm = m[:idx] + ((p, e - 1),) + m[idx + 1:]
                out[dm] = out.get(dm, 0) + c * e
                break
        return Poly(out)

    def eval_mod(self, point: "FieldPoint") -> int:
        """Evaluate at a field point; raises KeyError on unassigned params."""
        p = point.prime
        total = 0
        values = point.values
        for m, c in self.terms.items():
            t = c % p
            for par, e in m:
                v = values[par]
                t = t * (v if e == 1 else pow(v, e, p)) % p
            total = (total + t) % p
        return total

    # -- canonical text --------------------------------------------------
    def sorted_terms(self) -> list[tuple[Monomial, int]]:
        return sorted(self.terms.items(), key=lambda kv: _mono_sort_key(kv[0]))

    def text(self) -> str:
        """Canonical rendering: terms by (degree desc, lexicographic params).

        Example: ``a02*a13*a21 + a02*a21*a23 + a02*a23*a31``.  Bit-exact
        output, suitable for golden tests.
        """
        if not self.terms:
            return "0"
        parts: list[str] = []
        for mono, coeff in self.sorted_terms():
            factors = []
            for p, e in mono:
                factors.append(param_name(p) if e == 1 else f"{param_name(p)}^{e}")
            body = "*".join(factors)
            mag = abs(coeff)
            if not body:
                tok = str(mag)
            elif mag == 1:
                tok = body
            else:
                tok = f"{mag}*{body}"
            parts.append(("- " if coeff < 0 else "+ ") + tok)
        joined = " ".join(parts)
        return joined[2:] if joined.startswith("+ ") else "-" + joined[2:]

    def __repr__(self) -> str:
        return f"Poly({self.text()})"


def partial_derivative(poly: Poly, param: Param) -> Poly:
    """Module-level alias of :meth:`Poly.derivative`."""
    return poly.derivative(param)


@dataclass(frozen=True)
class FieldPoint:
    """An assignment of every parameter to a nonzero residue mod a prime."""

    prime: int
    values: Mapping[Param, int]

    def __post_init__(self):
        for p, v in self.values.items():
            if not (1 <= v < self.prime):
                raise ValueError(f"coordinate for {param_name(p)} must be in [1, prime-1]")

    @staticmethod
    def random(params: Sequence[Param], prime: int, rng: random.Random) -> "FieldPoint":
        return FieldPoint(prime, {p: rng.randrange(1, prime) for p in params})


def eval_mod(poly: Poly, point: FieldPoint) -> int:
    """Module-level alias of :meth:`Poly.eval_mod`."""
    return poly.eval_mod(point)


class LambdaPoly:
    """Polynomial in lambda with :class:`Poly` coefficients (dense in lambda)."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Poly] = ()):
        cs = list(coeffs)
        while cs and not cs[-1]:
            cs.pop()
        self.coeffs: tuple[Poly, ...] = tuple(cs)

    @staticmethod
    def zero() -> "LambdaPoly":
        return LambdaPoly()

    @staticmethod
    def from_poly(p: Poly) -> "LambdaPoly":
        return LambdaPoly([p])

    @staticmethod
    def lam() -> "LambdaPoly":
        """The bare lambda variable."""
        return LambdaPoly([Poly.zero(), Poly.one()])

    def coeff(self, k: int) -> Poly:
        """Coefficient of lambda^k (zero beyond the degree)."""
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return Poly.zero()

    def degree(self) -> int:
        """Lambda-degree; -1 for the zero element."""
        return len(self.coeffs) - 1

    def leading(self) -> Poly:
        return self.coeffs[-1] if self.coeffs else Poly.zero()

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __add__(self, other: "LambdaPoly") -> "LambdaPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        return LambdaPoly([self.coeff(k) + other.coeff(k) for k in range(n)])

    def __neg__(self) -> "LambdaPoly":
        return LambdaPoly([-c for c in self.coeffs])

    def __sub__(self, other: "LambdaPoly") -> "LambdaPoly":
        return self + (-other)

    def __mul__(self, other: "LambdaPoly") -> "LambdaPoly":
        if not self.coeffs or not other.coeffs:
            return LambdaPoly()
        out = [Poly.zero()] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j, b in enumerate(other.coeffs):
                if not b:
                    continue
                out[i + j] = out[i + j] + a * b
        return LambdaPoly(out)

    def scale(self, p: Poly) -> "LambdaPoly":
        return LambdaPoly([c * p for c in self.coeffs])

    def shift(self, k: int = 1) -> "LambdaPoly":
        """Multiply by lambda^k."""
        if not self.coeffs:
            return self
        return LambdaPoly([Poly.zero()] * k + list(self.coeffs))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, LambdaPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def text(self, var: str = "L") -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for k in range(self.degree(), -1, -1):
            c = self.coeff(k)
            if not c:
                continue
            if k == 0:
                parts.append(c.text())
            else:
                v = var if k == 1 else f"{var}^{k}"
                parts.append(v if c == Poly.one() else f"({c.text()})*{v}")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"LambdaPoly({self.text()})"


# ---------------------------------------------------------------------
# Exact division helpers.  Only used by the fraction-free determinant
# cross-check; raises if the division is not exact (which would signal a
# bug, never expected in that algorithm).


class InexactDivision(ArithmeticError):
    pass


def _leading(poly: Poly) -> tuple[Monomial, int]:
    mono = min(poly.terms, key=_mono_sort_key)
    return mono, poly.terms[mono]


def _mono_div(a: Monomial, b: Monomial) -> Monomial:
    exps = dict(a)
    for p, e in b:
        have = exps.get(p, 0)
        if have < e:
            raise InexactDivision("monomial does not divide")
        if have == e:
            del exps[p]
        else:
            exps[p] = have - e
    return tuple(sorted(exps.items()))


def poly_exact_div(num: Poly, den: Poly) -> Poly:
    """Exact quotient num / den in the polynomial ring.

    Works by repeatedly cancelling leading terms under the graded order;
    raises :class:`InexactDivision` if den does not divide num.
    """
    if not den:
        raise ZeroDivisionError("polynomial division by zero")
    quo: dict[Monomial, int] = {}
    rem = num
    dm, dc = _leading(den)
    while rem:
        rm, rc = _leading(rem)
        if rc % dc != 0:
            raise InexactDivision("coefficient does not divide")
        qm = _mono_div(rm, dm)
        qc = rc // dc
        quo[qm] = quo.get(qm, 0) + qc
        rem = rem - den * Poly({qm: qc})
    return Poly(quo)


def lambda_exact_div(num: LambdaPoly, den: LambdaPoly) -> LambdaPoly:
    """Exact quotient in lambda: classic long division, exact at each step."""
    if not den:
        raise ZeroDivisionError("division by zero lambda-polynomial")
    quo = [Poly.zero()] * max(num.degree() - den.degree() + 1, 0)
    rem = num
    while rem and rem.degree() >= den.degree():
        q = poly_exact_div(rem.leading(), den.leading())
        k = rem.degree() - den.degree()
        quo[k] = quo[k] + q
        rem = rem - den.scale(q).shift(k)
    if rem:
        raise InexactDivision("lambda-polynomial division left a remainder")
    return LambdaPoly(quo)
