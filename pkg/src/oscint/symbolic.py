"""Exact regeneration of the closed forms for I_k.

Coefficients live in the ring ℚ(i)[π, γ, ln2, ζ(3), ζ(5), …].  Even zeta
values are folded into rational multiples of π^{2n} on construction, so a
coefficient is free of transcendental debris exactly when its only monomial
is a power of π.  Nothing in this module touches floating point except
``evaluate`` and ``evaluate_expression``, which map exact objects to numbers.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Literal, Mapping

from . import closedform, specfun
from .errors import DomainError

Monomial = tuple[tuple[str, int], ...]
Kind = Literal["Abs2", "Re", "Im"]

_SYMBOL_TEXT = {"pi": "π", "gamma": "γ", "ln2": "ln2"}


def _symbol_rank(name: str) -> tuple[int, int]:
    if name == "pi":
        return (0, 0)
    if name == "gamma":
        return (1, 0)
    if name == "ln2":
        return (2, 0)
    m = re.fullmatch(r"zeta(\d+)", name)
    if m is None:
        raise DomainError(f"unknown symbol {name!r}")
    return (3, int(m.group(1)))


def _normalise_monomial(items: Iterable[tuple[str, int]]) -> Monomial:
    powers: dict[str, int] = {}
    for name, exp in items:
        powers[name] = powers.get(name, 0) + exp
    return tuple(sorted(((s, e) for s, e in powers.items() if e), key=lambda t: _symbol_rank(t[0])))


class SymbolicConstant:
    """Immutable element of ℚ(i)[π, γ, ln2, ζ_odd]."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, tuple[Fraction, Fraction]] | None = None):
        clean = {}
        for mono, (re_, im_) in (terms or {}).items():
            re_, im_ = Fraction(re_), Fraction(im_)
            if re_ or im_:
                clean[_normalise_monomial(mono)] = (re_, im_)
        self._terms = tuple(sorted(clean.items(), key=lambda kv: [_symbol_rank(s) + (e,) for s, e in kv[0]]))
        self._hash = hash(self._terms)

    # construction
    @classmethod
    def rational(cls, re_=0, im_=0) -> "SymbolicConstant":
        return cls({(): (Fraction(re_), Fraction(im_))})

    @classmethod
    def symbol(cls, name: str, power: int = 1) -> "SymbolicConstant":
        _symbol_rank(name)
        return cls({((name, power),): (Fraction(1), Fraction(0))})

    @classmethod
    def zeta(cls, s: int) -> "SymbolicConstant":
        if s < 2:
            raise DomainError(f"ζ({s}) is not a finite constant")
        if s % 2 == 0:
            return cls({(("pi", s),): (specfun.zeta_even_rational(s), Fraction(0))})
        return cls.symbol(f"zeta{s}")

    @staticmethod
    def _lift(other) -> "SymbolicConstant":
        if isinstance(other, SymbolicConstant):
            return other
        if isinstance(other, (int, Fraction)):
            return SymbolicConstant.rational(other)
        if isinstance(other, complex) and other.real.is_integer() and other.imag.is_integer():
            return SymbolicConstant.rational(int(other.real), int(other.imag))
        return NotImplemented

    # ring operations
    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for mono, (r, i) in other._terms:
            r0, i0 = out.get(mono, (Fraction(0), Fraction(0)))
            out[mono] = (r0 + r, i0 + i)
        return SymbolicConstant(out)

    __radd__ = __add__

    def __neg__(self):
        return SymbolicConstant({m: (-r, -i) for m, (r, i) in self._terms})

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        out: dict[Monomial, tuple[Fraction, Fraction]] = {}
        for m1, (r1, i1) in self._terms:
            for m2, (r2, i2) in other._terms:
                mono = _normalise_monomial(m1 + m2)
                r0, i0 = out.get(mono, (Fraction(0), Fraction(0)))
                out[mono] = (r0 + r1 * r2 - i1 * i2, i0 + r1 * i2 + i1 * r2)
        return SymbolicConstant(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if int(n) != n or n < 0:
            raise DomainError("only non-negative integer powers")
        out = SymbolicConstant.rational(1)
        for _ in range(n):
            out = out * self
        return out

    def conj(self) -> "SymbolicConstant":
        return SymbolicConstant({m: (r, -i) for m, (r, i) in self._terms})

    def real(self) -> "SymbolicConstant":
        return SymbolicConstant({m: (r, Fraction(0)) for m, (r, i) in self._terms})

    def imag(self) -> "SymbolicConstant":
        return SymbolicConstant({m: (i, Fraction(0)) for m, (r, i) in self._terms})

    # inspection
    def __eq__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self._terms == other._terms

    def __hash__(self):
        return self._hash

    def __bool__(self):
        return bool(self._terms)

    def items(self) -> tuple[tuple[Monomial, tuple[Fraction, Fraction]], ...]:
        return self._terms

    def is_real(self) -> bool:
        return all(i == 0 for _, (_, i) in self._terms)

    def rational_pi_power(self) -> tuple[Fraction, int] | None:
        """(q, j) when the value is q·π^j with q real rational, else None."""
        if len(self._terms) != 1:
            return None
        mono, (r, i) = self._terms[0]
        if i != 0:
            return None
        if mono == ():
            return r, 0
        if len(mono) == 1 and mono[0][0] == "pi":
            return r, mono[0][1]
        return None

    def offending_monomials(self) -> list[str]:
        """Monomials that carry anything other than π."""
        return [_monomial_text(m) for m, _ in self._terms if any(s != "pi" for s, _ in m)]

    def evaluate(self) -> complex:
        total = 0j
        for mono, (r, i) in self._terms:
            v = 1.0
            for s, e in mono:
                v *= _symbol_value(s) ** e
            total += complex(float(r), float(i)) * v
        return total

    def __repr__(self):
        return f"SymbolicConstant({str(self)!r})"

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for mono, (r, i) in self._terms:
            coeff = _gauss_text(r, i)
            body = _monomial_text(mono)
            parts.append(coeff if not mono else (body if coeff == "1" else
                                                ("-" + body if coeff == "-1" else f"{coeff}*{body}")))
        return " + ".join(parts)


def _gauss_text(r: Fraction, i: Fraction) -> str:
    if i == 0:
        return str(r)
    if r == 0:
        return f"{i}i"
    return f"({r}+{i}i)"


def _monomial_text(mono: Monomial) -> str:
    out = []
    for s, e in mono:
        name = _SYMBOL_TEXT.get(s, f"ζ{s[4:]}" if s.startswith("zeta") else s)
        out.append(name if e == 1 else f"{name}^{e}")
    return "·".join(out) if out else "1"


def _symbol_value(name: str) -> float:
    if name == "pi":
        return math.pi
    if name == "gamma":
        return specfun.EULER_GAMMA
    if name == "ln2":
        return specfun.LN2
    return specfun.zeta_int(int(name[4:]))


ZERO = SymbolicConstant()
ONE = SymbolicConstant.rational(1)
I_UNIT = SymbolicConstant.rational(0, 1)
PI = SymbolicConstant.symbol("pi")


# -------------------------------------------------------------- φ, P, assembly


@lru_cache(maxsize=None)
def sym_phi(r: int) -> SymbolicConstant:
    """φ^{(r)}(0): i(γ + ln2/2) for r = 1, −(−i)^r (r−1)! ζ(r) for r ≥ 2."""
    if int(r) != r or r < 1:
        raise DomainError(f"φ order must be ≥ 1, got {r}")
    if r == 1:
        return I_UNIT * (SymbolicConstant.symbol("gamma") + Fraction(1, 2) * SymbolicConstant.symbol("ln2"))
    return -((-I_UNIT) ** r) * math.factorial(r - 1) * SymbolicConstant.zeta(r)


@lru_cache(maxsize=None)
def sym_p_poly(n: int, m: int) -> SymbolicConstant:
    """P_{n,m}(0) = (−i)^m C(n,m) Y_{n−m}(φ^{(1)}, …, φ^{(n−m)})."""
    if n < 0:
        raise DomainError(f"P-polynomial needs n ≥ 0, got {n}")
    if m < 0 or n < m:
        return ZERO
    if n == m:
        return (-I_UNIT) ** n
    ys = specfun.bell_complete_table(n - m, [sym_phi(r) for r in range(1, n - m + 1)])
    return (-I_UNIT) ** m * math.comb(n, m) * ys[n - m]


@dataclass(frozen=True, order=True)
class BasisTerm:
    """|𝒟^{(a)}|², Re[𝒟^{(a)}𝒟^{(b)*}] or Im[𝒟^{(a)}𝒟^{(b)*}] with a ≤ b."""

    kind: Kind
    a: int
    b: int

    def __post_init__(self):
        if self.kind not in ("Abs2", "Re", "Im"):
            raise DomainError(f"unknown basis kind {self.kind!r}")
        if self.kind == "Abs2" and self.a != self.b:
            raise DomainError("Abs2 terms need a == b")
        if self.kind != "Abs2" and not 0 <= self.a < self.b:
            raise DomainError("product terms need 0 ≤ a < b")


@dataclass(frozen=True)
class IntegralExpression:
    """prefactor × Σ coefficient·basis.

    For I_k, ``k`` is the integral order; for a |𝒟|² derivative it is the
    derivative order and the basis indices are absolute 𝒟 orders.
    """

    k: int
    prefactor: SymbolicConstant
    terms: tuple[tuple[SymbolicConstant, BasisTerm], ...]
    label: str | None = None

    def coefficient(self, term: BasisTerm) -> SymbolicConstant:
        for c, t in self.terms:
            if t == term:
                return c
        return ZERO


def _reduce_hermitian(weights: Mapping[tuple[int, int], SymbolicConstant], shift: int = 0
                      ) -> tuple[tuple[SymbolicConstant, BasisTerm], ...]:
    # Σ C_ab X_a X_b* → Abs2/Re/Im basis
    out = []
    keys = {(min(a, b), max(a, b)) for a, b in weights}
    for a, b in sorted(keys):
        if a == b:
            c = weights.get((a, a), ZERO)
            if c:
                out.append((c, BasisTerm("Abs2", a + shift, a + shift)))
            continue
        cab = weights.get((a, b), ZERO)
        cba = weights.get((b, a), ZERO)
        re_c = cab + cba
        im_c = I_UNIT * (cab - cba)
        if re_c:
            out.append((re_c, BasisTerm("Re", a + shift, b + shift)))
        if im_c:
            out.append((im_c, BasisTerm("Im", a + shift, b + shift)))
    return tuple(out)


@lru_cache(maxsize=None)
def _sym_bilinear(n: int) -> dict[tuple[int, int], SymbolicConstant]:
    out: dict[tuple[int, int], SymbolicConstant] = {}
    for j in range(n + 1):
        binom = math.comb(n, j)
        for a in range(n - j + 1):
            pa = sym_p_poly(n - j, a)
            for b in range(j + 1):
                w = binom * pa * sym_p_poly(j, b).conj()
                if w:
                    out[(a, b)] = out.get((a, b), ZERO) + w
    return out


@lru_cache(maxsize=None)
def sym_expression(k: int) -> IntegralExpression:
    """I_k as 1/(2^{3k−1}k!) × Σ coefficient·basis with exact coefficients."""
    if int(k) != k or k < 1:
        raise DomainError(f"k must be ≥ 1, got {k}")
    # π^{k−1}/2^{4k−2}·(−2/π)^n/(n!(k−n−1)!)·2^{3k−1}k! = (−2)^n π^{k−1−n} k!/(2^{k−1} n!(k−n−1)!)
    weights: dict[tuple[int, int], SymbolicConstant] = {}
    for n in range(k):
        w = Fraction((-2) ** n * math.factorial(k), 2 ** (k - 1) * math.factorial(n) * math.factorial(k - n - 1))
        scale = w * PI ** (k - 1 - n)
        for key, c in _sym_bilinear(n).items():
            weights[key] = weights.get(key, ZERO) + scale * c
    pref = SymbolicConstant.rational(Fraction(1, 2 ** (3 * k - 1) * math.factorial(k)))
    return IntegralExpression(k, pref, _reduce_hermitian(weights))


@lru_cache(maxsize=None)
def sym_derivative_modsq(n: int, base_order: int = 0) -> IntegralExpression:
    """∂^n_ν |𝒟^{(base)}_{−iν−1}|² at ν = 0 over the orders base..base+n."""
    if n < 0 or base_order < 0:
        raise DomainError("n and base_order must be non-negative")
    label = f"∂{str(n).translate(_SUPERSCRIPT)}_ν|𝒟⁽{str(base_order).translate(_SUPERSCRIPT)}⁾|²"
    return IntegralExpression(n, ONE, _reduce_hermitian(_sym_bilinear(n), shift=base_order), label)


@dataclass(frozen=True)
class CancellationReport:
    passed: bool
    offending: tuple[str, ...]


def verify_cancellation(expr: IntegralExpression) -> CancellationReport:
    """Pass iff the prefactor is rational and every coefficient is q·π^j with q ∈ ℚ."""
    bad: list[str] = []
    if expr.prefactor.rational_pi_power() is None or expr.prefactor.rational_pi_power()[1] != 0:
        bad.append(f"prefactor {expr.prefactor}")
    for c, t in expr.terms:
        if c.rational_pi_power() is not None:
            continue
        found = c.offending_monomials()
        if found:
            bad.extend(found)
        elif not c.is_real():
            bad.append(f"imaginary part in {t.kind}({t.a},{t.b})")
        else:
            bad.append(f"mixed π powers in {t.kind}({t.a},{t.b})")
    return CancellationReport(not bad, tuple(dict.fromkeys(bad)))


def coefficient_multiset(expr: IntegralExpression) -> list[tuple[Fraction, int]]:
    """Sorted (q, j) pairs for coefficients q·π^j; raises if one is not of that form."""
    out = []
    for c, t in expr.terms:
        qp = c.rational_pi_power()
        if qp is None:
            raise DomainError(f"coefficient of {t} is not rational·π^j: {c}")
        out.append(qp)
    return sorted(out)


def evaluate_expression(expr: IntegralExpression, tau: float) -> float:
    """Numeric value with 𝒟^{(m)}_{−1}(−iμ₀τ) substituted."""
    top = max([max(t.a, t.b) for _, t in expr.terms] or [0])
    fam = closedform.modified_family(top, tau)
    total = 0.0
    for c, t in expr.terms:
        total += c.evaluate().real * closedform.basis_value(t.kind, t.a, t.b, fam)
    return expr.prefactor.evaluate().real * total


# -------------------------------------------------------------------- render

_SUPERSCRIPT = str.maketrans("0123456789-", "⁰¹²³⁴⁵⁶⁷⁸⁹⁻")


def _pi_text(q: Fraction, j: int) -> tuple[str, str]:
    """(sign, magnitude) such as ('−', '7π²/4')."""
    sign = "−" if q < 0 else "+"
    q = abs(q)
    pi = "" if j == 0 else ("π" if j == 1 else "π" + str(j).translate(_SUPERSCRIPT))
    num = str(q.numerator) if (q.numerator != 1 or not pi) else ""
    body = num + pi
    if q.denominator != 1:
        body += f"/{q.denominator}"
    return sign, body


def _basis_text(t: BasisTerm) -> str:
    def d(m):
        return f"𝒟⁽{str(m).translate(_SUPERSCRIPT)}⁾"
    if t.kind == "Abs2":
        return f"|{d(t.a)}|²"
    return f"{t.kind}[{d(t.a)}{d(t.b)}*]"


def _coeff_grammar(c: SymbolicConstant) -> str:
    qp = c.rational_pi_power()
    if qp is None:
        raise DomainError(f"coefficient {c} is not rational·π^j")
    q, j = qp
    if j == 0:
        return str(q)
    return f"{q}*pi" if j == 1 else f"{q}*pi^{j}"


_COEFF_RE = re.compile(r"^\s*(-?\d+(?:/\d+)?)\s*(?:\*\s*pi\s*(?:\^\s*(-?\d+))?)?\s*$")


def _parse_coeff(text: str) -> SymbolicConstant:
    m = _COEFF_RE.match(text)
    if m is None:
        raise DomainError(f"bad coefficient {text!r}")
    q = Fraction(m.group(1))
    if "pi" not in text:
        return SymbolicConstant.rational(q)
    return q * PI ** int(m.group(2) or 1)


def render(expr: IntegralExpression, fmt: str = "text"):
    """Text form (prefactor × bracketed sum) or the structured document."""
    if fmt == "structured":
        q = expr.prefactor.rational_pi_power()
        if q is None or q[1] != 0:
            raise DomainError("structured output needs a rational prefactor")
        terms = []
        for c, t in expr.terms:
            item = {"kind": t.kind, "a": t.a}
            if t.kind != "Abs2":
                item["b"] = t.b
            item["coeff"] = _coeff_grammar(c)
            terms.append(item)
        return {"k": expr.k, "prefactor": _fraction_text(q[0]), "terms": terms}
    if fmt != "text":
        raise DomainError(f"unknown format {fmt!r}")
    parts = []
    for idx, (c, t) in enumerate(expr.terms):
        qp = c.rational_pi_power()
        if qp is None:
            sign, body = "+", f"({c})"
        else:
            sign, body = _pi_text(*qp)
            if body == "1":
                body = ""
        if idx == 0 and sign == "+":
            sign = ""
        parts.append(f"{sign}{body}{_basis_text(t)}")
    q = expr.prefactor.rational_pi_power()
    lhs = expr.label or f"I_{expr.k}(τ)"
    if expr.prefactor == ONE:
        return f"{lhs} = {' '.join(parts)}"
    pref = _fraction_text(q[0]) if q and q[1] == 0 else str(expr.prefactor)
    return f"{lhs} = {pref} × [ {' '.join(parts)} ]"


def _fraction_text(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def render_json(expr: IntegralExpression) -> str:
    return json.dumps(render(expr, "structured"), ensure_ascii=False)


def parse_structured(doc) -> IntegralExpression:
    """Inverse of ``render(expr, "structured")``; accepts a dict or JSON text."""
    if isinstance(doc, str):
        doc = json.loads(doc)
    try:
        k = int(doc["k"])
        pref = SymbolicConstant.rational(Fraction(doc["prefactor"]))
        terms = []
        for item in doc["terms"]:
            a = int(item["a"])
            b = int(item.get("b", a))
            terms.append((_parse_coeff(item["coeff"]), BasisTerm(item["kind"], a, b)))
    except (KeyError, TypeError, ValueError) as exc:
        raise DomainError(f"malformed expression document: {exc}") from exc
    return IntegralExpression(k, pref, tuple(terms))
