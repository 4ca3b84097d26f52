"""Sparse differential polynomials in jet variables.

A :class:`DiffPoly` is an immutable map from canonical monomials to nonzero
rational coefficients.  Monomials are sorted tuples of ``(JetVar, exponent)``
pairs.  The name ``t`` is reserved for the generator of ``Q(t)``; it is a
polynomial variable whose total derivative is ``1``.  Inputs over ``Q(t)``
have coefficients in ``Q[t]`` and every operation here keeps them there, so
``t`` never needs to appear in a denominator.
"""

from __future__ import annotations

import threading
from functools import cmp_to_key
from fractions import Fraction
from numbers import Rational
from typing import Dict, Iterable, Iterator, Mapping, NamedTuple, Optional, Tuple

FIELD_GENERATOR = "t"


class JetVar(NamedTuple):
    """The ``deriv``-th derivative of the variable called ``base``."""

    base: str
    deriv: int = 0

    def next(self) -> "JetVar":
        return JetVar(self.base, self.deriv + 1)

    def __str__(self) -> str:
        return format_jet(self)


Monomial = Tuple[Tuple[JetVar, int], ...]
ONE: Monomial = ()


def format_jet(v: JetVar) -> str:
    if v.deriv == 0:
        return v.base
    if v.deriv <= 2:
        return v.base + "'" * v.deriv
    return f"{v.base}^({v.deriv})"


def _norm(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    out = []
    i = j = 0
    la, lb = len(a), len(b)
    while i < la and j < lb:
        va, ea = a[i]
        vb, eb = b[j]
        if va == vb:
            out.append((va, ea + eb))
            i += 1
            j += 1
        elif va < vb:
            out.append(a[i])
            i += 1
        else:
            out.append(b[j])
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return tuple(out)


def mono_div(a: Monomial, b: Monomial) -> Optional[Monomial]:
    """``a / b`` when ``b`` divides ``a``, else ``None``."""
    if not b:
        return a
    da = dict(a)
    for v, e in b:
        have = da.get(v, 0)
        if have < e:
            return None
        if have == e:
            del da[v]
        else:
            da[v] = have - e
    return tuple(sorted(da.items()))


def mono_degree(m: Monomial) -> int:
    return sum(e for _, e in m)


class DiffPoly:
    """Immutable sparse polynomial with rational coefficients."""

    __slots__ = ("terms", "_hash", "_derivs", "_lock")

    def __init__(self, terms: Optional[Mapping[Monomial, Rational]] = None):
        clean: Dict[Monomial, Rational] = {}
        if terms:
            for m, c in terms.items():
                if c != 0:
                    clean[m] = _norm(c)
        self.terms = clean
        self._hash = None
        self._derivs = None
        self._lock = None

    # construction -----------------------------------------------------
    @classmethod
    def _raw(cls, terms: Dict[Monomial, Rational]) -> "DiffPoly":
        p = cls.__new__(cls)
        p.terms = terms
        p._hash = None
        p._derivs = None
        p._lock = None
        return p

    @classmethod
    def const(cls, c) -> "DiffPoly":
        c = _norm(Fraction(c)) if not isinstance(c, int) else c
        return cls._raw({ONE: c} if c != 0 else {})

    @classmethod
    def var(cls, base: str, deriv: int = 0) -> "DiffPoly":
        return cls._raw({((JetVar(base, deriv), 1),): 1})

    @classmethod
    def from_jet(cls, v: JetVar) -> "DiffPoly":
        return cls._raw({((v, 1),): 1})

    # queries ----------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and ONE in self.terms)

    def constant_value(self):
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self.terms.get(ONE, 0)

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self) -> Iterator[Tuple[Monomial, Rational]]:
        return iter(self.terms.items())

    def variables(self) -> set:
        return {v for m in self.terms for v, _ in m}

    def total_degree(self) -> int:
        return max((mono_degree(m) for m in self.terms), default=0)

    def order_of(self, base: Optional[str] = None) -> Optional[int]:
        """Highest derivative order present, restricted to ``base`` if given.

        ``None`` stands for "absent".  The field generator ``t`` never counts.
        """
        best = None
        for m in self.terms:
            for v, _ in m:
                if v.base == FIELD_GENERATOR:
                    continue
                if base is not None and v.base != base:
                    continue
                if best is None or v.deriv > best:
                    best = v.deriv
        return best

    # arithmetic -------------------------------------------------------
    def __eq__(self, other) -> bool:
        if isinstance(other, DiffPoly):
            return self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == ({ONE: other} if other != 0 else {})
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __neg__(self) -> "DiffPoly":
        return DiffPoly._raw({m: -c for m, c in self.terms.items()})

    def __add__(self, other) -> "DiffPoly":
        other = _coerce(other)
        if other is NotImplemented:
            return other
        if len(other.terms) > len(self.terms):
            big, small = other.terms, self.terms
        else:
            big, small = self.terms, other.terms
        out = dict(big)
        for m, c in small.items():
            s = out.get(m, 0) + c
            if s == 0:
                out.pop(m, None)
            else:
                out[m] = _norm(s)
        return DiffPoly._raw(out)

    __radd__ = __add__

    def __sub__(self, other) -> "DiffPoly":
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "DiffPoly":
        return _coerce(other) - self

    def __mul__(self, other) -> "DiffPoly":
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return ZERO
            return DiffPoly._raw({m: _norm(c * other) for m, c in self.terms.items()})
        other = _coerce(other)
        if other is NotImplemented:
            return other
        out: Dict[Monomial, Rational] = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                m = mono_mul(ma, mb)
                s = out.get(m, 0) + ca * cb
                if s == 0:
                    out.pop(m, None)
                else:
                    out[m] = s
        return DiffPoly._raw({m: _norm(c) for m, c in out.items()})

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "DiffPoly":
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = ONE_POLY
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def scale(self, c) -> "DiffPoly":
        return self * c

    # calculus ---------------------------------------------------------
    def partial(self, v: JetVar) -> "DiffPoly":
        out: Dict[Monomial, Rational] = {}
        for m, c in self.terms.items():
            for idx, (w, e) in enumerate(m):
                if w == v:
                    if e == 1:
                        nm = m[:idx] + m[idx + 1:]
                    else:
                        nm = m[:idx] + ((w, e - 1),) + m[idx + 1:]
                    out[nm] = out.get(nm, 0) + c * e
                    break
        return DiffPoly._raw({m: _norm(c) for m, c in out.items() if c != 0})

    def total_derivative(self) -> "DiffPoly":
        out: Dict[Monomial, Rational] = {}
        for m, c in self.terms.items():
            for idx, (w, e) in enumerate(m):
                rest = m[:idx] + ((w, e - 1),) + m[idx + 1:] if e > 1 else m[:idx] + m[idx + 1:]
                if w.base == FIELD_GENERATOR:
                    nm = rest
                else:
                    nm = mono_mul(rest, ((w.next(), 1),))
                s = out.get(nm, 0) + c * e
                if s == 0:
                    out.pop(nm, None)
                else:
                    out[nm] = s
        return DiffPoly._raw({m: _norm(c) for m, c in out.items()})

    def derivative(self, l: int) -> "DiffPoly":
        """``l``-fold total derivative, memoized on this instance."""
        if l < 0:
            raise ValueError("derivative order must be non-negative")
        if l == 0:
            return self
        if self._derivs is None:
            self._lock = threading.Lock()
            self._derivs = [self]
        derivs = self._derivs
        if l < len(derivs):
            return derivs[l]
        with self._lock:
            while len(derivs) <= l:
                derivs.append(derivs[-1].total_derivative())
        return derivs[l]

    # substitution / evaluation ---------------------------------------
    def evaluate(self, point: Mapping[JetVar, Rational]):
        """Exact value at ``point``; raises ``KeyError`` on an uncovered variable."""
        total = 0
        for m, c in self.terms.items():
            val = c
            for v, e in m:
                val = val * point[v] ** e
            total += val
        return _norm(total) if isinstance(total, Fraction) else total

    def substitute(self, mapping: Mapping[JetVar, "DiffPoly"]) -> "DiffPoly":
        """Replace jet variables by polynomials; variables absent from ``mapping`` stay."""
        parts = []
        cache: Dict[Tuple[JetVar, int], DiffPoly] = {}
        for m, c in self.terms.items():
            term = DiffPoly._raw({ONE: c})
            kept: list = []
            for v, e in m:
                if v in mapping:
                    key = (v, e)
                    if key not in cache:
                        cache[key] = mapping[v] ** e
                    term = term * cache[key]
                else:
                    kept.append((v, e))
            if kept:
                term = term * DiffPoly._raw({tuple(kept): 1})
            parts.append(term)
        return poly_sum(parts)

    def rename(self, fn) -> "DiffPoly":
        """Apply ``fn: JetVar -> JetVar`` to every variable (must stay injective)."""
        out: Dict[Monomial, Rational] = {}
        for m, c in self.terms.items():
            nm: Dict[JetVar, int] = {}
            for v, e in m:
                w = fn(v)
                nm[w] = nm.get(w, 0) + e
            key = tuple(sorted(nm.items()))
            out[key] = out.get(key, 0) + c
        return DiffPoly(out)

    # division ---------------------------------------------------------
    def exact_div(self, other: "DiffPoly") -> "DiffPoly":
        """Quotient of an exact division; raises ``ArithmeticError`` otherwise."""
        if other.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        if other.is_constant():
            inv = Fraction(1) / Fraction(other.constant_value())
            return self * _norm(inv)
        if self.is_zero():
            return ZERO
        lead_m = max(other.terms, key=_lex_key)
        lead_c = other.terms[lead_m]
        rem = dict(self.terms)
        quot: Dict[Monomial, Rational] = {}
        while rem:
            m = max(rem, key=_lex_key)
            q_m = mono_div(m, lead_m)
            if q_m is None:
                raise ArithmeticError("polynomial division is not exact")
            q_c = Fraction(rem[m]) / lead_c
            quot[q_m] = q_c
            for om, oc in other.terms.items():
                pm = mono_mul(q_m, om)
                s = rem.get(pm, 0) - q_c * oc
                if s == 0:
                    rem.pop(pm, None)
                else:
                    rem[pm] = s
        return DiffPoly(quot)

    # text -------------------------------------------------------------
    def sorted_terms(self, order: Optional[Mapping[str, int]] = None):
        def key(item):
            m = item[0]
            return (-mono_degree(m), tuple((_var_rank(v, order), -e) for v, e in m))

        return sorted(self.terms.items(), key=key)

    def to_str(self, order: Optional[Mapping[str, int]] = None) -> str:
        if not self.terms:
            return "0"
        pieces = []
        for m, c in self.sorted_terms(order):
            c = Fraction(c)
            sign = "-" if c < 0 else "+"
            a = abs(c)
            factors = [_format_factor(v, e) for v, e in sorted(m, key=lambda ve: _var_rank(ve[0], order))]
            if not factors:
                body = str(a)
            elif a == 1:
                body = "*".join(factors)
            else:
                body = str(a) + "*" + "*".join(factors)
            pieces.append((sign, body))
        first_sign, first_body = pieces[0]
        out = ("-" if first_sign == "-" else "") + first_body
        for sign, body in pieces[1:]:
            out += f" {sign} {body}"
        return out

    def __str__(self) -> str:
        return self.to_str()

    def __repr__(self) -> str:
        return f"DiffPoly({self.to_str()!r})"


def _var_rank(v: JetVar, order: Optional[Mapping[str, int]]):
    if order is None:
        return (0, v.base, v.deriv)
    return (order.get(v.base, len(order)), v.base, v.deriv)


def _format_factor(v: JetVar, e: int) -> str:
    s = format_jet(v)
    return s if e == 1 else f"{s}^{e}"


def _lex_cmp(a: Monomial, b: Monomial) -> int:
    # graded lex order with the smallest variable most significant
    da, db = mono_degree(a), mono_degree(b)
    if da != db:
        return 1 if da > db else -1
    for (va, ea), (vb, eb) in zip(a, b):
        if va != vb:
            return 1 if va < vb else -1
        if ea != eb:
            return 1 if ea > eb else -1
    return (len(a) > len(b)) - (len(a) < len(b))


_lex_key = cmp_to_key(_lex_cmp)


def _coerce(x):
    if isinstance(x, DiffPoly):
        return x
    if isinstance(x, (int, Fraction)):
        return DiffPoly.const(x)
    return NotImplemented


ZERO = DiffPoly()
ONE_POLY = DiffPoly._raw({ONE: 1})


# Functional aliases mirroring the operation names used across the package.

def total_derivative(p: DiffPoly) -> DiffPoly:
    return p.total_derivative()


def iterated_derivative(p: DiffPoly, l: int) -> DiffPoly:
    return p.derivative(l)


def partial_derivative(p: DiffPoly, v: JetVar) -> DiffPoly:
    return p.partial(v)


def order_of(p: DiffPoly, base: Optional[str] = None) -> Optional[int]:
    return p.order_of(base)


def poly_sum(polys: Iterable[DiffPoly]) -> DiffPoly:
    out: Dict[Monomial, Rational] = {}
    for p in polys:
        for m, c in p.terms.items():
            s = out.get(m, 0) + c
            if s == 0:
                out.pop(m, None)
            else:
                out[m] = s
    return DiffPoly(out)
