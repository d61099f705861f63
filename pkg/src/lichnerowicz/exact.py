"""Exact rational arithmetic: sparse Laurent polynomials and rational functions of (Ncal, C).

Scalars are :class:`fractions.Fraction`.  :class:`LaurentPoly` is a sparse
dict-of-exponents polynomial over the rationals whose exponents may be
negative.  :class:`NCFunction` is a reduced fraction ``num/den`` with ``num``
in Q[Ncal, C, box] and ``den`` in Q[Ncal, C]; the gcd reduction is delegated
to sympy's sparse polynomial rings.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping

from sympy import QQ
from sympy.polys.rings import ring

Rational = Fraction

Exponent = tuple[int, ...]


def as_fraction(value) -> Fraction:
    """Coerce ints, strings like ``"3/2"``, Fractions and gmpy/sympy rationals."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, str)):
        return Fraction(value)
    num = getattr(value, "numerator", None)
    den = getattr(value, "denominator", None)
    if num is not None and den is not None:
        if callable(num):
            num, den = num(), den()
        return Fraction(int(num), int(den))
    raise TypeError(f"cannot convert {value!r} to an exact rational")


class LaurentPoly:
    """Sparse polynomial over Q in ``nvars`` variables with integer exponents.

    Zero coefficients are never stored.  Instances are treated as immutable.
    """

    __slots__ = ("nvars", "terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[Exponent, object] | None = None):
        self.nvars = nvars
        clean: dict[Exponent, Fraction] = {}
        if terms:
            for exp, coeff in terms.items():
                if len(exp) != nvars:
                    raise ValueError(f"exponent {exp} does not have length {nvars}")
                q = as_fraction(coeff)
                if q:
                    clean[tuple(exp)] = q
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, nvars: int, terms: dict[Exponent, Fraction]) -> "LaurentPoly":
        obj = cls.__new__(cls)
        obj.nvars = nvars
        obj.terms = terms
        obj._hash = None
        return obj

    @classmethod
    def constant(cls, nvars: int, value=1) -> "LaurentPoly":
        return cls(nvars, {(0,) * nvars: value})

    @classmethod
    def variable(cls, nvars: int, index: int, power: int = 1) -> "LaurentPoly":
        exp = [0] * nvars
        exp[index] = power
        return cls(nvars, {tuple(exp): 1})

    def _check(self, other: "LaurentPoly") -> None:
        if self.nvars != other.nvars:
            raise ValueError(
                f"mismatched variable lists: {self.nvars} vs {other.nvars} variables"
            )

    def _coerce(self, other) -> "LaurentPoly":
        if isinstance(other, LaurentPoly):
            self._check(other)
            return other
        return LaurentPoly.constant(self.nvars, as_fraction(other))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        if isinstance(other, LaurentPoly):
            return self.nvars == other.nvars and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == LaurentPoly.constant(self.nvars, other)
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self.terms.items())))
        return self._hash

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly._raw(self.nvars, {e: -c for e, c in self.terms.items()})

    def __add__(self, other) -> "LaurentPoly":
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return LaurentPoly._raw(self.nvars, out)

    __radd__ = __add__

    def __sub__(self, other) -> "LaurentPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "LaurentPoly":
        return self._coerce(other) - self

    def __mul__(self, other) -> "LaurentPoly":
        if not isinstance(other, LaurentPoly):
            q = as_fraction(other)
            if not q:
                return LaurentPoly._raw(self.nvars, {})
            return LaurentPoly._raw(self.nvars, {e: c * q for e, c in self.terms.items()})
        self._check(other)
        out: dict[Exponent, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = out.get(e, 0) + c1 * c2
                if v:
                    out[e] = v
                else:
                    out.pop(e, None)
        return LaurentPoly._raw(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, power: int) -> "LaurentPoly":
        if power < 0:
            if len(self.terms) != 1:
                raise ValueError("only monomials have Laurent inverses")
            (e, c), = self.terms.items()
            return LaurentPoly._raw(
                self.nvars, {tuple(-a * -power for a in e): Fraction(1) / c ** -power}
            )
        result = LaurentPoly.constant(self.nvars, 1)
        base = self
        while power:
            if power & 1:
                result = result * base
            base = base * base
            power >>= 1
        return result

    def diff(self, index: int) -> "LaurentPoly":
        out: dict[Exponent, Fraction] = {}
        for e, c in self.terms.items():
            k = e[index]
            if k:
                ne = list(e)
                ne[index] = k - 1
                out[tuple(ne)] = c * k
        return LaurentPoly._raw(self.nvars, out)

    def evaluate(self, point: Iterable) -> Fraction:
        pt = [as_fraction(p) for p in point]
        total = Fraction(0)
        for e, c in self.terms.items():
            term = c
            for x, k in zip(pt, e):
                if k:
                    if k < 0 and x == 0:
                        raise ZeroDivisionError("Laurent term evaluated at zero")
                    term *= x ** k
            total += term
        return total

    def min_exponent(self, index: int) -> int:
        return min((e[index] for e in self.terms), default=0)

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def canonical(self) -> "LaurentPoly":
        return LaurentPoly(self.nvars, self.terms)

    def format(self, names: list[str]) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, reverse=True):
            c = self.terms[e]
            mono = "*".join(
                n if k == 1 else f"{n}^{k}" for n, k in zip(names, e) if k
            )
            parts.append(_join_coeff(c, mono))
        return _join_terms(parts)

    def __repr__(self) -> str:
        return f"LaurentPoly({self.format([f'x{i + 1}' for i in range(self.nvars)])})"


def _join_coeff(c: Fraction, mono: str) -> str:
    if not mono:
        return str(c)
    if c == 1:
        return mono
    if c == -1:
        return "-" + mono
    return f"{c}*{mono}"


def _join_terms(parts: list[str]) -> str:
    out = parts[0]
    for p in parts[1:]:
        out += " - " + p[1:] if p.startswith("-") else " + " + p
    return out


def poly_arith(a: LaurentPoly, b: LaurentPoly, op: str) -> LaurentPoly:
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown operation {op!r}")


# ---------------------------------------------------------------------------
# rational functions of (Ncal, C) with a central polynomial symbol box

_RING, _NCAL, _CAS, _BOX = ring("Ncal,C,box", QQ)
GENERATOR_NAMES = ("Ncal", "C", "box")


class NCFunction:
    """Reduced rational function ``num(Ncal, C, box) / den(Ncal, C)``.

    The denominator is normalized so that its leading coefficient in lex
    order (Ncal > C) equals 1.
    """

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num, den=None):
        num = _to_ring(num)
        den = _RING.one if den is None else _to_ring(den)
        if not den:
            raise ZeroDivisionError("rational function with zero denominator")
        if den.degree(_BOX) > 0:
            raise ValueError("box may only appear in the numerator")
        if num:
            num, den = num.cancel(den)
        else:
            den = _RING.one
        lc = den.LC
        if lc != 1:
            num = num.quo_ground(lc)
            den = den.quo_ground(lc)
        self.num = num
        self.den = den
        self._hash = None

    # constructors ---------------------------------------------------------
    @classmethod
    def const(cls, value) -> "NCFunction":
        return cls(_RING.ground_new(QQ(*_ratio(as_fraction(value)))))

    @classmethod
    def ncal(cls) -> "NCFunction":
        return cls(_NCAL)

    @classmethod
    def cas(cls) -> "NCFunction":
        return cls(_CAS)

    @classmethod
    def box(cls) -> "NCFunction":
        return cls(_BOX)

    # arithmetic -------------------------------------------------------------
    def _coerce(self, other) -> "NCFunction":
        if isinstance(other, NCFunction):
            return other
        return NCFunction.const(other)

    def __add__(self, other) -> "NCFunction":
        other = self._coerce(other)
        if self.den == other.den:
            return NCFunction(self.num + other.num, self.den)
        return NCFunction(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self) -> "NCFunction":
        out = NCFunction.__new__(NCFunction)
        out.num, out.den, out._hash = -self.num, self.den, None
        return out

    def __sub__(self, other) -> "NCFunction":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "NCFunction":
        return self._coerce(other) - self

    def __mul__(self, other) -> "NCFunction":
        other = self._coerce(other)
        return NCFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self) -> "NCFunction":
        if not self.num:
            raise ZeroDivisionError("inverse of the zero function")
        return NCFunction(self.den, self.num)

    def __truediv__(self, other) -> "NCFunction":
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other) -> "NCFunction":
        return self._coerce(other) * self.inverse()

    def __pow__(self, power: int) -> "NCFunction":
        if power < 0:
            return self.inverse() ** -power
        return NCFunction(self.num ** power, self.den ** power)

    def __eq__(self, other) -> bool:
        if not isinstance(other, NCFunction):
            try:
                other = NCFunction.const(other)
            except TypeError:
                return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((tuple(sorted(self.num.items())), tuple(sorted(self.den.items()))))
        return self._hash

    def __bool__(self) -> bool:
        return bool(self.num)

    def is_zero(self) -> bool:
        return not self.num

    # structure ------------------------------------------------------------
    def shift(self, dn=0, dc=0) -> "NCFunction":
        """Return ``f(Ncal + dn, C + dc)``."""
        num, den = self.num, self.den
        if dn:
            step = _NCAL + _RING.ground_new(QQ(*_ratio(as_fraction(dn))))
            num, den = num.compose(_NCAL, step), den.compose(_NCAL, step)
        if dc:
            step = _CAS + _RING.ground_new(QQ(*_ratio(as_fraction(dc))))
            num, den = num.compose(_CAS, step), den.compose(_CAS, step)
        return NCFunction(num, den)

    def box_degree(self) -> int:
        return max(self.num.degree(_BOX), 0)

    def box_degrees(self) -> set[int]:
        return {m[2] for m in self.num.keys()}

    def has_box(self) -> bool:
        return self.num.degree(_BOX) > 0

    def box_coefficients(self) -> dict[int, "NCFunction"]:
        """Split into ``sum_j box^j * f_j(Ncal, C)``."""
        parts: dict[int, dict] = {}
        for (a, b, j), c in self.num.items():
            parts.setdefault(j, {})[(a, b, 0)] = c
        return {j: NCFunction(_RING.from_dict(t), self.den) for j, t in sorted(parts.items())}

    def is_constant(self) -> bool:
        return self.num.is_ground and self.den.is_ground

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return as_fraction(self.num.LC) / as_fraction(self.den.LC) if self.num else Fraction(0)

    def is_polynomial(self) -> bool:
        return self.den.is_ground

    def denominator_value(self, ncal, cas) -> Fraction:
        return _eval(self.den, as_fraction(ncal), as_fraction(cas), Fraction(0))

    def evaluate(self, ncal, cas, box=None) -> Fraction:
        """Evaluate at a spectral point; raises ZeroDivisionError on a pole."""
        if box is None and self.has_box():
            raise ValueError("box symbol present; supply a value for it")
        ncal, cas = as_fraction(ncal), as_fraction(cas)
        den = _eval(self.den, ncal, cas, Fraction(0))
        if not den:
            raise ZeroDivisionError(f"denominator {format_poly(self.den)} vanishes")
        return _eval(self.num, ncal, cas, as_fraction(box or 0)) / den

    def numerator_str(self) -> str:
        return format_poly(self.num)

    def denominator_str(self) -> str:
        return format_poly(self.den)

    def __str__(self) -> str:
        if self.den == _RING.one:
            return format_poly(self.num)
        return f"({format_poly(self.num)})/({format_poly(self.den)})"

    def __repr__(self) -> str:
        return f"NCFunction({self})"


def _ratio(q: Fraction) -> tuple[int, int]:
    return q.numerator, q.denominator


def _to_ring(value):
    if isinstance(value, NCFunction):
        if value.den != _RING.one:
            raise ValueError("expected a polynomial")
        return value.num
    if hasattr(value, "ring") and value.ring == _RING:
        return value
    return _RING.ground_new(QQ(*_ratio(as_fraction(value))))


def _eval(poly, ncal: Fraction, cas: Fraction, box: Fraction) -> Fraction:
    total = Fraction(0)
    for (a, b, j), c in poly.items():
        total += as_fraction(c) * ncal ** a * cas ** b * box ** j
    return total


def format_poly(poly) -> str:
    if not poly:
        return "0"
    parts = []
    for mono in sorted(poly.keys(), reverse=True):
        c = as_fraction(poly[mono])
        names = "*".join(
            n if k == 1 else f"{n}^{k}" for n, k in zip(GENERATOR_NAMES, mono) if k
        )
        parts.append(_join_coeff(c, names))
    return _join_terms(parts)


def ncfun_arith(a: NCFunction, b: NCFunction, op: str):
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "eq":
        return a == b
    raise ValueError(f"unknown operation {op!r}")


NCAL = NCFunction.ncal()
CAS = NCFunction.cas()
BOX = NCFunction.box()
ONE = NCFunction.const(1)
ZERO = NCFunction.const(0)
