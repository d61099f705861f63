"""Sections of the symmetric tensor bundle as polynomials in fiber variables.

A field ``sum psi_{m1..ms}(x) dx^{m1}...dx^{ms}`` is stored as a polynomial in
commuting fiber variables ``u1..un`` (standing for ``dx^m``) whose
coefficients are Laurent polynomials in the coordinates.  Internally a field
is one sparse dict keyed by ``u_exponents + x_exponents`` (length ``2n``).
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from typing import Iterable, Mapping

from .exact import LaurentPoly, as_fraction
from .geometry import Geometry, GeometryError, make_geometry

Key = tuple[int, ...]


class TensorSyntaxError(ValueError):
    def __init__(self, message: str, position: int | None = None):
        self.position = position
        where = f" at position {position}" if position is not None else ""
        super().__init__(f"{message}{where}")


class SymTensorField:
    __slots__ = ("geometry", "terms", "_hash")

    def __init__(self, geometry: Geometry, terms: Mapping[Key, object] | None = None):
        self.geometry = geometry
        n = geometry.dim
        clean: dict[Key, Fraction] = {}
        for key, c in (terms or {}).items():
            if len(key) != 2 * n:
                raise ValueError(f"term key {key} does not have length {2 * n}")
            q = as_fraction(c)
            if q:
                clean[tuple(key)] = clean.get(tuple(key), 0) + q
        self.terms = {k: v for k, v in clean.items() if v}
        _validate(geometry, self.terms)
        self._hash = None

    @classmethod
    def _raw(cls, geometry: Geometry, terms: dict[Key, Fraction]) -> "SymTensorField":
        obj = cls.__new__(cls)
        obj.geometry = geometry
        obj.terms = terms
        obj._hash = None
        return obj

    @classmethod
    def zero(cls, geometry: Geometry) -> "SymTensorField":
        return cls._raw(geometry, {})

    @classmethod
    def scalar(cls, geometry: Geometry, value=1) -> "SymTensorField":
        return cls(geometry, {(0,) * (2 * geometry.dim): value})

    @classmethod
    def from_components(
        cls, geometry: Geometry, components: Mapping[Key, LaurentPoly]
    ) -> "SymTensorField":
        """Build from ``{u_exponent: coefficient LaurentPoly}``."""
        terms: dict[Key, Fraction] = {}
        for u, coeff in components.items():
            for x, c in coeff.terms.items():
                terms[tuple(u) + tuple(x)] = c
        return cls(geometry, terms)

    # structure ------------------------------------------------------------
    @property
    def dim(self) -> int:
        return self.geometry.dim

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def ranks(self) -> list[int]:
        n = self.dim
        return sorted({sum(k[:n]) for k in self.terms})

    def homogeneous(self, rank: int) -> "SymTensorField":
        n = self.dim
        return SymTensorField._raw(
            self.geometry, {k: c for k, c in self.terms.items() if sum(k[:n]) == rank}
        )

    def by_rank(self) -> dict[int, "SymTensorField"]:
        n = self.dim
        parts: dict[int, dict] = {}
        for k, c in self.terms.items():
            parts.setdefault(sum(k[:n]), {})[k] = c
        return {r: SymTensorField._raw(self.geometry, t) for r, t in sorted(parts.items())}

    def components(self) -> dict[Key, LaurentPoly]:
        n = self.dim
        out: dict[Key, dict] = {}
        for k, c in self.terms.items():
            out.setdefault(k[:n], {})[k[n:]] = c
        return {u: LaurentPoly(n, t) for u, t in sorted(out.items())}

    def coefficient(self, u: Iterable[int]) -> LaurentPoly:
        u = tuple(u)
        n = self.dim
        return LaurentPoly(n, {k[n:]: c for k, c in self.terms.items() if k[:n] == u})

    # linear structure ------------------------------------------------------
    def _check(self, other: "SymTensorField") -> None:
        if self.geometry != other.geometry:
            raise GeometryError("fields live on different geometries")

    def __add__(self, other: "SymTensorField") -> "SymTensorField":
        self._check(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            v = out.get(k, 0) + c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return SymTensorField._raw(self.geometry, out)

    def __neg__(self) -> "SymTensorField":
        return SymTensorField._raw(self.geometry, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "SymTensorField") -> "SymTensorField":
        return self + (-other)

    def __mul__(self, scalar) -> "SymTensorField":
        q = as_fraction(scalar)
        if not q:
            return SymTensorField.zero(self.geometry)
        return SymTensorField._raw(self.geometry, {k: c * q for k, c in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, SymTensorField):
            return NotImplemented
        return self.geometry == other.geometry and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.geometry, frozenset(self.terms.items())))
        return self._hash

    def multiply_function(self, f: LaurentPoly) -> "SymTensorField":
        n = self.dim
        out: dict[Key, Fraction] = {}
        for k, c in self.terms.items():
            u, x = k[:n], k[n:]
            for e, d in f.terms.items():
                key = u + tuple(a + b for a, b in zip(x, e))
                v = out.get(key, 0) + c * d
                if v:
                    out[key] = v
                else:
                    out.pop(key, None)
        return SymTensorField(self.geometry, out)

    def evaluate(self, point) -> dict[Key, Fraction]:
        """u-polynomial with coefficients evaluated at ``point``."""
        self.geometry.check_point(point)
        n = self.dim
        pt = [as_fraction(p) for p in point]
        out: dict[Key, Fraction] = {}
        for k, c in self.terms.items():
            val = c
            for xv, e in zip(pt, k[n:]):
                if e:
                    val *= xv ** e
            v = out.get(k[:n], 0) + val
            if v:
                out[k[:n]] = v
            else:
                out.pop(k[:n], None)
        return out

    # text ------------------------------------------------------------------
    def to_text(self) -> str:
        if not self.terms:
            return "0"
        n = self.dim
        names = [f"u{i + 1}" for i in range(n)] + self.geometry.coordinate_names
        parts = []
        for k in sorted(self.terms, key=lambda k: (sum(k[:n]), tuple(-a for a in k))):
            c = self.terms[k]
            mono = "*".join(nm if e == 1 else f"{nm}^{e}" for nm, e in zip(names, k) if e)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        out = parts[0]
        for p in parts[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out

    __str__ = to_text

    def __repr__(self) -> str:
        return f"SymTensorField({self.geometry!r}, {self.to_text()})"

    # json ------------------------------------------------------------------
    def to_json(self) -> dict:
        geo = self.geometry
        comps = self.components()
        return {
            "dim": geo.dim,
            "signature": list(geo.signature),
            "geometry": geo.kind,
            "terms": [
                {
                    "u": list(u),
                    "coeff": [
                        {"x": list(x), "q": str(c)} for x, c in sorted(coeff.terms.items())
                    ],
                }
                for u, coeff in comps.items()
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "SymTensorField":
        dim = int(data["dim"])
        kind = data.get("geometry", "flat")
        sig = data.get("signature")
        geo = make_geometry(kind, dim, tuple(sig) if sig is not None else None)
        terms: dict[Key, Fraction] = {}
        for t in data.get("terms", []):
            u = tuple(int(a) for a in t["u"])
            if len(u) != dim:
                raise ValueError(f"fiber exponent {u} must have length {dim}")
            for mono in t.get("coeff", []):
                x = tuple(int(a) for a in mono["x"])
                if len(x) != dim:
                    raise ValueError(f"position exponent {x} must have length {dim}")
                key = u + x
                terms[key] = terms.get(key, 0) + Fraction(str(mono["q"]))
        return cls(geo, terms)


def _validate(geometry: Geometry, terms: Mapping[Key, Fraction]) -> None:
    n = geometry.dim
    for k in terms:
        if any(e < 0 for e in k[: 2 * n - 1]):
            raise GeometryError(f"negative exponent in term {k}: only y may carry negative powers")
        if k[-1] < 0 and not geometry.is_hyperbolic:
            raise GeometryError("Laurent (negative y) terms are only allowed on hyperbolic geometry")


# ---------------------------------------------------------------------------
# textual polynomial syntax

_TOKEN = re.compile(r"\s*(?:(\d+)|([ux])(\d+)|(y)|(\^)|(\*)|(\+)|(-)|(\()|(\))|(/))")


def _tokenize(text: str) -> list[tuple[str, object, int]]:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise TensorSyntaxError(f"unexpected character {text[pos]!r}", pos)
        start = m.start() + (len(m.group(0)) - len(m.group(0).lstrip()))
        if m.group(1):
            tokens.append(("int", int(m.group(1)), start))
        elif m.group(2):
            tokens.append(("var", (m.group(2), int(m.group(3))), start))
        elif m.group(4):
            tokens.append(("var", ("y", 0), start))
        else:
            tokens.append((m.group(0).strip(), None, start))
        pos = m.end()
    tokens.append(("end", None, len(text)))
    return tokens


class _TensorParser:
    def __init__(self, text: str, geometry: Geometry):
        self.tokens = _tokenize(text)
        self.i = 0
        self.geo = geometry
        self.n = geometry.dim

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind=None):
        tok = self.tokens[self.i]
        if kind is not None and tok[0] != kind:
            raise TensorSyntaxError(f"expected {kind!r}, found {tok[0]!r}", tok[2])
        self.i += 1
        return tok

    def parse(self) -> LaurentPoly:
        out = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise TensorSyntaxError(f"unexpected token {tok[0]!r}", tok[2])
        return out

    def expr(self) -> LaurentPoly:
        sign = 1
        if self.peek()[0] in ("+", "-"):
            sign = -1 if self.take()[0] == "-" else 1
        acc = self.term() * sign
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            t = self.term()
            acc = acc + t if op == "+" else acc - t
        return acc

    def term(self) -> LaurentPoly:
        acc = self.factor()
        while True:
            kind = self.peek()[0]
            if kind == "*":
                self.take()
                acc = acc * self.factor()
            elif kind in ("int", "var", "("):
                acc = acc * self.factor()
            else:
                return acc

    def factor(self) -> LaurentPoly:
        base = self.atom()
        if self.peek()[0] == "^":
            self.take()
            neg = False
            if self.peek()[0] == "-":
                self.take()
                neg = True
            tok = self.take("int")
            power = -tok[1] if neg else tok[1]
            if power < 0 and len(base.terms) != 1:
                raise TensorSyntaxError("negative powers apply to monomials only", tok[2])
            base = base ** power
        return base

    def atom(self) -> LaurentPoly:
        tok = self.take()
        kind, val, pos = tok
        N = 2 * self.n
        if kind == "int":
            q = Fraction(val)
            if self.peek()[0] == "/":
                self.take()
                den = self.take("int")[1]
                if den == 0:
                    raise TensorSyntaxError("zero denominator", pos)
                q = Fraction(val, den)
            return LaurentPoly.constant(N, q)
        if kind == "var":
            letter, idx = val
            if letter == "y":
                return LaurentPoly.variable(N, N - 1)
            if not 1 <= idx <= self.n:
                raise TensorSyntaxError(f"index {letter}{idx} out of range 1..{self.n}", pos)
            offset = 0 if letter == "u" else self.n
            return LaurentPoly.variable(N, offset + idx - 1)
        if kind == "(":
            inner = self.expr()
            self.take(")")
            return inner
        raise TensorSyntaxError(f"unexpected token {kind!r}", pos)


def make_tensor(geometry: Geometry, text: str) -> SymTensorField:
    """Parse ``u<k>``, ``x<k>``, ``y`` polynomial text into a field."""
    poly = _TensorParser(text, geometry).parse()
    return SymTensorField(geometry, poly.terms)


def load_tensor(source: str, geometry: Geometry | None = None) -> SymTensorField:
    """Accept either tensor JSON text or polynomial text (needs ``geometry``)."""
    stripped = source.strip()
    if stripped.startswith("{"):
        return SymTensorField.from_json(json.loads(stripped))
    if geometry is None:
        raise ValueError("polynomial text needs a geometry")
    return make_tensor(geometry, source)


# ---------------------------------------------------------------------------
# pointwise Fock pairing


def fock_pair(phi: SymTensorField, psi: SymTensorField, point) -> Fraction:
    """``sum_s s! phi^{m1..ms} psi_{m1..ms}`` at ``point`` (no volume factor)."""
    phi._check(psi)
    geo = phi.geometry
    ginv = geo.inverse_metric_at(point)
    a = phi.evaluate(point)
    b = psi.evaluate(point)
    n = geo.dim
    total = Fraction(0)
    for alpha, ca in a.items():
        # phi(D) psi with D^m = g^{mk} d/du^k, evaluated at u = 0
        poly = {beta: cb for beta, cb in b.items() if sum(beta) == sum(alpha)}
        for m in range(n):
            for _ in range(alpha[m]):
                nxt: dict[Key, Fraction] = {}
                for beta, c in poly.items():
                    for k in range(n):
                        gk = ginv[m][k]
                        if gk and beta[k]:
                            nb = list(beta)
                            nb[k] -= 1
                            nb = tuple(nb)
                            nxt[nb] = nxt.get(nb, 0) + c * gk * beta[k]
                poly = {k: v for k, v in nxt.items() if v}
        total += ca * poly.get((0,) * n, 0)
    return total


# ---------------------------------------------------------------------------
# seeded generation

_MASK = (1 << 64) - 1


class SplitMix64:
    """splitmix64 (Steele, Lea, Flood): 64-bit state, golden-gamma increment."""

    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def below(self, bound: int) -> int:
        return self.next() % bound

    def coefficient(self) -> int:
        v = self.below(18)
        return v - 9 if v < 9 else v - 8


def random_tensor(
    geometry: Geometry, seed: int, max_rank: int, max_coeff_degree: int
) -> SymTensorField:
    """Deterministic random field with every rank ``0..max_rank`` present.

    Per rank ``r``: draw ``1 + below(3)`` terms; each term places ``r`` fiber
    indices by ``below(n)``, draws a coefficient degree ``d = below(D + 1)``
    and places ``d`` coordinate indices by ``below(n)``; on hyperbolic
    geometry ``below(D + 1)`` is then subtracted from the y exponent; the
    coefficient is ``coefficient()`` in [-9, 9] without zero.  Ranks whose
    terms cancel are redrawn with further terms.
    """
    if max_rank < 0 or max_coeff_degree < 0:
        raise ValueError("bounds must be non-negative")
    rng = SplitMix64(seed)
    n = geometry.dim
    terms: dict[Key, Fraction] = {}
    for r in range(max_rank + 1):
        part: dict[Key, int] = {}
        count = 1 + rng.below(3)
        while True:
            for _ in range(count):
                u = [0] * n
                for _ in range(r):
                    u[rng.below(n)] += 1
                x = [0] * n
                for _ in range(rng.below(max_coeff_degree + 1)):
                    x[rng.below(n)] += 1
                if geometry.is_hyperbolic:
                    x[n - 1] -= rng.below(max_coeff_degree + 1)
                key = tuple(u) + tuple(x)
                part[key] = part.get(key, 0) + rng.coefficient()
            part = {k: v for k, v in part.items() if v}
            if part:
                break
            count = 1
        terms.update({k: Fraction(v) for k, v in part.items()})
    return SymTensorField(geometry, terms)

