"""Geometric operators on symmetric tensor fields.

In fiber-variable form (``u^m`` for ``dx^m``, ``d_m`` for d/du^m)::

    N    = u^m d_m
    g    = u^m g_{mk} u^k
    tr   = g^{mk} d_m d_k
    grad = u^m nabla_m
    div  = g^{mk} d_m nabla_k
    nabla_k = d/dx^k - Gamma^l_{kr} u^r d_l
    R##  = R_m^v_r^s u^m d_v u^r d_s
    box  = Laplacian + R##
    c    = g tr - N (N + n - 2)

Every operator is exposed both as a plain function and as an
:class:`Operator` value that composes with ``*`` (right factor acts first),
adds, subtracts and scales.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable

from .exact import LaurentPoly, as_fraction
from .tensors import SymTensorField

Terms = dict


# ---------------------------------------------------------------------------
# raw polynomial helpers (keys are u-exponents followed by x-exponents)


def _acc(out: Terms, key, value) -> None:
    v = out.get(key, 0) + value
    if v:
        out[key] = v
    else:
        out.pop(key, None)


def _d_u(terms: Terms, i: int) -> Terms:
    out = {}
    for k, c in terms.items():
        e = k[i]
        if e:
            nk = k[:i] + (e - 1,) + k[i + 1 :]
            out[nk] = c * e
    return out


def _mul_u(terms: Terms, i: int) -> Terms:
    return {k[:i] + (k[i] + 1,) + k[i + 1 :]: c for k, c in terms.items()}


def _d_x(terms: Terms, n: int, i: int) -> Terms:
    j = n + i
    out = {}
    for k, c in terms.items():
        e = k[j]
        if e:
            out[k[:j] + (e - 1,) + k[j + 1 :]] = c * e
    return out


def _add_scaled(out: Terms, terms: Terms, n: int, poly: LaurentPoly | None = None, factor=1) -> None:
    """``out += factor * poly(x) * terms``."""
    if poly is None:
        for k, c in terms.items():
            _acc(out, k, c * factor)
        return
    for k, c in terms.items():
        u, x = k[:n], k[n:]
        for e, d in poly.terms.items():
            _acc(out, u + tuple(a + b for a, b in zip(x, e)), c * d * factor)


def _field(psi: SymTensorField, terms: Terms) -> SymTensorField:
    return SymTensorField._raw(psi.geometry, terms)


def _covariant(terms: Terms, geo, k: int) -> Terms:
    """Coordinate component ``nabla_k`` acting on a u-polynomial."""
    n = geo.dim
    out = dict(_d_x(terms, n, k))
    G = geo.christoffel
    for l in range(n):
        dl = None
        for r in range(n):
            gam = G[l][k][r]
            if gam:
                if dl is None:
                    dl = _d_u(terms, l)
                    if not dl:
                        break
                _add_scaled(out, _mul_u(dl, r), n, gam, -1)
    return out


# ---------------------------------------------------------------------------
# index operators


def apply_N(psi: SymTensorField) -> SymTensorField:
    n = psi.dim
    return _field(psi, {k: c * sum(k[:n]) for k, c in psi.terms.items() if sum(k[:n])})


def apply_g(psi: SymTensorField) -> SymTensorField:
    geo = psi.geometry
    n = geo.dim
    out: Terms = {}
    for a in range(n):
        for b in range(n):
            gab = geo.metric[a][b]
            if gab:
                _add_scaled(out, _mul_u(_mul_u(psi.terms, b), a), n, gab)
    return _field(psi, out)


def apply_tr(psi: SymTensorField) -> SymTensorField:
    geo = psi.geometry
    n = geo.dim
    out: Terms = {}
    for a in range(n):
        for b in range(n):
            gab = geo.inverse_metric[a][b]
            if gab:
                _add_scaled(out, _d_u(_d_u(psi.terms, b), a), n, gab)
    return _field(psi, out)


def apply_index_op(kind: str, psi: SymTensorField) -> SymTensorField:
    try:
        fn = {"N": apply_N, "g": apply_g, "tr": apply_tr}[kind]
    except KeyError:
        raise ValueError(f"unknown index operator {kind!r}") from None
    return fn(psi)


# ---------------------------------------------------------------------------
# derivative operators


def covariant_derivative(psi: SymTensorField, k: int) -> SymTensorField:
    return _field(psi, _covariant(psi.terms, psi.geometry, k))


def apply_grad(psi: SymTensorField) -> SymTensorField:
    geo = psi.geometry
    n = geo.dim
    out: Terms = {}
    for m in range(n):
        _add_scaled(out, _mul_u(_d_x(psi.terms, n, m), m), n)
    for l, m, k, gam in geo.christoffel_entries:
        dl = _d_u(psi.terms, l)
        if dl:
            _add_scaled(out, _mul_u(_mul_u(dl, k), m), n, gam, -1)
    return _field(psi, out)


def apply_div(psi: SymTensorField) -> SymTensorField:
    geo = psi.geometry
    n = geo.dim
    out: Terms = {}
    for k in range(n):
        cov = None
        for m in range(n):
            gmk = geo.inverse_metric[m][k]
            if gmk:
                if cov is None:
                    cov = _covariant(psi.terms, geo, k)
                _add_scaled(out, _d_u(cov, m), n, gmk)
    return _field(psi, out)


def apply_derivative_op(kind: str, psi: SymTensorField) -> SymTensorField:
    try:
        fn = {"grad": apply_grad, "div": apply_div}[kind]
    except KeyError:
        raise ValueError(f"unknown derivative operator {kind!r}") from None
    return fn(psi)


def bochner_laplacian(psi: SymTensorField) -> SymTensorField:
    geo = psi.geometry
    n = geo.dim
    first = [_covariant(psi.terms, geo, k) for k in range(n)]
    G = geo.christoffel
    out: Terms = {}
    for m in range(n):
        for k in range(n):
            gmk = geo.inverse_metric[m][k]
            if not gmk:
                continue
            second = dict(_covariant(first[k], geo, m))
            for l in range(n):
                if G[l][m][k]:
                    _add_scaled(second, first[l], n, G[l][m][k], -1)
            _add_scaled(out, second, n, gmk)
    return _field(psi, out)


def curvature_op(psi: SymTensorField) -> SymTensorField:
    geo = psi.geometry
    n = geo.dim
    out: Terms = {}
    for m, v, r, s, coeff in geo.curvature_operator_entries:
        t = _d_u(psi.terms, s)
        if not t:
            continue
        t = _d_u(_mul_u(t, r), v)
        if t:
            _add_scaled(out, _mul_u(t, m), n, coeff)
    return _field(psi, out)


def lichnerowicz_box(psi: SymTensorField) -> SymTensorField:
    return bochner_laplacian(psi) + curvature_op(psi)


def casimir_c(psi: SymTensorField) -> SymTensorField:
    n = psi.dim
    out = dict(apply_g(apply_tr(psi)).terms)
    for k, c in psi.terms.items():
        s = sum(k[:n])
        if s:
            _acc(out, k, -c * s * (s + n - 2))
    return _field(psi, out)


# ---------------------------------------------------------------------------
# composable operator values


class Operator:
    """A linear operator on fields; ``A * B`` applies ``B`` first."""

    def __init__(self, name: str, fn: Callable[[SymTensorField], SymTensorField]):
        self.name = name
        self.fn = fn

    def __call__(self, psi: SymTensorField) -> SymTensorField:
        return self.fn(psi)

    @staticmethod
    def scalar(value) -> "Operator":
        q = as_fraction(value)
        return Operator(str(q), lambda psi: psi * q)

    @staticmethod
    def _lift(other) -> "Operator":
        return other if isinstance(other, Operator) else Operator.scalar(other)

    def __mul__(self, other) -> "Operator":
        if isinstance(other, Operator):
            return Operator(f"{self.name} {other.name}", lambda psi: self(other(psi)))
        q = as_fraction(other)
        return Operator(f"{q} {self.name}", lambda psi: self(psi) * q)

    def __rmul__(self, other) -> "Operator":
        q = as_fraction(other)
        return Operator(f"{q} {self.name}", lambda psi: self(psi) * q)

    def __add__(self, other) -> "Operator":
        other = self._lift(other)
        return Operator(f"({self.name} + {other.name})", lambda psi: self(psi) + other(psi))

    __radd__ = __add__

    def __sub__(self, other) -> "Operator":
        other = self._lift(other)
        return Operator(f"({self.name} - {other.name})", lambda psi: self(psi) - other(psi))

    def __rsub__(self, other) -> "Operator":
        return self._lift(other) - self

    def __neg__(self) -> "Operator":
        return Operator(f"-{self.name}", lambda psi: -self(psi))

    def __pow__(self, power: int) -> "Operator":
        def fn(psi):
            for _ in range(power):
                psi = self(psi)
            return psi

        return Operator(f"{self.name}^{power}", fn)

    def __repr__(self) -> str:
        return f"Operator({self.name})"


def commutator(a: Operator, b: Operator) -> Operator:
    return Operator(f"[{a.name}, {b.name}]", lambda psi: a(b(psi)) - b(a(psi)))


def commutator_residual(
    op_a: Operator, op_b: Operator, expected: Operator, psi: SymTensorField
) -> SymTensorField:
    """``([A, B] - expected)(psi)``; zero certifies the identity on ``psi``."""
    return op_a(op_b(psi)) - op_b(op_a(psi)) - expected(psi)


def dimension_scalar(coeff: Fraction | int = 1) -> Operator:
    """Multiplication by ``coeff * n`` with ``n`` taken from the field."""
    return Operator(f"{coeff}n", lambda psi: psi * (as_fraction(coeff) * psi.dim))


IDENTITY = Operator("1", lambda psi: psi)
N = Operator("N", apply_N)
g = Operator("g", apply_g)
tr = Operator("tr", apply_tr)
grad = Operator("grad", apply_grad)
div = Operator("div", apply_div)
laplacian = Operator("Delta", bochner_laplacian)
curvature = Operator("R##", curvature_op)
box = Operator("box", lichnerowicz_box)
c = Operator("c", casimir_c)
