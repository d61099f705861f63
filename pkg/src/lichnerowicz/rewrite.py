"""Normal forms ``sum g^a gradt^b f(Ncal, C, box) divt^c tr^d`` and the rewriter.

A word is normalized right to left: every letter is multiplied onto an
existing normal form using the reordering rules below, so the result never
needs a separate sorting pass.  Functions of ``(Ncal, C)`` travel through the
generators with the shifts

    f g = g f(Ncal+2, C)      f gradt = gradt f(Ncal+1, C+1)
    divt f = f(Ncal+1, C+1) divt      tr f = f(Ncal+2, C) tr

and the swaps

    tr g      = (Ncal+C+1)(Ncal-C+1)       g tr = (Ncal+C-1)(Ncal-C-1)
    gradt g   = g gradt R            tr divt = R divt tr
    tr gradt  = S gradt tr           divt g  = g divt S
    divt gradt = A gradt divt + B [box + 2K(C+n/2-1)(C-n/2+1)]

Because of the ``g tr`` rule, ``g`` and ``tr`` only share a monomial when a
``gradt`` or ``divt`` sits between them.  Here ``R = (Ncal+C-1)/(Ncal+C+1)``,
``S = (Ncal+C+1)(Ncal+C-3)/(Ncal+C-1)^2`` and ``A``, ``B`` are as in
:data:`DIVT_GRADT_A` and :data:`DIVT_GRADT_B`.  ``K`` is the sectional
curvature of the background: 0 on flat space, -1 on the unit hyperbolic
space.  The default ``K = 1`` gives the bracket in its usual printed form;
pass the background's ``K`` before applying a normal form to tensors.

Raw ``grad`` and ``div`` are removed with the inversion formulas, ``N``, ``c``
and ``kappa`` with their definitions in terms of ``Ncal`` and ``C``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Union

from . import depth
from .exact import BOX, CAS, NCAL, NCFunction, format_poly
from .language import Compose, Expr, Gen, Inv, Num, Paren, Pow, Sum, parse, pretty_print
from .operators import (
    apply_div,
    apply_g,
    apply_grad,
    apply_N,
    apply_tr,
    casimir_c,
    lichnerowicz_box,
)
from .tensors import SymTensorField

ONE = NCFunction.const(1)

GT_G = (NCAL + CAS - 1) / (NCAL + CAS + 1)
TR_G = (NCAL + CAS + 1) * (NCAL - CAS + 1)
G_TR = (NCAL + CAS - 1) * (NCAL - CAS - 1)
TR_GT = (NCAL + CAS + 1) * (NCAL + CAS - 3) / (NCAL + CAS - 1) ** 2
DIVT_GRADT_A = CAS**2 * (NCAL + CAS + 1) * (NCAL + CAS - 3) ** 2 / (
    (CAS + 1) * (CAS - 1) * (NCAL + CAS - 1) ** 3
)
DIVT_GRADT_B = 2 * CAS**2 * (NCAL + CAS + 1) / ((CAS + 1) * (NCAL + CAS - 1) ** 2)

GRAD_FROM_GRADT = (NCAL + CAS - 3) / (2 * (CAS - 1))
GRAD_FROM_G_DIVT = (NCAL + CAS - 3) / (2 * CAS * (NCAL + CAS - 1))
DIV_FROM_DIVT = (NCAL + CAS - 3) / (2 * (CAS - 1))
DIV_FROM_GRADT_TR = (NCAL + CAS - 3) / (2 * CAS * (NCAL + CAS - 1))

Key = tuple  # (a, b, c, d): powers of g, gradt, divt, tr


def bracket(dim: int, curvature=1) -> NCFunction:
    """``box + 2K (C + n/2 - 1)(C - n/2 + 1)``; equals ``box - 2K c``."""
    h = Fraction(dim, 2)
    return BOX + 2 * Fraction(curvature) * (CAS + h - 1) * (CAS - h + 1)


def _add(out: dict, key: Key, coeff: NCFunction) -> None:
    if not coeff:
        return
    prev = out.get(key)
    total = coeff if prev is None else prev + coeff
    if total:
        out[key] = total
    else:
        out.pop(key, None)


def _merge(out: dict, terms: dict, scale: NCFunction | None = None) -> None:
    for key, coeff in terms.items():
        _add(out, key, coeff if scale is None else scale * coeff)


class Inhomogeneous:
    """Marker returned by :func:`ord_degree` for mixed-degree forms."""

    def __repr__(self) -> str:
        return "Inhomogeneous"

    def __eq__(self, other) -> bool:
        return isinstance(other, Inhomogeneous)

    def __hash__(self) -> int:
        return hash("Inhomogeneous")


INHOMOGENEOUS = Inhomogeneous()


class Rewriter:
    """Left multiplication of normal forms by single letters, at fixed ``n`` and ``K``."""

    def __init__(self, dim: int, curvature=1):
        if dim < 1:
            raise ValueError("dimension must be a positive integer")
        self.dim = dim
        self.curvature = Fraction(curvature)
        self.divt_gradt_B = DIVT_GRADT_B * bracket(dim, self.curvature)

    # letters --------------------------------------------------------------
    def fn(self, f: NCFunction, terms: dict) -> dict:
        out: dict = {}
        if not f:
            return out
        for (a, b, c, d), h in terms.items():
            shifted = f.shift(2 * a + b, b) if (a or b) else f
            _add(out, (a, b, c, d), shifted * h)
        return out

    def g(self, terms: dict) -> dict:
        out: dict = {}
        for (a, b, c, d), h in terms.items():
            if a == b == c == 0 and d:
                # g f tr = f(Ncal-2, C) g tr, and g tr is diagonal
                _add(out, (0, 0, 0, d - 1), h.shift(-2, 0) * G_TR)
            else:
                _add(out, (a + 1, b, c, d), h)
        return out

    def gradt(self, terms: dict) -> dict:
        out: dict = {}
        for (a, b, c, d), h in terms.items():
            if a == 0:
                _add(out, (0, b + 1, c, d), h)
            else:
                inner = self.fn(GT_G, {(a - 1, b, c, d): h})
                _merge(out, self.g(self.gradt(inner)))
        return out

    def tr(self, terms: dict) -> dict:
        out: dict = {}
        for (a, b, c, d), h in terms.items():
            if a:
                _merge(out, self.fn(TR_G, {(a - 1, b, c, d): h}))
            elif b:
                _merge(out, self.fn(TR_GT, self.gradt(self.tr({(0, b - 1, c, d): h}))))
            elif c:
                moved = self.fn(GT_G, self.divt(self.tr({(0, 0, c - 1, d): ONE})))
                _merge(out, self.fn(h.shift(2, 0), moved))
            else:
                _add(out, (0, 0, 0, d + 1), h.shift(2, 0))
        return out

    def divt(self, terms: dict) -> dict:
        out: dict = {}
        for (a, b, c, d), h in terms.items():
            if a:
                inner = self.fn(TR_GT, {(a - 1, b, c, d): h})
                _merge(out, self.g(self.divt(inner)))
            elif b:
                rest = {(0, b - 1, c, d): h}
                _merge(out, self.fn(DIVT_GRADT_A, self.gradt(self.divt(rest))))
                _merge(out, self.fn(self.divt_gradt_B, rest))
            else:
                _add(out, (0, 0, c + 1, d), h.shift(1, 1))
        return out

    def grad(self, terms: dict) -> dict:
        out = self.fn(GRAD_FROM_GRADT, self.gradt(terms))
        _merge(out, self.fn(GRAD_FROM_G_DIVT, self.g(self.divt(terms))))
        return out

    def div(self, terms: dict) -> dict:
        out = self.divt(self.fn(DIV_FROM_DIVT, terms))
        _merge(out, self.gradt(self.tr(self.fn(DIV_FROM_GRADT_TR, terms))))
        return out

    def function_of(self, name: str) -> NCFunction:
        half = Fraction(self.dim, 2)
        return {
            "Ncal": NCAL,
            "C": CAS,
            "N": NCAL - half,
            "kappa": (NCAL - CAS - 1) / 2,
            "c": (half - 1) ** 2 - CAS**2,
            "box": BOX,
        }[name]

    def letter(self, name: str, terms: dict) -> dict:
        if name in ("g", "gradt", "divt", "tr", "grad", "div"):
            return getattr(self, name)(terms)
        return self.fn(self.function_of(name), terms)

    # whole forms ----------------------------------------------------------
    def monomial_times(self, key: Key, coeff: NCFunction, terms: dict) -> dict:
        a, b, c, d = key
        for _ in range(d):
            terms = self.tr(terms)
        for _ in range(c):
            terms = self.divt(terms)
        terms = self.fn(coeff, terms)
        for _ in range(b):
            terms = self.gradt(terms)
        for _ in range(a):
            terms = self.g(terms)
        return terms

    def compose(self, left: dict, right: dict) -> dict:
        out: dict = {}
        for key, coeff in left.items():
            _merge(out, self.monomial_times(key, coeff, right))
        return out

    def to_terms(self, node: Expr) -> dict:
        if isinstance(node, Gen):
            return self.letter(node.name, {(0, 0, 0, 0): ONE})
        if isinstance(node, Num):
            return {(0, 0, 0, 0): NCFunction.const(node.value)} if node.value else {}
        if isinstance(node, Paren):
            return self.to_terms(node.inner)
        if isinstance(node, Sum):
            out: dict = {}
            for t, s in zip(node.terms, node.signs):
                _merge(out, self.to_terms(t), NCFunction.const(s))
            return out
        if isinstance(node, Compose):
            terms = self.to_terms(node.factors[-1])
            for f in reversed(node.factors[:-1]):
                if isinstance(f, Gen):
                    terms = self.letter(f.name, terms)
                else:
                    terms = self.compose(self.to_terms(f), terms)
            return terms
        if isinstance(node, Pow):
            base = self.to_terms(node.base)
            terms = {(0, 0, 0, 0): ONE}
            for _ in range(node.exponent):
                terms = self.compose(base, terms)
            return terms
        if isinstance(node, Inv):
            return {(0, 0, 0, 0): nc_polynomial(node.poly).inverse()}
        raise TypeError(node)


def nc_polynomial(node: Expr) -> NCFunction:
    """Evaluate an ``inv`` argument as a function of ``Ncal`` and ``C``."""
    if isinstance(node, Gen):
        if node.name == "Ncal":
            return NCAL
        if node.name == "C":
            return CAS
        raise ValueError(f"{node.name} is not allowed inside inv()")
    if isinstance(node, Num):
        return NCFunction.const(node.value)
    if isinstance(node, Paren):
        return nc_polynomial(node.inner)
    if isinstance(node, Sum):
        out = NCFunction.const(0)
        for t, s in zip(node.terms, node.signs):
            out = out + nc_polynomial(t) * s
        return out
    if isinstance(node, Compose):
        out = ONE
        for f in node.factors:
            out = out * nc_polynomial(f)
        return out
    if isinstance(node, Pow):
        return nc_polynomial(node.base) ** node.exponent
    raise ValueError("inv() accepts polynomials in Ncal and C only")


class NormalForm:
    """``sum g^a gradt^b coeff divt^c tr^d`` at fixed dimension and curvature."""

    __slots__ = ("dim", "curvature", "terms")

    def __init__(self, dim: int, terms: dict | None = None, curvature=1):
        self.dim = dim
        self.curvature = Fraction(curvature)
        self.terms = {k: v for k, v in (terms or {}).items() if v}

    @property
    def rewriter(self) -> Rewriter:
        return Rewriter(self.dim, self.curvature)

    def _check(self, other: "NormalForm") -> None:
        if (self.dim, self.curvature) != (other.dim, other.curvature):
            raise ValueError("normal forms belong to different (dim, curvature)")

    def __add__(self, other: "NormalForm") -> "NormalForm":
        self._check(other)
        out = dict(self.terms)
        _merge(out, other.terms)
        return NormalForm(self.dim, out, self.curvature)

    def __neg__(self) -> "NormalForm":
        return NormalForm(self.dim, {k: -v for k, v in self.terms.items()}, self.curvature)

    def __sub__(self, other: "NormalForm") -> "NormalForm":
        return self + (-other)

    def __mul__(self, other) -> "NormalForm":
        if isinstance(other, NormalForm):
            self._check(other)
            return NormalForm(
                self.dim, self.rewriter.compose(self.terms, other.terms), self.curvature
            )
        q = NCFunction.const(other)
        return NormalForm(self.dim, {k: v * q for k, v in self.terms.items()}, self.curvature)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, NormalForm):
            return NotImplemented
        return (self.dim, self.curvature) == (other.dim, other.curvature) and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.dim, self.curvature, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def monomials(self) -> list[tuple[Key, NCFunction]]:
        return sorted(self.terms.items(), key=lambda kv: kv[0])

    def is_pure_function(self) -> bool:
        return set(self.terms) <= {(0, 0, 0, 0)}

    def function(self) -> NCFunction:
        if not self.is_pure_function():
            raise ValueError("normal form is not a pure function of (Ncal, C, box)")
        return self.terms.get((0, 0, 0, 0), NCFunction.const(0))

    def to_json(self) -> list[dict]:
        return [
            {
                "g": a,
                "gradt": b,
                "divt": c,
                "tr": d,
                "coeff": {"num": coeff.numerator_str(), "den": coeff.denominator_str()},
            }
            for (a, b, c, d), coeff in self.monomials()
        ]

    def to_text(self) -> str:
        """Text in the operator grammar; parsing and normalizing it gives ``self`` back."""
        if not self.terms:
            return "0"
        parts = []
        for (a, b, c, d), coeff in self.monomials():
            factors = [_power("g", a), _power("gradt", b), f"({_grammar_poly(coeff.num)})"]
            if coeff.den != ONE.num:
                factors.append(f"inv({_grammar_poly(coeff.den)})")
            factors += [_power("divt", c), _power("tr", d)]
            parts.append(" ".join(f for f in factors if f))
        return " + ".join(parts)

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f"NormalForm(dim={self.dim}, K={self.curvature}, {self.to_text()})"


def _power(name: str, k: int) -> str:
    if k == 0:
        return ""
    return name if k == 1 else f"{name}^{k}"


def _grammar_poly(poly) -> str:
    """Print a ring element with grammar tokens only (no ``*``)."""
    if not poly:
        return "0"
    names = ("Ncal", "C", "box")
    pieces = []
    for mono in sorted(poly.keys(), reverse=True):
        q = Fraction(int(poly[mono].numerator), int(poly[mono].denominator))
        factors = [_power(n, k) for n, k in zip(names, mono) if k]
        mag = abs(q)
        body = " ".join(([str(mag)] if mag != 1 or not factors else []) + factors)
        pieces.append((q < 0, body))
    out = ("-" if pieces[0][0] else "") + pieces[0][1]
    for neg, body in pieces[1:]:
        out += f" {'-' if neg else '+'} {body}"
    return out


ExprLike = Union[str, Expr]


def _as_expr(expr: ExprLike) -> Expr:
    return parse(expr) if isinstance(expr, str) else expr


def normalize(expr: ExprLike, dim: int, curvature=1) -> NormalForm:
    """Normal form of an operator word in dimension ``dim``.

    ``curvature`` is the constant sectional curvature ``K`` entering the
    ``divt gradt`` bracket; use 0 for flat space and -1 for the unit
    hyperbolic space.
    """
    rw = Rewriter(dim, curvature)
    return NormalForm(dim, rw.to_terms(_as_expr(expr)), curvature)


def nf_equal(a: NormalForm, b: NormalForm) -> bool:
    if a.dim != b.dim:
        raise ValueError("normal forms of different dimension")
    return a == b


def ord_degree(nf: NormalForm):
    """Derivative count ``b + c + 2 * deg_box``; ``INHOMOGENEOUS`` if it varies."""
    degrees = set()
    for (a, b, c, d), coeff in nf.terms.items():
        for j in coeff.box_degrees():
            degrees.add(b + c + 2 * j)
    if not degrees:
        return 0
    return degrees.pop() if len(degrees) == 1 else INHOMOGENEOUS


# ---------------------------------------------------------------------------
# application to tensors


def _apply_gen(name: str, psi: SymTensorField) -> SymTensorField:
    if name == "g":
        return apply_g(psi)
    if name == "tr":
        return apply_tr(psi)
    if name == "N":
        return apply_N(psi)
    if name == "Ncal":
        return depth.apply_ncal(psi)
    if name == "C":
        return depth.apply_cas(psi)
    if name == "kappa":
        return depth.apply_kappa(psi)
    if name == "grad":
        return apply_grad(psi)
    if name == "div":
        return apply_div(psi)
    if name == "gradt":
        return depth.grad_tilde(psi)
    if name == "divt":
        return depth.div_tilde(psi)
    if name == "box":
        return lichnerowicz_box(psi)
    if name == "c":
        return casimir_c(psi)
    raise ValueError(f"unknown generator {name!r}")


def _apply_ast(node: Expr, psi: SymTensorField) -> SymTensorField:
    if isinstance(node, Gen):
        return _apply_gen(node.name, psi)
    if isinstance(node, Num):
        return psi * node.value
    if isinstance(node, Paren):
        return _apply_ast(node.inner, psi)
    if isinstance(node, Sum):
        out = SymTensorField.zero(psi.geometry)
        for t, s in zip(node.terms, node.signs):
            out = out + _apply_ast(t, psi) * s
        return out
    if isinstance(node, Compose):
        for f in reversed(node.factors):
            psi = _apply_ast(f, psi)
        return psi
    if isinstance(node, Pow):
        for _ in range(node.exponent):
            psi = _apply_ast(node.base, psi)
        return psi
    if isinstance(node, Inv):
        return depth.apply_NC_function(nc_polynomial(node.poly).inverse(), psi)
    raise TypeError(node)


def _apply_function(f: NCFunction, psi: SymTensorField) -> SymTensorField:
    out = SymTensorField.zero(psi.geometry)
    for j, part in f.box_coefficients().items():
        phi = psi
        for _ in range(j):
            phi = lichnerowicz_box(phi)
        out = out + depth.apply_NC_function(part, phi)
    return out


def _check_formal(f: NCFunction, pieces, c: int, d: int, n: int) -> None:
    """Reject a coefficient that is singular where ``divt^c tr^d`` sends any input piece.

    The image may vanish there, but the coefficient would still multiply it
    by infinity, so the formal identity is not trustworthy on that input.
    """
    if f.is_polynomial():
        return
    for s, k in pieces:
        if s >= c and k >= d:
            s2, k2 = s - c, k - d
            if not f.denominator_value(
                depth.ncal_eigenvalue(s2, k2, n), depth.cas_eigenvalue(s2, n)
            ):
                raise depth.DenominatorSingularOnSpectrum(s2, k2, n, str(f))


def apply_normal_form(nf: NormalForm, psi: SymTensorField) -> SymTensorField:
    if nf.dim != psi.dim:
        raise ValueError("normal form and tensor have different dimensions")
    pieces = [(s, k) for s, k, _ in depth.spectral_pieces(psi)]
    out = SymTensorField.zero(psi.geometry)
    for (a, b, c, d), coeff in nf.monomials():
        _check_formal(coeff, pieces, c, d, psi.dim)
        phi = psi
        for _ in range(d):
            phi = apply_tr(phi)
        for _ in range(c):
            phi = depth.div_tilde(phi)
        phi = _apply_function(coeff, phi)
        for _ in range(b):
            phi = depth.grad_tilde(phi)
        for _ in range(a):
            phi = apply_g(phi)
        out = out + phi
    return out


def apply_expr(expr, psi: SymTensorField, geometry=None) -> SymTensorField:
    """Apply a word (text or AST) or a normal form to ``psi``, right factor first."""
    if geometry is not None and geometry != psi.geometry:
        raise ValueError("tensor does not live on the requested geometry")
    if isinstance(expr, NormalForm):
        return apply_normal_form(expr, psi)
    return _apply_ast(_as_expr(expr), psi)


# ---------------------------------------------------------------------------
# Pochhammer identity for g^m tr^m


def pochhammer(x: NCFunction, m: int) -> NCFunction:
    out = ONE
    for j in range(m):
        out = out * (x + j)
    return out


def displayed_pochhammer(m: int) -> NCFunction:
    """``4^-m ((C-Ncal+1)/2)_m ((C+Ncal-1)/2)_m`` as usually displayed."""
    return (
        Fraction(1, 4**m)
        * pochhammer((CAS - NCAL + 1) / 2, m)
        * pochhammer((CAS + NCAL - 1) / 2, m)
    )


def corrected_pochhammer(m: int) -> NCFunction:
    """``4^m ((C-Ncal+1)/2)_m ((1-C-Ncal)/2)_m``, the exact spectral form."""
    return 4**m * pochhammer((CAS - NCAL + 1) / 2, m) * pochhammer((1 - CAS - NCAL) / 2, m)


def pochhammer_report(m: int, dim: int) -> dict:
    if m < 1:
        raise ValueError("m must be a positive integer")
    nf = normalize(f"g^{m} tr^{m}", dim)
    pure = nf.is_pure_function() and not nf.function().has_box()
    computed = nf.function() if nf.is_pure_function() else None
    displayed = displayed_pochhammer(m)
    corrected = corrected_pochhammer(m)
    report = {
        "m": m,
        "dim": dim,
        "pure_function": pure,
        "normal_form": nf.to_json(),
        "displayed_formula": _fn_json(displayed),
    }
    if computed is None:
        report.update(status="not_a_function", ratio=None, ratio_constant=False)
        return report
    ratio = computed / displayed
    if ratio == ONE:
        status = "agree"
    elif ratio.is_constant():
        status = "agree_up_to_constant"
    else:
        status = "disagree"
    report.update(
        computed=_fn_json(computed),
        ratio=_fn_json(ratio),
        ratio_constant=ratio.is_constant(),
        status=status,
        corrected_formula=_fn_json(corrected),
        corrected_agrees=computed == corrected,
    )
    return report


def _fn_json(f: NCFunction) -> dict:
    return {"num": format_poly(f.num), "den": format_poly(f.den), "text": str(f)}


def _signed(q: Fraction) -> str:
    if q == 0:
        return ""
    return f" + {q}" if q > 0 else f" - {-q}"


def divt_gradt_rhs_text(dim: int, curvature=1) -> str:
    """The ``divt gradt`` reordering right-hand side written in the operator grammar."""
    h = Fraction(dim, 2) - 1
    k = 2 * Fraction(curvature)
    br = "box"
    if k:
        br += f"{_signed(k)[:2]} {abs(k)} (C{_signed(h)}) (C{_signed(-h)})"
    return (
        "C^2 (Ncal + C + 1) (Ncal + C - 3)^2 inv((C + 1) (C - 1) (Ncal + C - 1)^3) gradt divt"
        f" + 2 C^2 (Ncal + C + 1) inv((C + 1) (Ncal + C - 1)^2) ({br})"
    )


__all__ = [
    "NormalForm",
    "Rewriter",
    "INHOMOGENEOUS",
    "Inhomogeneous",
    "apply_expr",
    "apply_normal_form",
    "bracket",
    "corrected_pochhammer",
    "displayed_pochhammer",
    "divt_gradt_rhs_text",
    "nf_equal",
    "normalize",
    "ord_degree",
    "pochhammer_report",
    "pretty_print",
]
