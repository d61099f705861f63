"""The flat-space detour operator and empirical checks of its complex properties.

    G = box - grad div + 1/2 (grad^2 tr + g div^2) - 1/2 g (box + 1/2 grad div) tr

Which trace conditions on gauge parameters and fields turn the sequence
``grad -> G -> div`` into a complex is measured here rather than assumed.
"""

from __future__ import annotations

from fractions import Fraction

import sympy

from .depth import trace_decompose
from .geometry import flat
from .operators import apply_div, apply_g, apply_grad, apply_tr, lichnerowicz_box
from .tensors import SymTensorField, random_tensor

HALF = Fraction(1, 2)


class NonFlatGeometry(ValueError):
    pass


def _require_flat(psi: SymTensorField) -> None:
    if not psi.geometry.is_flat:
        raise NonFlatGeometry("the detour operator is implemented on flat space only")


def op_G(psi: SymTensorField) -> SymTensorField:
    _require_flat(psi)
    t = apply_tr(psi)
    d = apply_div(psi)
    out = lichnerowicz_box(psi) - apply_grad(d)
    out = out + (apply_grad(apply_grad(t)) + apply_g(apply_div(d))) * HALF
    return out - apply_g(lichnerowicz_box(t) + apply_grad(apply_div(t)) * HALF) * HALF


def gauge_invariance_check(xi: SymTensorField) -> SymTensorField:
    """``G(grad xi)``; zero certifies gauge invariance for this ``xi``."""
    return op_G(apply_grad(xi))


BIANCHI_CANDIDATES = ("div G", "(div - 1/2 grad tr) G")


def bianchi_check(psi: SymTensorField) -> dict[str, SymTensorField]:
    Gp = op_G(psi)
    d = apply_div(Gp)
    return {
        "div G": d,
        "(div - 1/2 grad tr) G": d - apply_grad(apply_tr(Gp)) * HALF,
    }


def trace_free_part(psi: SymTensorField) -> SymTensorField:
    out = SymTensorField.zero(psi.geometry)
    for comp in trace_decompose(psi):
        if comp.k == 0:
            out = out + comp.phi
    return out


def double_trace_free_part(psi: SymTensorField) -> SymTensorField:
    """Drop the depth >= 2 pieces, leaving a tensor with ``tr^2 = 0``."""
    out = SymTensorField.zero(psi.geometry)
    for comp in trace_decompose(psi):
        if comp.k < 2:
            out = out + comp.piece()
    return out


_RELATION_BASIS = ("div G", "grad tr G", "g div tr G")


def _relation_basis(psi: SymTensorField) -> list[SymTensorField]:
    Gp = op_G(psi)
    return [apply_div(Gp), apply_grad(apply_tr(Gp)), apply_g(apply_div(apply_tr(Gp)))]


def _nullspace(samples: list[list[SymTensorField]]) -> list[list[str]]:
    rows = []
    for vecs in samples:
        keys = set().union(*(v.terms.keys() for v in vecs))
        for k in sorted(keys):
            rows.append([sympy.Rational(v.terms.get(k, 0)) for v in vecs])
    if not rows:
        return [[str(int(i == j)) for j in range(len(_RELATION_BASIS))] for i in range(len(_RELATION_BASIS))]
    null = sympy.Matrix(rows).nullspace()
    out = []
    for vec in null:
        # scale to the first nonzero entry being 1
        lead = next(x for x in vec if x != 0)
        out.append([str(x / lead) for x in vec])
    return out


def _sample(geo, seed: int, rank: int, max_degree: int, draws: int = 4) -> SymTensorField:
    """Sum of the rank-``rank`` parts of several generated fields (single draws are sparse)."""
    out = SymTensorField.zero(geo)
    for j in range(draws):
        out = out + random_tensor(geo, seed + j, rank, max_degree).homogeneous(rank)
    return out


def _tally(results: list[SymTensorField]) -> dict:
    nonzero = [r for r in results if not r.is_zero()]
    return {
        "trials": len(results),
        "zero": len(results) - len(nonzero),
        "nonzero": len(nonzero),
        "max_terms": max((len(r.terms) for r in nonzero), default=0),
        "always_zero": not nonzero and bool(results),
    }


def explore_constraints(
    dim: int,
    max_rank: int = 3,
    seed: int = 0,
    trials: int = 4,
    signature=None,
    max_degree: int = 4,
) -> dict:
    """Residual counts per rank and constraint class, plus exact linear relations.

    Gauge parameters are tested unconstrained and trace-free; fields are
    tested unconstrained and with vanishing double trace.  The relation
    search returns the rational null space of ``(div G, grad tr G, g div tr G)``
    over all samples of a rank.
    """
    geo = flat(dim, tuple(signature) if signature is not None else None)
    ranks = []
    for r in range(max_rank + 1):
        gauge = {"unconstrained": [], "trace-free": []}
        bianchi = {name: [] for name in BIANCHI_CANDIDATES}
        bianchi_dtf = {name: [] for name in BIANCHI_CANDIDATES}
        tf_div = []
        relation_samples = []
        for t in range(trials):
            psi = _sample(geo, seed * 1000003 + r * 1009 + t * 17, r, max_degree)
            xi = psi
            gauge["unconstrained"].append(gauge_invariance_check(xi))
            gauge["trace-free"].append(gauge_invariance_check(trace_free_part(xi)))
            for name, res in bianchi_check(psi).items():
                bianchi[name].append(res)
            for name, res in bianchi_check(double_trace_free_part(psi)).items():
                bianchi_dtf[name].append(res)
            tf_div.append(trace_free_part(apply_div(op_G(psi))))
            relation_samples.append(_relation_basis(psi))
        ranks.append(
            {
                "rank": r,
                "gauge_xi_rank": r,
                "gauge": {k: _tally(v) for k, v in gauge.items()},
                "bianchi": {k: _tally(v) for k, v in bianchi.items()},
                "bianchi_double_trace_free": {k: _tally(v) for k, v in bianchi_dtf.items()},
                "trace_free_part_of_div_G": _tally(tf_div),
                "relations": {
                    "basis": list(_RELATION_BASIS),
                    "null_space": _nullspace(relation_samples),
                },
            }
        )
    return {
        "dim": dim,
        "signature": list(geo.signature),
        "seed": seed,
        "trials": trials,
        "max_rank": max_rank,
        "max_degree": max_degree,
        "ranks": ranks,
    }


def reduction_checks(psi: SymTensorField) -> dict[str, bool]:
    """Scalar and rank-1 reductions of ``G`` on the homogeneous parts of ``psi``."""
    out = {}
    scalar = psi.homogeneous(0)
    vector = psi.homogeneous(1)
    out["G = box on scalars"] = op_G(scalar) == lichnerowicz_box(scalar)
    out["G = box - grad div on rank 1"] = op_G(vector) == lichnerowicz_box(vector) - apply_grad(
        apply_div(vector)
    )
    out["div G = 0 on rank 1"] = apply_div(op_G(vector)).is_zero()
    out["G grad = 0 on scalars"] = gauge_invariance_check(scalar).is_zero()
    return out
