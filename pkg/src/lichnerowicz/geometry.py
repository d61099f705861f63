"""Background geometries: flat space of any signature and the hyperbolic upper half-space.

All metric data lives in Q[x1..x_{n-1}][y, 1/y] with ``y = x_n``.  Christoffel
symbols and the Riemann tensor are derived from the metric with the
Levi-Civita formulas, so the constant-curvature form of the hyperbolic
Riemann tensor is a checked fact rather than an input.

Curvature conventions::

    Gamma^l_{mn} = 1/2 g^{lk} (d_m g_{kn} + d_n g_{km} - d_k g_{mn})
    R^r_{s m n}  = d_m Gamma^r_{ns} - d_n Gamma^r_{ms}
                   + Gamma^r_{ml} Gamma^l_{ns} - Gamma^r_{nl} Gamma^l_{ms}
    R_{rsmn}     = g_{rk} R^k_{smn},   Ric_{sn} = R^m_{smn}

so the unit sphere has R_{rsmn} = g_{rm} g_{sn} - g_{rn} g_{sm}.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache

from .exact import LaurentPoly


class GeometryError(ValueError):
    pass


@dataclass(frozen=True)
class Geometry:
    dim: int
    kind: str = "flat"
    signature: tuple[int, int] = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.dim < 1:
            raise GeometryError("dimension must be a positive integer")
        if self.kind not in ("flat", "hyperbolic"):
            raise GeometryError(f"unknown geometry kind {self.kind!r}")
        sig = self.signature if self.signature is not None else (self.dim, 0)
        sig = (int(sig[0]), int(sig[1]))
        if sig[0] < 0 or sig[1] < 0 or sum(sig) != self.dim:
            raise GeometryError(f"signature {sig} does not match dimension {self.dim}")
        if self.kind == "hyperbolic" and sig != (self.dim, 0):
            raise GeometryError("hyperbolic geometry supports Euclidean signature only")
        object.__setattr__(self, "signature", sig)

    # basic data -------------------------------------------------------------
    @property
    def n(self) -> int:
        return self.dim

    @property
    def is_flat(self) -> bool:
        return self.kind == "flat"

    @property
    def is_hyperbolic(self) -> bool:
        return self.kind == "hyperbolic"

    @property
    def sectional_curvature(self) -> int:
        """0 for flat space, -1 for the unit hyperbolic space."""
        return 0 if self.is_flat else -1

    @property
    def coordinate_names(self) -> list[str]:
        names = [f"x{i + 1}" for i in range(self.dim)]
        if self.is_hyperbolic:
            names[-1] = "y"
        return names

    def _const(self, value) -> LaurentPoly:
        return LaurentPoly.constant(self.dim, value)

    def _zero(self) -> LaurentPoly:
        return LaurentPoly(self.dim)

    @cached_property
    def eta(self) -> tuple[int, ...]:
        p, q = self.signature
        return (1,) * p + (-1,) * q

    @cached_property
    def metric(self) -> tuple[tuple[LaurentPoly, ...], ...]:
        n = self.dim
        if self.is_flat:
            diag = [self._const(s) for s in self.eta]
        else:
            diag = [LaurentPoly.variable(n, n - 1, -2)] * n
        return tuple(
            tuple(diag[i] if i == j else self._zero() for j in range(n)) for i in range(n)
        )

    @cached_property
    def inverse_metric(self) -> tuple[tuple[LaurentPoly, ...], ...]:
        n = self.dim
        if self.is_flat:
            diag = [self._const(s) for s in self.eta]
        else:
            diag = [LaurentPoly.variable(n, n - 1, 2)] * n
        inv = tuple(
            tuple(diag[i] if i == j else self._zero() for j in range(n)) for i in range(n)
        )
        for i in range(n):
            for j in range(n):
                s = sum((self.metric[i][k] * inv[k][j] for k in range(n)), self._zero())
                if s != (1 if i == j else 0):
                    raise GeometryError("inverse metric check failed")
        return inv

    def metric_at(self, point) -> list[list[Fraction]]:
        return [[g.evaluate(point) for g in row] for row in self.metric]

    def inverse_metric_at(self, point) -> list[list[Fraction]]:
        self.check_point(point)
        return [[g.evaluate(point) for g in row] for row in self.inverse_metric]

    def check_point(self, point) -> None:
        if len(point) != self.dim:
            raise GeometryError(f"point must have {self.dim} coordinates")
        if self.is_hyperbolic and Fraction(point[-1]) <= 0:
            raise GeometryError("hyperbolic points must have y > 0")

    # derived tables --------------------------------------------------------
    @cached_property
    def christoffel(self) -> tuple:
        """``christoffel[l][m][k] = Gamma^l_{mk}``."""
        n = self.dim
        g, ginv = self.metric, self.inverse_metric
        dg = [[[g[a][b].diff(c) for c in range(n)] for b in range(n)] for a in range(n)]
        table = []
        for l in range(n):
            rows = []
            for m in range(n):
                row = []
                for k in range(n):
                    acc = self._zero()
                    for a in range(n):
                        if ginv[l][a]:
                            acc = acc + ginv[l][a] * (dg[a][k][m] + dg[a][m][k] - dg[m][k][a])
                    row.append(acc * Fraction(1, 2))
                rows.append(tuple(row))
            table.append(tuple(rows))
        return tuple(table)

    @cached_property
    def christoffel_entries(self) -> tuple:
        """Nonzero ``(l, m, k, Gamma^l_{mk})`` entries."""
        n = self.dim
        return tuple(
            (l, m, k, self.christoffel[l][m][k])
            for l in range(n)
            for m in range(n)
            for k in range(n)
            if self.christoffel[l][m][k]
        )

    @cached_property
    def riemann_up(self) -> tuple:
        """``riemann_up[r][s][m][k] = R^r_{smk}``."""
        n = self.dim
        G = self.christoffel
        out = {}
        for r, s, m, k in itertools.product(range(n), repeat=4):
            val = G[r][k][s].diff(m) - G[r][m][s].diff(k)
            for l in range(n):
                val = val + G[r][m][l] * G[l][k][s] - G[r][k][l] * G[l][m][s]
            out[r, s, m, k] = val
        return _nest(out, n, 4)

    @cached_property
    def riemann(self) -> tuple:
        """All-lower ``R_{rsmk}``."""
        n = self.dim
        g, Rup = self.metric, self.riemann_up
        out = {}
        for r, s, m, k in itertools.product(range(n), repeat=4):
            acc = self._zero()
            for a in range(n):
                if g[r][a]:
                    acc = acc + g[r][a] * Rup[a][s][m][k]
            out[r, s, m, k] = acc
        return _nest(out, n, 4)

    @cached_property
    def curvature_operator_entries(self) -> tuple:
        """Nonzero ``(m, v, r, s, R_m^v_r^s)`` with the 2nd and 4th slots raised."""
        n = self.dim
        if self.is_flat:
            return ()
        ginv, R = self.inverse_metric, self.riemann
        entries = []
        for m, v, r, s in itertools.product(range(n), repeat=4):
            acc = self._zero()
            for a in range(n):
                if not ginv[v][a]:
                    continue
                for b in range(n):
                    if ginv[s][b] and R[m][a][r][b]:
                        acc = acc + ginv[v][a] * ginv[s][b] * R[m][a][r][b]
            if acc:
                entries.append((m, v, r, s, acc))
        return tuple(entries)

    @cached_property
    def ricci(self) -> tuple:
        n = self.dim
        Rup = self.riemann_up
        return tuple(
            tuple(sum((Rup[m][s][m][k] for m in range(n)), self._zero()) for k in range(n))
            for s in range(n)
        )

    @cached_property
    def scalar_curvature(self) -> LaurentPoly:
        n = self.dim
        ginv, Ric = self.inverse_metric, self.ricci
        acc = self._zero()
        for a in range(n):
            for b in range(n):
                if ginv[a][b]:
                    acc = acc + ginv[a][b] * Ric[a][b]
        return acc

    # symbolic self-checks ----------------------------------------------------
    def check_riemann_symmetries(self) -> bool:
        n = self.dim
        R = self.riemann
        for a, b, c, d in itertools.product(range(n), repeat=4):
            if R[a][b][c][d] != -R[b][a][c][d]:
                return False
            if R[a][b][c][d] != -R[a][b][d][c]:
                return False
            if R[a][b][c][d] != R[c][d][a][b]:
                return False
            if R[a][b][c][d] + R[a][c][d][b] + R[a][d][b][c]:
                return False
        return True

    def constant_curvature_residual(self, curvature=None) -> list:
        """Entries of ``R_{abcd} - K (g_ac g_bd - g_ad g_bc)`` that fail to vanish."""
        n = self.dim
        K = self.sectional_curvature if curvature is None else curvature
        g, R = self.metric, self.riemann
        bad = []
        for a, b, c, d in itertools.product(range(n), repeat=4):
            expected = (g[a][c] * g[b][d] - g[a][d] * g[b][c]) * K
            if R[a][b][c][d] != expected:
                bad.append((a, b, c, d))
        return bad

    def check_constant_curvature(self) -> bool:
        return not self.constant_curvature_residual()

    def covariant_riemann_derivative(self) -> dict:
        """Nonzero components of nabla_e R_{abcd}."""
        n = self.dim
        G, R = self.christoffel, self.riemann
        out = {}
        for e, a, b, c, d in itertools.product(range(n), repeat=5):
            val = R[a][b][c][d].diff(e)
            for l in range(n):
                val = val - G[l][e][a] * R[l][b][c][d] - G[l][e][b] * R[a][l][c][d]
                val = val - G[l][e][c] * R[a][b][l][d] - G[l][e][d] * R[a][b][c][l]
            if val:
                out[e, a, b, c, d] = val
        return out

    def check_locally_symmetric(self) -> bool:
        return not self.covariant_riemann_derivative()

    def check_metricity(self) -> bool:
        n = self.dim
        G, g = self.christoffel, self.metric
        for c, a, b in itertools.product(range(n), repeat=3):
            val = g[a][b].diff(c)
            for l in range(n):
                val = val - G[l][c][a] * g[l][b] - G[l][c][b] * g[a][l]
            if val:
                return False
        return True

    def __repr__(self) -> str:
        if self.is_hyperbolic:
            return f"Geometry(hyperbolic, n={self.dim})"
        return f"Geometry(flat, n={self.dim}, signature={self.signature})"


def _nest(table: dict, n: int, depth: int):
    def build(prefix):
        if len(prefix) == depth:
            return table[prefix]
        return tuple(build(prefix + (i,)) for i in range(n))

    return build(())


@lru_cache(maxsize=None)
def flat(dim: int, signature: tuple[int, int] | None = None) -> Geometry:
    return Geometry(dim, "flat", signature)


@lru_cache(maxsize=None)
def hyperbolic(dim: int) -> Geometry:
    geo = Geometry(dim, "hyperbolic")
    if dim >= 2 and not geo.check_constant_curvature():
        raise GeometryError("derived hyperbolic Riemann tensor is not of constant curvature")
    return geo


def make_geometry(kind: str, dim: int, signature=None) -> Geometry:
    if kind == "flat":
        return flat(dim, tuple(signature) if signature is not None else None)
    if kind == "hyperbolic":
        if signature is not None and tuple(signature) != (dim, 0):
            raise GeometryError("hyperbolic geometry supports Euclidean signature only")
        return hyperbolic(dim)
    raise GeometryError(f"unknown geometry kind {kind!r}")
