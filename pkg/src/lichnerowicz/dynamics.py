"""Classical spinning geodesics: evolution, RK4 integration and Noether charges.

State variables are the position ``x``, the covariant momentum ``pi`` and the
frame components ``z`` of the complex tangent vector.  The first-order system
follows from the first-order action with ``pi = p - i omega z* z``::

    xdot^mu   = g^{mu nu} pi_nu
    pidot_mu  = Gamma^l_{mu nu} xdot^nu pi_l + i xdot^nu R_{mu nu m n} z*^m z^n
    zdot^m    = -xdot^mu omega_mu^m_n z^n + i R^m_n^r_s z^n z*_r z^s

Both supported backgrounds are locally symmetric, so the ``nabla R`` force
vanishes identically; :class:`FrameData` checks this when it is built.

The frame on hyperbolic space is ``e_mu^m = delta_mu^m / y``; on flat space it
is the identity with frame metric ``eta``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .exact import LaurentPoly
from .geometry import Geometry


class BoundaryCrossing(ValueError):
    pass


class FrameError(ArithmeticError):
    pass


# ---------------------------------------------------------------------------
# compiled Laurent tables


class _Table:
    """A tensor of Laurent polynomials evaluated quickly at float points."""

    def __init__(self, shape: tuple[int, ...], entries: dict):
        self.shape = shape
        exps = sorted({e for poly in entries.values() for e in poly.terms})
        self.exponents = np.array(exps, dtype=float).reshape(len(exps), -1) if exps else None
        index = {e: i for i, e in enumerate(exps)}
        rows, cols, vals = [], [], []
        flat_index = {}
        for pos, poly in entries.items():
            for e, c in poly.terms.items():
                r = flat_index.setdefault(pos, len(flat_index))
                rows.append(r)
                cols.append(index[e])
                vals.append(float(c))
        self.positions = list(flat_index)
        self.matrix = np.zeros((len(flat_index), len(exps)))
        for r, c, v in zip(rows, cols, vals):
            self.matrix[r, c] += v
        self._flat_pos = (
            np.ravel_multi_index(tuple(np.array(self.positions).T), shape)
            if self.positions
            else np.array([], dtype=int)
        )

    def __call__(self, x: np.ndarray) -> np.ndarray:
        out = np.zeros(int(np.prod(self.shape)))
        if self.exponents is not None:
            monos = np.prod(np.power(x[None, :], self.exponents), axis=1)
            out[self._flat_pos] = self.matrix @ monos
        return out.reshape(self.shape)


def _table(shape, fn) -> _Table:
    entries = {}
    for pos in itertools.product(*(range(s) for s in shape)):
        v = fn(*pos)
        if v:
            entries[pos] = v
    return _Table(shape, entries)


# ---------------------------------------------------------------------------
# frame data


@dataclass(frozen=True)
class FrameData:
    geometry: Geometry
    vielbein: tuple = field(repr=False)  # e[mu][m] = e_mu^m
    inverse: tuple = field(repr=False)  # E[m][mu] = E_m^mu
    omega: tuple = field(repr=False)  # omega[rho][m][n] = omega_rho^m_n
    frame_riemann: tuple = field(repr=False)  # all-lower R_{mnrs} in the frame

    @property
    def eta(self) -> np.ndarray:
        return np.diag(np.array(self.geometry.eta, dtype=float))


def _zero(n):
    return LaurentPoly(n)


def _const(n, v):
    return LaurentPoly.constant(n, v)


@lru_cache(maxsize=None)
def frame_data(geometry: Geometry) -> FrameData:
    """Closed-form frame, spin connection and frame curvature, checked symbolically."""
    n = geometry.dim
    if geometry.is_hyperbolic:
        inv_y = LaurentPoly.variable(n, n - 1, -1)
        y = LaurentPoly.variable(n, n - 1, 1)
        e = tuple(tuple(inv_y if a == b else _zero(n) for b in range(n)) for a in range(n))
        E = tuple(tuple(y if a == b else _zero(n) for b in range(n)) for a in range(n))
        last = n - 1

        def om(rho, m, k):
            # omega_rho^m_k = (delta_{rho k} delta_{m y} - delta_{rho m} delta_{k y}) / y
            val = int(rho == k and m == last) - int(rho == m and k == last)
            return inv_y * val if val else _zero(n)

        omega = tuple(
            tuple(tuple(om(r, m, k) for k in range(n)) for m in range(n)) for r in range(n)
        )
    else:
        e = tuple(tuple(_const(n, int(a == b)) for b in range(n)) for a in range(n))
        E = e
        omega = tuple(
            tuple(tuple(_zero(n) for _ in range(n)) for _ in range(n)) for _ in range(n)
        )
    _check_frame(geometry, e, E, omega)
    R = geometry.riemann
    frame_R = {}
    for m, k, r, s in itertools.product(range(n), repeat=4):
        acc = _zero(n)
        for a, b, c, d in itertools.product(range(n), repeat=4):
            if R[a][b][c][d] and E[m][a] and E[k][b] and E[r][c] and E[s][d]:
                acc = acc + R[a][b][c][d] * E[m][a] * E[k][b] * E[r][c] * E[s][d]
        frame_R[m, k, r, s] = acc
    _check_frame_curvature(geometry, e, E, omega, frame_R)
    if not geometry.check_locally_symmetric():
        raise FrameError("background is not locally symmetric")
    Rt = tuple(
        tuple(tuple(tuple(frame_R[m, k, r, s] for s in range(n)) for r in range(n)) for k in range(n))
        for m in range(n)
    )
    return FrameData(geometry, e, E, omega, Rt)


def _check_frame(geometry, e, E, omega) -> None:
    n = geometry.dim
    eta = geometry.eta
    G = geometry.christoffel
    for a, b in itertools.product(range(n), repeat=2):
        s = sum((e[a][m] * e[b][m] * eta[m] for m in range(n)), _zero(n))
        if s != geometry.metric[a][b]:
            raise FrameError("vielbein does not reproduce the metric")
        s = sum((e[a][m] * E[m][b] for m in range(n)), _zero(n))
        if s != int(a == b):
            raise FrameError("inverse vielbein check failed")
    # d_rho e_mu^m - Gamma^nu_{rho mu} e_nu^m + omega_rho^m_k e_mu^k = 0
    for rho, mu, m in itertools.product(range(n), repeat=3):
        val = e[mu][m].diff(rho)
        for nu in range(n):
            val = val - G[nu][rho][mu] * e[nu][m]
        for k in range(n):
            val = val + omega[rho][m][k] * e[mu][k]
        if val:
            raise FrameError(f"frame postulate fails at rho={rho}, mu={mu}, m={m}")
    for rho, m, k in itertools.product(range(n), repeat=3):
        if omega[rho][m][k] * eta[k] != -(omega[rho][k][m] * eta[m]):
            raise FrameError("spin connection is not eta-antisymmetric")


def _check_frame_curvature(geometry, e, E, omega, frame_R) -> None:
    """Curvature of omega must equal the Riemann tensor in frame components."""
    n = geometry.dim
    eta = geometry.eta
    for rho, sig, m, k in itertools.product(range(n), repeat=4):
        F = omega[sig][m][k].diff(rho) - omega[rho][m][k].diff(sig)
        for l in range(n):
            F = F + omega[rho][m][l] * omega[sig][l][k] - omega[sig][m][l] * omega[rho][l][k]
        # R^m_{k rho sig} with frame first pair
        target = _zero(n)
        for r, s in itertools.product(range(n), repeat=2):
            if frame_R[m, k, r, s]:
                target = target + frame_R[m, k, r, s] * e[rho][r] * e[sig][s] * eta[m]
        if F != target:
            raise FrameError("spin-connection curvature differs from the Riemann tensor")


# ---------------------------------------------------------------------------
# numerical model


@dataclass
class PhaseState:
    x: np.ndarray
    pi: np.ndarray
    z: np.ndarray
    time: float = 0.0

    def to_json(self) -> dict:
        return {
            "t": float(self.time),
            "x": [float(v) for v in self.x],
            "pi": [float(v) for v in self.pi],
            "z": [[float(v.real), float(v.imag)] for v in self.z],
        }

    @classmethod
    def make(cls, x, pi, z, time: float = 0.0) -> "PhaseState":
        return cls(
            np.asarray(x, dtype=float),
            np.asarray(pi, dtype=float),
            np.asarray(z, dtype=complex),
            float(time),
        )


class Model:
    """Compiled right-hand side and charges for one geometry."""

    def __init__(self, geometry: Geometry):
        self.geometry = geometry
        n = self.n = geometry.dim
        fd = frame_data(geometry)
        self.frame = fd
        self.eta = fd.eta
        self._ginv = _table((n, n), lambda a, b: geometry.inverse_metric[a][b])
        self._gamma = _table((n, n, n), lambda l, m, k: geometry.christoffel[l][m][k])
        self._E = _table((n, n), lambda m, mu: fd.inverse[m][mu])
        self._omega = _table((n, n, n), lambda r, m, k: fd.omega[r][m][k])
        R = geometry.riemann
        # R_{mu nu}{}_{m n} with the second pair in the frame
        self._R_mixed = _table(
            (n, n, n, n),
            lambda a, b, m, k: _frame_pair(R, fd.inverse, a, b, m, k, n),
        )
        self._R_frame = _table((n, n, n, n), lambda a, b, c, d: fd.frame_riemann[a][b][c][d])

    def check(self, state: PhaseState) -> None:
        if len(state.x) != self.n or len(state.pi) != self.n or len(state.z) != self.n:
            raise ValueError(f"state vectors must have {self.n} components")
        if self.geometry.is_hyperbolic and not state.x[-1] > 0:
            raise BoundaryCrossing(f"hyperbolic state left y > 0 (y = {state.x[-1]})")

    def rhs(self, x, pi, z):
        eta = self.eta
        ginv = self._ginv(x)
        xdot = ginv @ pi
        gam = self._gamma(x)
        pidot = np.einsum("lmv,v,l->m", gam, xdot, pi)
        if self.geometry.is_flat:
            return xdot, pidot, np.zeros_like(z)
        zb = z.conj()
        Rm = self._R_mixed(x)
        pidot = pidot + (1j * np.einsum("abmk,b,m,k->a", Rm, xdot, zb, z)).real
        # R^m_n^r_s z^n z*_r z^s = eta^{mm'} R_{m'nrs} z^n z*^r z^s
        spin = eta @ np.einsum("mnrs,n,r,s->m", self._R_frame(x), z, zb, z)
        om = self._omega(x)
        zdot = -np.einsum("u,umk,k->m", xdot, om, z) + 1j * spin
        return xdot, pidot, zdot

    def charges(self, state: PhaseState) -> dict:
        x, pi, z = state.x, state.pi, state.z
        eta = self.eta
        zb = z.conj()
        quartic = np.einsum("mnrs,m,n,r,s->", self._R_frame(x), zb, z, zb, z)
        H = 0.5 * pi @ self._ginv(x) @ pi - 0.5 * quartic
        f = {
            "f11": zb @ eta @ zb,
            "f12": zb @ eta @ z,
            "f22": z @ eta @ z,
        }
        E = self._E(x)
        zc = E.T @ z  # coordinate components z^mu = E_m^mu z^m
        v = {"v1": 1j * (zc.conj() @ pi), "v2": 1j * (zc @ pi)}
        return {"H": complex(H), **{k: complex(val) for k, val in f.items()}, **v}


def _frame_pair(R, E, a, b, m, k, n):
    acc = LaurentPoly(n)
    for c in range(n):
        if not E[m][c]:
            continue
        for d in range(n):
            if E[k][d] and R[a][b][c][d]:
                acc = acc + R[a][b][c][d] * E[m][c] * E[k][d]
    return acc


@lru_cache(maxsize=None)
def model(geometry: Geometry) -> Model:
    return Model(geometry)


def eval_rhs(state: PhaseState, geometry: Geometry):
    m = model(geometry)
    m.check(state)
    return m.rhs(state.x, state.pi, state.z)


def integrate_rk4(state0: PhaseState, dt: float, steps: int, geometry: Geometry) -> list[PhaseState]:
    if not dt > 0:
        raise ValueError("dt must be positive")
    if steps < 0:
        raise ValueError("steps must be non-negative")
    m = model(geometry)
    m.check(state0)
    hyper = geometry.is_hyperbolic
    x, pi, z = state0.x.copy(), state0.pi.copy(), state0.z.copy()
    t0 = state0.time
    out = [PhaseState(x.copy(), pi.copy(), z.copy(), t0)]

    def f(x, pi, z):
        if hyper and not x[-1] > 0:
            raise BoundaryCrossing(f"trajectory crossed y = 0 (y = {x[-1]})")
        return m.rhs(x, pi, z)

    for i in range(1, steps + 1):
        k1 = f(x, pi, z)
        k2 = f(x + 0.5 * dt * k1[0], pi + 0.5 * dt * k1[1], z + 0.5 * dt * k1[2])
        k3 = f(x + 0.5 * dt * k2[0], pi + 0.5 * dt * k2[1], z + 0.5 * dt * k2[2])
        k4 = f(x + dt * k3[0], pi + dt * k3[1], z + dt * k3[2])
        x = x + dt / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        pi = pi + dt / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        z = z + dt / 6 * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2])
        if hyper and not x[-1] > 0:
            raise BoundaryCrossing(f"trajectory crossed y = 0 at step {i}")
        out.append(PhaseState(x.copy(), pi.copy(), z.copy(), t0 + i * dt))
    return out


def noether_charges(state: PhaseState, geometry: Geometry) -> dict:
    """``H``, the sp(2) triple ``f11, f12, f22`` and the doublet ``v1, v2`` (complex)."""
    m = model(geometry)
    m.check(state)
    return m.charges(state)


def drift_report(trajectory: list[PhaseState], geometry: Geometry) -> dict:
    """Max over the trajectory of ``|Q(t) - Q(0)| / max(1, |Q(0)|)`` per charge."""
    if not trajectory:
        raise ValueError("empty trajectory")
    m = model(geometry)
    first = m.charges(trajectory[0])
    drift = {k: 0.0 for k in first}
    for st in trajectory[1:]:
        q = m.charges(st)
        for k, q0 in first.items():
            drift[k] = max(drift[k], abs(q[k] - q0) / max(1.0, abs(q0)))
    return drift


# ---------------------------------------------------------------------------
# independent routes used as oracles


def euler_lagrange_pidot(state: PhaseState, geometry: Geometry, h: float = 1e-6) -> np.ndarray:
    """``pidot`` from the canonical equations, with x-derivatives by central differences.

    Canonical momentum ``p = pi + i omega z* z``; ``pdot = -dH/dx`` at fixed
    ``(p, z, z*)``; ``pidot = pdot - d/dt (i omega z* z)``.  No covariant
    simplification is used, so this checks the closed form in :func:`eval_rhs`.
    """
    m = model(geometry)
    x, pi, z = state.x, state.pi, state.z
    zb = z.conj()
    n = m.n

    def spin_term(xx):
        return (1j * np.einsum("umk,m,k->u", m._omega(xx), m.eta @ zb, z)).real

    p = pi + spin_term(x)

    def ham(xx):
        pp = p - spin_term(xx)
        quartic = np.einsum("mnrs,m,n,r,s->", m._R_frame(xx), zb, z, zb, z).real
        return 0.5 * pp @ m._ginv(xx) @ pp - 0.5 * quartic

    pdot = np.zeros(n)
    for mu in range(n):
        dx = np.zeros(n)
        dx[mu] = h
        pdot[mu] = -(ham(x + dx) - ham(x - dx)) / (2 * h)
    xdot, _, zdot = m.rhs(x, pi, z)
    om = m._omega(x)
    dom = np.zeros_like(om)
    for mu in range(n):
        dx = np.zeros(n)
        dx[mu] = h
        dom += xdot[mu] * (m._omega(x + dx) - m._omega(x - dx)) / (2 * h)
    etazb = m.eta @ zb
    d_spin = (
        1j
        * (
            np.einsum("umk,m,k->u", dom, etazb, z)
            + np.einsum("umk,m,k->u", om, m.eta @ zdot.conj(), z)
            + np.einsum("umk,m,k->u", om, etazb, zdot)
        )
    ).real
    return pdot - d_spin


def coordinate_transport(state0: PhaseState, dt: float, steps: int, geometry: Geometry):
    """Integrate with coordinate components ``Z^mu = E_m^mu z^m`` and Christoffel transport.

    Returns the trajectory of frame components recovered as ``z = e Z``, for
    comparison with :func:`integrate_rk4`.
    """
    m = model(geometry)
    n = m.n
    e_tab = _table((n, n), lambda mu, a: m.frame.vielbein[mu][a])
    x, pi = state0.x.copy(), state0.pi.copy()
    Z = m._E(x).T @ state0.z

    def f(x, pi, Z):
        e = e_tab(x)
        z = e.T @ Z
        xdot, pidot, _ = m.rhs(x, pi, z)
        zb = z.conj()
        spin = m.eta @ np.einsum("mnrs,n,r,s->m", m._R_frame(x), z, zb, z)
        Zdot = -np.einsum("lvk,v,k->l", m._gamma(x), xdot, Z) + m._E(x).T @ (1j * spin)
        return xdot, pidot, Zdot

    out = [(x.copy(), (e_tab(x).T @ Z).copy())]
    for _ in range(steps):
        k1 = f(x, pi, Z)
        k2 = f(x + 0.5 * dt * k1[0], pi + 0.5 * dt * k1[1], Z + 0.5 * dt * k1[2])
        k3 = f(x + 0.5 * dt * k2[0], pi + 0.5 * dt * k2[1], Z + 0.5 * dt * k2[2])
        k4 = f(x + dt * k3[0], pi + dt * k3[1], Z + dt * k3[2])
        x = x + dt / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        pi = pi + dt / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        Z = Z + dt / 6 * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2])
        out.append((x.copy(), e_tab(x).T @ Z))
    return out
