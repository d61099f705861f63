import math

import numpy as np
import pytest

from lichnerowicz import dynamics as dyn
from lichnerowicz.geometry import flat, hyperbolic

F2, H2, H3 = flat(2), hyperbolic(2), hyperbolic(3)


def hand_rhs_hyperbolic(x, pi, z):
    """Unit H^n written out directly: g = y^-2 delta, frame e = delta / y."""
    n = len(x)
    y = x[-1]
    d = np.eye(n)
    last = d[n - 1]
    gamma = -(np.einsum("lm,v->lmv", d, last) + np.einsum("lv,m->lmv", d, last) - np.einsum("mv,l->lmv", d, last)) / y
    xdot = y**2 * pi
    Rmix = -(np.einsum("am,bk->abmk", d, d) - np.einsum("ak,bm->abmk", d, d)) / y**2
    Rframe = -(np.einsum("mr,ns->mnrs", d, d) - np.einsum("ms,nr->mnrs", d, d))
    omega = (np.einsum("rk,m->rmk", d, last) - np.einsum("rm,k->rmk", d, last)) / y
    zb = z.conj()
    pidot = np.einsum("lmv,v,l->m", gamma, xdot, pi) + (1j * np.einsum("abmk,b,m,k->a", Rmix, xdot, zb, z)).real
    zdot = -np.einsum("u,umk,k->m", xdot, omega, z) + 1j * np.einsum("mnrs,n,r,s->m", Rframe, z, zb, z)
    H = 0.5 * y**2 * pi @ pi - 0.5 * np.einsum("mnrs,m,n,r,s->", Rframe, zb, z, zb, z)
    return xdot, pidot, zdot, H


def test_flat_rhs():
    st = dyn.PhaseState.make([0.3, -1], [1, 2], [1 + 1j, 0.5])
    xdot, pidot, zdot = dyn.eval_rhs(st, F2)
    assert np.allclose(xdot, [1, 2]) and not pidot.any() and not zdot.any()


def test_h2_reference_point():
    st = dyn.PhaseState.make([0, 1], [1, 0], [1, 0])
    xdot, pidot, zdot = dyn.eval_rhs(st, H2)
    assert np.allclose(xdot, [1, 0])
    assert np.allclose(pidot, [0, -1])
    assert np.allclose(zdot, [0, -1])
    q = dyn.noether_charges(st, H2)
    assert q["H"] == pytest.approx(0.5)


@pytest.mark.parametrize("geo, x, pi, z", [
    (H2, [0.4, 1.7], [0.3, -1.1], [0.6 + 0.2j, -0.3 + 0.9j]),
    (H3, [0.1, -0.5, 0.8], [0.7, 0.2, -0.4], [0.5j, 1 - 0.3j, 0.2 + 0.4j]),
])
def test_matches_hand_contraction(geo, x, pi, z):
    st = dyn.PhaseState.make(x, pi, z)
    ref = hand_rhs_hyperbolic(st.x, st.pi, st.z)
    got = dyn.eval_rhs(st, geo)
    for a, b in zip(got, ref[:3]):
        assert np.allclose(a, b, rtol=1e-13, atol=1e-13)
    assert dyn.noether_charges(st, geo)["H"] == pytest.approx(ref[3], rel=1e-13)


def test_pure_geodesic_when_z_vanishes():
    st = dyn.PhaseState.make([0.2, 0.9], [0.5, -0.7], [0, 0])
    xdot, pidot, zdot = dyn.eval_rhs(st, H2)
    ref = hand_rhs_hyperbolic(st.x, st.pi, st.z)
    assert np.allclose(pidot, ref[1]) and not zdot.any()


def test_euler_lagrange_route():
    st = dyn.PhaseState.make([0.3, 1.4, 0.8], [0.2, -0.6, 0.5], [0.4 + 0.1j, -0.2j, 0.7])
    _, pidot, _ = dyn.eval_rhs(st, H3)
    assert np.allclose(dyn.euler_lagrange_pidot(st, H3), pidot, atol=1e-8)


def test_flat_straight_line():
    st = dyn.PhaseState.make([0, 0], [1, 0], [0.3 - 0.2j, 1])
    traj = dyn.integrate_rk4(st, 0.1, 10, F2)
    assert np.allclose(traj[-1].x, [1, 0], atol=1e-14)
    assert all(np.array_equal(s.z, st.z) for s in traj)


def test_flat_charges():
    q = dyn.noether_charges(dyn.PhaseState.make([0, 0], [1, 0], [0, 0]), F2)
    assert q["H"] == 0.5
    assert q["f11"] == q["f12"] == q["f22"] == q["v1"] == q["v2"] == 0
    q = dyn.noether_charges(dyn.PhaseState.make([5, -2], [0, 0], [1, 0]), F2)
    assert q["f11"] == q["f12"] == q["f22"] == 1


def test_flat_drift():
    st = dyn.PhaseState.make([0, 0], [1, -0.5], [1j, 0.5])
    drift = dyn.drift_report(dyn.integrate_rk4(st, 0.01, 500, F2), F2)
    assert max(drift.values()) <= 1e-12


def test_vertical_geodesic():
    st = dyn.PhaseState.make([0, 1], [0, 1], [0, 0])
    traj = dyn.integrate_rk4(st, 1e-3, 1000, H2)
    assert traj[-1].x[1] == pytest.approx(math.e, abs=1e-8)
    assert traj[-1].x[0] == 0


def test_frame_transport_oracle():
    st = dyn.PhaseState.make([0, 1.2], [0.8, 0.3], [0.6 + 0.1j, -0.2 + 0.5j])
    traj = dyn.integrate_rk4(st, 1e-3, 500, H2)
    other = dyn.coordinate_transport(st, 1e-3, 500, H2)
    assert np.allclose(traj[-1].z, other[-1][1], atol=1e-10)


def test_short_hyperbolic_drift_and_order():
    st = dyn.PhaseState.make([0, 1], [0.7, 0.4], [0.8, 0.3j])
    drifts = [dyn.drift_report(dyn.integrate_rk4(st, dt, round(2 / dt), H2), H2)["H"] for dt in (0.02, 0.01)]
    assert drifts[1] < 1e-8
    assert math.log2(drifts[0] / drifts[1]) > 3.5


def test_boundary_crossing():
    st = dyn.PhaseState.make([0, 1], [0, -3], [0, 0])
    with pytest.raises(dyn.BoundaryCrossing):
        dyn.integrate_rk4(st, 0.5, 10, H2)
    with pytest.raises(dyn.BoundaryCrossing):
        dyn.eval_rhs(dyn.PhaseState.make([0, -1], [0, 0], [0, 0]), H2)


def test_frame_data_checks():
    fd = dyn.frame_data(H3)
    assert np.array_equal(np.diag(fd.eta), [1, 1, 1])
    assert np.array_equal(np.diag(dyn.frame_data(flat(3, (2, 1))).eta), [1, 1, -1])
