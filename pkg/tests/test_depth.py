from fractions import Fraction

import pytest

from lichnerowicz import depth
from lichnerowicz.exact import CAS, NCAL
from lichnerowicz.geometry import flat, hyperbolic
from lichnerowicz.operators import apply_div, apply_g, apply_grad, apply_tr, casimir_c
from lichnerowicz.tensors import make_tensor, random_tensor

F2, F3, F4, H2, H3 = flat(2), flat(3), flat(4), hyperbolic(2), hyperbolic(3)


def T(geo, text):
    return make_tensor(geo, text)


def test_decompose_u1_squared():
    comps = depth.trace_decompose(T(F2, "u1^2")).components
    assert [(c.s, c.k) for c in comps] == [(2, 0), (0, 1)]
    assert comps[0].phi == T(F2, "1/2*u1^2 - 1/2*u2^2")
    assert comps[1].phi == T(F2, "1/2")


def test_decompose_rank_one():
    comps = depth.trace_decompose(T(F3, "u1*x2")).components
    assert [(c.s, c.k, c.phi) for c in comps] == [(1, 0, T(F3, "u1*x2"))]


def test_decompose_pure_trace():
    comps = depth.trace_decompose(T(F3, "u1^2 + u2^2 + u3^2")).components
    assert [(c.s, c.k, c.phi) for c in comps] == [(0, 1, T(F3, "1"))]


def test_component_eigenvalues():
    (c,) = depth.trace_decompose(T(F3, "u1*x2")).components
    assert (c.N_eig, c.Ncal_eig, c.Ccal_eig, c.kappa_eig) == (1, Fraction(5, 2), Fraction(3, 2), 0)


@pytest.mark.parametrize("geo", [F2, F3, flat(3, (2, 1)), H2, H3])
def test_round_trip(geo):
    for seed in range(5):
        psi = random_tensor(geo, seed, 4, 2)
        dec = depth.trace_decompose(psi)
        assert dec.reassemble() == psi
        assert all(apply_tr(c.phi).is_zero() for c in dec.components)


def test_kappa_is_depth():
    g_field = T(F2, "u1^2 + u2^2")
    assert depth.apply_NC_function((NCAL - CAS - 1) / 2, g_field) == g_field


def test_inverse_spectrum():
    assert depth.apply_NC_function(1 / (NCAL + CAS - 1), T(F3, "u1")) == T(F3, "1/3*u1")


def test_singular_spectrum_raises():
    with pytest.raises(depth.DenominatorSingularOnSpectrum) as err:
        depth.apply_NC_function(1 / (NCAL + CAS - 1), T(F2, "1"))
    assert (err.value.s, err.value.k, err.value.n) == (0, 0, 2)


def test_casimir_root():
    assert depth.apply_cas(T(F3, "u1")) == T(F3, "3/2*u1")


@pytest.mark.parametrize("geo", [F3, H2, H3])
def test_casimir_root_squared(geo):
    psi = random_tensor(geo, 8, 4, 2)
    half = Fraction(geo.dim - 2, 2)
    assert depth.apply_cas(depth.apply_cas(psi)) == psi * half**2 - casimir_c(psi)


def test_grad_tilde_examples():
    out = depth.grad_tilde(T(F3, "x1*u1"))
    assert out == T(F3, "u1^2 - 1/3*(u1^2 + u2^2 + u3^2)")
    assert apply_tr(out).is_zero()
    assert depth.grad_tilde(T(F2, "x1")) == T(F2, "u1")


def test_div_tilde_examples():
    assert depth.div_tilde(T(F3, "u1^2")).is_zero()
    assert depth.div_tilde(T(F3, "x1*u1")) == T(F3, "1")
    assert depth.div_tilde(T(F3, "x1*(u1^2 + u2^2 + u3^2)")).is_zero()


@pytest.mark.parametrize("geo", [F3, H3])
def test_tilde_operators_commute_with_depth(geo):
    psi = random_tensor(geo, 4, 3, 2)
    k = depth.apply_kappa
    assert k(depth.grad_tilde(psi)) == depth.grad_tilde(k(psi))
    assert k(depth.div_tilde(psi)) == depth.div_tilde(k(psi))


def test_reconstruct_examples():
    for text in ("x1*u1", "x2"):
        psi = T(F3, text)
        assert depth.reconstruct_grad(psi) == apply_grad(psi)
    assert depth.reconstruct_grad(T(F3, "x2")) == T(F3, "u2")


@pytest.mark.parametrize("geo", [F3, flat(3, (2, 1)), H3])
def test_reconstruct_random(geo):
    for seed in range(4):
        psi = random_tensor(geo, seed, 3, 2)
        assert depth.reconstruct_grad(psi) == apply_grad(psi)
        assert depth.reconstruct_div(psi) == apply_div(psi)


def test_reconstruct_singular_n4():
    g_field = apply_g(T(F4, "x1"))
    with pytest.raises(depth.DenominatorSingularOnSpectrum) as err:
        depth.reconstruct_div(g_field)
    assert (err.value.s, err.value.k, err.value.n) == (0, 1, 4)


def test_reconstruct_never_silently_wrong_n2():
    # whole tensors in n = 2 either reconstruct exactly or raise
    for geo in (F2, flat(2, (1, 1)), H2):
        for seed in range(6):
            psi = random_tensor(geo, seed, 4, 2)
            for fn, ref in ((depth.reconstruct_grad, apply_grad), (depth.reconstruct_div, apply_div)):
                try:
                    out = fn(psi)
                except depth.DenominatorSingularOnSpectrum:
                    continue
                assert out == ref(psi)
