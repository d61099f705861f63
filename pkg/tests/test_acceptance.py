"""Acceptance criteria 1-10, each run at its stated sampling and tolerance.

Three criteria cannot hold as stated and are marked ``xfail(strict=True)``:
they run in full and print FAIL, and pytest turns red if one ever starts to
pass.  Each has a companion test with the corrected statement.  The reasons
are recorded in the decisions ledger.
"""

import json
import math
from functools import lru_cache

import numpy as np
import pytest

from lichnerowicz import detour, dynamics
from lichnerowicz.exact import LaurentPoly
from lichnerowicz.geometry import flat, hyperbolic
from lichnerowicz.language import random_word
from lichnerowicz.rewrite import apply_expr, divt_gradt_rhs_text, normalize, pochhammer_report
from lichnerowicz.tensors import random_tensor
from lichnerowicz.verify import verify

SEED = 2024

SAMPLING_GEOS = (
    [flat(n) for n in (1, 2, 3, 4)]
    + [flat(n, (n - 1, 1)) for n in (1, 2, 3, 4)]
    + [hyperbolic(2), hyperbolic(3)]
)


def _summary(reports):
    trials = sum(r["trials"] for rep in reports for r in rep["results"])
    skipped = sum(r["skipped"] for rep in reports for r in rep["results"])
    return trials, skipped


def _failed(reports, keep=lambda r: True):
    return [
        (rep["config"]["geometry"], rep["config"]["dim"], rep["config"]["signature"], r["identity"])
        for rep in reports
        for r in rep["results"]
        if keep(r) and not r["pass"]
    ]


def _suite_criterion(suite):
    reports = [verify(g, [suite], seed=SEED, trials=50, max_rank=4, max_degree=3) for g in SAMPLING_GEOS]
    bad = _failed(reports)
    few = [r for rep in reports for r in rep["results"] if r["trials"] < 50]
    trials, _ = _summary(reports)
    return reports, not bad and not few, f"{trials} exact checks, failures={bad}"


def test_criterion_1_sp2(criterion):
    _, ok, detail = _suite_criterion("sp2")
    assert criterion("1", ok, detail)


def test_criterion_2_doublet_laplacian(criterion):
    _, ok, detail = _suite_criterion("doublet")
    assert criterion("2", ok, detail)


# -- criterion 3 --------------------------------------------------------------

_ALWAYS = ("[box,g] = 0", "[box,N] = 0", "[box,tr] = 0")
_HYP_LITERAL = _ALWAYS + (
    "[box,grad] = 0",
    "[box,div] = 0",
    "R## = c (as displayed)",
    "[div,grad] = box - 2c (as displayed)",
)


@lru_cache(maxsize=None)
def _box_reports():
    return {g: verify(g, ["box"], seed=SEED, trials=20, max_rank=4, max_degree=3) for g in SAMPLING_GEOS}


@pytest.mark.xfail(strict=True, reason="R## = c needs K = +1; the hyperbolic backend has K = -1 (see ledger)")
def test_criterion_3_constant_curvature_as_stated(criterion):
    reports = _box_reports()
    bad = []
    for g, rep in reports.items():
        names = _HYP_LITERAL if g.is_hyperbolic else _ALWAYS
        bad += _failed([rep], keep=lambda r: r["identity"] in names)
    assert criterion("3", not bad, f"failing: {sorted(set(b[-1] for b in bad))}")


def test_criterion_3_constant_curvature_with_sign(criterion):
    reports = _box_reports()
    bad = _failed(list(reports.values()), keep=lambda r: r["asserted"])
    assert criterion("3 (R## = K c, [div,grad] = box - 2K c)", not bad, f"failures={bad}")


def test_criterion_4_geometry_self_check(criterion):
    ok = True
    for n in (2, 3, 4):
        geo = hyperbolic(n)
        ok &= geo.constant_curvature_residual(-1) == []
        ok &= geo.scalar_curvature == LaurentPoly.constant(n, -n * (n - 1))
        ok &= geo.check_locally_symmetric()
        ok &= geo.check_riemann_symmetries()
    assert criterion("4", ok, "hyperbolic n = 2, 3, 4")


def test_criterion_5_depth(criterion):
    geos = [flat(2), flat(2, (1, 1)), flat(3), flat(3, (2, 1)), flat(4), flat(4, (3, 1)), hyperbolic(2), hyperbolic(3)]
    reports = [verify(g, ["depth", "inversion"], seed=SEED, trials=20, max_rank=4, max_degree=3) for g in geos]
    bad = _failed(reports)
    starved = [
        (rep["config"]["geometry"], rep["config"]["dim"], r["identity"])
        for rep in reports
        for r in rep["results"]
        if r["trials"] == 0
    ]
    trials, skipped = _summary(reports)
    ok = not bad and not starved
    assert criterion("5", ok, f"{trials} checks, {skipped} singular pieces skipped, failures={bad}")


# -- criterion 6 --------------------------------------------------------------


@lru_cache(maxsize=None)
def _fig3_reports():
    geos = [hyperbolic(2), hyperbolic(3), flat(2), flat(3), flat(3, (2, 1))]
    return [verify(g, ["fig3"], seed=SEED, trials=20, max_rank=4, max_degree=2) for g in geos]


def _fig3_logged(reports):
    for rep in reports:
        for r in rep["results"]:
            if len(r["skipped_points"]) != r["skipped"] or r["trials"] == 0:
                return False
    return True


@pytest.mark.xfail(strict=True, reason="displayed bracket box + 2(C+n/2-1)(C-n/2+1) holds for K = +1 only (see ledger)")
def test_criterion_6_fig3_as_stated(criterion):
    reports = _fig3_reports()

    def literal(rep):
        hyper = rep["config"]["geometry"] == "hyperbolic"

        def keep(r):
            if r["identity"].startswith("11 "):
                return not hyper  # flat variant: bracket reduced to box
            return True

        return keep

    bad = []
    for rep in reports:
        bad += _failed([rep], keep=literal(rep))
    _, skipped = _summary(reports)
    ok = not bad and _fig3_logged(reports)
    assert criterion("6", ok, f"{skipped} singular trials logged, failing: {sorted(set(b[-1] for b in bad))}")


def test_criterion_6_fig3_with_sign(criterion):
    reports = _fig3_reports()
    bad = _failed(reports, keep=lambda r: r["asserted"])
    trials, skipped = _summary(reports)
    ok = not bad and _fig3_logged(reports)
    assert criterion("6 (bracket box - 2K c)", ok, f"{trials} checks, {skipped} singular trials logged")


def test_criterion_7_rewriter_oracle(criterion):
    failures = []
    for geo in (flat(3), hyperbolic(3)):
        K = geo.sectional_curvature
        for i in range(100):
            word = random_word(SEED * 1000 + i, 5)
            psi = random_tensor(geo, SEED + i, 3, 2)
            if apply_expr(word, psi) != apply_expr(normalize(word, 3, K), psi):
                failures.append((str(geo), word))
    rhs = [n for n in (2, 3, 4, 5) if normalize("divt gradt", n) != normalize(divt_gradt_rhs_text(n), n)]
    ok = not failures and not rhs
    assert criterion("7", ok, f"200 words, failures={failures}, divt gradt mismatches at n={rhs}")


# -- criterion 8 --------------------------------------------------------------


def _pochhammer():
    return [pochhammer_report(m, n) for m in (1, 2, 3) for n in (2, 3, 4)]


@pytest.mark.xfail(strict=True, reason="ratio to the displayed product is constant at m = 1 only (see ledger)")
def test_criterion_8_pochhammer_as_stated(criterion):
    reps = _pochhammer()
    bad = [(r["m"], r["dim"], r["status"]) for r in reps if not (r["pure_function"] and r["ratio_constant"])]
    ratios = sorted({r["ratio"]["text"] for r in reps if r["m"] == 1})
    assert criterion("8", not bad, f"m=1 ratio {ratios}; non-constant at {bad}")


def test_criterion_8_pochhammer_corrected(criterion):
    reps = _pochhammer()
    ok = all(r["pure_function"] and r["corrected_agrees"] for r in reps)
    assert criterion("8 (4^m ((C-Ncal+1)/2)_m ((1-C-Ncal)/2)_m)", ok, "m = 1, 2, 3; n = 2, 3, 4")


# -- criterion 9 --------------------------------------------------------------


def _hyperbolic_state(n):
    x = np.zeros(n)
    x[-1] = 1.0
    return dynamics.PhaseState.make(
        x, np.linspace(0.3, 0.7, n), np.linspace(0.5, 1, n) + 1j * np.linspace(-0.4, 0.6, n)
    )


def test_criterion_9_classical(criterion):
    notes = []
    F = flat(3, (2, 1))
    st = dynamics.PhaseState.make([0, 0, 0], [1, -0.5, 0.25], [1, 0.5j, -0.3 + 0.2j])
    traj = dynamics.integrate_rk4(st, 1e-2, 1000, F)
    exact = np.array([1, -0.5, -0.25]) * 10  # xdot = eta^-1 pi with eta = diag(1, 1, -1)
    line = np.linalg.norm(traj[-1].x - exact) / np.linalg.norm(exact)
    z_drift = max(np.max(np.abs(s.z - st.z)) for s in traj)
    flat_drift = max(dynamics.drift_report(traj, F).values())
    ok = line <= 1e-12 and z_drift == 0 and flat_drift <= 1e-12
    notes.append(f"flat line {line:.1e}, charge drift {flat_drift:.1e}")
    for n in (2, 3):
        geo = hyperbolic(n)
        drift = dynamics.drift_report(dynamics.integrate_rk4(_hyperbolic_state(n), 1e-3, 10000, geo), geo)
        worst = max(drift.values())
        ok &= worst <= 1e-8
        notes.append(f"H{n} max drift {worst:.1e}")
    geo = hyperbolic(2)
    h = [
        dynamics.drift_report(dynamics.integrate_rk4(_hyperbolic_state(2), dt, round(10 / dt), geo), geo)["H"]
        for dt in (1e-2, 5e-3, 2.5e-3)
    ]
    orders = [math.log2(h[i] / h[i + 1]) for i in range(2)]
    ok &= min(orders) >= 3.8
    notes.append("orders " + ", ".join(f"{o:.2f}" for o in orders))
    assert criterion("9", ok, "; ".join(notes))


def test_criterion_10_detour(criterion):
    ok = True
    for geo in (flat(2), flat(3), flat(4), flat(2, (1, 1)), flat(3, (2, 1)), flat(4, (3, 1))):
        for seed in range(10):
            psi = random_tensor(geo, SEED + seed, 1, 3)
            ok &= all(detour.reduction_checks(psi).values())
    reports = [detour.explore_constraints(n, max_rank=3, seed=SEED, trials=4) for n in (2, 3, 4)]
    blob = json.loads(json.dumps(reports, sort_keys=True))
    ok &= all([r["rank"] for r in rep["ranks"]] == [0, 1, 2, 3] for rep in blob)
    assert criterion("10", ok, "reductions exact on n = 2, 3, 4; rank 2/3 report serialized")
