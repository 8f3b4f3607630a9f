import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import close
from nilsolve import equations
from nilsolve.charsolve import CharBasis
from nilsolve.errors import InsufficientDepth, InsufficientMembers
from nilsolve.jets import MultiJet, multi_indices
from nilsolve.nilalg import element, make_rho_chain
from nilsolve.presets import draw_free, solve_preset
from nilsolve.solutions import analytic_family, build_xi_forms, builtin_analytic, exp_family
from nilsolve.verify import (
    CircleSpec,
    ResidualReport,
    SampleSpec,
    cauchy_integral_check,
    cauchy_riemann_check,
    characteristic_times_exp,
    default_fd_step,
    exp_zeta_jets,
    fd_cross_check,
    fd_derivative,
    identity_jets,
    jet_of_member,
    operator_on_exp,
    pde_residual,
    richardson,
    verify_family,
)


def family(preset, n, rng, kind="exp", params=None, branch="plus"):
    basis = solve_preset(preset, draw_free(preset, n, rng, params), n, branch, params)
    xf = build_xi_forms(basis)
    members = exp_family(xf, n - 1) if kind == "exp" else analytic_family(xf, n - 1, kind)
    return basis, xf, members


# jets ---------------------------------------------------------------

def test_multi_indices_order():
    assert multi_indices(2, 2) == ((0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2))


def test_jet_products_and_compose():
    h = MultiJet.linear(1, 3, 0.0, [1.0])
    one_plus = h + 1
    sq = one_plus * one_plus
    assert np.array_equal(sq.coeffs[:, 0], [1, 2, 1, 0])
    e = MultiJet.linear(1, 4, 0.5, [2.0]).compose(np.full(5, math.exp(0.5)))
    assert close([e.derivative((k,))[0] for k in range(5)], [math.exp(0.5) * 2**k for k in range(5)], 1e-15)


def test_jet_truncate_is_prefix():
    jet = MultiJet.linear(3, 4, [0.3], [1.0, 2.0, -1.0]).compose(np.ones(5))
    assert np.array_equal(jet.truncate(2).coeffs, jet.coeffs[:10])


def test_pde_residual_examples():
    ex = MultiJet.linear(3, 2, [0.0], [1, 0, 0]).compose(np.ones(3))
    assert pde_residual(equations.laplace3d(), ex)[0] == pytest.approx(1.0)
    harmonic = MultiJet.linear(3, 2, [0.0], [1, 0, 1j]).compose(np.ones(3))
    assert abs(pde_residual(equations.laplace3d(), harmonic)[0]) < 1e-15
    with pytest.raises(InsufficientDepth):
        pde_residual(equations.laplace3d(), ex.truncate(1))


def test_jet_of_member_matches_values(rng):
    _, xf, members = family("helmholtz", 4, rng)
    x = rng.uniform(-1, 1, (7, 2))
    for m in members:
        assert close(jet_of_member(m, None, x, 2).coeffs[0], m.evaluate(x), 1e-14)


# residuals ----------------------------------------------------------

def test_laplace_analytic_members_pass(rng):
    _, xf, members = family("laplace3d", 3, rng, builtin_analytic("sin"))
    report = verify_family(equations.laplace3d(), members, xf)
    assert report.passed and report.max_rel < 1e-8


@pytest.mark.parametrize("alpha,beta", [(1.0, 1.0), (2.0, 0.5)])
def test_hydro_exp_members_pass(rng, alpha, beta):
    params = {"alpha": alpha, "beta": beta}
    _, xf, members = family("hydro", 3, rng, params=params)
    report = verify_family(equations.hydro(alpha, beta), members, xf)
    assert report.passed and report.max_rel < 1e-8


def test_corrupted_member_fails(rng):
    _, xf, members = family("laplace3d", 3, rng, builtin_analytic("exp"))
    bad = members[2].with_terms({s: (q.scale(-1) if s == 2 else q) for s, q in members[2].terms.items()})
    report = verify_family(equations.laplace3d(), [bad], xf)
    assert not report.passed and report.max_rel > 1e-2


def test_report_round_trip_and_jobs_invariance(rng):
    _, xf, members = family("beam", 5, rng)
    a = verify_family(equations.beam(1.0), members, xf, SampleSpec(points=37, seed=4))
    b = verify_family(equations.beam(1.0), members, xf, SampleSpec(points=37, seed=4), jobs=4)
    assert a.to_json() == b.to_json()
    assert ResidualReport.from_json(a.to_json()).to_json() == a.to_json()


def test_flat_threshold(rng):
    _, xf, members = family("beam", 3, rng)
    report = verify_family(equations.beam(1.0), members, xf, threshold=0.0)
    assert not report.passed and all(m.threshold == 0.0 for m in report.members)


# finite differences --------------------------------------------------

def test_fd_derivative_polynomial_is_exact():
    f = lambda x: x[:, 0] ** 2 * x[:, 1]
    x = np.array([[0.3, -0.4]])
    assert fd_derivative(f, x, (2, 1), 1e-2)[0] == pytest.approx(2.0, abs=1e-9)


def test_richardson_improves():
    f = lambda x: np.exp(2 * x[:, 0])
    x = np.array([[0.1]])
    exact = 8 * math.exp(0.2)
    plain = abs(fd_derivative(f, x, (3,), 1e-2)[0] - exact)
    extrap = abs(richardson(f, x, (3,), 1e-2)[0] - exact)
    assert extrap < plain * 1e-3


@pytest.mark.parametrize("preset", ["laplace3d", "wave3d", "helmholtz"])
def test_fd_fixed_step_low_order(rng, preset):
    basis, xf, members = family(preset, 3, rng)
    x = rng.uniform(-1, 1, (5, xf.d))
    for m in members:
        assert fd_cross_check(basis.pde, m, x, step=1e-4, levels=1).agrees(1e-5)


@pytest.mark.parametrize("preset", ["hydro", "beam", "biharmonic"])
def test_fd_default_step_fourth_order(rng, preset):
    params = {"p": 3.0} if preset == "biharmonic" else None
    branch = "plus:plus" if preset == "biharmonic" else "plus"
    basis, xf, members = family(preset, 3, rng, params=params, branch=branch)
    x = rng.uniform(-1, 1, (5, 2))
    for m in members:
        cmp = fd_cross_check(basis.pde, m, x)
        assert cmp.agrees(1e-5) and cmp.fd_residual < 1e-4


def test_default_step_grows_with_order():
    assert default_fd_step(1) < default_fd_step(2) < default_fd_step(4)


# algebra-level checks --------------------------------------------------

@pytest.mark.parametrize("preset", ["laplace3d", "wave3d", "helmholtz"])
def test_cauchy_riemann_exp(rng, preset):
    basis, xf, members = family(preset, 5, rng)
    x = rng.uniform(-1, 1, (10, xf.d))
    assert cauchy_riemann_check(basis, exp_zeta_jets(members, x)) < 1e-9
    assert cauchy_riemann_check(basis, identity_jets(xf, x)) < 1e-15


def test_cauchy_riemann_detects_non_function(rng):
    basis, xf, _ = family("laplace3d", 3, rng)
    jets = identity_jets(xf, rng.uniform(-1, 1, (4, 3)))
    swapped = [jets[1], jets[0], jets[2]]
    assert cauchy_riemann_check(basis, swapped) > 1e-2


@given(st.integers(0, 2**32 - 1), st.integers(2, 6))
@settings(max_examples=20)
def test_operator_on_exp_equals_characteristic(seed, n):
    rng = np.random.default_rng(seed)
    pde = equations.biharmonic(0.3)
    table = make_rho_chain(n)
    vecs = tuple(element(table, rng.uniform(-1, 1, n) + 1j * rng.uniform(-1, 1, n)) for _ in range(2))
    basis = CharBasis(table, vecs, 0, pde)
    members = exp_family(build_xi_forms(basis), n - 1)
    x = rng.uniform(-1, 1, (3, 2))
    lhs = operator_on_exp(pde, members, x)
    rhs = characteristic_times_exp(pde, basis, members, x)
    assert close(lhs, rhs, 1e-9)


# contour integral ----------------------------------------------------

@pytest.mark.parametrize("preset", ["laplace3d", "helmholtz"])
def test_cauchy_integral_vanishes(rng, preset):
    _, xf, members = family(preset, 5, rng)
    loop = CircleSpec(tuple(rng.uniform(-0.5, 0.5, xf.d)), 0.8, (0, xf.d - 1))
    for n_index in range(5):
        assert abs(cauchy_integral_check(members, xf, loop, n_index)) < 1e-7


def test_cauchy_integral_of_nonexact_form_is_nonzero(rng):
    _, xf, members = family("laplace3d", 2, rng)
    loop = CircleSpec((0.0, 0.0, 0.0), 1.0, (0, 1))
    zero = members[0].with_terms({0: members[0].terms[0].scale(0)})
    # V_1 dxi alone is not closed
    assert abs(cauchy_integral_check([zero, members[1]], xf, loop, 1)) > 1e-3


def test_cauchy_integral_converges_spectrally(rng):
    _, xf, members = family("helmholtz", 3, rng)
    loop = CircleSpec((0.1, -0.2), 1.0)
    errs = [abs(cauchy_integral_check(members, xf, loop, 2, q)) for q in (4, 8, 16)]
    assert errs[0] / max(errs[1], 1e-14) >= 3.9
    assert errs[1] / max(errs[2], 1e-14) >= 3.9 or errs[1] < 1e-13


def test_cauchy_integral_insufficient_members(rng):
    _, xf, members = family("laplace3d", 3, rng)
    loop = CircleSpec((0.0, 0.0, 0.0))
    with pytest.raises(InsufficientMembers):
        cauchy_integral_check(members, xf, loop, 3)
    with pytest.raises(InsufficientMembers):
        cauchy_integral_check(members[:1], xf, loop, 1)


def test_circle_json():
    loop = CircleSpec((0.5, 0.0), 2.0, (0, 1), 64)
    assert CircleSpec.from_json(loop.to_json()) == loop
