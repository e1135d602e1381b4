import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oscint import closedform as cf
from oscint import oracle, specfun
from oscint.errors import DomainError
from oscint.oracle import GridSpec, PanelMesh, SampledCurve

SMALL = GridSpec(tau_start=-40.0, tau_end=4.0, n_points=12, sample_from=-4.0)


# ------------------------------------------------------------------- grids


def test_grid_validation():
    with pytest.raises(DomainError):
        GridSpec(tau_start=1.0, tau_end=0.0)
    with pytest.raises(DomainError):
        GridSpec(n_points=1)
    with pytest.raises(DomainError):
        GridSpec(rel_tol=0.0)
    with pytest.raises(DomainError):
        GridSpec(tau_start=-40, tau_end=10, sample_from=10)
    g = GridSpec(tau_start=-40, tau_end=10, n_points=6, sample_from=0)
    assert list(g.samples()) == [0, 2, 4, 6, 8, 10]


def test_sampled_curve_lookup():
    c = SampledCurve(np.array([0.0, 1.0]), np.array([3.0, 4.0]), np.zeros(2))
    assert c.at(1.0) == 4.0
    with pytest.raises(DomainError):
        c.at(0.5)
    with pytest.raises(DomainError):
        SampledCurve(np.zeros(2), np.zeros(3), np.zeros(2))


# ------------------------------------------------------- Laurent expansions


@pytest.mark.parametrize("k", [1, 2, 3])
def test_initial_state_matches_closed_form(k):
    y, err = oracle.cascade_initial_state(k, -40.0)
    assert err < 1e-12
    assert y[3 * (k - 1)] == pytest.approx(cf.i_k(k, -40.0).value, rel=1e-10, abs=1e-14)


def test_initial_state_needs_distance_from_crossing():
    with pytest.raises(DomainError):
        oracle.cascade_initial_state(1, -5.0)


@pytest.mark.parametrize("p", [complex(-1, -0.5), complex(0, -0.5), complex(-1, 0)])
def test_modsq_asymptotics(p):
    got = oracle.laurent_eval(oracle.modsq_asymptotics(p), -12.0)[0]
    ref = abs(specfun.pcf(p, cf.pcf_argument(-12.0))) ** 2
    assert got == pytest.approx(ref, rel=1e-12)


def test_modsq_asymptotics_rejects_other_indices():
    with pytest.raises(DomainError):
        oracle.modsq_asymptotics(complex(-0.5, 0))


@pytest.mark.parametrize("nu", [0.1, 0.5, 2.0])
def test_coherence_asymptotics(nu):
    got = oracle.laurent_eval(oracle.coherence_asymptotics(nu), -12.0)[0]
    z = cf.pcf_argument(-12.0)
    ref = specfun.pcf(complex(0, -nu), z) * specfun.pcf(complex(-1, -nu), z).conjugate()
    assert got == pytest.approx(ref, rel=1e-11)


# ---------------------------------------------------------------- ODE routes


def test_cascade_matches_closed_form_on_small_grid():
    for k, curve in enumerate(oracle.ode_cascade(3, SMALL), start=1):
        ref = np.array([cf.i_k(k, t).value for t in curve.tau])
        assert np.max(np.abs(curve.values - ref)) < 1e-9
        assert np.all(curve.err < 1e-7)


def test_cascade_converges_with_tolerance():
    loose = GridSpec(tau_start=-40, tau_end=4, n_points=5, rel_tol=1e-6, abs_tol=1e-8)
    tight = GridSpec(tau_start=-40, tau_end=4, n_points=5, rel_tol=1e-11, abs_tol=1e-13)
    ref = cf.i_k(2, 4.0).value
    e_loose = abs(oracle.ode_cascade(2, loose)[1].values[-1] - ref)
    e_tight = abs(oracle.ode_cascade(2, tight)[1].values[-1] - ref)
    assert e_tight < e_loose


def test_cascade_rejects_bad_order():
    with pytest.raises(DomainError):
        oracle.ode_cascade(0, SMALL)


def test_ode_j1_matches_closed_form():
    grid = GridSpec(tau_start=-40, tau_end=10, n_points=17, sample_from=-6)
    curve = oracle.ode_j1(grid)
    ref = np.array([cf.j1_closed(t) for t in curve.tau])
    assert np.max(np.abs(curve.values - ref)) < 1e-8


def test_j1_depends_on_window_logarithmically():
    # J₁ ~ −½ ln|τ| at −∞, so moving the start from −40 to −60 shifts J₁ by ½ ln(3/2)
    a = oracle.ode_j1(GridSpec(tau_start=-40, tau_end=60, n_points=2)).values[-1]
    b = oracle.ode_j1(GridSpec(tau_start=-60, tau_end=60, n_points=2)).values[-1]
    assert b - a == pytest.approx(0.5 * math.log(1.5), abs=1e-6)
    assert abs(b) <= 0.05


# ------------------------------------------------------------------- Bloch


@pytest.mark.parametrize("nu", [0.25, 1.0])
def test_bloch_matches_transition_probability(nu):
    curve = oracle.bloch_integrate(nu, SMALL)
    assert np.allclose(np.linalg.norm(curve.values, axis=1), 1.0, atol=1e-8)
    ref = np.array([1 - 2 * cf.plz(t, nu) for t in curve.tau])
    assert np.max(np.abs(curve.values[:, 2] - ref)) < 1e-6


def test_bloch_rejects_nonpositive_coupling():
    with pytest.raises(DomainError):
        oracle.bloch_integrate(0.0, SMALL)


def test_partial_sums_approach_population():
    nu = 0.05
    sums = oracle.perturbation_partial_sums(nu, 5, SMALL)
    uz = oracle.bloch_integrate(nu, SMALL).values[:, 2]
    errs = np.max(np.abs(sums - uz), axis=1)
    assert sums.shape == (6, 12)
    assert all(b < a for a, b in zip(errs, errs[1:]))


# ---------------------------------------------------------------- quadrature


def test_panel_mesh_is_exact_for_polynomials():
    mesh = PanelMesh(-2.0, 3.0)
    t = mesh.nodes
    assert mesh.integral(t ** 5) == pytest.approx((3 ** 6 - 2 ** 6) / 6, rel=1e-13)
    cum, total = mesh.cumulative(3 * t ** 2, start=1.0)
    assert np.allclose(cum, 1.0 + t ** 3 + 8, rtol=1e-12)
    assert total == pytest.approx(1.0 + 27 + 8, rel=1e-13)


@settings(max_examples=10, deadline=None)
@given(a=st.floats(-6, 0), w=st.floats(0.1, 5))
def test_panel_mesh_oscillatory_integral(a, w):
    b = a + w
    mesh = PanelMesh(a, b)
    got = mesh.integral(np.cos(mesh.nodes ** 2))
    ref = math.sqrt(math.pi / 2) * (specfun.fresnel(b * math.sqrt(2 / math.pi))[0]
                                    - specfun.fresnel(a * math.sqrt(2 / math.pi))[0])
    assert got == pytest.approx(ref, rel=1e-10, abs=1e-12)


@pytest.mark.parametrize("tau", [-2.0, 0.0, 2.0])
def test_quad_nested_first_order(tau):
    assert oracle.quad_nested(1, tau, 30) == pytest.approx(cf.i_k(1, tau).value, abs=1e-6)


def test_quad_nested_second_order_at_crossing():
    assert oracle.quad_nested(2, 0.0, 25) == pytest.approx(math.pi ** 2 / 128, abs=1e-6)


def test_quad_nested_domain():
    with pytest.raises(DomainError):
        oracle.quad_nested(3, 0.0, 25)
    with pytest.raises(DomainError):
        oracle.quad_nested(1, 0.0, 5)
    with pytest.raises(DomainError):
        oracle.quad_nested(1, -30.0, 25)


# ---------------------------------------------------------------- identities

PASSING = sorted(set(oracle.IDENTITIES) - {"initial_population", "cos_double_integral"})


@pytest.mark.parametrize("which", PASSING)
def test_identity_holds(which):
    report = oracle.verify_identity(which, [(-2.0, 0.5), (1.0, 1.0)], 1e-8)
    assert report.passed, report.results


def test_initial_population_is_a_limit():
    near = oracle.verify_identity("initial_population", [(-3.0, 0.5)], 1e-8)
    far = oracle.verify_identity("initial_population", [(-1e6, 0.5)], 1e-8)
    assert not near.passed and far.passed


def test_cos_kernel_identity_is_off_by_a_factor_of_i():
    tau, nu = 0.5, 0.7
    mesh, d0, dm, q = oracle._double_cos(tau, nu)
    lhs = (oracle._coherence_tail(nu, -1, -oracle.IDENTITY_CUTOFF)
           + mesh.integral(oracle._coherence_integrand(d0, dm, -1)))
    rhs = 2 * nu * math.sqrt(2) * q
    assert abs(lhs.real) < 1e-12
    assert lhs == pytest.approx(1j * rhs, rel=1e-9)


def test_identity_reports_bad_samples():
    report = oracle.verify_identity("conservation", [(0.0, -1.0), (0.0, 0.5)], 1e-8)
    assert [r.passed for r in report.results] == [False, True]
    assert report.results[0].error
    with pytest.raises(DomainError):
        oracle.verify_identity("no_such_identity", [(0.0, 1.0)], 1e-8)


# ------------------------------------------------------------------ spectrum


def test_spectrum_of_zero_is_zero():
    tau = np.linspace(-1, 1, 9)
    spec = oracle.fourier_spectrum(SampledCurve(tau, np.zeros(9), np.zeros(9)))
    assert np.all(spec.values == 0)
    assert np.all(np.diff(spec.tau) > 0)


def test_spectrum_needs_uniform_grid():
    tau = np.array([0.0, 1.0, 3.0])
    with pytest.raises(DomainError):
        oracle.fourier_spectrum(SampledCurve(tau, np.ones(3), np.zeros(3)))


def test_spectrum_of_gaussian():
    tau = np.linspace(-10, 10, 401)
    spec = oracle.fourier_spectrum(SampledCurve(tau, np.exp(-tau ** 2 / 2), np.zeros(401)))
    i = int(np.argmin(np.abs(spec.tau - 1.0)))
    assert spec.values[i] == pytest.approx(math.sqrt(2 * math.pi) * math.exp(-spec.tau[i] ** 2 / 2), rel=1e-6)


def test_pcf_modulus_spectrum_has_deep_minima():
    tau = np.linspace(-40, 40, 2048)
    f = np.array([abs(specfun.pcf(-1.0, cf.pcf_argument(t))) ** 2 for t in tau])
    spec = oracle.fourier_spectrum(SampledCurve(tau, f, np.zeros_like(f)))
    v = spec.values
    peak = v.max()
    minima = [i for i in range(1, len(v) - 1) if v[i] < v[i - 1] and v[i] < v[i + 1] and v[i] < 0.05 * peak]
    assert len(minima) >= 3
