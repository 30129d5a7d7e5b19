import numpy as np
import pytest

from magpauli import numcore as nc
from magpauli.field import (ExpField, FluxReport, SingularFieldError, eval_b, eval_c,
                            eval_phi, flux_disk, magnetic_coeffs, shift_polytope,
                            tropical_indicator)

from oracles import direct_exp_sum


def fig2b_field():
    # e^x + e^y + e^{-x-y}
    return ExpField.from_real_exponents([(1.0, 1.0, 0.0), (1.0, 0.0, 1.0), (1.0, -1.0, -1.0)])


def fig6_field():
    return ExpField.cosine(1.0, 0.4, 0.4)


def test_eval_c_matches_direct_sum():
    f = fig6_field()
    terms = [(t.kappa, t.p, t.k) for t in f.terms]
    rng = np.random.default_rng(0)
    for z in rng.uniform(-2, 2, 20) + 1j * rng.uniform(-2, 2, 20):
        assert abs(eval_c(f, z) - direct_exp_sum(terms, complex(z))) < 1e-12


def test_cosine_field_is_advertised_function():
    f = fig6_field()
    rng = np.random.default_rng(1)
    for z in rng.uniform(-4, 4, 30) + 1j * rng.uniform(-4, 4, 30):
        want = 1 + 0.4 * np.cos(z.real) + 0.4 * np.cos(z.imag)
        got = eval_c(f, complex(z))
        assert abs(got - want) < 1e-12
    assert f.is_real()
    assert f.is_periodic()


def test_constant_field_trivial():
    f = ExpField.constant(1.0)
    assert abs(eval_c(f, 0.3 + 0.2j) - 1.0) < 1e-15
    assert abs(eval_b(f, 0.3 + 0.2j)) < 1e-15


def test_b_at_origin_cosine_field():
    # c = 1 + 0.4 cos x + 0.4 cos y: B(0) = (1/2)(-0.8/1.8) = -2/9
    f = fig6_field()
    assert abs(eval_b(f, 0.0) - (-2.0 / 9.0)) < 1e-12


def test_b_matches_grid_laplacian_of_log():
    f = fig6_field()
    grid = nc.PeriodicGrid(2 * np.pi, 2 * np.pi, 128, 128)
    Z = grid.zmesh()
    logc = nc.ScalarSamples(grid, np.log(f.value(Z).real).astype(complex))
    lap = nc.grid_laplacian(logc, "spectral").values.real
    b = eval_b(f, Z)
    assert np.max(np.abs(0.5 * lap - b)) < 1e-8


def test_fig2b_field_decays_along_rays():
    # decay holds away from the tropical ridge directions where two
    # exponents tie for the max
    f = fig2b_field()
    ab = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]])
    rng = np.random.default_rng(2)
    tested = 0
    for phi in rng.uniform(0, 2 * np.pi, 40):
        dots = np.sort(ab @ np.array([np.cos(phi), np.sin(phi)]))
        if dots[-1] - dots[-2] < 0.4:
            continue
        z = 25.0 * np.exp(1j * phi)
        assert abs(eval_b(f, complex(z))) < 1e-3
        tested += 1
    assert tested > 10


def test_gauge_covariance_of_b():
    f = fig2b_field()
    g = f.gauge_shifted(gamma=0.35, alpha=-0.4, beta=0.2)
    rng = np.random.default_rng(3)
    for z in rng.uniform(-3, 3, 30) + 1j * rng.uniform(-3, 3, 30):
        assert abs(eval_b(f, complex(z)) - eval_b(g, complex(z))) < 1e-12


def test_cell_average_of_b_is_zero_for_periodic_field():
    f = fig6_field()
    grid = nc.PeriodicGrid(2 * np.pi, 2 * np.pi, 256, 256)
    b = eval_b(f, grid.zmesh())
    assert abs(np.mean(b)) < 1e-12


def test_eval_phi_singular_at_zero_of_c():
    f = ExpField.cosine(1.0, 0.6, 0.6)  # vanishes somewhere (min = 1 - 1.2 < 0)
    # find a zero crossing along the diagonal x = y = t: 1 + 1.2 cos t = 0
    t = np.arccos(-1 / 1.2)
    z = t + 1j * t
    assert abs(eval_c(f, complex(z))) < 1e-12
    with pytest.raises(SingularFieldError):
        eval_phi(f, complex(z))
    with pytest.raises(SingularFieldError):
        eval_b(f, complex(z))


# ---------------------------------------------------------------------------
# tropical indicator
# ---------------------------------------------------------------------------

def test_tropical_fig2b_positive_everywhere():
    f = fig2b_field()
    phis = np.linspace(0, 2 * np.pi, 2000, endpoint=False)
    vals = tropical_indicator(f, phis)
    want = np.maximum.reduce([np.cos(phis), np.sin(phis), -np.cos(phis) - np.sin(phis)])
    assert np.max(np.abs(vals - want)) < 1e-12
    assert np.min(vals) > 0


def test_tropical_single_constant_term():
    f = ExpField.constant(2.0)
    assert tropical_indicator(f, 0.7) == 0.0


def test_tropical_antipodal_pair():
    f = ExpField.from_real_exponents([(1.0, 1.0, 0.0), (1.0, -1.0, 0.0)])
    phis = np.linspace(0, 2 * np.pi, 720, endpoint=False)
    vals = tropical_indicator(f, phis)
    assert np.max(np.abs(vals - np.abs(np.cos(phis)))) < 1e-12


def test_tropical_is_support_function():
    f = fig2b_field()
    rng = np.random.default_rng(4)
    ab = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]])
    for phi in rng.uniform(0, 2 * np.pi, 50):
        v = tropical_indicator(f, float(phi))
        dots = ab @ np.array([np.cos(phi), np.sin(phi)])
        assert v >= np.max(dots) - 1e-12
        assert np.min(np.abs(v - dots)) < 1e-12  # attained by some term


def test_tropical_rejects_oscillatory_terms():
    with pytest.raises(ValueError):
        tropical_indicator(fig6_field(), 0.0)


# ---------------------------------------------------------------------------
# shift polytope
# ---------------------------------------------------------------------------

def test_polytope_fig2b():
    f = fig2b_field()
    poly = shift_polytope(f)
    assert poly.has_interior
    verts = set(map(tuple, np.round(poly.vertices, 9)))
    assert verts == {(-1.0, 0.0), (0.0, -1.0), (1.0, 1.0)}  # negated exponents
    assert poly.strictly_contains((0.0, 0.0))
    assert not poly.contains((5.0, 5.0))


def test_polytope_segment_no_interior():
    f = ExpField.from_real_exponents([(1.0, 1.0, 0.0), (1.0, -1.0, 0.0)])
    poly = shift_polytope(f)
    assert not poly.is_empty
    assert not poly.has_interior
    assert poly.contains((0.0, 0.0))
    assert not poly.strictly_contains((0.0, 0.0))
    assert poly.contains((0.5, 0.0))
    assert not poly.contains((0.0, 0.5))


def test_polytope_single_term_point():
    f = ExpField.from_real_exponents([(1.0, 0.5, -0.25)])
    poly = shift_polytope(f)
    assert poly.rank == 0
    assert not poly.has_interior
    assert poly.contains((-0.5, 0.25))


def test_polytope_membership_matches_shifted_indicator():
    f = fig2b_field()
    poly = shift_polytope(f)
    rng = np.random.default_rng(5)
    phis = np.linspace(0, 2 * np.pi, 720, endpoint=False)
    for _ in range(25):
        shift = rng.uniform(-1.5, 1.5, 2)
        g = f.gauge_shifted(alpha=shift[0], beta=shift[1])
        nonneg = np.min(tropical_indicator(g, phis)) >= -1e-9
        assert poly.contains(shift, tol=1e-9) == nonneg or \
            abs(np.min(tropical_indicator(g, phis))) < 1e-3  # boundary fuzz


# ---------------------------------------------------------------------------
# flux
# ---------------------------------------------------------------------------

def test_flux_constant_field_zero():
    rep = flux_disk(ExpField.constant(1.0), 5.0)
    assert abs(rep.flux) < 1e-12


def test_flux_fig2b_asymptotic():
    f = fig2b_field()
    phis = np.linspace(0, 2 * np.pi, 4096, endpoint=False)
    itrop = np.sum(tropical_indicator(f, phis, clip=True)) * (2 * np.pi / 4096)
    rep = flux_disk(f, 40.0)
    assert abs(rep.flux / 40.0 - 0.5 * itrop) < 0.02 * abs(0.5 * itrop)
    # residual after removing the linear growth stays O(1)
    rep2 = flux_disk(f, 80.0)
    assert abs(rep2.residual) < 2 * max(1.0, abs(rep.residual)) + 2.0


def test_flux_disk_against_area_quadrature():
    # 2D quadrature oracle at small radius
    f = fig2b_field()
    R = 2.0
    nr, nt = 400, 512
    r = (np.arange(nr) + 0.5) * R / nr
    t = np.linspace(0, 2 * np.pi, nt, endpoint=False)
    RR, TT = np.meshgrid(r, t)
    Z = RR * np.exp(1j * TT)
    B = eval_b(f, Z)
    area_flux = np.sum(B * RR) * (R / nr) * (2 * np.pi / nt)
    rep = flux_disk(f, R)
    assert abs(rep.flux - area_flux) < 1e-4


def test_flux_periodic_cell_is_zero():
    f = fig6_field()
    grid = nc.PeriodicGrid(2 * np.pi, 2 * np.pi, 256, 256)
    b = eval_b(f, grid.zmesh())
    cell_flux = np.sum(b) * grid.h_x * grid.h_y
    assert abs(cell_flux) < 1e-10
