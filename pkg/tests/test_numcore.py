import numpy as np
import pytest

from magpauli import numcore as nc
from magpauli.field import ExpField, PowField, magnetic_coeffs

from oracles import fd_derivative, richardson_order


def random_trig_samples(grid, rng, nmodes=3):
    """Random smooth real periodic field as a trig polynomial."""
    X, Y = grid.mesh()
    v = np.zeros_like(X)
    for _ in range(nmodes):
        mx, my = rng.integers(-3, 4, 2)
        v += rng.normal() * np.cos(2 * np.pi * (mx * X / grid.period_x + my * Y / grid.period_y)
                                   + rng.uniform(0, 2 * np.pi))
    return nc.ScalarSamples(grid, v.astype(complex))


# ---------------------------------------------------------------------------
# derivative convention
# ---------------------------------------------------------------------------

def test_wirtinger_on_z_and_zbar():
    f_z = lambda z: z
    f_zbar = lambda z: np.conj(z)
    pt = nc.PlanarPoint(0.3, -0.7)
    assert abs(nc.wirtinger(f_z, pt, "d") - 2.0) < 1e-9
    assert abs(nc.wirtinger(f_zbar, pt, "d")) < 1e-9
    assert abs(nc.wirtinger(f_zbar, pt, "dbar") - 2.0) < 1e-9
    assert abs(nc.wirtinger(f_z, pt, "dbar")) < 1e-9


def test_wirtinger_exponential_closed_form():
    # dbar exp(k zbar) = 2 k exp(k zbar); ExpField term (1, 0, -k)
    k = 0.8 - 0.3j
    f = ExpField([(1.0, 0.0, -k)])
    z = 0.4 + 0.2j
    want = 2 * k * np.exp(k * np.conj(z))
    assert abs(nc.wirtinger(f, z, "dbar") - want) < 1e-12
    assert abs(nc.wirtinger(f, z, "d")) < 1e-12
    # cross-check closed form against the finite-difference oracle
    assert abs(fd_derivative(f.value, z, "dbar") - want) < 1e-8


def test_ddbar_is_laplacian_on_grid():
    rng = np.random.default_rng(0)
    errs = []
    for n in (32, 64):
        grid = nc.PeriodicGrid(2 * np.pi, 2 * np.pi, n, n)
        f = random_trig_samples(grid, np.random.default_rng(5))
        dd = nc.grid_d(nc.grid_dbar(f, "fd2"), "fd2").values
        lap = nc.grid_laplacian(f, "fd2").values
        lap_spec = nc.grid_laplacian(f, "spectral").values
        errs.append(np.max(np.abs(dd - lap_spec)))
        assert np.max(np.abs(lap - lap_spec)) < 1.0  # same object up to discretization
    assert richardson_order(errs[0], errs[1]) > 1.9


# ---------------------------------------------------------------------------
# Q, Qplus, factorization
# ---------------------------------------------------------------------------

def fig6_field():
    return ExpField.cosine(1.0, 0.4, 0.4)


def test_qplus_annihilates_sqrt_c_closed_form():
    c = fig6_field()
    coeffs = magnetic_coeffs(c, +1)
    sq = PowField(c, 0.5)
    rng = np.random.default_rng(1)
    z = rng.uniform(-3, 3, 200) + 1j * rng.uniform(-3, 3, 200)
    res = nc.pointwise_qplus(coeffs, sq, z)
    assert np.max(np.abs(res)) < 1e-10


def test_q_annihilates_inv_sqrt_c_closed_form():
    c = fig6_field()
    coeffs = magnetic_coeffs(c, +1)
    inv = PowField(c, -0.5)
    rng = np.random.default_rng(2)
    z = rng.uniform(-3, 3, 200) + 1j * rng.uniform(-3, 3, 200)
    res = nc.pointwise_q(coeffs, inv, z)
    assert np.max(np.abs(res)) < 1e-10


def test_qplus_sqrt_c_on_grid():
    c = fig6_field()
    coeffs = magnetic_coeffs(c, +1)
    grid = nc.PeriodicGrid(2 * np.pi, 2 * np.pi, 64, 64)
    sq = nc.ScalarSamples.sample(grid, lambda z: np.sqrt(c.value(z).real))
    res = nc.apply_qplus(coeffs, sq, method="spectral")
    assert np.max(np.abs(res.values)) < 1e-10


def test_phi_zero_reduces_to_bare_operators():
    grid = nc.PeriodicGrid(2 * np.pi, 2 * np.pi, 32, 32)
    f = random_trig_samples(grid, np.random.default_rng(3))
    coeffs = nc.MagneticCoeffs.zero()
    q = nc.apply_q(coeffs, f)
    qp = nc.apply_qplus(coeffs, f)
    assert np.allclose(q.values, nc.grid_d(f).values)
    assert np.allclose(qp.values, -nc.grid_dbar(f).values)


def test_factorization_residual_order():
    c = fig6_field()
    coeffs = magnetic_coeffs(c, +1)
    errs = []
    for n in (32, 64):
        grid = nc.PeriodicGrid(2 * np.pi, 2 * np.pi, n, n)
        f = random_trig_samples(grid, np.random.default_rng(4))
        lhs = nc.apply_lplus(coeffs, f, method="fd2", route="compose")
        rhs = nc.apply_lplus(coeffs, f, method="fd2", route="second_order")
        errs.append(np.max(np.abs(lhs.values - rhs.values)))
    assert richardson_order(errs[0], errs[1]) > 1.9


def test_lplus_minus_lminus_is_2b():
    c = fig6_field()
    coeffs = magnetic_coeffs(c, +1)
    grid = nc.PeriodicGrid(2 * np.pi, 2 * np.pi, 64, 64)
    f = random_trig_samples(grid, np.random.default_rng(5))
    lp = nc.apply_lplus(coeffs, f, method="spectral", route="compose")
    lm = nc.apply_lminus(coeffs, f, method="spectral", route="compose")
    b = coeffs.b_samples(grid)
    resid = lp.values - lm.values - 2 * b * f.values
    assert np.max(np.abs(resid)) < 1e-8


def test_pauli_instanton_zero_mode():
    c = fig6_field()
    coeffs = magnetic_coeffs(c, +1)
    grid = nc.PeriodicGrid(2 * np.pi, 2 * np.pi, 64, 64)
    sq = nc.ScalarSamples.sample(grid, lambda z: np.sqrt(c.value(z).real))
    zero = nc.ScalarSamples(grid, np.zeros_like(sq.values))
    out = nc.apply_pauli(coeffs, (sq, zero), method="spectral")
    assert np.max(np.abs(out[0].values)) < 1e-8
    assert np.max(np.abs(out[1].values)) < 1e-12


def test_supersymmetry_anticommutator():
    c = fig6_field()
    coeffs = magnetic_coeffs(c, +1)
    errs = []
    for n in (32, 64):
        grid = nc.PeriodicGrid(2 * np.pi, 2 * np.pi, n, n)
        rng = np.random.default_rng(6)
        pair = (random_trig_samples(grid, rng), random_trig_samples(grid, rng))
        ss = nc.apply_s(coeffs, nc.apply_s_star(coeffs, pair, "fd2"), "fd2")
        sss = nc.apply_s_star(coeffs, nc.apply_s(coeffs, pair, "fd2"), "fd2")
        lp = nc.apply_pauli(coeffs, pair, method="fd2", route="second_order")
        r = max(np.max(np.abs(ss[i].values + sss[i].values - lp[i].values)) for i in (0, 1))
        errs.append(r)
    assert richardson_order(errs[0], errs[1]) > 1.9


def test_pauli_plane_wave_free_case():
    # Phi = 0, plane wave in each slot -> eigenvalue p^2 + q^2
    grid = nc.PeriodicGrid(2 * np.pi, 2 * np.pi, 64, 64)
    p, q = 3.0, -2.0
    wave = nc.ScalarSamples.sample(grid, lambda z: np.exp(1j * (p * z.real + q * z.imag)))
    out = nc.apply_pauli(nc.MagneticCoeffs.zero(), (wave, wave), method="spectral")
    for comp in out:
        assert np.max(np.abs(comp.values - (p**2 + q**2) * wave.values)) < 1e-8


# ---------------------------------------------------------------------------
# Green identity
# ---------------------------------------------------------------------------

class _Poly(nc.AnalyticField):
    """(z zbar)-polynomial test field: a z^2 zbar + b z + c zbar + d."""

    def __init__(self, a, b, c, d):
        self.a, self.b, self.c, self.dd0 = a, b, c, d

    def value(self, z):
        return self.a * z**2 * np.conj(z) + self.b * z + self.c * np.conj(z) + self.dd0

    def d(self, z):
        return self.a * 4 * z * np.conj(z) + 2 * self.b

    def dbar(self, z):
        return 2 * self.a * z**2 + 2 * self.c

    def ddbar(self, z):
        return 8 * self.a * z


def test_green_residual_disc_polynomial():
    psi = _Poly(0.3, 1.0, -0.5j, 0.2)
    phi = _Poly(-0.1j, 0.4, 0.7, -1.0)
    res = nc.green_residual(None, psi, phi, ("disc", 0.25 + 0.1j, 1.3), n_r=64, n_t=256)
    assert abs(res) < 1e-6


def test_green_residual_annulus():
    psi = _Poly(0.2, -0.3, 0.5, 1.0)
    phi = _Poly(0.1, 0.2j, -0.4, 0.3)
    res = nc.green_residual(None, psi, phi, ("annulus", 0.0, 0.5, 1.5), n_r=64, n_t=256)
    assert abs(res) < 1e-6


def test_green_residual_skew_symmetry():
    # psi = phi gives a purely imaginary boundary form
    psi = _Poly(0.3, 1.0, -0.5j, 0.2)
    c = fig6_field()
    coeffs = magnetic_coeffs(c, +1)
    res = nc.green_residual(coeffs, psi, psi, ("disc", 0.0, 1.0), n_r=48, n_t=192)
    assert abs(res) < 1e-5


def test_green_residual_with_magnetic_field():
    psi = _Poly(0.15, 0.6, 0.2j, 0.5)
    phi = _Poly(-0.2, 0.1, 0.3, 1.0 + 0.5j)
    c = fig6_field()
    coeffs = magnetic_coeffs(c, +1)
    res = nc.green_residual(coeffs, psi, phi, ("disc", 0.3, 1.2), n_r=96, n_t=384)
    assert abs(res) < 1e-5


# ---------------------------------------------------------------------------
# loop flux and winding
# ---------------------------------------------------------------------------

def test_loop_flux_constant_field_zero():
    coeffs = nc.MagneticCoeffs.zero()
    ct = nc.Contour.circle(0.0, 1.0, 128)
    assert abs(nc.loop_flux(coeffs, ct)) < 1e-12


def test_loop_flux_stokes():
    # B homogeneous: Phi = B0 (x^2+y^2)/4 -> flux over circle = B0 pi R^2
    class Quad(nc.AnalyticField):
        def __init__(self, b0):
            self.b0 = b0

        def value(self, z):
            return self.b0 * (z * np.conj(z)) / 4

        def d(self, z):
            return self.b0 * np.conj(z) / 2

        def dbar(self, z):
            return self.b0 * z / 2

        def ddbar(self, z):
            return self.b0 * np.ones_like(z)

    b0 = 0.7
    coeffs = nc.MagneticCoeffs(phi=Quad(b0))
    R = 1.4
    ct = nc.Contour.circle(0.2 + 0.1j, R, 1024)
    want = b0 * np.pi * R**2
    assert abs(nc.loop_flux(coeffs, ct) - want) < 1e-4 * want


def test_phase_winding_simple_zero():
    f = lambda z: (z - (0.3 + 0.4j)) * np.exp(0.2 * z)
    ct = nc.Contour.circle(0.3 + 0.4j, 0.05, 256)
    w = nc.loop_phase_winding(f, ct)
    assert abs(w - 2 * np.pi) < 1e-10


def test_phase_winding_rejects_zero_on_contour():
    f = lambda z: z
    ct = nc.Contour.from_points([1.0, 1j, -1.0, 0.0, 1.0], closed=True, spacing=0.01)
    with pytest.raises(ZeroDivisionError):
        nc.loop_phase_winding(f, ct)


# ---------------------------------------------------------------------------
# poisson_log
# ---------------------------------------------------------------------------

def gaussian_source(grid, flux, s, center=0.0):
    X, Y = grid.mesh()
    r2 = (X - np.real(center)) ** 2 + (Y - np.imag(center)) ** 2
    return nc.ScalarSamples(grid, (flux / (2 * np.pi * s**2) * np.exp(-r2 / (2 * s**2))).astype(complex))


def test_poisson_zero_source():
    grid = nc.PeriodicGrid(20.0, 20.0, 64, 64, -10.0, -10.0)
    pot = nc.poisson_log(nc.ScalarSamples(grid, np.zeros((64, 64))))
    assert abs(pot.eval(1.0 + 1.0j)) < 1e-14


def test_poisson_log_farfield_slope_flux_2pi():
    L, n = 60.0, 256
    grid = nc.PeriodicGrid(L, L, n, n, -L / 2, -L / 2)
    src = gaussian_source(grid, 2 * np.pi, 1.3)
    pot = nc.poisson_log(src)
    rs = np.linspace(8.0, 25.0, 30)
    vals = np.array([pot.eval(r * np.exp(0.3j)) for r in rs])
    slope = np.polyfit(np.log(rs), vals, 1)[0]
    assert abs(slope - 1.0) < 1e-2


def test_poisson_log_flux_5pi_matches_radial_oracle():
    from oracles import radial_log_potential

    L, n = 60.0, 256
    grid = nc.PeriodicGrid(L, L, n, n, -L / 2, -L / 2)
    s = 1.1
    flux = 5 * np.pi
    src = gaussian_source(grid, flux, s)
    pot = nc.poisson_log(src)
    rs = np.linspace(6.0, 24.0, 25)
    vals = np.array([pot.eval(r * np.exp(1.1j)) for r in rs])
    slope = np.polyfit(np.log(rs), vals, 1)[0]
    assert abs(slope - 2.5) < 1e-2
    # radial ODE oracle, up to one additive constant
    b_r = lambda r: flux / (2 * np.pi * s**2) * np.exp(-r**2 / (2 * s**2))
    Rref = radial_log_potential(b_r, rs, 30.0)
    shift = vals[0] - Rref[0]
    assert np.max(np.abs(vals - Rref - shift)) < 2e-3


def test_poisson_log_laplacian_residual():
    L, n = 40.0, 256
    grid = nc.PeriodicGrid(L, L, n, n, -L / 2, -L / 2)
    src = gaussian_source(grid, 2 * np.pi, 1.5, center=1.0 + 0.5j)
    pot = nc.poisson_log(src)
    R = pot.on_grid()
    # spectral laplacian of the periodic part + exact gaussian part
    lap_p = nc.grid_laplacian(pot.periodic_part, "spectral").values.real
    X, Y = grid.mesh()
    r2 = np.abs(X + 1j * Y - pot.centroid) ** 2
    lap_g = pot.flux * np.exp(-r2 / (2 * pot.s**2)) / (2 * np.pi * pot.s**2)
    resid = lap_p + lap_g - src.values.real
    inner = slice(n // 10, -n // 10)
    assert np.max(np.abs(resid[inner, inner])) < 1e-8
    assert R.values.shape == (n, n)


def test_poisson_log_rejects_unsettled_source():
    grid = nc.PeriodicGrid(10.0, 10.0, 64, 64, -5.0, -5.0)
    src = gaussian_source(grid, 2 * np.pi, 3.0)  # too wide for the box
    with pytest.raises(ValueError):
        nc.poisson_log(src)


def test_rect_log_avg_matches_quadrature():
    import mpmath as mp

    hx, hy = 0.3, 0.2
    f = lambda x, y: mp.log(mp.sqrt(x * x + y * y))
    val = mp.quad(lambda x: mp.quad(lambda y: f(x, y), [-hy / 2, 0, hy / 2]),
                  [-hx / 2, 0, hx / 2])
    assert abs(nc.rect_log_avg(hx, hy) - float(val) / (hx * hy)) < 1e-9


# ---------------------------------------------------------------------------
# serialization round trips
# ---------------------------------------------------------------------------

def test_samples_json_roundtrip():
    grid = nc.PeriodicGrid(2 * np.pi, 4.0, 8, 16, 0.0, -2.0)
    f = random_trig_samples(grid, np.random.default_rng(9))
    obj = f.to_json_envelope()
    back = nc.ScalarSamples.from_json_envelope(obj)
    assert back.grid == grid
    assert np.allclose(back.values, f.values)


def test_contour_resampling_and_csv(tmp_path):
    t = np.linspace(0, 2 * np.pi, 50)
    pts = np.cos(t) + 1j * 2 * np.sin(t)
    ct = nc.Contour.from_points(pts, closed=True, spacing=0.05)
    seg = np.abs(np.diff(ct.points))
    assert np.max(seg) <= 0.06
    assert np.max(np.abs(np.diff(ct.frenet_angle))) < 0.2  # unwrapped, no jumps
    p = tmp_path / "c.csv"
    ct.to_csv(p)
    data = np.loadtxt(p, delimiter=",", skiprows=1)
    assert data.shape[1] == 3
