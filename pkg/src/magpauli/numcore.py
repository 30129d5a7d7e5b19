"""Planar calculus for the magnetic zero-level machinery.

Derivative convention (used everywhere in this package):

    d    = d/dx - i d/dy        so  d(z) = 2,  d(zbar) = 0
    dbar = d/dx + i d/dy        so  dbar(zbar) = 2,  d dbar = Laplacian

For a field written in exponents exp(p*z - k*zbar) this gives
d -> 2p and dbar -> -2k, which is the normalization the closed-form
identities of the spectral module assume.

Operators, with Phi the gauge potential of MagneticCoeffs:

    Q f     = d f + (d Phi) f
    Qplus f = -dbar f + (dbar Phi) f
    L+ = Q Qplus,  L- = Qplus Q,  L+ - L- = 2*(d dbar Phi) = 2B

The sign of the gauge term in Qplus is fixed so that Qplus annihilates
sqrt(c)*(holomorphic) when Phi = (1/2) log c, and Q annihilates
(1/sqrt(c))*(antiholomorphic); that choice makes the periodic ground pair
(sqrt(c), 1/sqrt(c)) exact zero modes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "PlanarPoint",
    "PeriodicGrid",
    "ScalarSamples",
    "Contour",
    "MagneticCoeffs",
    "wirtinger",
    "apply_q",
    "apply_qplus",
    "apply_lplus",
    "apply_lminus",
    "apply_pauli",
    "apply_s",
    "apply_s_star",
    "green_residual",
    "loop_flux",
    "loop_phase_winding",
    "poisson_log",
    "LogPotential",
]


@dataclass(frozen=True)
class PlanarPoint:
    x: float
    y: float

    def __post_init__(self):
        if not (np.isfinite(self.x) and np.isfinite(self.y)):
            raise ValueError("non-finite coordinates")

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)

    @classmethod
    def from_complex(cls, z: complex) -> "PlanarPoint":
        return cls(float(np.real(z)), float(np.imag(z)))


def as_complex(point) -> complex:
    if isinstance(point, PlanarPoint):
        return point.z
    return complex(point)


# ---------------------------------------------------------------------------
# grids and sampled fields
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PeriodicGrid:
    """Rectangular periodic box [x0, x0+period_x) x [y0, y0+period_y)."""

    period_x: float
    period_y: float
    nx: int
    ny: int
    x0: float = 0.0
    y0: float = 0.0

    def __post_init__(self):
        if self.nx < 8 or self.ny < 8:
            raise ValueError("grid needs nx, ny >= 8")
        if self.period_x <= 0 or self.period_y <= 0:
            raise ValueError("periods must be positive")

    @property
    def h_x(self) -> float:
        return self.period_x / self.nx

    @property
    def h_y(self) -> float:
        return self.period_y / self.ny

    @property
    def h(self) -> float:
        return min(self.h_x, self.h_y)

    def axes(self):
        x = self.x0 + self.h_x * np.arange(self.nx)
        y = self.y0 + self.h_y * np.arange(self.ny)
        return x, y

    def mesh(self):
        """X, Y with shape (ny, nx): rows are y, columns are x."""
        x, y = self.axes()
        return np.meshgrid(x, y)

    def zmesh(self) -> np.ndarray:
        X, Y = self.mesh()
        return X + 1j * Y

    def wavenumbers(self):
        kx = 2 * np.pi * np.fft.fftfreq(self.nx, d=self.h_x)
        ky = 2 * np.pi * np.fft.fftfreq(self.ny, d=self.h_y)
        return np.meshgrid(kx, ky)

    def refine(self, factor: int = 2) -> "PeriodicGrid":
        return PeriodicGrid(self.period_x, self.period_y, self.nx * factor,
                            self.ny * factor, self.x0, self.y0)


@dataclass
class ScalarSamples:
    grid: PeriodicGrid
    values: np.ndarray  # shape (ny, nx), complex

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (self.grid.ny, self.grid.nx):
            raise ValueError(f"shape {self.values.shape} does not match grid "
                             f"({self.grid.ny}, {self.grid.nx})")

    @classmethod
    def sample(cls, grid: PeriodicGrid, f) -> "ScalarSamples":
        return cls(grid, np.asarray(f(grid.zmesh()), dtype=complex))

    def to_csv(self, path):
        X, Y = self.grid.mesh()
        cols = np.column_stack([X.ravel(), Y.ravel(),
                                self.values.real.ravel(), self.values.imag.ravel()])
        np.savetxt(path, cols, delimiter=",", header="x,y,re,im", comments="")

    def to_json_envelope(self) -> dict:
        g = self.grid
        flat = self.values.ravel()  # row major
        return {
            "grid": {"period_x": g.period_x, "period_y": g.period_y,
                     "nx": g.nx, "ny": g.ny, "x0": g.x0, "y0": g.y0},
            "values": [[float(v.real), float(v.imag)] for v in flat],
        }

    @classmethod
    def from_json_envelope(cls, obj: dict) -> "ScalarSamples":
        g = obj["grid"]
        grid = PeriodicGrid(g["period_x"], g["period_y"], g["nx"], g["ny"],
                            g.get("x0", 0.0), g.get("y0", 0.0))
        vals = np.array([complex(re, im) for re, im in obj["values"]])
        return cls(grid, vals.reshape(grid.ny, grid.nx))


# ---------------------------------------------------------------------------
# grid derivatives
# ---------------------------------------------------------------------------

def _axis_derivative(values: np.ndarray, h: float, axis: int, method: str) -> np.ndarray:
    if method == "spectral":
        n = values.shape[axis]
        k = 2 * np.pi * np.fft.fftfreq(n, d=h)
        shape = [1, 1]
        shape[axis] = n
        return np.fft.ifft(1j * k.reshape(shape) * np.fft.fft(values, axis=axis), axis=axis)
    if method == "fd2":
        return (np.roll(values, -1, axis) - np.roll(values, 1, axis)) / (2 * h)
    if method == "fd4":
        return (-np.roll(values, -2, axis) + 8 * np.roll(values, -1, axis)
                - 8 * np.roll(values, 1, axis) + np.roll(values, 2, axis)) / (12 * h)
    raise ValueError(f"unknown method {method!r}")


def grid_dx(samples: ScalarSamples, method: str = "spectral") -> ScalarSamples:
    return ScalarSamples(samples.grid,
                         _axis_derivative(samples.values, samples.grid.h_x, 1, method))


def grid_dy(samples: ScalarSamples, method: str = "spectral") -> ScalarSamples:
    return ScalarSamples(samples.grid,
                         _axis_derivative(samples.values, samples.grid.h_y, 0, method))


def grid_d(samples: ScalarSamples, method: str = "spectral") -> ScalarSamples:
    return ScalarSamples(samples.grid,
                         grid_dx(samples, method).values - 1j * grid_dy(samples, method).values)


def grid_dbar(samples: ScalarSamples, method: str = "spectral") -> ScalarSamples:
    return ScalarSamples(samples.grid,
                         grid_dx(samples, method).values + 1j * grid_dy(samples, method).values)


def grid_laplacian(samples: ScalarSamples, method: str = "spectral") -> ScalarSamples:
    g = samples.grid
    if method == "spectral":
        KX, KY = g.wavenumbers()
        out = np.fft.ifft2(-(KX**2 + KY**2) * np.fft.fft2(samples.values))
        return ScalarSamples(g, out)
    if method == "fd2":
        v = samples.values
        out = ((np.roll(v, -1, 1) - 2 * v + np.roll(v, 1, 1)) / g.h_x**2
               + (np.roll(v, -1, 0) - 2 * v + np.roll(v, 1, 0)) / g.h_y**2)
        return ScalarSamples(g, out)
    if method == "fd4":
        v = samples.values

        def d2(arr, h, ax):
            return (-np.roll(arr, -2, ax) + 16 * np.roll(arr, -1, ax) - 30 * arr
                    + 16 * np.roll(arr, 1, ax) - np.roll(arr, 2, ax)) / (12 * h**2)

        return ScalarSamples(g, d2(v, g.h_x, 1) + d2(v, g.h_y, 0))
    raise ValueError(f"unknown method {method!r}")


def interp_periodic(samples: ScalarSamples, z, order: int = 3):
    """Cubic interpolation of a periodic grid field at arbitrary points."""
    from scipy.ndimage import map_coordinates

    g = samples.grid
    z = np.asarray(z, dtype=complex)
    col = (z.real - g.x0) / g.h_x
    row = (z.imag - g.y0) / g.h_y
    coords = np.vstack([np.atleast_1d(row).ravel(), np.atleast_1d(col).ravel()])
    re = map_coordinates(samples.values.real, coords, order=order, mode="grid-wrap")
    im = map_coordinates(samples.values.imag, coords, order=order, mode="grid-wrap")
    out = (re + 1j * im).reshape(np.shape(z))
    if out.ndim == 0:
        return complex(out)
    return out


# ---------------------------------------------------------------------------
# closed-form field protocol
# ---------------------------------------------------------------------------

class AnalyticField:
    """Base for fields with closed-form Wirtinger derivatives.

    Subclasses implement value/d/dbar (and second derivatives where the
    operators need them) for scalar complex z or numpy arrays of z.
    """

    def value(self, z):
        raise NotImplementedError

    def d(self, z):
        raise NotImplementedError

    def dbar(self, z):
        raise NotImplementedError

    def ddbar(self, z):
        raise NotImplementedError

    def __call__(self, z):
        return self.value(z)


def wirtinger(field, point, which: str = "d", h: float = 1e-5) -> complex:
    """d or dbar of a field at a point.

    Closed-form path when the field is an AnalyticField; otherwise a 4th
    order centered stencil on the callable.
    """
    z = as_complex(point)
    if isinstance(field, AnalyticField):
        if which == "d":
            return field.d(z)
        if which == "dbar":
            return field.dbar(z)
        raise ValueError(which)
    cx = [field(z - 2 * h), field(z - h), field(z + h), field(z + 2 * h)]
    fx = (cx[0] - 8 * cx[1] + 8 * cx[2] - cx[3]) / (12 * h)
    cy = [field(z - 2j * h), field(z - 1j * h), field(z + 1j * h), field(z + 2j * h)]
    fy = (cy[0] - 8 * cy[1] + 8 * cy[2] - cy[3]) / (12 * h)
    if which == "d":
        return fx - 1j * fy
    if which == "dbar":
        return fx + 1j * fy
    raise ValueError(which)


# ---------------------------------------------------------------------------
# magnetic coefficients and first/second order operators
# ---------------------------------------------------------------------------

class MagneticCoeffs:
    """Gauge data (Phi, A_z, B) in the Lorenz gauge A1 = i Phi_y, A2 = -i Phi_x.

    In Wirtinger terms A_z = A1 - i A2 = -d(Phi) and B = d dbar Phi.
    Holds either a closed-form Phi (AnalyticField) or grid samples of Phi.
    """

    def __init__(self, phi=None, grid: PeriodicGrid | None = None, method: str = "spectral"):
        self.phi = phi
        self.method = method
        if isinstance(phi, ScalarSamples):
            self.grid = phi.grid
            self._dphi = grid_d(phi, method)
            self._dbarphi = grid_dbar(phi, method)
            self._b = grid_laplacian(phi, method)
        else:
            self.grid = grid

    @classmethod
    def zero(cls) -> "MagneticCoeffs":
        return cls(phi=None)

    # --- pointwise accessors (closed form / interpolated) ---
    def phi_at(self, z):
        if self.phi is None:
            return np.zeros_like(np.asarray(z, dtype=complex))
        if isinstance(self.phi, ScalarSamples):
            return interp_periodic(self.phi, z)
        return self.phi.value(z)

    def dphi(self, z):
        if self.phi is None:
            return np.zeros_like(np.asarray(z, dtype=complex))
        if isinstance(self.phi, ScalarSamples):
            return interp_periodic(self._dphi, z)
        return self.phi.d(z)

    def dbarphi(self, z):
        if self.phi is None:
            return np.zeros_like(np.asarray(z, dtype=complex))
        if isinstance(self.phi, ScalarSamples):
            return interp_periodic(self._dbarphi, z)
        return self.phi.dbar(z)

    def a_z(self, z):
        return -self.dphi(z)

    def b(self, z):
        if self.phi is None:
            return np.zeros_like(np.asarray(z, dtype=complex))
        if isinstance(self.phi, ScalarSamples):
            return interp_periodic(self._b, z)
        return self.phi.ddbar(z)

    # --- grid samples of the coefficient fields ---
    def dphi_samples(self, grid: PeriodicGrid, method: str | None = None) -> np.ndarray:
        if isinstance(self.phi, ScalarSamples) and self.phi.grid == grid:
            return grid_d(self.phi, method or self.method).values
        return np.asarray(self.dphi(grid.zmesh()), dtype=complex)

    def dbarphi_samples(self, grid: PeriodicGrid, method: str | None = None) -> np.ndarray:
        if isinstance(self.phi, ScalarSamples) and self.phi.grid == grid:
            return grid_dbar(self.phi, method or self.method).values
        return np.asarray(self.dbarphi(grid.zmesh()), dtype=complex)

    def b_samples(self, grid: PeriodicGrid, method: str | None = None) -> np.ndarray:
        if isinstance(self.phi, ScalarSamples) and self.phi.grid == grid:
            return grid_laplacian(self.phi, method or self.method).values
        return np.asarray(self.b(grid.zmesh()), dtype=complex)


def apply_q(coeffs: MagneticCoeffs, f: ScalarSamples, method: str = "spectral") -> ScalarSamples:
    """Q f = d f + (d Phi) f on a periodic grid."""
    df = grid_d(f, method).values
    return ScalarSamples(f.grid, df + coeffs.dphi_samples(f.grid, method) * f.values)


def apply_qplus(coeffs: MagneticCoeffs, f: ScalarSamples, method: str = "spectral") -> ScalarSamples:
    """Qplus f = -dbar f + (dbar Phi) f on a periodic grid."""
    dbf = grid_dbar(f, method).values
    return ScalarSamples(f.grid, -dbf + coeffs.dbarphi_samples(f.grid, method) * f.values)


def apply_lplus(coeffs: MagneticCoeffs, f: ScalarSamples, method: str = "spectral",
                route: str = "second_order") -> ScalarSamples:
    """L+ from the assembled second-order form (or by Q Qplus composition)."""
    if route == "compose":
        return apply_q(coeffs, apply_qplus(coeffs, f, method), method)
    g = f.grid
    lap = grid_laplacian(f, method).values
    df = grid_d(f, method).values
    dbf = grid_dbar(f, method).values
    dp = coeffs.dphi_samples(g, method)
    dbp = coeffs.dbarphi_samples(g, method)
    b = coeffs.b_samples(g, method)
    out = -lap + dbp * df - dp * dbf + (dp * dbp + b) * f.values
    return ScalarSamples(g, out)


def apply_lminus(coeffs: MagneticCoeffs, f: ScalarSamples, method: str = "spectral",
                 route: str = "second_order") -> ScalarSamples:
    if route == "compose":
        return apply_qplus(coeffs, apply_q(coeffs, f, method), method)
    g = f.grid
    lap = grid_laplacian(f, method).values
    df = grid_d(f, method).values
    dbf = grid_dbar(f, method).values
    dp = coeffs.dphi_samples(g, method)
    dbp = coeffs.dbarphi_samples(g, method)
    b = coeffs.b_samples(g, method)
    out = -lap + dbp * df - dp * dbf + (dp * dbp - b) * f.values
    return ScalarSamples(g, out)


def apply_pauli(coeffs: MagneticCoeffs, pair, method: str = "spectral", route: str = "compose"):
    """Componentwise (L+ psi_plus, L- psi_minus)."""
    psi_p, psi_m = pair
    if psi_p.grid != psi_m.grid:
        raise ValueError("pair components on different grids")
    return (apply_lplus(coeffs, psi_p, method, route),
            apply_lminus(coeffs, psi_m, method, route))


def apply_s(coeffs: MagneticCoeffs, pair, method: str = "spectral"):
    """Supersymmetry S: (psi+, psi-) -> (0, Qplus psi+)."""
    psi_p, psi_m = pair
    zero = ScalarSamples(psi_p.grid, np.zeros_like(psi_p.values))
    return (zero, apply_qplus(coeffs, psi_p, method))


def apply_s_star(coeffs: MagneticCoeffs, pair, method: str = "spectral"):
    """Adjoint supersymmetry S*: (psi+, psi-) -> (Q psi-, 0)."""
    psi_p, psi_m = pair
    zero = ScalarSamples(psi_m.grid, np.zeros_like(psi_m.values))
    return (apply_q(coeffs, psi_m, method), zero)


# ---------------------------------------------------------------------------
# contours
# ---------------------------------------------------------------------------

class Contour:
    """Arclength-resampled planar contour with unwrapped normal angle.

    frenet_angle is the angle theta(t) rotating (x, y) to the Frenet frame
    (n, tangent): theta = angle of the normal = tangent angle - pi/2.
    """

    def __init__(self, points: np.ndarray, closed: bool):
        pts = np.asarray(points, dtype=complex)
        if closed and abs(pts[0] - pts[-1]) > 1e-9 * max(1.0, np.max(np.abs(pts))):
            raise ValueError("closed contour must repeat its start point")
        self.points = pts
        self.closed = closed
        self._build_frames()

    @classmethod
    def from_points(cls, points, closed: bool, spacing: float) -> "Contour":
        """Resample a polyline to uniform arclength spacing <= spacing."""
        pts = np.asarray(points, dtype=complex)
        if closed and abs(pts[0] - pts[-1]) > 1e-12 * max(1.0, np.max(np.abs(pts))):
            pts = np.concatenate([pts, pts[:1]])
        seg = np.abs(np.diff(pts))
        s = np.concatenate([[0.0], np.cumsum(seg)])
        total = s[-1]
        n = max(int(np.ceil(total / spacing)), 8)
        snew = np.linspace(0.0, total, n + 1)
        x = np.interp(snew, s, pts.real)
        y = np.interp(snew, s, pts.imag)
        return cls(x + 1j * y, closed)

    @classmethod
    def circle(cls, center: complex, radius: float, n: int = 256) -> "Contour":
        t = np.linspace(0.0, 2 * np.pi, n + 1)
        pts = center + radius * np.exp(1j * t)
        return cls(pts, closed=True)

    def _build_frames(self):
        pts = self.points
        if self.closed:
            # periodic central differences on the n unique points
            p = pts[:-1]
            tang = np.roll(p, -1) - np.roll(p, 1)
            tang = np.concatenate([tang, tang[:1]])
        else:
            tang = np.gradient(pts)
        self.tangent = tang / np.abs(tang)
        ang = np.angle(self.tangent)
        self.tangent_angle = np.unwrap(ang)
        self.frenet_angle = self.tangent_angle - np.pi / 2
        seg = np.abs(np.diff(pts))
        self.arclength = np.concatenate([[0.0], np.cumsum(seg)])

    @property
    def normal(self) -> np.ndarray:
        # outward for a counterclockwise contour
        return self.tangent * np.exp(-1j * np.pi / 2)

    def to_csv(self, path):
        cols = np.column_stack([self.arclength, self.points.real, self.points.imag])
        np.savetxt(path, cols, delimiter=",", header="t,x,y", comments="")


def contour_integral(contour: Contour, values: np.ndarray) -> complex:
    """Integral of a sampled density against arclength along the contour."""
    return complex(np.trapezoid(np.asarray(values), contour.arclength))


# ---------------------------------------------------------------------------
# Green identity residual
# ---------------------------------------------------------------------------

def pointwise_q(coeffs: MagneticCoeffs, f: AnalyticField, z):
    """Q f at points, closed form."""
    return f.d(z) + coeffs.dphi(z) * f.value(z)


def pointwise_qplus(coeffs: MagneticCoeffs, f: AnalyticField, z):
    """Qplus f at points, closed form."""
    return -f.dbar(z) + coeffs.dbarphi(z) * f.value(z)


def pointwise_lplus(coeffs: MagneticCoeffs, f: AnalyticField, z):
    lap = f.ddbar(z)
    df = f.d(z)
    dbf = f.dbar(z)
    dp = coeffs.dphi(z)
    dbp = coeffs.dbarphi(z)
    b = coeffs.b(z)
    return -lap + dbp * df - dp * dbf + (dp * dbp + b) * f.value(z)


def pointwise_lminus(coeffs: MagneticCoeffs, f: AnalyticField, z):
    lap = f.ddbar(z)
    df = f.d(z)
    dbf = f.dbar(z)
    dp = coeffs.dphi(z)
    dbp = coeffs.dbarphi(z)
    b = coeffs.b(z)
    return -lap + dbp * df - dp * dbf + (dp * dbp - b) * f.value(z)


_lplus_pointwise = pointwise_lplus


def grad_n(coeffs: MagneticCoeffs, f: AnalyticField, z, normal):
    """Magnetic normal derivative (d_n + A_n) f along a contour.

    With the package gauge Atilde = (-i Phi_y, i Phi_x), so
    A_n = -i dPhi/dtangent for a counterclockwise contour.
    """
    df = f.d(z)
    dbf = f.dbar(z)
    fx = (df + dbf) / 2
    fy = 1j * (df - dbf) / 2
    dpz = coeffs.dphi(z)
    dbpz = coeffs.dbarphi(z)
    px = (dpz + dbpz) / 2
    py = 1j * (dpz - dbpz) / 2
    nx, ny = np.real(normal), np.imag(normal)
    a_n = -1j * py * nx + 1j * px * ny
    return fx * nx + fy * ny + a_n * f.value(z)


def green_residual(coeffs: MagneticCoeffs | None, psi: AnalyticField, phi: AnalyticField,
                   region, n_r: int = 64, n_t: int = 256) -> complex:
    """Boundary form minus domain form of the magnetic Green identity.

    region is ("disc", center, R) or ("annulus", center, R1, R2).  The
    boundary integral uses the outward normal; both vanish together for
    exact fields, so the residual measures discretization only.
    """
    if coeffs is None:
        coeffs = MagneticCoeffs.zero()
    kind = region[0]
    if kind == "disc":
        _, center, R = region
        rings = [(R, +1.0)]
        r_in = 0.0
    elif kind == "annulus":
        _, center, r_in, R = region
        if r_in <= 0:
            raise ValueError("annulus needs a positive inner radius")
        rings = [(R, +1.0), (r_in, -1.0)]
    else:
        raise ValueError(f"unknown region {kind!r}")

    # parametric circles: exact normals and arclength keep the boundary
    # trapezoid spectrally accurate
    t = np.linspace(0.0, 2 * np.pi, n_t, endpoint=False)
    boundary = 0.0 + 0.0j
    for radius, orient in rings:
        z = center + radius * np.exp(1j * t)
        nrm = np.exp(1j * t) * orient  # outward for the region
        psi1 = grad_n(coeffs, psi, z, nrm)
        psi2 = psi.value(z)
        phi1 = grad_n(coeffs, phi, z, nrm)
        phi2 = phi.value(z)
        vals = psi1 * np.conj(phi2) - psi2 * np.conj(phi1)
        boundary += np.sum(vals) * (2 * np.pi / n_t) * radius

    # domain integral in polar coordinates: Gauss-Legendre radial x trapezoid angular
    from numpy.polynomial.legendre import leggauss

    xg, wg = leggauss(n_r)
    r = (xg + 1.0) * (R - r_in) / 2.0 + r_in
    wr = wg * (R - r_in) / 2.0
    t = np.linspace(0.0, 2 * np.pi, n_t, endpoint=False)
    RR, TT = np.meshgrid(r, t)
    Z = region[1] + RR * np.exp(1j * TT)
    integrand = (_lplus_pointwise(coeffs, psi, Z) * np.conj(phi.value(Z))
                 - psi.value(Z) * np.conj(_lplus_pointwise(coeffs, phi, Z)))
    domain = np.sum(integrand * RR * wr[None, :]) * (2 * np.pi / n_t)
    return complex(boundary + domain)


# ---------------------------------------------------------------------------
# loop flux and phase winding
# ---------------------------------------------------------------------------

def loop_flux(coeffs: MagneticCoeffs, contour: Contour) -> float:
    """Line integral of the vector potential around a contour.

    In this gauge A = (-i Phi_y, i Phi_x) is purely imaginary and
    oint A . dl = i * (flux of B), so the real flux is the imaginary part.
    """
    z = contour.points
    dpz = coeffs.dphi(z)
    dbpz = coeffs.dbarphi(z)
    px = (dpz + dbpz) / 2
    py = 1j * (dpz - dbpz) / 2
    a1 = -1j * py
    a2 = 1j * px
    tx, ty = contour.tangent.real, contour.tangent.imag
    val = contour_integral(contour, a1 * tx + a2 * ty)
    return float(val.imag)


def loop_phase_winding(field, contour: Contour) -> float:
    """Total unwrapped phase increment of a complex field along a contour."""
    if isinstance(field, AnalyticField):
        vals = field.value(contour.points)
    else:
        vals = np.asarray([field(z) for z in contour.points])
    ph = np.angle(vals)
    steps = np.diff(ph)
    steps = (steps + np.pi) % (2 * np.pi) - np.pi
    if np.min(np.abs(vals)) < 1e-12 * np.max(np.abs(vals)) or np.max(np.abs(steps)) > 0.9 * np.pi:
        raise ZeroDivisionError("field vanishes on or too close to the contour")
    return float(np.sum(steps))


# ---------------------------------------------------------------------------
# Poisson solver with logarithmic far field
# ---------------------------------------------------------------------------

def _ein(x: np.ndarray) -> np.ndarray:
    """Entire exponential integral Ein(x) = gamma + ln x + E1(x), x >= 0."""
    from scipy.special import exp1

    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = x < 1e-3
    large = x > 50.0
    mid = ~(small | large)
    xs = x[small]
    out[small] = xs * (1 - xs / 4 * (1 - xs / 4.5 * (1 - 3 * xs / 16)))
    xm = x[mid]
    out[mid] = np.euler_gamma + np.log(xm) + exp1(xm)
    xl = x[large]
    with np.errstate(divide="ignore"):
        out[large] = np.euler_gamma + np.log(xl)
    return out


def rect_log_avg(hx: float, hy: float) -> float:
    """Mean of ln|u| over the cell [-hx/2,hx/2] x [-hy/2,hy/2] (exact)."""
    a, b = hx / 2.0, hy / 2.0
    # antiderivative of ln(x^2+y^2): xy ln(x^2+y^2) - 3xy + x^2 atan(y/x) + y^2 atan(x/y)
    val = (a * b * (np.log(a * a + b * b) - 3.0)
           + a * a * np.arctan(b / a) + b * b * np.arctan(a / b))
    return float(val / (2.0 * a * b))


class LogPotential:
    """Solution R of Lap R = b with R ~ (flux/2pi) ln r at infinity.

    Realized as a zero-flux periodic spectral solve plus the closed-form
    potential of a matched Gaussian carrying all the flux.  The additive
    constant is pinned by direct log-kernel quadrature at the centroid.
    """

    def __init__(self, periodic_part: ScalarSamples, flux: float, centroid: complex, s: float):
        self.periodic_part = periodic_part
        self.flux = flux
        self.centroid = centroid
        self.s = s
        self.offset = 0.0

    def gaussian_term(self, z):
        r2 = np.abs(np.asarray(z, dtype=complex) - self.centroid) ** 2
        return self.flux / (4 * np.pi) * _ein(r2 / (2 * self.s**2))

    def eval(self, z):
        return (interp_periodic(self.periodic_part, z).real
                + self.gaussian_term(z) + self.offset)

    def on_grid(self) -> ScalarSamples:
        g = self.periodic_part.grid
        Z = g.zmesh()
        vals = self.periodic_part.values.real + self.gaussian_term(Z) + self.offset
        return ScalarSamples(g, vals)


def poisson_log(b: ScalarSamples, boundary_tol: float = 1e-9) -> LogPotential:
    """Solve Lap R = b for compactly supported b with log growth matched to the flux."""
    g = b.grid
    vals = b.values.real
    bmax = np.max(np.abs(vals))
    if bmax == 0.0:
        return LogPotential(ScalarSamples(g, np.zeros_like(b.values)), 0.0,
                            g.x0 + g.period_x / 2 + 1j * (g.y0 + g.period_y / 2),
                            min(g.period_x, g.period_y) / 16)
    edge = max(np.max(np.abs(vals[0, :])), np.max(np.abs(vals[-1, :])),
               np.max(np.abs(vals[:, 0])), np.max(np.abs(vals[:, -1])))
    if edge > boundary_tol * bmax:
        raise ValueError("source has not decayed at the box boundary; enlarge the box")

    h2 = g.h_x * g.h_y
    flux = float(np.sum(vals) * h2)
    X, Y = g.mesh()
    if abs(flux) > 1e-12 * bmax * h2 * vals.size:
        cx = float(np.sum(X * vals) * h2 / flux)
        cy = float(np.sum(Y * vals) * h2 / flux)
    else:
        cx = g.x0 + g.period_x / 2
        cy = g.y0 + g.period_y / 2
    centroid = complex(cx, cy)

    # Gaussian with the same flux and centroid; must be resolved and decayed
    dist = min(cx - g.x0, g.x0 + g.period_x - cx, cy - g.y0, g.y0 + g.period_y - cy)
    s = min(dist / 8.0, min(g.period_x, g.period_y) / 16.0)
    if s < 3 * max(g.h_x, g.h_y):
        raise ValueError("grid too coarse to resolve the flux-carrying Gaussian")
    r2 = (X - cx) ** 2 + (Y - cy) ** 2
    gauss = np.exp(-r2 / (2 * s**2)) / (2 * np.pi * s**2)
    b0 = vals - flux * gauss

    KX, KY = g.wavenumbers()
    k2 = KX**2 + KY**2
    k2[0, 0] = 1.0
    rhat = -np.fft.fft2(b0) / k2
    rhat[0, 0] = 0.0
    p = ScalarSamples(g, np.fft.ifft2(rhat).real.astype(complex))

    pot = LogPotential(p, flux, centroid, s)

    # pin the additive constant to the true free-space potential at the centroid
    dist2 = np.abs(X + 1j * Y - centroid) ** 2
    kern = 0.5 * np.log(np.where(dist2 > 0, dist2, 1.0))
    near = dist2 < (1.5 * max(g.h_x, g.h_y)) ** 2
    if np.any(near):
        for j, i in zip(*np.nonzero(near)):
            x0c, y0c = X[j, i] - cx, Y[j, i] - cy
            kern[j, i] = _cell_log_avg(x0c, y0c, g.h_x, g.h_y)
    direct = float(np.sum(kern * vals) * h2 / (2 * np.pi))
    pot.offset = direct - pot.eval(centroid)
    return pot


def _cell_log_avg(x0: float, y0: float, hx: float, hy: float) -> float:
    """Mean of ln|u - (x0,y0)| over the cell [-hx/2,hx/2] x [-hy/2,hy/2]."""
    from scipy.integrate import dblquad

    val, _ = dblquad(lambda y, x: 0.5 * np.log((x - x0) ** 2 + (y - y0) ** 2 + 1e-300),
                     -hx / 2, hx / 2, -hy / 2, hy / 2, epsabs=1e-12)
    return float(val / (hx * hy))
