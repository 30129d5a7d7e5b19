"""Zero modes: finite-flux instanton family, magnetic Bloch family with
unitary multipliers, and the periodic pair (sqrt(c), 1/sqrt(c)).

Finite flux (rapidly decreasing b, [b] = total flux): the potential R with
Lap R = b and logarithmic growth gives the square-integrable states

    Psi_l = z^l e^{-R},  l = 0..m-1,  m <= [b]/(2 pi) < m+1

annihilated by Qplus in the gauge Phi = -R.  For [b] < 0 the mirrored
sector carries zbar^l e^{+R} annihilated by Q.

Periodic b with cell flux 2 pi m: the sigma-kernel potential

    R(z) = (1/2 pi) int_K ln|sigma(z - w)| b(w) dx dy

(measure fixed by Lap R = b) gives magnetic Bloch states

    Psi = lambda e^{-R} e^{a z} prod_j sigma(z - a_j)

whose translation multipliers are measured against the gauge phases f_j
reconstructed from the affine translation defect of R.  Unitarity holds at

    Re a = (eta/omega)  [Re sum a_j - Re M / (2 pi)]
    Im a = (eta'/omega')[Im sum a_j - Im M / (2 pi)],   M = int_K z b

(half of the published display; the measured-multiplier test is the
arbiter).  Quasimomentum is exposed through differences only:
delta(p1 + i p2) = (2 pi i / |K|) delta(sum a_j).
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field

import numpy as np

from .elliptic import RectLattice
from .field import ExpField, PowField, magnetic_coeffs
from .numcore import (LogPotential, MagneticCoeffs, PeriodicGrid, ScalarSamples,
                      interp_periodic, poisson_log, pointwise_q, pointwise_qplus,
                      rect_log_avg)

__all__ = [
    "ACProblem",
    "ACState",
    "ac_states",
    "decay_exponent",
    "SigmaKernelPotential",
    "sigma_kernel_potential",
    "DNState",
    "dn_state",
    "unitarity_params",
    "quasimomentum_difference",
    "PeriodicPair",
    "periodic_pair",
]


# ---------------------------------------------------------------------------
# finite-flux instanton states
# ---------------------------------------------------------------------------

@dataclass
class ACProblem:
    b: ScalarSamples
    flux: float = None
    m: int = None
    borderline: bool = False

    def __post_init__(self):
        quad = float(np.sum(self.b.values.real) * self.b.grid.h_x * self.b.grid.h_y)
        if self.flux is None:
            self.flux = quad
        elif abs(quad - self.flux) > 1e-6 * max(1.0, abs(self.flux)):
            raise ValueError(f"stored flux {self.flux} disagrees with quadrature {quad}")
        ratio = abs(self.flux) / (2 * np.pi)
        if self.m is None:
            self.m = int(np.floor(ratio))
        elif not self.m <= ratio < self.m + 1:
            raise ValueError("m inconsistent with flux")
        self.borderline = min(ratio - np.floor(ratio), np.ceil(ratio) - ratio) < 1e-3


@dataclass
class ACState:
    degree: int
    sector: str                 # "plus" (Qplus psi = 0) or "minus" (Q psi = 0)
    potential: LogPotential
    decay_exponent: float
    admissible: bool

    def eval(self, z):
        z = np.asarray(z, dtype=complex)
        R = self.potential.eval(z)
        if self.sector == "plus":
            return z**self.degree * np.exp(-R)
        return np.conj(z) ** self.degree * np.exp(R)

    def coeffs(self) -> MagneticCoeffs:
        """Gauge data under which the state is an exact zero mode."""
        return MagneticCoeffs(phi=_PotentialPhi(self.potential, -1.0))


class _PotentialPhi:
    """Phi = sign * R as a closed-form-ish field over the potential grid."""

    def __init__(self, potential: LogPotential, sign: float):
        self.potential = potential
        self.sign = sign
        from .numcore import grid_d, grid_dbar, grid_laplacian

        p = potential.periodic_part
        self._d = grid_d(p, "spectral")
        self._db = grid_dbar(p, "spectral")
        self._lap = grid_laplacian(p, "spectral")

    def value(self, z):
        return self.sign * self.potential.eval(z)

    def _gauss_d(self, z):
        # d of the closed-form gaussian term: radial, d = (f_x - i f_y)
        z = np.asarray(z, dtype=complex)
        u = z - self.potential.centroid
        r2 = np.abs(u) ** 2
        s2 = self.potential.s ** 2
        # d/dr of flux/(4 pi) Ein(r^2/2s^2) = flux/(4 pi) (1 - e^{-r^2/2s^2}) * 2/r
        with np.errstate(divide="ignore", invalid="ignore"):
            radial = np.where(r2 > 1e-30,
                              (1.0 - np.exp(-r2 / (2 * s2))) / r2,
                              1.0 / (2 * s2))
        # grad = radial * (x, y); d = grad_x - i grad_y = radial * conj(u)
        return self.potential.flux / (2 * np.pi) * radial * np.conj(u)

    def d(self, z):
        return self.sign * (interp_periodic(self._d, z) + self._gauss_d(z))

    def dbar(self, z):
        return self.sign * (np.conj(self._gauss_d(z)) + interp_periodic(self._db, z))

    def ddbar(self, z):
        z = np.asarray(z, dtype=complex)
        u = z - self.potential.centroid
        r2 = np.abs(u) ** 2
        s2 = self.potential.s ** 2
        gauss = self.potential.flux * np.exp(-r2 / (2 * s2)) / (2 * np.pi * s2)
        return self.sign * (interp_periodic(self._lap, z) + gauss)


def decay_exponent(potential: LogPotential, degree: int, r_lo: float, r_hi: float,
                   sector: str = "plus", n_r: int = 40, n_theta: int = 8) -> float:
    """Fitted slope of ln |Psi_l|^2 against ln r over [r_lo, r_hi]."""
    rs = np.geomspace(r_lo, r_hi, n_r)
    logs = []
    for r in rs:
        ring = potential.centroid + r * np.exp(2j * np.pi * (np.arange(n_theta) + 0.3) / n_theta)
        R = potential.eval(ring)
        if sector == "plus":
            vals = 2 * degree * np.log(r) - 2 * R
        else:
            vals = 2 * degree * np.log(r) + 2 * R
        logs.append(np.mean(vals))
    return float(np.polyfit(np.log(rs), logs, 1)[0])


def ac_states(problem: ACProblem, fit_range=None) -> list[ACState]:
    """All square-integrable instanton states of the finite-flux problem."""
    pot = poisson_log(problem.b)
    sector = "plus" if problem.flux >= 0 else "minus"
    if fit_range is None:
        g = problem.b.grid
        r_hi = 0.45 * min(g.period_x, g.period_y)
        r_lo = r_hi / 8.0
    else:
        r_lo, r_hi = fit_range
    out = []
    for l in range(problem.m):
        expo = decay_exponent(pot, l, r_lo, r_hi, sector)
        out.append(ACState(degree=l, sector=sector, potential=pot,
                           decay_exponent=expo, admissible=expo < -2.0))
    return out


# ---------------------------------------------------------------------------
# sigma-kernel potential for periodic fields
# ---------------------------------------------------------------------------

class SigmaKernelPotential:
    """R(z) = (1/2pi) int_K ln|sigma(z-w)| b(w) dxdy on a centered cell.

    Split into a periodic convolution with the periodized kernel
    kappa_per = ln|sigma(u)| - (eta/2w) ux^2 + (eta'/2w') uy^2 plus exact
    quadratic and linear parts carrying the flux and first moments.
    """

    def __init__(self, lattice: RectLattice, b: ScalarSamples):
        g = b.grid
        if abs(g.period_x - 2 * lattice.omega) > 1e-12 or \
           abs(g.period_y - 2 * lattice.omega_prime) > 1e-12:
            raise ValueError("grid periods must match the lattice cell")
        self.lattice = lattice
        self.grid = g
        h2 = g.h_x * g.h_y
        bv = b.values.real
        self.flux = float(np.sum(bv) * h2)
        self.m = self.flux / (2 * np.pi)
        X, Y = g.mesh()
        M = np.sum((X + 1j * Y) * bv) * h2
        self.Mx, self.My = float(M.real), float(M.imag)

        # periodized kernel sampled on the convolution offsets
        ux = g.h_x * np.arange(g.nx)
        uy = g.h_y * np.arange(g.ny)
        ux = (ux + lattice.omega) % (2 * lattice.omega) - lattice.omega
        uy = (uy + lattice.omega_prime) % (2 * lattice.omega_prime) - lattice.omega_prime
        UX, UY = np.meshgrid(ux, uy)
        U = UX + 1j * UY
        with np.errstate(divide="ignore", invalid="ignore"):
            kern = self.lattice.log_sigma_abs(U)
        kern -= (lattice.eta / (2 * lattice.omega)) * UX**2
        kern += (lattice.eta_prime / (2 * lattice.omega_prime)) * UY**2
        kern[0, 0] = rect_log_avg(g.h_x, g.h_y)
        conv = np.fft.ifft2(np.fft.fft2(kern) * np.fft.fft2(bv)).real * h2 / (2 * np.pi)
        self.periodic_part = ScalarSamples(g, conv.astype(complex))

    def eval(self, z):
        z = np.asarray(z, dtype=complex)
        lat = self.lattice
        x, y = z.real, z.imag
        quad = (self.m * lat.eta / (2 * lat.omega)) * x**2 \
            - (self.m * lat.eta_prime / (2 * lat.omega_prime)) * y**2
        lin = -(lat.eta / (2 * np.pi * lat.omega)) * self.Mx * x \
            + (lat.eta_prime / (2 * np.pi * lat.omega_prime)) * self.My * y
        out = interp_periodic(self.periodic_part, z).real + quad + lin
        return float(out) if np.ndim(out) == 0 else out

    def translation_defect(self, period: complex, probes=None):
        """Affine fit of g(z) = R(z + period) - R(z); returns (gx, gy, g0, fitresid)."""
        if probes is None:
            rng = np.random.default_rng(1234)
            w, wp = self.lattice.omega, self.lattice.omega_prime
            probes = (rng.uniform(-0.8 * w, 0.8 * w, 16)
                      + 1j * rng.uniform(-0.8 * wp, 0.8 * wp, 16))
        probes = np.asarray(probes, dtype=complex)
        gvals = self.eval(probes + period) - self.eval(probes)
        A = np.column_stack([probes.real, probes.imag, np.ones_like(probes.real)])
        coef, res, _, _ = np.linalg.lstsq(A, gvals, rcond=None)
        fitresid = float(np.max(np.abs(A @ coef - gvals)))
        return float(coef[0]), float(coef[1]), float(coef[2]), fitresid


def sigma_kernel_potential(lattice: RectLattice, b: ScalarSamples) -> SigmaKernelPotential:
    return SigmaKernelPotential(lattice, b)


# ---------------------------------------------------------------------------
# magnetic Bloch states
# ---------------------------------------------------------------------------

@dataclass
class DNState:
    lattice: RectLattice
    potential: SigmaKernelPotential
    a: complex
    zeros: tuple
    lam: complex
    multipliers: tuple | None = None       # measured (kappa_1, kappa_2)
    base_point_spread: float | None = None

    @property
    def m(self) -> int:
        return int(round(self.potential.m))

    def eval(self, z):
        z = np.asarray(z, dtype=complex)
        R = self.potential.eval(z)
        out = self.lam * np.exp(-R) * np.exp(self.a * z)
        for aj in self.zeros:
            out = out * self.lattice.sigma(z - complex(aj))
        return out

    def quasimomentum(self) -> complex:
        """p1 + i p2 up to the undetermined additive constant; use differences."""
        lat = self.lattice
        s = sum(complex(aj) for aj in self.zeros)
        p1 = (self.a - (lat.eta / lat.omega) * s).imag
        p2 = (self.a - (lat.eta_prime / lat.omega_prime) * s).real
        return complex(p1, p2)


def _gauge_phase(defect_gx: float, defect_gy: float):
    """f(x, y) with (f_x, f_y) = (-d_y g, d_x g) for the affine defect g."""
    return lambda z: -defect_gy * np.real(z) + defect_gx * np.imag(z)


def dn_state(lattice: RectLattice, b: ScalarSamples, zeros, lam: complex = 1.0,
             a: complex | None = None, measure: bool = True,
             n_base: int = 6, seed: int = 5) -> DNState:
    """Build the magnetic Bloch state and measure its translation multipliers."""
    pot = SigmaKernelPotential(lattice, b)
    m = int(round(pot.m))
    if m < 1:
        raise ValueError("cell flux must be a positive multiple of 2 pi")
    if abs(pot.m - m) > 1e-6:
        raise ValueError(f"cell flux {pot.flux} is not an integer multiple of 2 pi")
    if len(zeros) != m:
        raise ValueError(f"need exactly m = {m} zeros")
    if lam == 0:
        raise ValueError("lambda must be nonzero")
    if a is None:
        a = unitarity_params(lattice, zeros, pot)
    state = DNState(lattice, pot, complex(a), tuple(complex(x) for x in zeros), complex(lam))
    if measure:
        kappas, spread = measure_multipliers(state, n_base=n_base, seed=seed)
        state.multipliers = kappas
        state.base_point_spread = spread
    return state


def measure_multipliers(state: DNState, n_base: int = 6, seed: int = 5):
    """kappa_j = Psi(z + period_j) e^{-i f_j(z)} / Psi(z), averaged over base points.

    The gauge phases come from the measured affine translation defect of R.
    Returns ((kappa_1, kappa_2), max base-point spread).
    """
    lat = state.lattice
    rng = np.random.default_rng(seed)
    kappas = []
    spread = 0.0
    for period in (2 * lat.omega, 2j * lat.omega_prime):
        gx, gy, _, fitres = state.potential.translation_defect(period)
        if fitres > 1e-6:
            raise ArithmeticError(f"translation defect not affine (residual {fitres:.2e})")
        f = _gauge_phase(gx, gy)
        vals = []
        tries = 0
        while len(vals) < n_base and tries < 50 * n_base:
            tries += 1
            z = complex(rng.uniform(-0.8 * lat.omega, 0.8 * lat.omega),
                        rng.uniform(-0.8 * lat.omega_prime, 0.8 * lat.omega_prime))
            base = state.eval(z)
            if abs(base) < 1e-6:
                continue
            vals.append(state.eval(z + period) * cmath.exp(-1j * f(z)) / base)
        vals = np.array(vals)
        mean = vals.mean()
        spread = max(spread, float(np.max(np.abs(vals - mean))))
        kappas.append(complex(mean))
    return tuple(kappas), spread


def unitarity_params(lattice: RectLattice, zeros, potential_or_b) -> complex:
    """The value of a making both measured multipliers unitary.

    Derived from the sigma quasi-periodicity of the state: half of the
    published display, which carries a spurious factor 2.
    """
    if isinstance(potential_or_b, SigmaKernelPotential):
        pot = potential_or_b
    else:
        pot = SigmaKernelPotential(lattice, potential_or_b)
    s = sum(complex(z) for z in zeros)
    re_a = (lattice.eta / lattice.omega) * (s.real - pot.Mx / (2 * np.pi))
    im_a = (lattice.eta_prime / lattice.omega_prime) * (s.imag - pot.My / (2 * np.pi))
    return complex(re_a, im_a)


def quasimomentum_difference(state_a: DNState, state_b: DNState) -> complex:
    """delta(p1 + i p2); equals (2 pi i/|K|) * delta(sum a_j) for unitary states."""
    return state_b.quasimomentum() - state_a.quasimomentum()


# ---------------------------------------------------------------------------
# periodic ground pair
# ---------------------------------------------------------------------------

@dataclass
class PeriodicPair:
    c: ExpField
    psi0: PowField    # sqrt(c), Qplus psi0 = 0
    phi0: PowField    # 1/sqrt(c), Q phi0 = 0

    def residuals(self, z) -> tuple:
        """Closed-form |Qplus psi0| and |Q phi0| at points (identically zero)."""
        coeffs = magnetic_coeffs(self.c, +1)
        r1 = np.max(np.abs(pointwise_qplus(coeffs, self.psi0, z)))
        r2 = np.max(np.abs(pointwise_q(coeffs, self.phi0, z)))
        return float(r1), float(r2)


def periodic_pair(c: ExpField) -> PeriodicPair:
    """Ground pair (sqrt(c), 1/sqrt(c)) for real nonvanishing periodic c."""
    if not c.is_real():
        raise ValueError("c must be real")
    if not c.is_periodic():
        raise ValueError("c must be trigonometric (periodic)")
    rng = np.random.default_rng(99)
    probe = rng.uniform(-8, 8, 4000) + 1j * rng.uniform(-8, 8, 4000)
    vals = c.value(probe).real
    if np.min(vals) < 1e-9:
        # sign changes (or negative c) refuse the positive square root
        raise ValueError("c vanishes or changes sign; route through the singular pipeline")
    return PeriodicPair(c, PowField(c, 0.5), PowField(c, -0.5))
