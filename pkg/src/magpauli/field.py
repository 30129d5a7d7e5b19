"""Exponential/trigonometric master fields c and the derived magnetic data.

A field is a finite sum  c(z, zbar) = sum_s kappa_s exp(p_s z - k_s zbar).
With the package derivative convention each term differentiates to
d -> 2 p_s, dbar -> -2 k_s.  The magnetic potential is Phi = log c and the
field B = (1/2) Lap log c; operators take Phi = (sign/2) log c through
MagneticCoeffs (sign +1 for the sqrt(c) sector, -1 for the reciprocal one).

The exponent W_s = p_s z - k_s zbar is a real linear form alpha_s x +
beta_s y exactly when k_s = -conj(p_s) (real exponential terms) or purely
oscillatory when k_s = +conj(p_s).
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .numcore import AnalyticField, MagneticCoeffs

__all__ = [
    "ExpTerm",
    "ExpField",
    "LogField",
    "eval_c",
    "eval_phi",
    "eval_b",
    "tropical_indicator",
    "shift_polytope",
    "ShiftPolytope",
    "flux_disk",
    "FluxReport",
    "magnetic_coeffs",
]


@dataclass(frozen=True)
class ExpTerm:
    kappa: complex
    p: complex
    k: complex

    @property
    def alpha_beta(self) -> tuple[complex, complex]:
        """Coefficients of W = alpha x + beta y (complex in general)."""
        return self.p - self.k, 1j * (self.p + self.k)

    @property
    def is_real_linear(self) -> bool:
        a, b = self.alpha_beta
        return abs(a.imag) < 1e-12 and abs(b.imag) < 1e-12


class ExpField(AnalyticField):
    """Finite exponential sum with closed-form Wirtinger derivatives."""

    def __init__(self, terms, lattice=None):
        self.terms = tuple(ExpTerm(complex(k), complex(p), complex(q))
                           for k, p, q in [(t.kappa, t.p, t.k) if isinstance(t, ExpTerm) else t
                                           for t in terms])
        if not self.terms:
            raise ValueError("field needs at least one term")
        self.lattice = lattice
        self._kap = np.array([t.kappa for t in self.terms])
        self._p = np.array([t.p for t in self.terms])
        self._k = np.array([t.k for t in self.terms])

    # --- constructors -----------------------------------------------------
    @classmethod
    def constant(cls, value: complex = 1.0) -> "ExpField":
        return cls([(value, 0.0, 0.0)])

    @classmethod
    def cosine(cls, kappa0: float = 1.0, ax: float = 0.4, ay: float = 0.4) -> "ExpField":
        """kappa0 + ax cos x + ay cos y (the limit-cycle example field)."""
        return cls.from_conjugate_pairs([(ax / 2, 0.5), (ay / 2, 0.5j)], kappa0)

    @classmethod
    def from_conjugate_pairs(cls, pairs, const: complex = 1.0) -> "ExpField":
        """c = const + sum_j (a_j e^{l_j zbar - conj(l_j) z} + conj pair).

        This is the real trigonometric family of the boundary-foliation
        example; pairs is a list of (a_j, l_j).
        """
        terms = [(const, 0.0, 0.0)]
        for a, l in pairs:
            a, l = complex(a), complex(l)
            terms.append((a, -l.conjugate(), -l))
            terms.append((a.conjugate(), l.conjugate(), l))
        return cls(terms)

    @classmethod
    def from_real_exponents(cls, entries) -> "ExpField":
        """Lump-type positive field from (kappa_s, alpha_s, beta_s) real triples."""
        terms = []
        for kap, al, be in entries:
            p = (al - 1j * be) / 2
            k = -(al + 1j * be) / 2
            terms.append((kap, p, k))
        return cls(terms)

    # --- flags -------------------------------------------------------------
    def is_real(self, probe: int = 120, seed: int = 7, box: float = 3.0) -> bool:
        rng = np.random.default_rng(seed)
        z = rng.uniform(-box, box, probe) + 1j * rng.uniform(-box, box, probe)
        vals = self.value(z)
        scale = max(1.0, np.max(np.abs(vals)))
        return bool(np.max(np.abs(vals.imag)) < 1e-12 * scale)

    def is_periodic(self) -> bool:
        for t in self.terms:
            a, b = t.alpha_beta
            if abs(a.real) > 1e-12 or abs(b.real) > 1e-12:
                return False
        return True

    # --- evaluation ---------------------------------------------------------
    def _weights(self, z):
        z = np.asarray(z, dtype=complex)
        return np.exp(np.multiply.outer(z, self._p) - np.multiply.outer(np.conj(z), self._k))

    def value(self, z):
        out = self._weights(z) @ self._kap
        return complex(out) if np.ndim(out) == 0 else out

    def d(self, z):
        out = self._weights(z) @ (2.0 * self._p * self._kap)
        return complex(out) if np.ndim(out) == 0 else out

    def dbar(self, z):
        out = self._weights(z) @ (-2.0 * self._k * self._kap)
        return complex(out) if np.ndim(out) == 0 else out

    def dd(self, z):
        out = self._weights(z) @ (4.0 * self._p**2 * self._kap)
        return complex(out) if np.ndim(out) == 0 else out

    def ddbar(self, z):
        out = self._weights(z) @ (-4.0 * self._p * self._k * self._kap)
        return complex(out) if np.ndim(out) == 0 else out

    def dbardbar(self, z):
        out = self._weights(z) @ (4.0 * self._k**2 * self._kap)
        return complex(out) if np.ndim(out) == 0 else out

    def scaled(self, factor: complex) -> "ExpField":
        return ExpField([(t.kappa * factor, t.p, t.k) for t in self.terms], self.lattice)

    def gauge_shifted(self, gamma: float = 0.0, alpha: float = 0.0, beta: float = 0.0) -> "ExpField":
        """c -> c * exp(gamma + alpha x + beta y): gauge equivalent field."""
        extra_p = (alpha - 1j * beta) / 2
        extra_k = -(alpha + 1j * beta) / 2
        return ExpField([(t.kappa * cmath.exp(gamma), t.p + extra_p, t.k + extra_k)
                         for t in self.terms], self.lattice)

    def reciprocal_coeffs(self) -> MagneticCoeffs:
        return magnetic_coeffs(self, sign=-1)

    # --- serialization -------------------------------------------------------
    def to_json(self) -> list:
        return [{"kappa": [t.kappa.real, t.kappa.imag],
                 "p": [t.p.real, t.p.imag],
                 "k": [t.k.real, t.k.imag]} for t in self.terms]

    @classmethod
    def from_json(cls, obj) -> "ExpField":
        terms = [(complex(*e["kappa"]), complex(*e["p"]), complex(*e["k"])) for e in obj]
        return cls(terms)


class SingularFieldError(ZeroDivisionError):
    """Raised where log-derived quantities hit a zero of c."""


class LogField(AnalyticField):
    """Phi = scale * log(base) with derivatives via the chain rule."""

    def __init__(self, base: AnalyticField, scale: float = 1.0):
        self.base = base
        self.scale = scale

    def _guard(self, c):
        if np.min(np.abs(c)) < 1e-12:
            raise SingularFieldError("log field evaluated at a zero of c")
        return c

    def value(self, z):
        return self.scale * np.log(self._guard(self.base.value(z)))

    def d(self, z):
        c = self._guard(self.base.value(z))
        return self.scale * self.base.d(z) / c

    def dbar(self, z):
        c = self._guard(self.base.value(z))
        return self.scale * self.base.dbar(z) / c

    def ddbar(self, z):
        c = self._guard(self.base.value(z))
        return self.scale * (self.base.ddbar(z) / c - self.base.d(z) * self.base.dbar(z) / c**2)


class PowField(AnalyticField):
    """base^s for nonvanishing base (principal branch)."""

    def __init__(self, base: AnalyticField, s: float):
        self.base = base
        self.s = s

    def _cs(self, z):
        c = self.base.value(z)
        if np.min(np.abs(c)) < 1e-12:
            raise SingularFieldError("power field at a zero of the base")
        return c, np.power(c, self.s)

    def value(self, z):
        return self._cs(z)[1]

    def d(self, z):
        c, cs = self._cs(z)
        return self.s * cs / c * self.base.d(z)

    def dbar(self, z):
        c, cs = self._cs(z)
        return self.s * cs / c * self.base.dbar(z)

    def ddbar(self, z):
        c, cs = self._cs(z)
        dc, dbc, ddbc = self.base.d(z), self.base.dbar(z), self.base.ddbar(z)
        return self.s * cs / c * (ddbc + (self.s - 1) * dc * dbc / c)


def magnetic_coeffs(c_field: AnalyticField, sign: int = +1) -> MagneticCoeffs:
    """Coefficients with Phi = (sign/2) log c.

    sign=+1: Qplus annihilates sqrt(c) * holomorphic (ground sector);
    sign=-1: the reciprocal-field gauge in which psi'/sqrt(c) lives.
    """
    return MagneticCoeffs(phi=LogField(c_field, 0.5 * sign))


# ---------------------------------------------------------------------------
# pointwise evaluators
# ---------------------------------------------------------------------------

def eval_c(field: AnalyticField, point) -> complex:
    from .numcore import as_complex
    return field.value(as_complex(point))


def eval_phi(field: AnalyticField, point) -> complex:
    """Phi = log c (the potential before the sector 1/2 factor)."""
    from .numcore import as_complex
    z = as_complex(point)
    c = field.value(z)
    if abs(c) < 1e-12:
        raise SingularFieldError("Phi undefined at a zero of c")
    return np.log(c)


def eval_b(field: AnalyticField, point, imag_tol: float = 1e-8):
    """B = (1/2) Lap log c in closed form; real for real positive c."""
    from .numcore import as_complex
    z = as_complex(point) if np.ndim(point) == 0 else np.asarray(point, dtype=complex)
    c = field.value(z)
    if np.min(np.abs(c)) < 1e-12:
        raise SingularFieldError("B undefined at a zero of c")
    val = 0.5 * (field.ddbar(z) / c - field.d(z) * field.dbar(z) / c**2)
    return val.real if np.ndim(val) else float(np.real(val))


# ---------------------------------------------------------------------------
# tropical indicator and the shift polytope
# ---------------------------------------------------------------------------

def _real_exponents(field: ExpField) -> np.ndarray:
    rows = []
    for t in field.terms:
        a, b = t.alpha_beta
        if not t.is_real_linear:
            raise ValueError("tropical data needs real linear exponents")
        rows.append([a.real, b.real])
    return np.array(rows)


def tropical_indicator(field: ExpField, phi, clip: bool = False):
    """Angular support function I'(phi) = max_s (alpha_s cos + beta_s sin)."""
    ab = _real_exponents(field)
    phi = np.asarray(phi, dtype=float)
    vals = np.max(np.multiply.outer(np.cos(phi), ab[:, 0])
                  + np.multiply.outer(np.sin(phi), ab[:, 1]), axis=-1)
    if clip:
        vals = np.maximum(vals, 0.0)
    return float(vals) if vals.ndim == 0 else vals


@dataclass
class ShiftPolytope:
    """Closure of the admissible gauge shifts; hull of the negated exponents."""

    vertices: np.ndarray   # (m, 2) vertices of the closure (may be a segment/point)
    rank: int              # 0 point, 1 segment, 2 polygon
    equations: np.ndarray | None  # halfplane rows (a, b, c): a x + b y + c <= 0

    @property
    def is_empty(self) -> bool:
        return len(self.vertices) == 0

    @property
    def has_interior(self) -> bool:
        return self.rank == 2

    def contains(self, point, tol: float = 1e-10) -> bool:
        p = np.asarray(point, dtype=float)
        if self.is_empty:
            return False
        if self.rank == 2:
            return bool(np.max(self.equations[:, :2] @ p + self.equations[:, 2]) <= tol)
        if self.rank == 1:
            a, b = self.vertices[0], self.vertices[-1]
            t = np.dot(p - a, b - a) / np.dot(b - a, b - a)
            proj = a + np.clip(t, 0.0, 1.0) * (b - a)
            return bool(np.linalg.norm(p - proj) <= tol)
        return bool(np.linalg.norm(p - self.vertices[0]) <= tol)

    def strictly_contains(self, point, tol: float = 1e-10) -> bool:
        if self.rank < 2:
            return False
        p = np.asarray(point, dtype=float)
        return bool(np.max(self.equations[:, :2] @ p + self.equations[:, 2]) < -tol)


def shift_polytope(field: ExpField) -> ShiftPolytope:
    """Shifts (alpha, beta) keeping the shifted tropical indicator >= 0.

    The shifted family has I' >= 0 everywhere iff (-alpha, -beta) lies in
    the convex hull of the exponent set, so the polytope is the negated
    hull.  Open part nonempty for l > 2 terms in general position, the
    closure already for l > 1.
    """
    ab = -_real_exponents(field)
    if len(ab) < 2:
        return ShiftPolytope(np.zeros((0, 2)), 0, None) if len(ab) == 0 else \
            ShiftPolytope(ab.copy(), 0, None)
    centered = ab - ab.mean(axis=0)
    svals = np.linalg.svd(centered, compute_uv=False)
    scale = max(1.0, float(np.max(np.abs(ab))))
    rank = int(np.sum(svals > 1e-12 * scale))
    if rank == 0:
        return ShiftPolytope(ab[:1].copy(), 0, None)
    if rank == 1:
        u = centered[np.argmax(np.abs(centered).sum(axis=1))]
        u = u / np.linalg.norm(u)
        t = centered @ u
        lo, hi = np.argmin(t), np.argmax(t)
        return ShiftPolytope(np.array([ab[lo], ab[hi]]), 1, None)
    from scipy.spatial import ConvexHull

    hull = ConvexHull(ab)
    return ShiftPolytope(ab[hull.vertices], 2, hull.equations.copy())


# ---------------------------------------------------------------------------
# flux through a disc and the lump asymptotics
# ---------------------------------------------------------------------------

@dataclass
class FluxReport:
    radius: float
    flux: float
    tropical_integral: float
    predicted: float   # (radius/2) * tropical integral, B = (1/2) Lap log c convention
    residual: float


def cell_flux(field: AnalyticField, lattice, x0: float, y0: float, n: int = 2048,
              guard: float = 1e-6) -> float:
    """Flux of B = (1/2) Lap log |field| over one period cell.

    Computed as the boundary integral (1/2) oint d(log field)/dn ds over
    the rectangle [x0, x0+2w] x [y0, y0+2w'], which counts distributional
    flux carried by interior zeros as well.  The edges must avoid zeros.
    """
    w, wp = lattice.omega, lattice.omega_prime
    total = 0.0
    ys = y0 + 2 * wp * (np.arange(n) + 0.5) / n
    xs = x0 + 2 * w * (np.arange(n) + 0.5) / n

    def grad_log(z):
        c = field.value(z)
        if np.min(np.abs(c)) < guard:
            raise SingularFieldError("cell edge too close to a zero of the field")
        d, db = field.d(z), field.dbar(z)
        fx = ((d + db) / 2 / c).real
        fy = (1j * (d - db) / 2 / c).real
        return fx, fy

    for sgn, xedge in ((+1, x0 + 2 * w), (-1, x0)):
        gx, _ = grad_log(xedge + 1j * ys)
        total += sgn * np.sum(gx) * (2 * wp / n)
    for sgn, yedge in ((+1, y0 + 2 * wp), (-1, y0)):
        _, gy = grad_log(xs + 1j * yedge)
        total += sgn * np.sum(gy) * (2 * w / n)
    return 0.5 * float(total)


def flux_disk(field: ExpField, radius: float, n_theta: int = 4096) -> FluxReport:
    """Flux of B over the disc of given radius via the boundary line integral.

    flux = (1/2) oint d(log c)/dn ds, exact because B = (1/2) Lap log c
    identically.  The report carries the tropical prediction
    flux ~ (R/2) * oint I(phi) dphi for lump-type positive fields.
    """
    t = np.linspace(0.0, 2 * np.pi, n_theta, endpoint=False)
    zb = radius * np.exp(1j * t)
    c = field.value(zb)
    if np.min(np.abs(c)) < 1e-12:
        raise SingularFieldError("c vanishes on the flux contour")
    dlog = field.d(zb) / c
    # d/dn log c = Re[(d log c) e^{i phi}] with the doubled-operator convention
    dn = np.real(dlog * np.exp(1j * t))
    flux = 0.5 * np.sum(dn) * (2 * np.pi / n_theta) * radius
    try:
        tt = np.linspace(0.0, 2 * np.pi, n_theta, endpoint=False)
        itrop = float(np.sum(tropical_indicator(field, tt, clip=True)) * (2 * np.pi / n_theta))
    except ValueError:
        itrop = float("nan")
    predicted = 0.5 * radius * itrop
    return FluxReport(radius=float(radius), flux=float(flux), tropical_integral=itrop,
                      predicted=float(predicted), residual=float(flux - predicted))
