"""Baker-Akhiezer zero-level machinery on split spectral curves.

Genus 0: the Bloch function is e^{k zbar} times a rational function of the
spectral parameter.  Two normalizations are supported: the interpolation
form with free pole divisor a_1..a_l and prescribed crossing values
e^{p_s z}, and the weighted form

    psi'/k = e^{k zbar} * sum_j kappa_j e^{p_j z - k_j zbar} / (k - k_j)

whose poles sit at the crossing points.  Both represent rank one zero
modes of the same operator; for matched data they agree up to a rational
factor in k (see derived_weights / matched_ratio).

The master identity with the package derivative convention is

    dbar(psi'/k) = 2 c e^{k zbar},   c = sum_j kappa_j e^{p_j z - k_j zbar}

and the supersymmetry ratio Qplus psi / psi = -2 c k e^{k zbar} / psi'
for psi = psi'/sqrt(c), taken in the reciprocal gauge Phi = -(1/2) log c.

Genus 1: sigma-function formulas on an elliptic curve, crossing conditions
solved pointwise in z, and the desingularized field

    ctilde = c * sigma(zbar + Qt + Pt) * sigma(z + P)

which is entire; one flux quantum per cell appears in the n = 1 special
case, with Q_0 = -Q_1 and omega*zeta(Q_0) = eta*Q_0.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field

import numpy as np

from .elliptic import RectLattice
from .numcore import AnalyticField, as_complex
from .field import ExpField, PowField

__all__ = [
    "SpectralDataG0",
    "WeightedBA",
    "EllipticData",
    "BAValue",
    "psi_prime_interp",
    "psi_prime_weighted",
    "derived_weights",
    "matched_ratio",
    "dbar_identity_residual",
    "qplus_ratio",
    "psi_g1",
    "g1_crossing_residual",
    "solve_g1_weights",
    "c_tilde",
    "c_g1",
    "find_n1_crossing",
    "n1_special_data",
    "psi_ext",
    "singular_gauge_factor",
    "singular_gauge_on_contour",
    "radial_growth_exponent",
]


class DegenerateDataError(np.linalg.LinAlgError):
    def __init__(self, msg, cond=None):
        super().__init__(msg)
        self.cond = cond


# ---------------------------------------------------------------------------
# genus 0
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpectralDataG0:
    """Crossing points (k_s, p_s), s = 0..l, and pole divisor a_1..a_l."""

    crossings: tuple          # of (k_s, p_s) complex pairs
    divisor: tuple            # of a_i complex

    def __post_init__(self):
        ks = [complex(k) for k, _ in self.crossings]
        if len(self.divisor) != len(self.crossings) - 1:
            raise ValueError("divisor degree must be number of crossings minus one")
        for i, a in enumerate(ks):
            for b in ks[i + 1:]:
                if abs(a - b) < 1e-12:
                    raise ValueError("crossings must be distinct")
        for a in self.divisor:
            for k in ks:
                if abs(complex(a) - k) < 1e-9:
                    raise ValueError("divisor point collides with a crossing")

    @property
    def l(self) -> int:
        return len(self.divisor)

    def to_json(self) -> dict:
        return {"crossings": [[complex(k).real, complex(k).imag,
                               complex(p).real, complex(p).imag] for k, p in self.crossings],
                "divisor": [[complex(a).real, complex(a).imag] for a in self.divisor]}

    @classmethod
    def from_json(cls, obj) -> "SpectralDataG0":
        crossings = tuple((complex(kr, ki), complex(pr, pi))
                          for kr, ki, pr, pi in obj["crossings"])
        divisor = tuple(complex(ar, ai) for ar, ai in obj["divisor"])
        return cls(crossings, divisor)


@dataclass(frozen=True)
class WeightedBA:
    """Weights kappa_j at poles k_j with exponents p_j (poles at crossings)."""

    terms: tuple  # of (kappa_j, p_j, k_j)

    @classmethod
    def from_exp_field(cls, fieldc: ExpField) -> "WeightedBA":
        return cls(tuple((t.kappa, t.p, t.k) for t in fieldc.terms))

    def exp_field(self) -> ExpField:
        return ExpField(list(self.terms))

    @property
    def pole_set(self) -> tuple:
        return tuple(k for _, _, k in self.terms)


@dataclass(frozen=True)
class BAValue:
    value: complex
    k: complex
    multipliers: tuple | None = None


def psi_prime_interp(data: SpectralDataG0, k, z, cond_limit: float = 1e10,
                     with_coeffs: bool = False):
    """Interpolation-normalized psi' at spectral parameter k and point z.

    Solves the (l+1) x (l+1) system for the numerator coefficients
    w_0..w_l from psi'(k_s) = e^{p_s z}; the leading coefficient w_0 is
    the master field c(z).
    """
    z = as_complex(z)
    k = complex(k)
    ks = np.array([complex(kk) for kk, _ in data.crossings])
    ps = np.array([complex(pp) for _, pp in data.crossings])
    a = np.array([complex(x) for x in data.divisor])
    l = data.l
    # rows: w_0 k_s^l + ... + w_l = e^{p_s z - k_s zbar} prod_i (k_s - a_i)
    M = np.vander(ks, l + 1, increasing=False)
    rhs = np.exp(ps * z - ks * np.conj(z))
    for ai in a:
        rhs = rhs * (ks - ai)
    cond = np.linalg.cond(M)
    if not np.isfinite(cond) or cond > cond_limit:
        raise DegenerateDataError(f"interpolation system condition {cond:.3e}", cond)
    w = np.linalg.solve(M, rhs)
    denom = np.prod(k - a) if l else 1.0
    val = cmath.exp(k * np.conj(z)) * np.polyval(w, k) / denom
    if with_coeffs:
        return val, w
    return val


def psi_prime_weighted(weights: WeightedBA, k, z) -> complex:
    """Weighted-normalized psi' = k e^{k zbar} sum_j kappa_j e^{W_j}/(k - k_j)."""
    z = as_complex(z)
    k = complex(k)
    zb = z.conjugate()
    acc = 0.0 + 0.0j
    for kap, p, kj in weights.terms:
        den = k - kj
        if abs(den) < 1e-12:
            raise ZeroDivisionError(f"k hits the pole at {kj}")
        acc += kap * cmath.exp(p * z - kj * zb) / den
    return k * cmath.exp(k * zb) * acc


def derived_weights(data: SpectralDataG0) -> WeightedBA:
    """Weights kappa_s = prod_i (k_s - a_i) / prod_{t != s} (k_s - k_t).

    These are the coefficients of the leading numerator term of the
    interpolation form, so c = sum kappa_s e^{W_s} with W_s = p_s z - k_s zbar.
    """
    ks = [complex(kk) for kk, _ in data.crossings]
    ps = [complex(pp) for _, pp in data.crossings]
    out = []
    for s, k_s in enumerate(ks):
        num = np.prod([k_s - complex(ai) for ai in data.divisor]) if data.divisor else 1.0
        den = np.prod([k_s - k_t for t, k_t in enumerate(ks) if t != s])
        out.append((complex(num / den), ps[s], k_s))
    return WeightedBA(tuple(out))


def matched_ratio(data: SpectralDataG0, k) -> complex:
    """psi'_interp / psi'_weighted for the derived weights: a k-rational factor.

    Equals prod_s (k - k_s) / (k * prod_i (k - a_i)), independent of z.
    """
    k = complex(k)
    num = np.prod([k - complex(kk) for kk, _ in data.crossings])
    den = k * (np.prod([k - complex(ai) for ai in data.divisor]) if data.divisor else 1.0)
    return complex(num / den)


def dbar_identity_residual(weights: WeightedBA, k, z) -> complex:
    """dbar(psi'/k) - 2 c e^{k zbar}, in closed form (vanishes identically)."""
    z = as_complex(z)
    k = complex(k)
    zb = z.conjugate()
    # dbar[e^{(k - k_j) zbar + p_j z}] = 2 (k - k_j) * (...)
    dbar_val = 0.0 + 0.0j
    c = 0.0 + 0.0j
    for kap, p, kj in weights.terms:
        term = kap * cmath.exp(p * z - kj * zb)
        c += term
        dbar_val += 2.0 * (k - kj) * term * cmath.exp(k * zb) / (k - kj)
    return dbar_val - 2.0 * c * cmath.exp(k * zb)


def qplus_ratio(weights: WeightedBA, k, z) -> complex:
    """Closed form of Qplus psi / psi for psi = psi'/sqrt(c): -2 c k e^{k zbar}/psi'.

    The grid cross-check uses the reciprocal gauge Phi = -(1/2) log c.
    """
    z = as_complex(z)
    k = complex(k)
    psi_p = psi_prime_weighted(weights, k, z)
    if abs(psi_p) < 1e-14:
        raise ZeroDivisionError("psi' vanishes at this point (foliation singularity)")
    c = complex(weights.exp_field().value(z))
    if abs(c) < 1e-12:
        raise ZeroDivisionError("c vanishes at this point")
    return -2.0 * c * k * cmath.exp(k * z.conjugate()) / psi_p


# ---------------------------------------------------------------------------
# field algebra pieces for sigma-built fields
# ---------------------------------------------------------------------------

class SumField(AnalyticField):
    def __init__(self, parts):
        self.parts = list(parts)

    def value(self, z):
        return sum(p.value(z) for p in self.parts)

    def d(self, z):
        return sum(p.d(z) for p in self.parts)

    def dbar(self, z):
        return sum(p.dbar(z) for p in self.parts)

    def ddbar(self, z):
        return sum(p.ddbar(z) for p in self.parts)


class ProductField(AnalyticField):
    def __init__(self, *factors):
        self.factors = list(factors)

    def value(self, z):
        out = self.factors[0].value(z)
        for f in self.factors[1:]:
            out = out * f.value(z)
        return out

    def _vals_derivs(self, z):
        vals = [f.value(z) for f in self.factors]
        ds = [f.d(z) for f in self.factors]
        dbs = [f.dbar(z) for f in self.factors]
        return vals, ds, dbs

    def _prod_except(self, vals, i):
        out = None
        for j, v in enumerate(vals):
            if j == i:
                continue
            out = v if out is None else out * v
        return 1.0 if out is None else out

    def d(self, z):
        vals, ds, _ = self._vals_derivs(z)
        return sum(ds[i] * self._prod_except(vals, i) for i in range(len(vals)))

    def dbar(self, z):
        vals, _, dbs = self._vals_derivs(z)
        return sum(dbs[i] * self._prod_except(vals, i) for i in range(len(vals)))

    def ddbar(self, z):
        n = len(self.factors)
        vals = [f.value(z) for f in self.factors]
        ds = [f.d(z) for f in self.factors]
        dbs = [f.dbar(z) for f in self.factors]
        dd = [f.ddbar(z) for f in self.factors]
        total = 0.0
        for i in range(n):
            total = total + dd[i] * self._prod_except(vals, i)
            for j in range(n):
                if j == i:
                    continue
                rest = None
                for t in range(n):
                    if t in (i, j):
                        continue
                    rest = vals[t] if rest is None else rest * vals[t]
                rest = 1.0 if rest is None else rest
                total = total + ds[i] * dbs[j] * rest
        return total


class ExpBilinear(AnalyticField):
    """scale * exp(a z + b zbar)."""

    def __init__(self, a=0.0, b=0.0, scale=1.0):
        self.a, self.b, self.scale = complex(a), complex(b), complex(scale)

    def value(self, z):
        z = np.asarray(z, dtype=complex)
        out = self.scale * np.exp(self.a * z + self.b * np.conj(z))
        return complex(out) if out.ndim == 0 else out

    def d(self, z):
        return 2.0 * self.a * self.value(z)

    def dbar(self, z):
        return 2.0 * self.b * self.value(z)

    def ddbar(self, z):
        return 4.0 * self.a * self.b * self.value(z)


class SigmaFactor(AnalyticField):
    """sigma(z + shift) or sigma(zbar + shift) on a rectangular lattice."""

    def __init__(self, lattice: RectLattice, shift: complex, conjugate_arg: bool = False):
        self.lattice = lattice
        self.shift = complex(shift)
        self.conjugate_arg = conjugate_arg

    def _arg(self, z):
        z = np.asarray(z, dtype=complex)
        return (np.conj(z) if self.conjugate_arg else z) + self.shift

    def value(self, z):
        return self.lattice.sigma(self._arg(z))

    def d(self, z):
        if self.conjugate_arg:
            return np.zeros_like(np.asarray(z, dtype=complex))
        u = self._arg(z)
        return 2.0 * self.lattice.zeta(u) * self.lattice.sigma(u)

    def dbar(self, z):
        if not self.conjugate_arg:
            return np.zeros_like(np.asarray(z, dtype=complex))
        u = self._arg(z)
        return 2.0 * self.lattice.zeta(u) * self.lattice.sigma(u)

    def ddbar(self, z):
        return np.zeros_like(np.asarray(z, dtype=complex))


# ---------------------------------------------------------------------------
# genus 1
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EllipticData:
    """Genus-1 inverse data: crossings Q_s on Gamma', R_s on Gamma'',
    divisor P_1..P_n on Gamma', single divisor point P on Gamma''."""

    lattice: RectLattice
    crossings_prime: tuple    # Q_0..Q_n
    crossings_second: tuple   # R_0..R_n
    divisor_prime: tuple      # P_1..P_n
    divisor_second: complex   # P
    weights: tuple | None = None   # optional fixed w_j

    def __post_init__(self):
        n = len(self.crossings_prime) - 1
        if len(self.crossings_second) != n + 1:
            raise ValueError("crossing sets must have equal size")
        if len(self.divisor_prime) != n:
            raise ValueError("divisor_prime degree must be n")
        pts = list(self.crossings_prime)
        for i, a in enumerate(pts):
            for b in pts[i + 1:]:
                d0, _, _ = self.lattice.reduce(complex(a) - complex(b))
                if abs(d0) < 1e-9:
                    raise ValueError("crossing points coincide mod lattice")

    @property
    def n(self) -> int:
        return len(self.crossings_prime) - 1

    @property
    def t_total(self) -> complex:
        """Qt + Pt = sum of all Q_s plus all divisor points P_l."""
        return (sum(complex(q) for q in self.crossings_prime)
                + sum(complex(p) for p in self.divisor_prime))

    def to_json(self) -> dict:
        c2 = lambda w: [complex(w).real, complex(w).imag]
        return {"lattice": {"omega": self.lattice.omega, "omega_prime": self.lattice.omega_prime},
                "Q": [c2(q) for q in self.crossings_prime],
                "R": [c2(r) for r in self.crossings_second],
                "P_div": [c2(p) for p in self.divisor_prime],
                "P": c2(self.divisor_second)}

    @classmethod
    def from_json(cls, obj) -> "EllipticData":
        lat = RectLattice(obj["lattice"]["omega"], obj["lattice"]["omega_prime"])
        mk = lambda e: complex(e[0], e[1])
        return cls(lat, tuple(mk(q) for q in obj["Q"]), tuple(mk(r) for r in obj["R"]),
                   tuple(mk(p) for p in obj["P_div"]), mk(obj["P"]))


def psi_second_g1(data: EllipticData, p, z) -> complex:
    """psi''(p, z) = e^{-z zeta(p)} sigma(p+z+P) / (sigma(z+P) sigma(p+P))."""
    lat = data.lattice
    z = as_complex(z)
    p = complex(p)
    P = complex(data.divisor_second)
    den = lat.sigma(z + P) * lat.sigma(p + P)
    if abs(den) < 1e-14:
        raise ZeroDivisionError("psi'' at a sigma zero")
    return cmath.exp(-z * lat.zeta(p)) * lat.sigma(p + z + P) / den


def solve_g1_weights(data: EllipticData, z) -> np.ndarray:
    """Weights w_s(z) from the crossing conditions psi'(Q_s) = psi''(R_s).

    The conditions decouple: each fixes one w_s.  Solved at the given
    base point z (the paper's display leaves the z-dependence implicit).
    """
    lat = data.lattice
    z = as_complex(z)
    zb = z.conjugate()
    T = data.t_total
    Q = [complex(q) for q in data.crossings_prime]
    R = [complex(r) for r in data.crossings_second]
    Pl = [complex(p) for p in data.divisor_prime]
    sT = lat.sigma(zb + T)
    if abs(sT) < 1e-14:
        raise ZeroDivisionError("weights undefined at a zero of sigma(zbar + T)")
    w = []
    for s, Qs in enumerate(Q):
        Es = np.prod([lat.sigma(Qs - Qt) for t, Qt in enumerate(Q) if t != s]) \
            / (np.prod([lat.sigma(Qs + p) for p in Pl]) if Pl else 1.0)
        lim_coeff = cmath.exp(-zb * lat.zeta(Qs)) * Es * sT
        w.append(psi_second_g1(data, R[s], z) / lim_coeff)
    return np.array(w)


def psi_g1(data: EllipticData, which: str, kp, z, weights=None) -> complex:
    """The genus-1 Baker-Akhiezer branches, formulas taken verbatim.

    which = 'prime' evaluates psi'(k, z) (crossing limits handled
    algebraically when k hits a Q_s); which = 'second' evaluates psi''(p, z).
    """
    if which == "second":
        return psi_second_g1(data, kp, z)
    if which != "prime":
        raise ValueError(which)
    lat = data.lattice
    z = as_complex(z)
    zb = z.conjugate()
    k = complex(kp)
    T = data.t_total
    Q = [complex(q) for q in data.crossings_prime]
    Pl = [complex(p) for p in data.divisor_prime]
    w = solve_g1_weights(data, z) if weights is None else np.asarray(weights)

    # k at a crossing: the algebraic limit keeps only the matching term
    for s, Qs in enumerate(Q):
        if abs(k - Qs) < 1e-12:
            Es = np.prod([lat.sigma(Qs - Qt) for t, Qt in enumerate(Q) if t != s]) \
                / (np.prod([lat.sigma(Qs + p) for p in Pl]) if Pl else 1.0)
            return cmath.exp(-zb * lat.zeta(Qs)) * Es * w[s] * lat.sigma(zb + T)

    pref = cmath.exp(-zb * lat.zeta(k))
    pref *= np.prod([lat.sigma(k - Qs) for Qs in Q])
    if Pl:
        pref /= np.prod([lat.sigma(k + p) for p in Pl])
    acc = 0.0 + 0.0j
    for j, Qj in enumerate(Q):
        acc += w[j] * lat.sigma(k + zb + T - Qj) / lat.sigma(k - Qj)
    return pref * acc


def g1_crossing_residual(data: EllipticData, z, weights=None) -> float:
    """max_s |psi'(Q_s, z) - psi''(R_s, z)| for the solved (or given) weights."""
    w = solve_g1_weights(data, z) if weights is None else weights
    out = 0.0
    for s in range(data.n + 1):
        lhs = psi_g1(data, "prime", data.crossings_prime[s], z, weights=w)
        rhs = psi_second_g1(data, data.crossings_second[s], z)
        out = max(out, abs(lhs - rhs))
    return out


class CTildeField(SumField):
    """Entire desingularized field ctilde = c sigma(zbar+T) sigma(z+P).

    Substituting the pointwise crossing weights collapses the genus-1 c
    into the manifestly entire sum

      ctilde = sum_j N_j e^{zeta(Q_j) zbar - zeta(R_j) z}
                       sigma(zbar + T - Q_j) sigma(z + P + R_j)
    """

    def __init__(self, data: EllipticData):
        lat = data.lattice
        T = data.t_total
        Q = [complex(q) for q in data.crossings_prime]
        R = [complex(r) for r in data.crossings_second]
        Pl = [complex(p) for p in data.divisor_prime]
        P = complex(data.divisor_second)
        C0 = np.prod([lat.sigma(-q) for q in Q]) \
            / (np.prod([lat.sigma(p) for p in Pl]) if Pl else 1.0)
        parts = []
        for j, Qj in enumerate(Q):
            Nj = C0 * (np.prod([lat.sigma(Qj + p) for p in Pl]) if Pl else 1.0)
            Nj /= (lat.sigma(R[j] + P) * lat.sigma(-Qj)
                   * np.prod([lat.sigma(Qj - Qt) for t, Qt in enumerate(Q) if t != j]))
            parts.append(ProductField(
                ExpBilinear(a=-lat.zeta(R[j]), b=lat.zeta(Qj), scale=Nj),
                SigmaFactor(lat, T - Qj, conjugate_arg=True),
                SigmaFactor(lat, P + R[j], conjugate_arg=False),
            ))
        super().__init__(parts)
        self.data = data


def c_tilde(data: EllipticData) -> CTildeField:
    return CTildeField(data)


def c_g1(data: EllipticData) -> AnalyticField:
    """The singular genus-1 master field c = ctilde / (sigma(zbar+T) sigma(z+P))."""
    lat = data.lattice
    return ProductField(
        CTildeField(data),
        PowField(SigmaFactor(lat, data.t_total, conjugate_arg=True), -1.0),
        PowField(SigmaFactor(lat, complex(data.divisor_second), conjugate_arg=False), -1.0),
    )


def find_n1_crossing(lattice: RectLattice) -> complex:
    """Root Q_0 = i y* of omega*zeta(Q) = eta*Q on the imaginary axis.

    A sign change of omega*Im zeta(iy) - eta*y always exists in
    (omega', 2*omega'); bisection plus Newton polish.
    """
    om, eta = lattice.omega, lattice.eta

    def g(y):
        return om * complex(lattice.zeta(1j * y)).imag - eta * y

    lo, hi = lattice.omega_prime * 1.0001, 2 * lattice.omega_prime * 0.9999
    glo, ghi = g(lo), g(hi)
    if glo * ghi > 0:
        raise ValueError("no sign change found for the n=1 crossing equation")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        if glo * gm <= 0:
            hi, ghi = mid, gm
        else:
            lo, glo = mid, gm
    y = 0.5 * (lo + hi)

    def f(q):
        return om * lattice.zeta(q) - eta * q

    q = 1j * y
    for _ in range(60):
        h = 1e-7
        fp = (f(q + h) - f(q - h)) / (2 * h)
        step = f(q) / fp
        q = q - step
        if abs(step) < 1e-15:
            break
    if abs(f(q)) > 1e-12:
        raise ValueError(f"Newton failed to polish the n=1 crossing, residual {abs(f(q)):.2e}")
    return q


def n1_special_data(lattice: RectLattice, divisor_point: float | complex | None = None) -> EllipticData:
    """The n = 1 configuration: Q_0 = -Q_1, R_0 = Q_1, R_1 = Q_0, P = Qt + Pt."""
    q0 = find_n1_crossing(lattice)
    if divisor_point is None:
        divisor_point = 0.37 * lattice.omega
    P1 = complex(divisor_point)
    return EllipticData(lattice,
                        crossings_prime=(q0, -q0),
                        crossings_second=(-q0, q0),
                        divisor_prime=(P1,),
                        divisor_second=P1)


# ---------------------------------------------------------------------------
# extended periodic Bloch family
# ---------------------------------------------------------------------------

def psi_ext(c_field: ExpField, lattice: RectLattice, u: complex, p: complex,
            R: complex, sign: int, f_elliptic=None) -> AnalyticField:
    """psi''_ext,+- = f(z) c^{+-1/2} e^{(u - zeta(p)) z} sigma(z+p+R)/sigma(z+R).

    Returns an AnalyticField.  The sign - member is annihilated by Qplus in
    the reciprocal gauge (coeffs of 1/c); the sign + member in the direct
    gauge.  f defaults to 1.
    """
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    factors = [
        PowField(c_field, 0.5 * sign),
        ExpBilinear(a=complex(u) - complex(lattice.zeta(complex(p))), b=0.0),
        SigmaFactor(lattice, complex(p) + complex(R), conjugate_arg=False),
        PowField(SigmaFactor(lattice, complex(R), conjugate_arg=False), -1.0),
    ]
    if f_elliptic is not None:
        factors.append(f_elliptic)
    return ProductField(*factors)


def psi_ext_multiplier(field_psi: AnalyticField, shift: complex, z) -> complex:
    """Measured Bloch multiplier psi(z + shift)/psi(z)."""
    z = as_complex(z)
    return complex(field_psi.value(z + shift) / field_psi.value(z))


# ---------------------------------------------------------------------------
# singular gauge transformation
# ---------------------------------------------------------------------------

def singular_gauge_factor(lattice: RectLattice, P: complex, z):
    """Unimodular factor sqrt(sigma(z-P)/conj(sigma(z-P))) = e^{i arg sigma(z-P)}.

    The branch is continuous except across the locus where sigma(z-P) is
    negative real (the cut).  Multiplying removes a sqrt(conj(sigma)/sigma)
    type half-winding phase singularity exactly.
    """
    z = np.asarray(z, dtype=complex)
    s = lattice.sigma(z - complex(P))
    if np.min(np.abs(s)) < 1e-14:
        raise ZeroDivisionError("gauge factor at the singular point")
    out = np.exp(1j * np.angle(s))
    return complex(out) if np.ndim(out) == 0 else out


def singular_gauge_on_contour(lattice: RectLattice, P: complex, contour_points) -> np.ndarray:
    """Continuously tracked gauge factor along a contour.

    Raises when consecutive phase steps are ambiguous (contour crossing the
    cut too fast to track the branch).
    """
    pts = np.asarray(contour_points, dtype=complex)
    s = lattice.sigma(pts - complex(P))
    if np.min(np.abs(s)) < 1e-14:
        raise ZeroDivisionError("contour passes through the singular point")
    ph = np.angle(s)
    steps = np.diff(ph)
    steps = (steps + np.pi) % (2 * np.pi) - np.pi
    if np.max(np.abs(steps)) > 0.9 * np.pi:
        raise ValueError("branch tracking failure: phase step too large along contour")
    phase = np.concatenate([[ph[0]], ph[0] + np.cumsum(steps)])
    return np.exp(1j * phase)


def radial_growth_exponent(fn, center: complex, r_lo: float, r_hi: float,
                           n_r: int = 24, n_theta: int = 16) -> float:
    """Fitted slope of log max_theta |fn| against log r (radial scan)."""
    rs = np.geomspace(r_lo, r_hi, n_r)
    vals = []
    for r in rs:
        ring = center + r * np.exp(2j * np.pi * np.arange(n_theta) / n_theta)
        vals.append(np.max(np.abs([fn(zz) for zz in ring])))
    return float(np.polyfit(np.log(rs), np.log(vals), 1)[0])
