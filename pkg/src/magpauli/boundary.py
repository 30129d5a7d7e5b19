"""Self-adjoint boundary conditions for the zero-level boundary problems.

All conditions select Lagrangian subspaces of the skew-Hermitian boundary
form; scalar case

    oint [psi_1 conj(phi_2) - psi_2 conj(phi_1)] dt,

Pauli (mixing) case the sum of the two spin components.  Every variant
carries a constructor producing sample pairs that satisfy its relation to
machine precision, so lagrangian_residual measures the algebra and not a
solver.  Circle operators are first-order records acting on uniform
samples over [0, 2pi) through spectral differentiation, symmetrized as
(i/2)(coef d_t + d_t coef) + mult so t-dependent coefficients stay
self-adjoint.

The d-bar extraction writes the boundary relation as
Qplus psi = e^{i theta(t)} v(t) psi with theta the normal (Frenet) angle;
v is real exactly on the leaves of the Example-2 foliation.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field

import numpy as np

from .field import ExpField, LogField, PowField
from .numcore import AnalyticField, Contour, as_complex
from .spectral import ExpBilinear, ProductField, WeightedBA, psi_prime_weighted

__all__ = [
    "CircleOperator",
    "BoundaryCondition",
    "dirichlet",
    "neumann",
    "leontovich",
    "dbar_bc",
    "general_local",
    "mixing_ultralocal_r",
    "mixing_ultralocal_vector",
    "mixing_local",
    "lagrangian_residual",
    "leontovich_charge",
    "dbar_extract",
    "leaf_form_scalar",
    "leaf_form_mixing",
    "ZeroModePair",
    "SpecialContourData1",
    "special_contour_kind1",
    "superpose",
]


def circle_grid(n: int = 256) -> np.ndarray:
    return np.linspace(0.0, 2 * np.pi, n, endpoint=False)


def circle_diff(values: np.ndarray) -> np.ndarray:
    n = len(values)
    k = np.fft.fftfreq(n, d=2 * np.pi / n) * 2 * np.pi
    return np.fft.ifft(1j * k * np.fft.fft(values))


def circle_integral(values: np.ndarray) -> complex:
    return complex(np.sum(values) * (2 * np.pi / len(values)))


def random_trig(rng, t: np.ndarray, modes: int = 4, real: bool = False) -> np.ndarray:
    out = np.zeros_like(t, dtype=complex)
    for m in range(-modes, modes + 1):
        c = rng.normal() + 1j * rng.normal()
        out += c * np.exp(1j * m * t)
    if real:
        out = out.real.astype(complex)
    return out


def _resolve(param, t):
    """Coefficient as samples on the circle grid: callable, array or scalar."""
    if callable(param):
        return np.asarray(param(t), dtype=complex) * np.ones_like(t, dtype=complex)
    return np.broadcast_to(np.asarray(param, dtype=complex), t.shape)


@dataclass
class CircleOperator:
    """Symmetrized first-order operator (i/2)(coef d_t + d_t coef) + mult."""

    coef: object   # scalar, array or callable of t
    mult: object

    def apply(self, values: np.ndarray, t: np.ndarray) -> np.ndarray:
        coef = _resolve(self.coef, t)
        mult = _resolve(self.mult, t)
        return 0.5j * (coef * circle_diff(values) + circle_diff(coef * values)) \
            + mult * values

    def is_self_adjoint(self, t=None) -> bool:
        t = circle_grid(64) if t is None else t
        coef = _resolve(self.coef, t)
        mult = _resolve(self.mult, t)
        return bool(np.max(np.abs(coef.imag)) < 1e-12 and np.max(np.abs(mult.imag)) < 1e-12)

    def hermiticity_residual(self, other: "CircleOperator", t: np.ndarray,
                             n_modes: int = 32) -> float:
        """max | <e_m, (U V+ - (U V+)+) e_n> | over a trigonometric basis.

        Also covers U V+ = V U+ by symmetry of the returned quantity.
        """
        basis = [np.exp(1j * m * t) for m in range(-n_modes // 2, n_modes // 2)]
        uv = np.array([[circle_integral(np.conj(em) * self.apply(_adjoint_apply(other, en, t), t))
                        for en in basis] for em in basis])
        vu = np.array([[circle_integral(np.conj(em) * other.apply(_adjoint_apply(self, en, t), t))
                        for en in basis] for em in basis])
        return float(max(np.max(np.abs(uv - uv.conj().T)), np.max(np.abs(uv - vu))))


def _adjoint_apply(op: CircleOperator, values: np.ndarray, t: np.ndarray) -> np.ndarray:
    coef = np.broadcast_to(np.asarray(op.coef, dtype=complex), t.shape)
    mult = np.broadcast_to(np.asarray(op.mult, dtype=complex), t.shape)
    # adjoint of the symmetrized record: conjugate coefficients
    return 0.5j * (np.conj(coef) * circle_diff(values)
                   + circle_diff(np.conj(coef) * values)) + np.conj(mult) * values


@dataclass
class BoundaryCondition:
    """Tagged boundary-condition record with a sample-pair factory."""

    variant: str
    params: dict

    def make_samples(self, rng, t: np.ndarray, n_pairs: int = 6) -> list:
        """Pairs (psi_1, psi_2) (scalar) or (psi1p, psi1m, psi2p, psi2m)
        (mixing) satisfying the relation by construction."""
        return [_make_sample(self, rng, t) for _ in range(n_pairs)]


def dirichlet() -> BoundaryCondition:
    return BoundaryCondition("dirichlet", {})


def neumann() -> BoundaryCondition:
    return BoundaryCondition("neumann", {})


def leontovich(alpha, beta) -> BoundaryCondition:
    """alpha(t) psi_1 + beta(t) psi_2 = 0 with real nonvanishing (alpha, beta)."""
    return BoundaryCondition("leontovich", {"alpha": alpha, "beta": beta})


def dbar_bc(v, sign: int = -1) -> BoundaryCondition:
    """psi_1 = sign * i d_t psi + v(t) psi with real v."""
    return BoundaryCondition("dbar", {"v": v, "sign": sign})


def general_local(u_op: CircleOperator, v_op: CircleOperator) -> BoundaryCondition:
    """U psi_1 = V psi_2 with first-order circle operators (U invertible)."""
    return BoundaryCondition("general_local", {"U": u_op, "V": v_op})


def mixing_ultralocal_r(r_matrix, kind: int = 1) -> BoundaryCondition:
    """psi_1 = R psi_2 (kind 1) or psi_2 = R psi_1 (kind 2), R(t) Hermitian 2x2."""
    return BoundaryCondition("mixing_ultralocal_r", {"R": r_matrix, "kind": kind})


def mixing_ultralocal_vector(a, b, phase=None) -> BoundaryCondition:
    """a psi_1+ + b psi_1- = 0 and c psi_2+ + d psi_2- = 0 with (c, d)
    Hermitian-orthogonal to (a, b): (c, d) = e^{i phase} (-conj(b), conj(a))."""
    return BoundaryCondition("mixing_ultralocal_vector",
                             {"a": a, "b": b, "phase": phase})


def mixing_local(alpha_plus, a, b, d) -> BoundaryCondition:
    """grad_n psi+ = A+ psi+ + b grad_n psi-, -psi- = conj(b) psi+ + d grad_n psi-.

    A+ = symmetrized(i alpha+ d_t) + a; alpha+, a, d real, the cross
    coefficient pair is (b, conj(b)).
    """
    return BoundaryCondition("mixing_local",
                             {"alpha_plus": alpha_plus, "a": a, "b": b, "d": d})


def _as_fn(param, t):
    if callable(param):
        return np.asarray(param(t), dtype=complex)
    return np.broadcast_to(np.asarray(param, dtype=complex), t.shape).copy()


def _make_sample(bc: BoundaryCondition, rng, t: np.ndarray):
    v = bc.variant
    if v == "dirichlet":
        return (random_trig(rng, t), np.zeros_like(t, dtype=complex))
    if v == "neumann":
        return (np.zeros_like(t, dtype=complex), random_trig(rng, t))
    if v == "leontovich":
        al = _as_fn(bc.params["alpha"], t)
        be = _as_fn(bc.params["beta"], t)
        g = random_trig(rng, t)
        return (-be * g, al * g)
    if v == "dbar":
        vv = _as_fn(bc.params["v"], t)
        psi2 = random_trig(rng, t)
        psi1 = bc.params["sign"] * 1j * circle_diff(psi2) + vv * psi2
        return (psi1, psi2)
    if v == "general_local":
        u_op, v_op = bc.params["U"], bc.params["V"]
        psi2 = random_trig(rng, t)
        rhs = v_op.apply(psi2, t)
        psi1 = _invert_circle_op(u_op, rhs, t)
        return (psi1, psi2)
    if v == "mixing_ultralocal_r":
        R = bc.params["R"]
        psi2 = (random_trig(rng, t), random_trig(rng, t))
        Rt = _r_matrix_at(R, t)
        out0 = Rt[0][0] * psi2[0] + Rt[0][1] * psi2[1]
        out1 = Rt[1][0] * psi2[0] + Rt[1][1] * psi2[1]
        if bc.params["kind"] == 1:
            return (out0, out1, psi2[0], psi2[1])
        return (psi2[0], psi2[1], out0, out1)
    if v == "mixing_ultralocal_vector":
        a = _as_fn(bc.params["a"], t)
        b = _as_fn(bc.params["b"], t)
        norm = np.sqrt(np.abs(a) ** 2 + np.abs(b) ** 2)
        a, b = a / norm, b / norm
        ph = bc.params["phase"]
        phase = np.exp(1j * _as_fn(ph, t).real) if ph is not None else 1.0
        c, d = phase * (-np.conj(b)), phase * np.conj(a)
        g1, g2 = random_trig(rng, t), random_trig(rng, t)
        return (b * g1, -a * g1, d * g2, -c * g2)
    if v == "mixing_local":
        ap = CircleOperator(_as_fn(bc.params["alpha_plus"], t).real,
                            _as_fn(bc.params["a"], t).real)
        b = _as_fn(bc.params["b"], t)
        d = _as_fn(bc.params["d"], t).real
        psi2p = random_trig(rng, t)
        psi1m = random_trig(rng, t)
        psi1p = ap.apply(psi2p, t) + b * psi1m
        psi2m = -(np.conj(b) * psi2p + d * psi1m)
        return (psi1p, psi1m, psi2p, psi2m)
    raise ValueError(f"unknown variant {v!r}")


def _r_matrix_at(R, t):
    if callable(R):
        vals = R(t)
        return [[np.asarray(vals[i][j], dtype=complex) for j in (0, 1)] for i in (0, 1)]
    M = np.asarray(R, dtype=complex)
    return [[np.broadcast_to(M[i, j], t.shape) for j in (0, 1)] for i in (0, 1)]


def _invert_circle_op(op: CircleOperator, rhs: np.ndarray, t: np.ndarray) -> np.ndarray:
    coef = np.asarray(op.coef, dtype=complex)
    mult = np.asarray(op.mult, dtype=complex)
    if coef.ndim == 0 and mult.ndim == 0:
        n = len(t)
        k = np.fft.fftfreq(n, d=2 * np.pi / n) * 2 * np.pi
        symbol = -coef * k + mult
        if np.min(np.abs(symbol)) < 1e-12:
            raise ZeroDivisionError("circle operator not invertible on this grid")
        return np.fft.ifft(np.fft.fft(rhs) / symbol)
    # variable coefficients: dense collocation solve
    n = len(t)
    D = np.zeros((n, n), dtype=complex)
    for j in range(n):
        e = np.zeros(n, dtype=complex)
        e[j] = 1.0
        D[:, j] = op.apply(e, t)
    return np.linalg.solve(D, rhs)


def lagrangian_residual(bc: BoundaryCondition, samples=None, rng=None,
                        n: int = 256, n_pairs: int = 6) -> float:
    """max |skew boundary form| over constructed sample pairs."""
    t = circle_grid(n)
    if samples is None:
        rng = rng or np.random.default_rng(0)
        samples = bc.make_samples(rng, t, n_pairs)
    worst = 0.0
    for i, si in enumerate(samples):
        for sj in samples[i:]:
            if len(si) == 2:
                form = circle_integral(si[0] * np.conj(sj[1]) - si[1] * np.conj(sj[0]))
            else:
                form = circle_integral(
                    si[0] * np.conj(sj[2]) - si[2] * np.conj(sj[0])
                    + si[1] * np.conj(sj[3]) - si[3] * np.conj(sj[1]))
            worst = max(worst, abs(form))
    return worst


# ---------------------------------------------------------------------------
# topological charge of a Leontovich condition
# ---------------------------------------------------------------------------

def leontovich_charge(alpha, beta, n: int = 2048) -> int:
    """Winding of the line (alpha : beta) over one circuit.

    Normalized so (cos t, sin t) -> 1; angle steps are folded into
    (-pi/2, pi/2], so genuinely projective data is tracked as well.
    """
    t = circle_grid(n)
    al = _as_fn(alpha, t).real
    be = _as_fn(beta, t).real
    norm = np.hypot(al, be)
    if np.min(norm) < 1e-9 * np.max(norm):
        raise ValueError("(alpha, beta) vanishes somewhere; charge ill-defined")
    ang = np.arctan2(be, al)
    steps = np.diff(np.concatenate([ang, ang[:1]]))
    steps = (steps + np.pi / 2) % np.pi - np.pi / 2
    total = float(np.sum(steps))
    charge = total / (2 * np.pi)
    if abs(charge - round(charge)) > 1e-6:
        raise ValueError(f"non-integer charge {charge}; data not a closed loop")
    return int(round(charge))


# ---------------------------------------------------------------------------
# d-bar extraction along contours
# ---------------------------------------------------------------------------

def dbar_extract(ratio_fn, contour: Contour):
    """v(t) = e^{-i theta(t)} (Qplus psi / psi) along the contour.

    ratio_fn(z) supplies the closed-form ratio.  Returns (v, max |Im v|);
    the imaginary part vanishes exactly on foliation leaves.
    """
    z = contour.points
    ratio = np.asarray([ratio_fn(zz) for zz in z])
    v = np.exp(-1j * contour.frenet_angle) * ratio
    return v, float(np.max(np.abs(v.imag)))


# ---------------------------------------------------------------------------
# leaf one-forms
# ---------------------------------------------------------------------------

def _phase_gradient(psi: AnalyticField, z):
    """(theta_x, theta_y) for theta = arg psi, via Im(psi_x / psi)."""
    val = psi.value(z)
    d = psi.d(z)
    db = psi.dbar(z)
    px = (d + db) / 2
    py = 1j * (d - db) / 2
    return np.imag(px / val), np.imag(py / val)


def _real_gradient(phi: AnalyticField, z):
    d = phi.d(z)
    db = phi.dbar(z)
    return np.real((d + db) / 2), np.real((1j * (d - db)) / 2)


def leaf_form_scalar(psi: AnalyticField, phi: AnalyticField, point):
    """Coefficients of Omega = (theta_y + Phi_x) dx + (-theta_x + Phi_y) dy.

    A contour admits a Leontovich condition for psi exactly where Omega
    vanishes along it.
    """
    z = as_complex(point)
    if abs(psi.value(z)) < 1e-14:
        raise ZeroDivisionError("psi vanishes; phase undefined")
    tx, ty = _phase_gradient(psi, z)
    gx, gy = _real_gradient(phi, z)
    return (ty + gx, -tx + gy)


@dataclass
class ZeroModePair:
    """(psi+, psi-) = (psi'/sqrt(c), lambda Qplus(psi'/sqrt(c))) for the
    weighted genus-0 data; the minus component is -2 lambda k sqrt(c) e^{k zbar}."""

    weights: WeightedBA
    k: complex
    lam: complex

    def __post_init__(self):
        c = self.weights.exp_field()
        k = complex(self.k)
        self.c_field = c
        self.psi_plus = ProductField(
            ExpField([(kap * k / (k - kj), p, kj - k) for kap, p, kj in self.weights.terms]),
            PowField(c, -0.5),
        )
        self.psi_minus = ProductField(
            ExpBilinear(b=k, scale=-2.0 * k * complex(self.lam)),
            PowField(c, 0.5),
        )


def leaf_form_mixing(pair: ZeroModePair, phi: AnalyticField, point):
    """Coefficients of the mixing-case one-form

    omega = (|psi+|^2 + |psi-|^2) dPhi + |psi+|^2 *dtheta+ + |psi-|^2 *dtheta-

    with the plane duality oriented so lambda = 0 reduces to the scalar
    form: *(theta_x, theta_y) = (theta_y, -theta_x).
    """
    z = as_complex(point)
    vp = pair.psi_plus.value(z)
    vm = pair.psi_minus.value(z)
    if abs(vp) < 1e-14 and abs(vm) < 1e-14:
        raise ZeroDivisionError("both components vanish")
    gx, gy = _real_gradient(phi, z)
    w_p = abs(vp) ** 2
    w_m = abs(vm) ** 2
    om1 = (w_p + w_m) * gx
    om2 = (w_p + w_m) * gy
    if w_p > 0:
        txp, typ = _phase_gradient(pair.psi_plus, z)
        om1 += w_p * typ
        om2 -= w_p * txp
    if w_m > 0:
        txm, tym = _phase_gradient(pair.psi_minus, z)
        om1 += w_m * tym
        om2 -= w_m * txm
    return (om1, om2)


# ---------------------------------------------------------------------------
# special contours of the first kind
# ---------------------------------------------------------------------------

@dataclass
class SpecialContourData1:
    n: int
    a: float
    b: tuple
    k: float
    kappa0: float
    kappa: np.ndarray          # kappa_1..kappa_n solving the boundary conditions
    nullspace_dim: int
    weights: WeightedBA
    c_field: ExpField
    max_im_ratio: float        # max |Im(psi'_x/psi')| on x = 0
    multiplier_error: float    # | measured kappa - e^{-i k T} |

    @property
    def y_period(self) -> float:
        return np.pi / self.a


def _kind1_weights(n, a, b, k, kappa0, kappa) -> WeightedBA:
    terms = [(complex(kappa0), 0.0 + 0.0j, 0.0 + 0.0j)]
    for j in range(n):
        pj = complex(a, b[j])
        kj = complex(a, -b[j])
        terms.append((complex(kappa[j]), pj, kj))
        terms.append((complex(kappa[j]), -pj, -kj))
    return WeightedBA(tuple(terms))


def special_contour_kind1(n: int, a: float, b, k: float, kappa0: float = 1.0,
                          n_y: int = 64) -> SpecialContourData1:
    """Solve for kappa making psi' satisfy the Leontovich condition on x = 0.

    The requirements Im psi' = 0 and Im psi'_x = 0 on the line reduce to 4
    homogeneous equations in the kappa_j (the cos/sin components of the
    single surviving harmonic e^{+-2iay}), plus sum kappa_j = 0.  A
    nullspace exists for n > 5.
    """
    b = tuple(float(x) for x in b)
    if len(b) != n or len(set(b)) != n:
        raise ValueError("need n distinct real b_j")
    if a == 0:
        raise ValueError("a must be nonzero")
    T = np.pi / a
    ys = T * np.arange(n_y) / n_y

    def harmonics(vals):
        # coefficients of cos(2ay), sin(2ay) and the residual spectrum
        f = np.fft.fft(vals) / n_y
        c1 = 2 * f[1].real   # cos component at frequency 2a (mode 1 of period T)
        s1 = -2 * f[1].imag  # sin component
        others = np.abs(f[2:-1])
        return c1, s1, float(np.max(others)) if len(others) else 0.0

    rows = []
    for j in range(n):
        kap = np.zeros(n)
        kap[j] = 1.0
        w = _kind1_weights(n, a, b, k, 0.0, kap)
        h = np.array([psi_prime_weighted(w, k, complex(0.0, y)) for y in ys])
        h = h * np.exp(-k * np.conj(1j * ys))          # strip e^{k zbar}
        hx = np.array([_kind1_hx(w, k, complex(0.0, y)) for y in ys])
        A1, A2, leak1 = harmonics(h.imag)
        B1, B2, leak2 = harmonics(hx.imag)
        if max(leak1, leak2) > 1e-10 * max(1.0, np.max(np.abs(h))):
            raise ArithmeticError("unexpected harmonic content on the contour")
        rows.append([A1, A2, B1, B2, 1.0])
    M = np.array(rows).T   # 5 x n
    _, svals, vt = np.linalg.svd(M)
    null_dim = n - int(np.sum(svals > 1e-10 * max(1.0, svals[0])))
    if null_dim < 1:
        raise ValueError(f"no solution: nullspace empty for n = {n} (need n > 5)")
    kappa = vt[-1].real
    kappa = kappa / np.max(np.abs(kappa))

    weights = _kind1_weights(n, a, b, k, kappa0, kappa)
    c_field = weights.exp_field()
    # verification: Im(psi'_x / psi') on x = 0 and the y-multiplier
    ratios = []
    for y in ys:
        z = complex(0.0, y)
        val = psi_prime_weighted(weights, k, z)
        ratios.append(_kind1_psix(weights, k, z) / val)
    max_im = float(np.max(np.abs(np.imag(ratios))))
    mult = psi_prime_weighted(weights, k, complex(0.4, 0.7 + T)) \
        / psi_prime_weighted(weights, k, complex(0.4, 0.7))
    mult_err = abs(mult - cmath.exp(-1j * k * T))
    return SpecialContourData1(n=n, a=a, b=b, k=float(k), kappa0=float(kappa0),
                               kappa=kappa, nullspace_dim=null_dim, weights=weights,
                               c_field=c_field, max_im_ratio=max_im,
                               multiplier_error=float(mult_err))


def _kind1_psix(weights: WeightedBA, k, z) -> complex:
    """d psi'/dx in closed form from the exponential representation."""
    k = complex(k)
    z = as_complex(z)
    zb = z.conjugate()
    acc = 0.0 + 0.0j
    for kap, p, kj in weights.terms:
        coef = kap * k / (k - kj)
        acc += coef * (p + (k - kj)) * cmath.exp(p * z + (k - kj) * zb)
    return acc


def _kind1_hx(weights: WeightedBA, k, z) -> complex:
    """d/dx of h = psi' e^{-k zbar}, in closed form."""
    k = complex(k)
    z = as_complex(z)
    zb = z.conjugate()
    acc = 0.0 + 0.0j
    for kap, p, kj in weights.terms:
        coef = kap * k / (k - kj)
        acc += coef * (p - kj) * cmath.exp(p * z - kj * zb)
    return acc


# ---------------------------------------------------------------------------
# superposition integrals
# ---------------------------------------------------------------------------

def superpose(weights: WeightedBA, p_fn, q_fn, domain: str, z,
              k_window: float = 8.0, n_quad: int = 400,
              k0: complex = None, g: complex = None, m_range=range(-2, 3)):
    """Forward evaluation of psi = int [psi'(k) p(k) + psi''(k) q(k)] dk.

    domain 'I': k >= 0, 'II': k <= 0, 'III': k real, 'IV': the discrete set
    k_m = k0 + 2 pi i m / conj(g) sharing one unitary multiplier along g.
    psi''(k) = e^{k z} (exact crossing values, divisor degree zero).
    """
    z = as_complex(z)

    def integrand(k):
        val = 0.0 + 0.0j
        pk = p_fn(k) if p_fn is not None else 0.0
        qk = q_fn(k) if q_fn is not None else 0.0
        if pk != 0.0:
            val += psi_prime_weighted(weights, k, z) * pk
        if qk != 0.0:
            val += cmath.exp(k * z) * qk
        return val

    if domain in ("I", "II", "III"):
        from numpy.polynomial.legendre import leggauss

        xg, wg = leggauss(n_quad)
        if domain == "I":
            lo, hi = 0.0, k_window
        elif domain == "II":
            lo, hi = -k_window, 0.0
        else:
            lo, hi = -k_window, k_window
        ks = (xg + 1) * (hi - lo) / 2 + lo
        ws = wg * (hi - lo) / 2
        return complex(sum(w * integrand(float(k)) for k, w in zip(ks, ws)))
    if domain == "IV":
        if k0 is None or g is None:
            raise ValueError("domain IV needs k0 and the homology shift g")
        gbar = complex(g).conjugate()
        total = 0.0 + 0.0j
        for m in m_range:
            km = complex(k0) + 2j * np.pi * m / gbar
            pk = p_fn(km) if p_fn is not None else 0.0
            qk = q_fn(km) if q_fn is not None else 0.0
            total += psi_prime_weighted(weights, km, z) * pk + cmath.exp(km * z) * qk
        return complex(total)
    raise ValueError(f"unknown domain {domain!r}")
