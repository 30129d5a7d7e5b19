"""Independent numerical oracles used across the test suite.

Everything here is deliberately implemented through different machinery
than the package itself (mpmath theta functions, dense phase summation,
radial ODE quadrature, finite differences), so agreement is evidence and
not tautology.
"""

from __future__ import annotations

import cmath
import math

import mpmath as mp
import numpy as np

mp.mp.dps = 30


def mp_sigma(omega: float, omega_prime: float, w: complex) -> complex:
    """Weierstrass sigma via mpmath jtheta, no argument reduction."""
    q = mp.exp(-mp.pi * omega_prime / omega)
    v = mp.pi * w / (2 * omega)
    t1 = mp.jtheta(1, v, q)
    t1p0 = mp.jtheta(1, 0, q, 1)
    t1ppp0 = mp.jtheta(1, 0, q, 3)
    eta = -(mp.pi**2) * t1ppp0 / (12 * omega * t1p0)
    s = (2 * omega / mp.pi) * mp.exp(eta * w**2 / (2 * omega)) * t1 / t1p0
    return complex(s)


def mp_zeta(omega: float, omega_prime: float, w: complex) -> complex:
    q = mp.exp(-mp.pi * omega_prime / omega)
    v = mp.pi * w / (2 * omega)
    t1 = mp.jtheta(1, v, q)
    t1p = mp.jtheta(1, v, q, 1)
    t1p0 = mp.jtheta(1, 0, q, 1)
    t1ppp0 = mp.jtheta(1, 0, q, 3)
    eta = -(mp.pi**2) * t1ppp0 / (12 * omega * t1p0)
    z = eta * w / omega + (mp.pi / (2 * omega)) * t1p / t1
    return complex(z)


def winding_number(values: np.ndarray) -> float:
    """Total phase increment / 2pi of a complex sequence along a closed path."""
    ph = np.angle(np.asarray(values, dtype=complex))
    d = np.diff(ph)
    d = (d + np.pi) % (2 * np.pi) - np.pi
    return float(np.sum(d) / (2 * np.pi))


def fd_derivative(f, z: complex, which: str, h: float = 1e-5) -> complex:
    """4th order centered stencil for the doubled Wirtinger operators."""
    cx = [f(z - 2 * h), f(z - h), f(z + h), f(z + 2 * h)]
    fx = (cx[0] - 8 * cx[1] + 8 * cx[2] - cx[3]) / (12 * h)
    cy = [f(z - 2j * h), f(z - 1j * h), f(z + 1j * h), f(z + 2j * h)]
    fy = (cy[0] - 8 * cy[1] + 8 * cy[2] - cy[3]) / (12 * h)
    if which == "d":
        return fx - 1j * fy
    if which == "dbar":
        return fx + 1j * fy
    raise ValueError(which)


def radial_log_potential(b_of_r, r_eval: np.ndarray, r_max: float, n: int = 20000):
    """Solve R'' + R'/r = b(r) with R(0)=R'(0)=0 by cumulative quadrature.

    Returns R at the requested radii; R(r) -> (flux/2pi) ln r + const.
    """
    r = np.linspace(0.0, r_max, n)
    br = np.array([b_of_r(ri) for ri in r])
    # enclosed flux F(r) = 2 pi int_0^r b rho drho ; R'(r) = F(r)/(2 pi r)
    integrand = br * r
    F = 2 * np.pi * np.concatenate([[0.0], np.cumsum((integrand[1:] + integrand[:-1]) / 2 * np.diff(r))])
    Rp = np.zeros_like(r)
    Rp[1:] = F[1:] / (2 * np.pi * r[1:])
    R = np.concatenate([[0.0], np.cumsum((Rp[1:] + Rp[:-1]) / 2 * np.diff(r))])
    return np.interp(r_eval, r, R)


def trapz_closed(values: np.ndarray, t: np.ndarray) -> complex:
    """Trapezoid rule around a closed loop (first point not repeated)."""
    v = np.asarray(values)
    dt = np.diff(np.concatenate([t, [t[0] + (t[1] - t[0]) * len(t)]]))
    if abs(dt.std()) > 1e-12 * abs(dt.mean()):
        # non-uniform: close the loop explicitly
        vv = np.concatenate([v, v[:1]])
        tt = np.concatenate([t, [t[-1] + (t[-1] - t[-2])]])
        return np.trapz(vv, tt)
    return np.sum(v) * dt[0]


def richardson_order(err_h: float, err_h2: float) -> float:
    """Observed convergence order from errors at h and h/2."""
    return math.log2(err_h / err_h2)


def direct_exp_sum(terms, z: complex) -> complex:
    """Direct evaluation of sum kappa * exp(p z - k zbar)."""
    zb = z.conjugate()
    return sum(kap * cmath.exp(p * z - k * zb) for kap, p, k in terms)
