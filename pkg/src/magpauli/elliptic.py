"""Weierstrass sigma and zeta functions on rectangular period lattices.

The lattice is {2*omega*m + 2i*omega_prime*n} with omega, omega_prime > 0.
Evaluation goes through Jacobi theta series with real nome
q = exp(-pi*omega_prime/omega), after reducing the argument to the
centered fundamental cell with the quasi-periodicity factors.  The lattice
constants are

    eta  = zeta(omega)            (real)
    eta' = -i * zeta(i*omega_prime)   (real)

and satisfy the Legendre relation  eta*omega' - eta'*omega = pi/2.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

__all__ = ["RectLattice", "sigma", "zeta"]


def _theta_terms(q: float) -> np.ndarray:
    """Exponents (n + 1/2)^2 truncated where the series drops below 1e-18."""
    if not 0.0 < q < 1.0:
        raise ValueError(f"nome out of range: q={q}")
    # decay of term n relative to term 0 is q^((n+1/2)^2 - 1/4 - (n+1/2) + 1/2)
    nmax = 4
    logq = np.log(q)
    while nmax < 64:
        m = nmax + 0.5
        if logq * (m * m - m) < np.log(1e-18):
            break
        nmax += 2
    return np.arange(nmax + 1, dtype=float)


@dataclass(frozen=True)
class RectLattice:
    """Rectangular lattice with half periods (omega, i*omega_prime)."""

    omega: float
    omega_prime: float

    def __post_init__(self):
        if not (self.omega > 0 and self.omega_prime > 0):
            raise ValueError("half periods must be positive")

    @cached_property
    def q(self) -> float:
        return float(np.exp(-np.pi * self.omega_prime / self.omega))

    @cached_property
    def _ns(self) -> np.ndarray:
        return _theta_terms(self.q)

    @cached_property
    def _qpow(self) -> np.ndarray:
        return self.q ** ((self._ns + 0.5) ** 2)

    @cached_property
    def _signs(self) -> np.ndarray:
        return (-1.0) ** self._ns

    def _theta1(self, v):
        """theta_1(v) and theta_1'(v) for complex v (scalar or array)."""
        v = np.asarray(v, dtype=complex)
        m = (2.0 * self._ns + 1.0)
        phase = np.multiply.outer(v, m)  # (..., nterms)
        coef = self._signs * self._qpow
        t1 = 2.0 * np.sum(coef * np.sin(phase), axis=-1)
        t1p = 2.0 * np.sum(coef * m * np.cos(phase), axis=-1)
        return t1, t1p

    @cached_property
    def _theta_zero(self) -> tuple[float, float]:
        """theta_1'(0) and theta_1'''(0)."""
        m = 2.0 * self._ns + 1.0
        coef = self._signs * self._qpow
        return float(2.0 * np.sum(coef * m)), float(-2.0 * np.sum(coef * m**3))

    @cached_property
    def eta(self) -> float:
        t1p0, t1ppp0 = self._theta_zero
        return -(np.pi**2) * t1ppp0 / (12.0 * self.omega * t1p0)

    @cached_property
    def eta_prime(self) -> float:
        # from the series at w = i*omega', not from Legendre, so the
        # Legendre relation stays an independent check
        w0 = 1j * self.omega_prime
        v = np.pi * w0 / (2.0 * self.omega)
        t1, t1p = self._theta1(v)
        z0 = self.eta * w0 / self.omega + (np.pi / (2.0 * self.omega)) * t1p / t1
        return float(complex(z0).imag)

    @property
    def cell_area(self) -> float:
        return 4.0 * self.omega * self.omega_prime

    @property
    def periods(self) -> tuple[complex, complex]:
        return 2.0 * self.omega, 2j * self.omega_prime

    def legendre_residual(self) -> float:
        return abs(self.eta * self.omega_prime - self.eta_prime * self.omega - np.pi / 2)

    def reduce(self, w):
        """Split w = w0 + 2*omega*m + 2i*omega'*n with w0 in the centered cell."""
        w = np.asarray(w, dtype=complex)
        m = np.round(w.real / (2.0 * self.omega))
        n = np.round(w.imag / (2.0 * self.omega_prime))
        w0 = w - 2.0 * self.omega * m - 2j * self.omega_prime * n
        return w0, m, n

    def sigma(self, w):
        """Weierstrass sigma, odd entire, sigma(w) = w + O(w^5) near 0."""
        w = np.asarray(w, dtype=complex)
        w0, m, n = self.reduce(w)
        v = np.pi * w0 / (2.0 * self.omega)
        t1, _ = self._theta1(v)
        t1p0, _ = self._theta_zero
        s0 = (2.0 * self.omega / np.pi) * np.exp(self.eta * w0**2 / (2.0 * self.omega)) * t1 / t1p0
        # sigma(w0 + 2m*omega + 2n*i*omega') quasi-periodicity
        eta_c = 2.0 * m * self.eta + 2j * n * self.eta_prime
        shift = self.omega * m + 1j * self.omega_prime * n
        sign = (-1.0) ** (m + n + m * n)
        out = sign * s0 * np.exp(eta_c * (w0 + shift))
        if out.ndim == 0:
            return complex(out)
        return out

    def zeta(self, w):
        """Weierstrass zeta = sigma'/sigma; simple poles on the lattice."""
        w = np.asarray(w, dtype=complex)
        w0, m, n = self.reduce(w)
        on_lattice = np.abs(w0) < 1e-14
        if np.any(on_lattice):
            raise ZeroDivisionError("zeta evaluated at a lattice point")
        v = np.pi * w0 / (2.0 * self.omega)
        t1, t1p = self._theta1(v)
        z0 = self.eta * w0 / self.omega + (np.pi / (2.0 * self.omega)) * t1p / t1
        out = z0 + 2.0 * m * self.eta + 2j * n * self.eta_prime
        if out.ndim == 0:
            return complex(out)
        return out

    def log_sigma_abs(self, w):
        """ln|sigma(w)|, valid everywhere off the lattice."""
        w = np.asarray(w, dtype=complex)
        w0, m, n = self.reduce(w)
        v = np.pi * w0 / (2.0 * self.omega)
        t1, _ = self._theta1(v)
        t1p0, _ = self._theta_zero
        base = (
            np.log(2.0 * self.omega / np.pi / abs(t1p0))
            + (self.eta * w0**2 / (2.0 * self.omega)).real
            + np.log(np.abs(t1))
        )
        eta_c = 2.0 * m * self.eta + 2j * n * self.eta_prime
        shift = self.omega * m + 1j * self.omega_prime * n
        return base + (eta_c * (w0 + shift)).real


def sigma(lattice: RectLattice, w):
    return lattice.sigma(w)


def zeta(lattice: RectLattice, w):
    return lattice.zeta(w)
