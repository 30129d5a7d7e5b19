"""Laplace transformations in gauge invariants and the Manakov flow.

One step acts on the invariant pair (B, W) of L = Q Qplus + W as

    Btilde = B + (1/2) Lap log W,   Wtilde = W + Btilde

which preserves the cell average of B on the torus.  For W = const the
operator is strongly factorized and the step is the supersymmetry map
L+ -> L-; then Qplus intertwines the spectra: L- (Qplus psi) = Qplus (L+ psi).

The Manakov system is kept in the hyperbolic variables of its display:

    G_t = G_xx - G_yy + (F^2/4)_x - (G^2)_x - A_x + 2 S_y
    S_t = S_yy - S_xx - 2 (G S)_x + (F S)_y

with constraints F_x = 2 G_y and A_y = 2 S_x.  S = 0 is an invariant
reduction (the two-dimensional Burgers analog): every term of S_t carries S.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .numcore import (MagneticCoeffs, PeriodicGrid, ScalarSamples, apply_lminus,
                      apply_lplus, apply_qplus, grid_dx, grid_dy, grid_laplacian)

__all__ = [
    "LaplaceState",
    "laplace_step",
    "laplace_chain",
    "ChainReport",
    "intertwine_residual",
    "ManakovState",
    "manakov_rhs",
    "ConstraintWarning",
]


class ConstraintWarning(UserWarning):
    pass


@dataclass
class LaplaceState:
    b: ScalarSamples
    w: ScalarSamples

    def __post_init__(self):
        if self.b.grid != self.w.grid:
            raise ValueError("B and W must share a grid")

    @property
    def w_min_abs(self) -> float:
        return float(np.min(np.abs(self.w.values.real)))

    def is_factorizable(self, tol: float = 1e-8) -> bool:
        w = self.w.values.real
        return float(np.max(w) - np.min(w)) < tol

    def mean_b(self) -> float:
        return float(np.mean(self.b.values.real))


def laplace_step(state: LaplaceState, method: str = "spectral") -> LaplaceState:
    """(B, W) -> (B + (1/2) Lap log W, W + Btilde); needs nonvanishing W."""
    w = state.w.values.real
    if np.min(np.abs(w)) < 1e-12 or np.min(w) * np.max(w) < 0:
        raise ZeroDivisionError("W crosses zero; log W undefined")
    logw = ScalarSamples(state.w.grid, np.log(np.abs(w)).astype(complex))
    btilde = state.b.values.real + 0.5 * grid_laplacian(logw, method).values.real
    wtilde = w + btilde
    g = state.b.grid
    return LaplaceState(ScalarSamples(g, btilde.astype(complex)),
                        ScalarSamples(g, wtilde.astype(complex)))


@dataclass
class ChainReport:
    states: list
    cycle_index: int | None      # first index > 0 returning to the start
    truncated_at: int | None     # step where W vanished, if any
    endpoint_factorizable: bool


def laplace_chain(state: LaplaceState, n: int, cycle_tol: float = 1e-6,
                  method: str = "spectral") -> ChainReport:
    """Iterate laplace_step n times with cycle and degeneracy reporting."""
    states = [state]
    b0 = state.b.values.real
    w0 = state.w.values.real
    scale = max(float(np.max(np.abs(b0))), float(np.max(np.abs(w0))), 1.0)
    cycle = None
    truncated = None
    cur = state
    for j in range(1, n + 1):
        try:
            cur = laplace_step(cur, method)
        except ZeroDivisionError:
            truncated = j
            break
        states.append(cur)
        db = np.max(np.abs(cur.b.values.real - b0))
        dw = np.max(np.abs(cur.w.values.real - w0))
        if cycle is None and max(db, dw) < cycle_tol * scale:
            cycle = j
    return ChainReport(states=states, cycle_index=cycle, truncated_at=truncated,
                       endpoint_factorizable=states[-1].is_factorizable())


def intertwine_residual(coeffs: MagneticCoeffs, psi: ScalarSamples,
                        method: str = "fd2") -> ScalarSamples:
    """L- (Qplus psi) - Qplus (L+ psi) on the grid (zero operator identity).

    Valid as a spectrum-mapping statement for the strongly factorized case
    W = const.  The L applications use the assembled second-order forms, so
    the residual measures genuine stencil non-commutativity against the
    first-order Qplus, O(h^2) for centered differences.
    """
    lhs = apply_lminus(coeffs, apply_qplus(coeffs, psi, method), method,
                       route="second_order")
    rhs = apply_qplus(coeffs, apply_lplus(coeffs, psi, method, route="second_order"),
                      method)
    return ScalarSamples(psi.grid, lhs.values - rhs.values)


@dataclass
class ManakovState:
    g: ScalarSamples
    s: ScalarSamples
    f: ScalarSamples
    a: ScalarSamples

    def __post_init__(self):
        grids = {self.g.grid, self.s.grid, self.f.grid, self.a.grid}
        if len(grids) != 1:
            raise ValueError("all fields must share one grid")

    def constraint_residuals(self, method: str = "spectral") -> tuple:
        r1 = grid_dx(self.f, method).values - 2 * grid_dy(self.g, method).values
        r2 = grid_dy(self.a, method).values - 2 * grid_dx(self.s, method).values
        return float(np.max(np.abs(r1))), float(np.max(np.abs(r2)))


def manakov_rhs(state: ManakovState, method: str = "spectral",
                constraint_tol: float = 1e-6) -> tuple:
    """(G_t, S_t) of the second order Manakov pair; warns on constraint drift."""
    r1, r2 = state.constraint_residuals(method)
    scale = max(1.0, float(np.max(np.abs(state.g.values))),
                float(np.max(np.abs(state.s.values))))
    if max(r1, r2) > constraint_tol * scale:
        warnings.warn(f"constraint residuals {r1:.2e}, {r2:.2e}", ConstraintWarning)
    g = state.g.values.real
    s = state.s.values.real
    f = state.f.values.real
    a = state.a.values.real
    grid = state.g.grid
    wrap = lambda arr: ScalarSamples(grid, arr.astype(complex))
    dx = lambda arr: grid_dx(wrap(arr), method).values.real
    dy = lambda arr: grid_dy(wrap(arr), method).values.real

    g_t = (dx(dx(g)) - dy(dy(g)) + dx(f * f / 4.0) - dx(g * g) - dx(a) + 2 * dy(s))
    if np.all(s == 0.0):
        s_t = np.zeros_like(s)   # every term of S_t carries S
    else:
        s_t = (dy(dy(s)) - dx(dx(s)) - 2 * dx(g * s) + dy(f * s))
    return wrap(g_t), wrap(s_t)
