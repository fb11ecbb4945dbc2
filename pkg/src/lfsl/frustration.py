"""Unit-cell mean-field analysis of the open tight-binding lattice.

Four sites with uniform density ``n`` and phases ``θ_i`` carry the functional

    L[ψ] = iη Σ_pairs ±(ψ_i*ψ_j + ψ_j*ψ_i) + γ1 ψ1*ψ3 + γ2 ψ3*ψ1,

whose six terms are tested for simultaneous vanishing.  With ``α = γ/(2η)`` and
``φ = θ1 - θ3``, the dissipative part divided by ``2η n`` is
``(α1+α2) cos φ + i (α2-α1) sin φ``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from .errors import InvalidParameter

FRUSTRATION_THRESHOLD = 0.05
MIN_GRID = 16
_CHUNK = 1 << 18

# coherent bonds (i, j, sign) around the plaquette
_BONDS = ((0, 1, +1), (1, 2, -1), (2, 3, +1), (3, 0, -1))


@dataclass(frozen=True)
class UnitCellReport:
    alphas: tuple[float, float]
    grid_resolution: int
    min_per_term_residual: float
    min_total_residual: float
    argmin_phases: tuple[float, float, float, float]
    frustrated: bool
    threshold: float = FRUSTRATION_THRESHOLD

    def to_dict(self) -> dict:
        return {
            "alphas": list(self.alphas),
            "grid_resolution": self.grid_resolution,
            "min_per_term_residual": self.min_per_term_residual,
            "min_total_residual": self.min_total_residual,
            "argmin_phases": list(self.argmin_phases),
            "frustrated": self.frustrated,
            "threshold": self.threshold,
        }


def unit_cell_functional(phases: Sequence[float], n: float, eta: float,
                         gamma1: float, gamma2: float) -> complex:
    if eta == 0:
        raise InvalidParameter("the unit-cell functional needs eta != 0")
    if n < 0:
        raise InvalidParameter(f"density must be non-negative, got {n}")
    psi = np.sqrt(n) * np.exp(1j * np.asarray(phases, dtype=float))
    if psi.shape != (4,):
        raise InvalidParameter("four phases are required")
    c = psi.conj()
    total = 0j
    for i, j, sign in _BONDS:
        total += sign * 1j * eta * (c[i] * psi[j] + c[j] * psi[i])
    total += gamma1 * c[0] * psi[2] + gamma2 * c[2] * psi[0]
    return complex(total)


def _terms(t1, t2, t3, t4, alpha1, alpha2):
    """Six per-term magnitudes at unit density, in units of η."""
    phi = t1 - t3
    return (
        np.abs(2 * np.cos(t1 - t2)),
        np.abs(2 * np.cos(t2 - t3)),
        np.abs(2 * np.cos(t3 - t4)),
        np.abs(2 * np.cos(t4 - t1)),
        np.abs(2 * (alpha2 - alpha1) * np.sin(phi)),
        np.abs(2 * (alpha1 + alpha2) * np.cos(phi)),
    )


def _residual_parts(t1, t2, t3, t4, alpha1, alpha2):
    phi = t1 - t3
    r_real = np.abs(np.cos(t1 - t2) - np.cos(t2 - t3) + np.cos(t3 - t4) - np.cos(t1 - t4)
                    + (alpha2 - alpha1) * np.sin(phi))
    r_imag = np.abs((alpha1 + alpha2) * np.cos(phi))
    return r_real, r_imag


def angle_residuals(phases: Sequence[float], alpha1: float, alpha2: float) -> tuple[float, float]:
    t = np.asarray(phases, dtype=float)
    if t.shape != (4,):
        raise InvalidParameter("four phases are required")
    r_real, r_imag = _residual_parts(*t, alpha1, alpha2)
    return float(r_real), float(r_imag)


def per_term_residual(phases: Sequence[float], alpha1: float, alpha2: float) -> float:
    return float(max(_terms(*np.asarray(phases, dtype=float), alpha1, alpha2)))


def total_residual(phases: Sequence[float], alpha1: float, alpha2: float) -> float:
    return float(np.hypot(*angle_residuals(phases, alpha1, alpha2)))


def _grid_minima(alpha1, alpha2, res):
    """Lowest per-term and total residuals over the θ1 = 0 grid, with flat indices."""
    axis = 2 * np.pi * np.arange(res) / res
    best = [np.inf, 0, np.inf, 0]
    n_total = res ** 3
    for start in range(0, n_total, _CHUNK):
        flat = np.arange(start, min(start + _CHUNK, n_total))
        i2, i3, i4 = np.unravel_index(flat, (res, res, res))
        t2, t3, t4 = axis[i2], axis[i3], axis[i4]
        per = np.max(np.stack(_terms(0.0, t2, t3, t4, alpha1, alpha2)), axis=0)
        tot = np.hypot(*_residual_parts(0.0, t2, t3, t4, alpha1, alpha2))
        k = int(np.argmin(per))
        if per[k] < best[0]:
            best[0], best[1] = float(per[k]), int(flat[k])
        k = int(np.argmin(tot))
        if tot[k] < best[2]:
            best[2], best[3] = float(tot[k]), int(flat[k])
    return best, axis


def _refine(fun, x0):
    r = minimize(fun, x0, method="Nelder-Mead",
                 options={"xatol": 1e-12, "fatol": 1e-15, "maxiter": 4000, "maxfev": 8000})
    return (float(r.fun), np.asarray(r.x)) if r.fun < fun(x0) else (float(fun(x0)), np.asarray(x0))


def frustration_scan(alpha1: float, alpha2: float, grid_resolution: int = 64,
                     threshold: float = FRUSTRATION_THRESHOLD) -> UnitCellReport:
    """Grid search over (θ2, θ3, θ4) with θ1 = 0, followed by local refinement.

    Terms that are identically absent (for example the dissipative ones when
    ``α1 = α2 = 0``) contribute zero and so never block a per-term zero.
    """
    if int(grid_resolution) != grid_resolution or grid_resolution < MIN_GRID:
        raise InvalidParameter(f"grid_resolution must be an integer >= {MIN_GRID}, got {grid_resolution}")
    res = int(grid_resolution)
    a1, a2 = float(alpha1), float(alpha2)
    (per0, k_per, _, k_tot), axis = _grid_minima(a1, a2, res)

    def at(k):
        return axis[list(np.unravel_index(k, (res, res, res)))]

    def per_fun(x):
        return per_term_residual((0.0, *x), a1, a2)

    def tot_sq(x):
        r_real, r_imag = _residual_parts(0.0, *x, a1, a2)
        return float(r_real ** 2 + r_imag ** 2)

    per, x_per = _refine(per_fun, at(k_per))
    tot_fun, _ = _refine(tot_sq, at(k_tot))
    phases = tuple(float(v) for v in np.mod(np.concatenate([[0.0], x_per]), 2 * np.pi))
    return UnitCellReport(
        alphas=(a1, a2),
        grid_resolution=res,
        min_per_term_residual=min(per, per0),
        min_total_residual=float(np.sqrt(tot_fun)),
        argmin_phases=phases,
        frustrated=bool(min(per, per0) > threshold),
        threshold=threshold,
    )
