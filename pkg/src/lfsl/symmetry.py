"""Strong/weak classification of candidate symmetry generators."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, InvalidGenerator
from .hilbert import OperatorMatrix
from .liouville import LindbladModel, LiouvillianMatrix, build_liouvillian, vectorize

SYMMETRY_TOL = 1e-10


@dataclass(frozen=True)
class SymmetryReport:
    generator: OperatorMatrix
    classification: str
    alphas: tuple[complex, ...]
    hamiltonian_residual: float
    commutator_residuals: tuple[float, ...]
    conserved_residual: float


@dataclass(frozen=True)
class DiscreteSymmetryReport:
    unitary: OperatorMatrix
    classification: str
    phases: tuple[float, ...]
    hamiltonian_residual: float
    residuals: tuple[float, ...]


def _fro(a: np.ndarray) -> float:
    return float(np.linalg.norm(a))


def _fit_scalar(target: np.ndarray, basis: np.ndarray) -> tuple[complex, float]:
    """Least-squares c minimizing ||target - c * basis||, and the remaining residual."""
    nb = np.vdot(basis, basis)
    if nb == 0:
        return 0j, _fro(target)
    c = np.vdot(basis, target) / nb
    return complex(c), _fro(target - c * basis)


def conserved_residual(L: LiouvillianMatrix, S: OperatorMatrix) -> float:
    """||L† |S⟩⟩||, zero exactly when ``S`` is a conserved quantity."""
    if S.dim != L.dim:
        raise DimensionMismatch(f"generator dim {S.dim} vs Liouvillian dim {L.dim}")
    return float(np.linalg.norm(L.entries.conj().T @ vectorize(S).entries))


def classify(model: LindbladModel, S: OperatorMatrix, tol: float = SYMMETRY_TOL) -> SymmetryReport:
    """Classify a Hermitian generator against ``[S, H] = 0`` and ``[S, L_j] = α_j L_j``."""
    if S.dim != model.space.total_dim:
        raise DimensionMismatch(f"generator dim {S.dim} vs model dim {model.space.total_dim}")
    if not S.is_hermitian():
        raise InvalidGenerator(f"generator {S.label!r} is not Hermitian")
    s = S.entries
    h = model.hamiltonian.entries
    h_res = _fro(s @ h - h @ s)
    alphas, residuals = [], []
    for jump in model.jumps:
        op = jump.operator.entries
        if jump.rate == 0:
            alphas.append(0j)
            residuals.append(0.0)
            continue
        alpha, res = _fit_scalar(s @ op - op @ s, op)
        alphas.append(alpha)
        residuals.append(res)

    is_sym = (h_res < tol and all(r < tol for r in residuals)
              and all(abs(a.imag) < tol for a in alphas))
    if not is_sym:
        label = "none"
    elif all(abs(a) < tol for a in alphas):
        label = "strong"
    else:
        label = "weak"
    cres = conserved_residual(build_liouvillian(model), S)
    return SymmetryReport(S, label, tuple(alphas), h_res, tuple(residuals), cres)


def classify_discrete(model: LindbladModel, U: OperatorMatrix,
                      tol: float = SYMMETRY_TOL) -> DiscreteSymmetryReport:
    """Unitary check ``U†HU = H`` and ``U†L_jU = e^{iφ_j} L_j``; strong when every φ_j = 0."""
    u = U.entries
    if U.dim != model.space.total_dim:
        raise DimensionMismatch(f"unitary dim {U.dim} vs model dim {model.space.total_dim}")
    if _fro(u.conj().T @ u - np.eye(U.dim)) > tol:
        raise InvalidGenerator(f"{U.label!r} is not unitary")
    h = model.hamiltonian.entries
    h_res = _fro(u.conj().T @ h @ u - h)
    phases, residuals = [], []
    for jump in model.jumps:
        op = jump.operator.entries
        c, res = _fit_scalar(u.conj().T @ op @ u, op)
        phase = float(np.angle(c)) if abs(c) > 0 else 0.0
        # a pure phase is required, so measure residual against e^{iφ} L
        res = _fro(u.conj().T @ op @ u - np.exp(1j * phase) * op)
        phases.append(phase)
        residuals.append(res)
    if h_res < tol and all(r < tol for r in residuals):
        label = "strong" if all(abs(np.exp(1j * p) - 1) < tol for p in phases) else "weak"
    else:
        label = "none"
    return DiscreteSymmetryReport(U, label, tuple(phases), h_res, tuple(residuals))


def parity_operator(N: OperatorMatrix) -> OperatorMatrix:
    """exp(iπN) for a number-like operator; exact ±1 when ``N`` is integer diagonal."""
    n = N.entries
    diag = np.real(np.diag(n))
    if (np.count_nonzero(n - np.diag(np.diag(n))) == 0
            and np.allclose(diag, np.round(diag), atol=1e-12)):
        return OperatorMatrix(N.space, np.diag((-1.0) ** np.round(diag)), "parity", hermitian=True)
    w, v = np.linalg.eigh(n)
    return OperatorMatrix(N.space, (v * np.exp(1j * np.pi * w)) @ v.conj().T, "parity")


def cross_sector_weight(L: LiouvillianMatrix, labels: Sequence) -> float:
    """Largest |L[i, j]| connecting superket indices whose sector labels differ."""
    lab = list(labels)
    if len(lab) != L.entries.shape[0]:
        raise DimensionMismatch("one sector label per superket index is required")
    keys = {k: i for i, k in enumerate(dict.fromkeys(lab))}
    codes = np.array([keys[k] for k in lab])
    mask = codes[:, None] != codes[None, :]
    return float(np.max(np.abs(L.entries[mask]), initial=0.0))


def sector_coupling(L: LiouvillianMatrix, S: OperatorMatrix, decimals: int = 8) -> float:
    """Largest L entry between different eigen-sectors of ``S ⊗ I - I ⊗ S^T``.

    Eigenvalues are grouped after rounding to ``decimals`` places.
    """
    if S.dim != L.dim:
        raise DimensionMismatch(f"generator dim {S.dim} vs Liouvillian dim {L.dim}")
    w, v = np.linalg.eigh(S.entries)
    t = np.kron(v, v.conj())
    rotated = LiouvillianMatrix(L.space, t.conj().T @ L.entries @ t)
    diff = np.round((w[:, None] - w[None, :]).reshape(-1), decimals) + 0.0
    return cross_sector_weight(rotated, diff.tolist())
