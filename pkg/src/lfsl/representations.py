"""Bloch (generalized Gell-Mann) and SIC-POVM frames for states and generators.

SIC conventions: ``M[i, j] = ⟨⟨Π_i|L|Π_j⟩⟩`` and ``m_i = Σ_j M[i, j]``, so the
probabilities ``p_i = Tr(ρ Π_i)`` obey ``dp/dt = d(d+1) M p - m``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, InvalidParameter, NumericalFailure
from .hilbert import HilbertSpace
from .liouville import LiouvillianMatrix, Superket

FRAME_TOL = 1e-12
REAL_TOL = 1e-10
CONDITION_LIMIT = 1e12


def gell_mann(d: int) -> list[np.ndarray]:
    """The d²-1 generalized Gell-Mann matrices, normalized to Tr(λ_i λ_j) = 2δ_ij.

    Order: symmetric pairs (j<k), antisymmetric pairs (j<k), then diagonals.
    """
    if d < 2:
        raise InvalidParameter(f"Gell-Mann matrices need d >= 2, got {d}")
    pairs = [(j, k) for j in range(d) for k in range(j + 1, d)]
    out = []
    for j, k in pairs:
        m = np.zeros((d, d), dtype=complex)
        m[j, k] = m[k, j] = 1
        out.append(m)
    for j, k in pairs:
        m = np.zeros((d, d), dtype=complex)
        m[j, k] = -1j
        m[k, j] = 1j
        out.append(m)
    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1
        diag[l] = -l
        out.append(np.diag(np.sqrt(2 / (l * (l + 1))) * diag).astype(complex))
    return out


@dataclass(frozen=True, eq=False)
class BlochFrame:
    dim: int
    basis: tuple[np.ndarray, ...]
    change_matrix: np.ndarray


def bloch_frame(d: int) -> BlochFrame:
    basis = [np.eye(d, dtype=complex) / np.sqrt(d)] + [g / np.sqrt(2) for g in gell_mann(d)]
    v = np.array([b.reshape(-1).conj() for b in basis])
    gram = v.conj() @ v.T
    if np.max(np.abs(gram - np.eye(d * d))) > FRAME_TOL:
        raise NumericalFailure("Bloch basis is not orthonormal")
    if np.max(np.abs(v @ v.conj().T - np.eye(d * d))) > FRAME_TOL:
        raise NumericalFailure("basis change is not unitary")
    return BlochFrame(d, tuple(basis), v)


def _real(a: np.ndarray, scale: float, what: str) -> np.ndarray:
    err = float(np.max(np.abs(a.imag), initial=0.0))
    if err > REAL_TOL * max(1.0, scale):
        raise NumericalFailure(f"{what} is not real", {"max_imag": err})
    return np.real(a).copy()


def bloch_generator(L: LiouvillianMatrix, frame: BlochFrame) -> np.ndarray:
    """Real generator ``V L V†`` acting on the extended Bloch vector."""
    if L.dim != frame.dim:
        raise DimensionMismatch(f"Liouvillian dim {L.dim} vs frame dim {frame.dim}")
    v = frame.change_matrix
    g = _real(v @ L.entries @ v.conj().T, L.scale(), "Bloch generator")
    row0 = float(np.max(np.abs(g[0]), initial=0.0))
    if row0 > FRAME_TOL * L.scale():
        raise NumericalFailure("Bloch generator does not conserve the identity component", {"row0": row0})
    return g


def bloch_vector(rho: Superket, frame: BlochFrame) -> np.ndarray:
    if rho.dim != frame.dim:
        raise DimensionMismatch(f"state dim {rho.dim} vs frame dim {frame.dim}")
    return _real(frame.change_matrix @ rho.entries, 1.0, "Bloch vector")


def from_bloch(r: Sequence[float], frame: BlochFrame, space: HilbertSpace | None = None) -> Superket:
    space = space or HilbertSpace.generic(frame.dim)
    return Superket(space, frame.change_matrix.conj().T @ np.asarray(r, dtype=complex))


@dataclass(frozen=True, eq=False)
class SicPovm:
    dim: int
    fiducials: tuple[np.ndarray, ...]
    projectors: tuple[np.ndarray, ...]

    @property
    def frame(self) -> np.ndarray:
        """Rows are ⟨⟨Π_i|."""
        return np.array([p.reshape(-1).conj() for p in self.projectors])


def sic_from_fiducials(vectors: Sequence[Sequence[complex]]) -> SicPovm:
    """Normalize the d² fiducial states and check completeness and constant overlap."""
    vecs = [np.asarray(v, dtype=complex).reshape(-1) for v in vectors]
    if not vecs:
        raise InvalidParameter("no fiducial states supplied")
    d = vecs[0].size
    if len(vecs) != d * d or any(v.size != d for v in vecs):
        raise InvalidParameter(f"a SIC-POVM in dimension {d} needs {d * d} vectors of length {d}")
    vecs = [v / np.linalg.norm(v) for v in vecs]
    projs = [np.outer(v, v.conj()) / d for v in vecs]
    povm = SicPovm(d, tuple(vecs), tuple(projs))
    validate_sic(povm)
    return povm


def validate_sic(povm: SicPovm, tol: float = FRAME_TOL) -> None:
    d = povm.dim
    comp = float(np.max(np.abs(sum(povm.projectors) - np.eye(d))))
    if comp > tol:
        raise InvalidParameter(f"POVM elements do not sum to identity (error {comp:.3g})")
    f = povm.frame
    overlaps = f.conj() @ f.T
    target = (d * np.eye(d * d) + 1) / (d * d * (d + 1))
    err = float(np.max(np.abs(overlaps - target)))
    if err > tol:
        raise InvalidParameter(f"overlaps violate the SIC condition (error {err:.3g})")


def builtin_sic_qubit() -> SicPovm:
    w = np.exp(2j * np.pi / 3)
    a, b = 1 / np.sqrt(3), np.sqrt(2 / 3)
    return sic_from_fiducials([[1, 0], [a, b], [a, b * w], [a, b * w * w]])


def sic_generator(L: LiouvillianMatrix, povm: SicPovm) -> tuple[np.ndarray, np.ndarray]:
    if L.dim != povm.dim:
        raise DimensionMismatch(f"Liouvillian dim {L.dim} vs POVM dim {povm.dim}")
    f = povm.frame
    M = _real(f @ L.entries @ f.conj().T, L.scale(), "SIC transition matrix")
    col = float(np.max(np.abs(M.sum(axis=0))))
    if col > FRAME_TOL * L.scale():
        raise NumericalFailure("SIC transition matrix does not conserve probability", {"column_sum": col})
    return M, M.sum(axis=1)


def scaled_rates(M: np.ndarray, d: int) -> np.ndarray:
    """Fold the d(d+1) factor into M, giving ``dp/dt = M' p - m``."""
    return d * (d + 1) * np.asarray(M)


def sic_probabilities(rho: Superket, povm: SicPovm) -> np.ndarray:
    if rho.dim != povm.dim:
        raise DimensionMismatch(f"state dim {rho.dim} vs POVM dim {povm.dim}")
    return _real(povm.frame @ rho.entries, 1.0, "SIC probability vector")


def from_sic(p: Sequence[float], povm: SicPovm, space: HilbertSpace | None = None) -> Superket:
    d = povm.dim
    space = space or HilbertSpace.generic(d)
    coeff = d * (d + 1) * np.asarray(p, dtype=float) - 1
    return Superket(space, povm.frame.conj().T @ coeff)


@dataclass(frozen=True, eq=False)
class SicSteady:
    degenerate: bool
    probabilities: np.ndarray | None
    basis: tuple[np.ndarray, ...]
    condition: float


def sic_steady(M: np.ndarray, m: np.ndarray, povm: SicPovm,
               liouvillian: LiouvillianMatrix | None = None) -> SicSteady:
    """Stationary probabilities of ``dp/dt = d(d+1) M p - m``.

    ``M`` always has the all-ones left null vector, so the balance equations are
    solved together with ``Σ p = 1``.  When that system is still singular the
    steady state is not unique; ``basis`` then holds one probability vector per
    unit-trace null vector of the Liouvillian (or of the stacked system when no
    Liouvillian is given).
    """
    d = povm.dim
    n = d * d
    a = np.vstack([d * (d + 1) * np.asarray(M, dtype=float), np.ones((1, n))])
    b = np.concatenate([np.asarray(m, dtype=float), [1.0]])
    s = np.linalg.svd(a, compute_uv=False)
    cond = float(s[0] / s[-1]) if s[-1] > 0 else np.inf
    if cond < CONDITION_LIMIT:
        p, *_ = np.linalg.lstsq(a, b, rcond=None)
        return SicSteady(False, p, (p,), cond)

    if liouvillian is not None:
        from .spectral import decompose

        dec = decompose(liouvillian)
        basis = tuple(sic_probabilities(v, povm) for v in dec.steady_states())
    else:
        p0, *_ = np.linalg.lstsq(a, b, rcond=None)
        null = scipy.linalg.null_space(a, rcond=1 / CONDITION_LIMIT)
        basis = (p0,) + tuple(p0 + null[:, k] / max(1.0, np.abs(null[:, k]).max())
                              for k in range(null.shape[1]))
    return SicSteady(True, None, basis, cond)


def affine_generator(M: np.ndarray, m: np.ndarray, d: int) -> np.ndarray:
    """Generator of the lifted linear flow on ``(p, 1)``."""
    n = d * d
    g = np.zeros((n + 1, n + 1))
    g[:n, :n] = d * (d + 1) * np.asarray(M)
    g[:n, n] = -np.asarray(m)
    return g


def sic_flow(M: np.ndarray, m: np.ndarray, d: int, p0: Sequence[float], t: float) -> np.ndarray:
    if t < 0:
        raise ValueError("t must be non-negative")
    lifted = np.append(np.asarray(p0, dtype=float), 1.0)
    return (scipy.linalg.expm(affine_generator(M, m, d) * t) @ lifted)[:-1]
