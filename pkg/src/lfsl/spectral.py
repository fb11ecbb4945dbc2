"""Spectra, null spaces and time evolution of vectorized generators."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, InvalidParameter, InvalidTime, NumericalFailure
from .hilbert import OperatorMatrix
from .liouville import LiouvillianMatrix, Superket, swap_permutation, vec_identity

DEFAULT_NULL_TOL = 1e-9
TRACE_TOL = 1e-10
DUST_FLOOR = 1e-13


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    eigenvalues: np.ndarray
    right_vectors: np.ndarray
    left_vectors: np.ndarray
    null_right: tuple[Superket, ...]
    null_left: tuple[Superket, ...]
    traceless: tuple[bool, ...]
    null_tolerance: float
    singular_values: np.ndarray

    @property
    def steady_dim(self) -> int:
        return len(self.null_right)

    @property
    def conserved_dim(self) -> int:
        return len(self.null_left)

    def steady_states(self) -> list[Superket]:
        """Null vectors with unit trace; traceless coherence modes are left out."""
        return [v for v, flag in zip(self.null_right, self.traceless) if not flag]


def decompose(L: LiouvillianMatrix, null_tolerance: float = DEFAULT_NULL_TOL) -> SpectralDecomposition:
    """Full dense eigendecomposition plus SVD-based right and left null spaces.

    A singular value counts as zero when it is below ``null_tolerance * σ_max``
    or below the absolute floor ``1e-13 * max(1, max|L|)``.
    Both null spaces are returned in a Hermitian orthonormal basis.  Right null
    vectors with a trace above 1e-9 are normalized to unit trace; the rest keep unit
    norm and are flagged traceless.
    """
    if not 0 < null_tolerance < 1:
        raise InvalidParameter(f"null_tolerance must lie in (0, 1), got {null_tolerance}")
    a = L.entries
    try:
        w, vl, vr = scipy.linalg.eig(a, left=True, right=True)
        u, s, vh = scipy.linalg.svd(a)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalFailure(f"eigensolver failed: {exc}", {"dim": a.shape[0]}) from exc
    if not np.all(np.isfinite(w)):
        raise NumericalFailure("eigensolver returned non-finite eigenvalues", {"dim": a.shape[0]})

    smax = float(s[0]) if s.size else 0.0
    # rounding dust in an otherwise vanishing generator must not count as rank
    null_mask = s <= max(null_tolerance * smax, DUST_FLOOR * L.scale())
    right = _hermitian_basis(vh.conj().T[:, null_mask], L.dim)
    left = _hermitian_basis(u[:, null_mask], L.dim)

    ident = vec_identity(L.space).entries
    null_right, traceless = [], []
    for k in range(right.shape[1]):
        v = right[:, k]
        tr = np.vdot(ident, v)
        if abs(tr) > 1e-9:
            null_right.append(Superket(L.space, v / tr))
            traceless.append(False)
        else:
            null_right.append(Superket(L.space, _fix_sign(v / np.linalg.norm(v))))
            traceless.append(True)
    null_left = [Superket(L.space, _fix_sign(left[:, k])) for k in range(left.shape[1])]

    out = SpectralDecomposition(
        eigenvalues=w, right_vectors=vr, left_vectors=vl,
        null_right=tuple(null_right), null_left=tuple(null_left), traceless=tuple(traceless),
        null_tolerance=null_tolerance, singular_values=s,
    )
    _check(out, L)
    return out


def _hermitian_basis(vs: np.ndarray, d: int) -> np.ndarray:
    """Orthonormal basis of Hermitian-encoding vectors spanning the same space.

    Works whenever the span is closed under the adjoint, which holds for the null
    spaces of a hermiticity-preserving generator and of its adjoint.  Otherwise
    the input is returned unchanged.
    """
    k = vs.shape[1]
    if k == 0:
        return vs
    p = swap_permutation(d)
    flipped = vs[p].conj()
    parts = np.hstack([(vs + flipped) / 2, (vs - flipped) / 2j])
    real = np.vstack([parts.real, parts.imag])
    u, s, _ = np.linalg.svd(real, full_matrices=False)
    if s.size < k or s[k - 1] < 1e-8 * s[0] or (s.size > k and s[k] > 1e-8 * s[0]):
        return vs
    n = d * d
    return u[:n, :k] + 1j * u[n:, :k]


def _fix_sign(v: np.ndarray) -> np.ndarray:
    """Flip sign so the first entry of largest modulus points along +1 (or +i)."""
    mag = np.abs(v)
    if mag.max() == 0:
        return v
    z = v[int(np.argmax(mag > mag.max() * (1 - 1e-9)))]
    lead = z.real if abs(z.real) > 1e-9 * abs(z) else z.imag
    return -v if lead < 0 else v


def _check(dec: SpectralDecomposition, L: LiouvillianMatrix) -> None:
    norm = float(dec.singular_values[0]) if dec.singular_values.size else 0.0
    if norm <= DUST_FLOOR * L.scale():
        norm = 0.0
    if dec.steady_dim != dec.conserved_dim:
        raise NumericalFailure("steady-state and conserved-quantity counts differ",
                               {"steady": dec.steady_dim, "conserved": dec.conserved_dim})
    if norm > 0:
        a = L.entries
        res_r = max((np.linalg.norm(a @ v.entries) / np.linalg.norm(v.entries)
                     for v in dec.null_right), default=0.0) / norm
        res_l = max((np.linalg.norm(a.conj().T @ u.entries) for u in dec.null_left), default=0.0) / norm
        if res_r >= dec.null_tolerance or res_l >= dec.null_tolerance:
            raise NumericalFailure("null vectors fail the residual check",
                                   {"right": res_r, "left": res_l})
    max_re = float(np.max(dec.eigenvalues.real, initial=-np.inf))
    if max_re > 1e-10 * L.scale():
        raise NumericalFailure("eigenvalue in the right half-plane", {"max_real": max_re})


def propagator(L: LiouvillianMatrix, t: float) -> np.ndarray:
    """exp(L t) by scaling and squaring with a Padé approximant."""
    if not np.isfinite(t) or t < 0:
        raise InvalidTime(f"t must be a finite non-negative time, got {t}")
    return scipy.linalg.expm(L.entries * t)


def evolve(L: LiouvillianMatrix, rho0: Superket, t: float) -> Superket:
    if rho0.space.dims != L.space.dims:
        raise DimensionMismatch(f"{rho0.space.dims} vs {L.space.dims}")
    if t == 0:
        return rho0
    out = Superket(L.space, propagator(L, t) @ rho0.entries)
    tr0 = rho0.trace()
    if abs(tr0 - 1) < TRACE_TOL and abs(out.trace() - 1) > TRACE_TOL:
        raise NumericalFailure("evolution lost trace", {"trace": out.trace(), "t": t})
    return out


def expectation(A: OperatorMatrix, rho: Superket) -> complex:
    """Tr(A ρ), written as ⟨⟨A†|ρ⟩⟩."""
    if A.dim != rho.dim:
        raise DimensionMismatch(f"operator dim {A.dim} vs state dim {rho.dim}")
    return complex(np.vdot(A.entries.conj().T.reshape(-1), rho.entries))


def purity(rho: Superket) -> float:
    p = np.vdot(rho.entries, rho.entries)
    if abs(p.imag) > 1e-12:
        raise NumericalFailure("purity has an imaginary part", {"imag": p.imag})
    return float(p.real)


def unique_steady_state(L: LiouvillianMatrix, null_tolerance: float = DEFAULT_NULL_TOL) -> Superket:
    dec = decompose(L, null_tolerance)
    states = dec.steady_states()
    if dec.steady_dim != 1 or len(states) != 1:
        raise NumericalFailure("steady state is not unique", {"steady_dim": dec.steady_dim})
    return states[0]
