"""Vectorization and assembly of the Liouvillian matrix.

Operators are flattened row-major, ``|n><m| -> |n>|m>*`` at index ``n * D + m``.
With that convention ``vec(A B C) = (A ⊗ C^T) vec(B)``, and the generator

    L = -i (H ⊗ I - I ⊗ H^T)
        + Σ_j γ_j (L_j ⊗ L_j* - ½ (L_j†L_j ⊗ I + I ⊗ (L_j†L_j)^T))

acts as ``d/dt vec(ρ) = L vec(ρ)``.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import DimensionMismatch, InvalidModel, NumericalFailure
from .hilbert import HERMITIAN_TOL, HilbertSpace, OperatorMatrix

INVARIANT_TOL = 1e-12

HAMILTONIAN_LEFT = "hamiltonian-left"
HAMILTONIAN_RIGHT = "hamiltonian-right"


def jump_tag(j: int) -> str:
    return f"jump({j})"


def dissipator_left_tag(j: int) -> str:
    return f"dissipator-left({j})"


def dissipator_right_tag(j: int) -> str:
    return f"dissipator-right({j})"


def tag_class(tag: str) -> str:
    """Coarse provenance class: ``coherent``, ``jump`` or ``dissipator``."""
    if tag.startswith("hamiltonian"):
        return "coherent"
    if tag.startswith("jump"):
        return "jump"
    return "dissipator"


@dataclass(frozen=True, eq=False)
class Superket:
    """Vectorized operator on ``space ⊗ space*``; ``space`` is the base Hilbert space."""

    space: HilbertSpace
    entries: np.ndarray

    def __post_init__(self):
        v = np.array(self.entries, dtype=complex).reshape(-1)
        d = self.space.total_dim
        if v.shape != (d * d,):
            raise DimensionMismatch(f"superket of length {v.size} on a space of dimension {d}")
        v.setflags(write=False)
        object.__setattr__(self, "entries", v)

    @property
    def dim(self) -> int:
        return self.space.total_dim

    def idx(self, n: int, m: int) -> int:
        return n * self.dim + m

    def matrix(self) -> np.ndarray:
        return self.entries.reshape(self.dim, self.dim)

    def trace(self) -> complex:
        return complex(np.trace(self.matrix()))

    def purity(self) -> float:
        return float(np.real(np.vdot(self.entries, self.entries)))

    def inner(self, other: "Superket") -> complex:
        """Hilbert-Schmidt product ⟨⟨self|other⟩⟩ = Tr(self† other)."""
        return complex(np.vdot(self.entries, other.entries))

    def __add__(self, other):
        return Superket(self.space, self.entries + other.entries)

    def __sub__(self, other):
        return Superket(self.space, self.entries - other.entries)

    def __mul__(self, scalar):
        return Superket(self.space, self.entries * complex(scalar))

    __rmul__ = __mul__


def vectorize(rho) -> Superket:
    if isinstance(rho, OperatorMatrix):
        return Superket(rho.space, rho.entries.reshape(-1))
    m = np.asarray(rho, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"cannot vectorize an array of shape {m.shape}")
    return Superket(HilbertSpace.generic(m.shape[0]), m.reshape(-1))


def devectorize(ket: Superket, label: str = "") -> OperatorMatrix:
    return OperatorMatrix(ket.space, ket.matrix(), label)


def vec_identity(space: HilbertSpace) -> Superket:
    return Superket(space, np.eye(space.total_dim).reshape(-1))


def super_commutator(A: np.ndarray, B: np.ndarray, sign: int = -1) -> np.ndarray:
    """``A ⊗ B^T + sign * B ⊗ A^T``."""
    return np.kron(A, B.T) + sign * np.kron(B, A.T)


def triple_product(A: OperatorMatrix, B: OperatorMatrix, C: OperatorMatrix) -> Superket:
    """``(A ⊗ C^T) vec(B)``, checked against ``vec(A B C)``."""
    for other in (B, C):
        if other.space.dims != A.space.dims:
            raise DimensionMismatch(f"{A.space.dims} vs {other.space.dims}")
    lhs = np.kron(A.entries, C.entries.T) @ B.entries.reshape(-1)
    direct = (A.entries @ B.entries @ C.entries).reshape(-1)
    scale = max(1.0, float(np.max(np.abs(direct), initial=0.0)))
    err = float(np.max(np.abs(lhs - direct), initial=0.0))
    if err > INVARIANT_TOL * scale:
        raise NumericalFailure("triple product identity violated", {"error": err})
    return Superket(A.space, lhs)


@dataclass(frozen=True)
class Jump:
    operator: OperatorMatrix
    rate: float
    label: str = ""


@dataclass(frozen=True)
class LindbladModel:
    space: HilbertSpace
    hamiltonian: OperatorMatrix
    jumps: tuple[Jump, ...] = ()
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "jumps", tuple(self.jumps))

    def validate(self) -> None:
        d = self.space.total_dim
        if self.hamiltonian.dim != d:
            raise InvalidModel(f"Hamiltonian dimension {self.hamiltonian.dim} != {d}")
        err = self.hamiltonian.hermiticity_error()
        if err >= HERMITIAN_TOL * max(1.0, float(np.max(np.abs(self.hamiltonian.entries), initial=0))):
            raise InvalidModel(f"Hamiltonian is not Hermitian (max |H - H†| = {err:.3g})")
        for j, jump in enumerate(self.jumps):
            if jump.operator.dim != d:
                raise InvalidModel(f"jump {j} has dimension {jump.operator.dim} != {d}")
            if not np.isfinite(jump.rate) or jump.rate < 0:
                raise InvalidModel(f"jump {j} has invalid rate {jump.rate}")


@dataclass(frozen=True, eq=False)
class LiouvillianMatrix:
    space: HilbertSpace
    entries: np.ndarray
    term_tags: Mapping[tuple[int, int], frozenset[str]] = field(default_factory=dict)

    def __post_init__(self):
        m = np.array(self.entries, dtype=complex)
        d2 = self.space.total_dim ** 2
        if m.shape != (d2, d2):
            raise DimensionMismatch(f"Liouvillian of shape {m.shape}, expected {(d2, d2)}")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.space.total_dim

    def apply(self, ket: Superket) -> Superket:
        return Superket(self.space, self.entries @ ket.entries)

    def scale(self) -> float:
        return max(1.0, float(np.max(np.abs(self.entries), initial=0.0)))

    def trace_residual(self) -> float:
        """max |⟨⟨I| L|, which vanishes for trace-preserving generators."""
        d = self.dim
        diag_rows = np.arange(d) * (d + 1)
        return float(np.max(np.abs(self.entries[diag_rows].sum(axis=0)), initial=0.0))

    def hermiticity_residual(self) -> float:
        """max |L[nm, jk] - conj(L[mn, kj])| over all entries."""
        p = swap_permutation(self.dim)
        return float(np.max(np.abs(self.entries - self.entries[np.ix_(p, p)].conj()), initial=0.0))

    def check_invariants(self, tol: float = INVARIANT_TOL) -> None:
        s = self.scale()
        tr, herm = self.trace_residual(), self.hermiticity_residual()
        if tr > tol * s or herm > tol * s:
            raise NumericalFailure(
                "Liouvillian violates trace or hermiticity preservation",
                {"trace_residual": tr, "hermiticity_residual": herm, "scale": s},
            )


def swap_permutation(d: int) -> np.ndarray:
    """Index map ``idx(n, m) -> idx(m, n)``."""
    return np.arange(d * d).reshape(d, d).T.reshape(-1)


def _record(tags: dict, term: np.ndarray, tag: str) -> None:
    for r, c in zip(*np.nonzero(term)):
        tags[(int(r), int(c))].add(tag)


def build_liouvillian(model: LindbladModel, check: bool = True) -> LiouvillianMatrix:
    model.validate()
    d = model.space.total_dim
    eye = np.eye(d)
    h = model.hamiltonian.entries
    tags: dict[tuple[int, int], set[str]] = defaultdict(set)

    left = -1j * np.kron(h, eye)
    right = 1j * np.kron(eye, h.T)
    _record(tags, left, HAMILTONIAN_LEFT)
    _record(tags, right, HAMILTONIAN_RIGHT)
    total = left + right
    for j, jump in enumerate(model.jumps):
        if jump.rate == 0:
            continue
        op = jump.operator.entries
        ldl = op.conj().T @ op
        sandwich = jump.rate * np.kron(op, op.conj())
        d_left = -0.5 * jump.rate * np.kron(ldl, eye)
        d_right = -0.5 * jump.rate * np.kron(eye, ldl.T)
        _record(tags, sandwich, jump_tag(j))
        _record(tags, d_left, dissipator_left_tag(j))
        _record(tags, d_right, dissipator_right_tag(j))
        total = total + sandwich + d_left + d_right

    out = LiouvillianMatrix(model.space, total, {k: frozenset(v) for k, v in tags.items()})
    if check:
        out.check_invariants()
    return out


def detailed_balance_residual(L: LiouvillianMatrix, rho: Superket) -> float:
    """|Σ_n ((Lρ)_{nn} - Σ_{jk} L^{nn}_{jk} ρ_{jk})|, an index-consistency self-check."""
    d = L.dim
    drho = L.entries @ rho.entries
    total = 0j
    for n in range(d):
        row = n * d + n
        explicit = sum(L.entries[row, j * d + k] * rho.entries[j * d + k]
                       for j in range(d) for k in range(d))
        total += drho[row] - explicit
    return float(abs(total))


def adjoint_liouvillian(L: LiouvillianMatrix) -> LiouvillianMatrix:
    tags = {(c, r): t for (r, c), t in L.term_tags.items()}
    return LiouvillianMatrix(L.space, L.entries.conj().T, tags)


def liouvillian_from_matrix(space: HilbertSpace, entries: Sequence) -> LiouvillianMatrix:
    """Wrap a raw generator matrix, for example one read back from a file."""
    return LiouvillianMatrix(space, np.asarray(entries, dtype=complex))
