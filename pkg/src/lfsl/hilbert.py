"""Finite Hilbert spaces and the operator algebra used to assemble models.

Composite spaces order their basis in mixed radix with the leftmost factor most
significant, so ``space.ravel((n1, n2)) == n1 * dim2 + n2``.

Spin factors list their basis by descending magnetic quantum number,
``|S, S>, |S, S-1>, ..., |S, -S>``.  For S = 1/2 this makes the spin matrices
exactly half the Pauli matrices with ``sigma_z = diag(1, -1)``, and it matches the
qubit convention where index 0 is the excited level and ``sigma_minus = |1><0|``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DimensionMismatch, InvalidDimension, InvalidParameter, InvalidSpin

HERMITIAN_TOL = 1e-12

KINDS = ("boson-truncated", "spin", "qubit", "generic")


@dataclass(frozen=True)
class Factor:
    label: str
    kind: str
    dim: int

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidParameter(f"unknown factor kind {self.kind!r}")
        if int(self.dim) != self.dim or self.dim < 1:
            raise InvalidDimension(f"factor {self.label!r} has dimension {self.dim}")
        if self.kind == "qubit" and self.dim != 2:
            raise InvalidDimension("a qubit factor has dimension 2")


@dataclass(frozen=True)
class HilbertSpace:
    factors: tuple[Factor, ...]

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if not self.factors:
            raise InvalidDimension("a Hilbert space needs at least one factor")

    @classmethod
    def boson(cls, dim: int, label: str = "a") -> "HilbertSpace":
        """Boson mode truncated to Fock states ``0 .. dim-1`` (cutoff ``dim - 1``)."""
        return cls((Factor(label, "boson-truncated", dim),))

    @classmethod
    def spin(cls, S, label: str = "S") -> "HilbertSpace":
        return cls((Factor(label, "spin", _two_s(S) + 1),))

    @classmethod
    def qubit(cls, label: str = "q") -> "HilbertSpace":
        return cls((Factor(label, "qubit", 2),))

    @classmethod
    def generic(cls, dim: int, label: str = "h") -> "HilbertSpace":
        return cls((Factor(label, "generic", dim),))

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(f.dim for f in self.factors)

    @property
    def total_dim(self) -> int:
        return math.prod(self.dims)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(f.label for f in self.factors)

    def __matmul__(self, other: "HilbertSpace") -> "HilbertSpace":
        return HilbertSpace(self.factors + other.factors)

    def unravel(self, index: int) -> tuple[int, ...]:
        return tuple(int(i) for i in np.unravel_index(index, self.dims))

    def ravel(self, indices: Sequence[int]) -> int:
        if len(indices) != len(self.factors):
            raise DimensionMismatch(
                f"expected {len(self.factors)} factor indices, got {len(indices)}"
            )
        return int(np.ravel_multi_index(tuple(indices), self.dims))

    def factor_index(self, label: str) -> int:
        for k, f in enumerate(self.factors):
            if f.label == label:
                return k
        raise KeyError(label)


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """Dense complex matrix acting on ``space``.

    Entries are copied and frozen on construction.  With ``hermitian=True`` the
    matrix is checked against its adjoint.
    """

    space: HilbertSpace
    entries: np.ndarray
    label: str = ""
    hermitian: bool = field(default=False)

    def __post_init__(self):
        m = np.array(self.entries, dtype=complex)
        d = self.space.total_dim
        if m.shape != (d, d):
            raise DimensionMismatch(f"operator of shape {m.shape} on a space of dimension {d}")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)
        if self.hermitian and self.hermiticity_error() >= HERMITIAN_TOL:
            raise InvalidParameter(f"operator {self.label!r} flagged Hermitian but is not")

    @property
    def dim(self) -> int:
        return self.space.total_dim

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.entries - self.entries.conj().T), initial=0.0))

    def is_hermitian(self, tol: float = HERMITIAN_TOL) -> bool:
        return self.hermiticity_error() < tol

    def dag(self) -> "OperatorMatrix":
        return OperatorMatrix(self.space, self.entries.conj().T, _suffix(self.label, "†"))

    def _check(self, other: "OperatorMatrix"):
        if other.space.dims != self.space.dims:
            raise DimensionMismatch(f"{self.space.dims} vs {other.space.dims}")

    def __matmul__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        self._check(other)
        return OperatorMatrix(self.space, self.entries @ other.entries)

    def __add__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        self._check(other)
        return OperatorMatrix(self.space, self.entries + other.entries)

    def __sub__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        self._check(other)
        return OperatorMatrix(self.space, self.entries - other.entries)

    def __mul__(self, scalar) -> "OperatorMatrix":
        return OperatorMatrix(self.space, self.entries * complex(scalar), self.label)

    __rmul__ = __mul__

    def __truediv__(self, scalar) -> "OperatorMatrix":
        return OperatorMatrix(self.space, self.entries / complex(scalar), self.label)

    def __neg__(self) -> "OperatorMatrix":
        return OperatorMatrix(self.space, -self.entries, self.label)

    def __pow__(self, n: int) -> "OperatorMatrix":
        return OperatorMatrix(self.space, np.linalg.matrix_power(self.entries, n))

    def named(self, label: str, hermitian: bool = False) -> "OperatorMatrix":
        return OperatorMatrix(self.space, self.entries, label, hermitian)


def _suffix(label, s):
    return f"{label}{s}" if label else ""


def _two_s(S) -> int:
    two_s = 2 * float(S)
    if not math.isfinite(two_s) or two_s < 0 or abs(two_s - round(two_s)) > 1e-12:
        raise InvalidSpin(f"S={S} is not a non-negative half-integer")
    return int(round(two_s))


def identity(space: HilbertSpace) -> OperatorMatrix:
    return OperatorMatrix(space, np.eye(space.total_dim), "I", hermitian=True)


def annihilation(dim: int, label: str = "a") -> OperatorMatrix:
    """Truncated bosonic lowering operator, ``a[n-1, n] = sqrt(n)``."""
    if int(dim) != dim or dim < 2:
        raise InvalidDimension(f"boson truncation needs dim >= 2, got {dim}")
    space = HilbertSpace.boson(int(dim), label)
    return OperatorMatrix(space, np.diag(np.sqrt(np.arange(1, dim)), 1), label)


def creation(dim: int, label: str = "a") -> OperatorMatrix:
    return annihilation(dim, label).dag()


def number(dim: int, label: str = "a") -> OperatorMatrix:
    space = HilbertSpace.boson(int(dim), label)
    return OperatorMatrix(space, np.diag(np.arange(dim, dtype=float)), "n", hermitian=True)


class SpinOperators(NamedTuple):
    Sx: OperatorMatrix
    Sy: OperatorMatrix
    Sz: OperatorMatrix
    Splus: OperatorMatrix
    Sminus: OperatorMatrix


def spin_operators(S, label: str = "S") -> SpinOperators:
    two_s = _two_s(S)
    s = two_s / 2
    space = HilbertSpace.spin(s, label)
    ms = s - np.arange(two_s + 1)
    sp = np.zeros((two_s + 1, two_s + 1))
    # S+ |S,m> = sqrt((S-m)(S+m+1)) |S,m+1>; index k-1 holds m+1
    for k in range(1, two_s + 1):
        m = ms[k]
        sp[k - 1, k] = math.sqrt((s - m) * (s + m + 1))
    splus = OperatorMatrix(space, sp, "S+")
    sminus = OperatorMatrix(space, sp.T, "S-")
    sx = OperatorMatrix(space, (sp + sp.T) / 2, "Sx", hermitian=True)
    sy = OperatorMatrix(space, (sp - sp.T) / 2j, "Sy", hermitian=True)
    sz = OperatorMatrix(space, np.diag(ms), "Sz", hermitian=True)
    return SpinOperators(sx, sy, sz, splus, sminus)


class Pauli(NamedTuple):
    sx: OperatorMatrix
    sy: OperatorMatrix
    sz: OperatorMatrix
    splus: OperatorMatrix
    sminus: OperatorMatrix


def pauli(label: str = "q") -> Pauli:
    space = HilbertSpace.qubit(label)
    sx = OperatorMatrix(space, [[0, 1], [1, 0]], "σx", hermitian=True)
    sy = OperatorMatrix(space, [[0, -1j], [1j, 0]], "σy", hermitian=True)
    sz = OperatorMatrix(space, [[1, 0], [0, -1]], "σz", hermitian=True)
    splus = OperatorMatrix(space, [[0, 1], [0, 0]], "σ+")
    sminus = OperatorMatrix(space, [[0, 0], [1, 0]], "σ-")
    return Pauli(sx, sy, sz, splus, sminus)


def tensor(*ops: OperatorMatrix) -> OperatorMatrix:
    """Kronecker product; factors of earlier operands come first."""
    if not ops:
        raise InvalidParameter("tensor needs at least one operand")
    space = reduce(lambda s, o: s @ o.space, ops[1:], ops[0].space)
    entries = reduce(np.kron, (o.entries for o in ops))
    label = "⊗".join(o.label for o in ops) if all(o.label for o in ops) else ""
    return OperatorMatrix(space, entries, label)


def lift(op: OperatorMatrix, space: HilbertSpace, position: int) -> OperatorMatrix:
    """Embed a single-factor operator at ``position`` of a composite ``space``."""
    parts = [identity(HilbertSpace((f,))) for f in space.factors]
    if op.space.dims != (space.factors[position].dim,):
        raise DimensionMismatch(f"operator dims {op.space.dims} do not fit factor {position}")
    parts[position] = op
    out = tensor(*parts)
    return OperatorMatrix(space, out.entries, op.label)


def basis_state(space: HilbertSpace, indices: Sequence[int]) -> np.ndarray:
    v = np.zeros(space.total_dim, dtype=complex)
    v[space.ravel(indices)] = 1.0
    return v


def leakage(rho, space: HilbertSpace) -> dict[str, float]:
    """Population in the two highest Fock levels of every truncated boson factor.

    Small values certify that the truncation did not influence a result.
    """
    r = np.asarray(getattr(rho, "entries", rho), dtype=complex)
    if r.ndim == 1:
        r = r.reshape(space.total_dim, space.total_dim)
    diag = np.real(np.diag(r)).reshape(space.dims)
    out = {}
    for k, f in enumerate(space.factors):
        if f.kind != "boson-truncated":
            continue
        marginal = diag.sum(axis=tuple(i for i in range(len(space.dims)) if i != k))
        out[f.label] = float(marginal[-2:].sum()) if f.dim >= 2 else float(marginal[-1])
    return out
