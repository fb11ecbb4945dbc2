"""Model zoo: the open systems studied with the Liouville Fock state lattice.

Every builder returns a validated :class:`LindbladModel`.  Builders with a closed
form also return an :class:`AnalyticReference` used as a test oracle.  Rates are
always in the ``γ (LρL† - ½{L†L, ρ})`` convention, so a generator written as
``γ/2 (2LρL† - {L†L, ρ})`` keeps the same ``γ``.

Composite spaces put the boson mode first and the two-level atom second, with the
atom ordered ``(e, g)``.
"""

from __future__ import annotations

import inspect
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping

import numpy as np

from .errors import InvalidModel, InvalidParameter, InvalidSize, InvalidTruncation
from .hilbert import (
    HilbertSpace,
    OperatorMatrix,
    annihilation,
    lift,
    number,
    pauli,
    spin_operators,
)
from .liouville import Jump, LindbladModel, Superket
from .symmetry import parity_operator

DECAYS = ("none", "atom-decay", "photon-loss")


@dataclass(frozen=True)
class AnalyticReference:
    """Closed-form data attached to a model.

    ``payload`` evaluates the headline formula; ``extras`` holds further closed
    forms under descriptive names.  All callables are pure.
    """

    kind: str
    payload: Callable[..., Any]
    extras: Mapping[str, Callable[..., Any]] = field(default_factory=dict)

    def __call__(self, *args, **kwargs):
        return self.payload(*args, **kwargs)


@dataclass(frozen=True)
class ZooEntry:
    model: LindbladModel
    reference: AnalyticReference | None
    observables: Mapping[str, OperatorMatrix]


def _finite(**values):
    for k, v in values.items():
        if not np.isfinite(v):
            raise InvalidParameter(f"{k} must be finite, got {v}")


def _rate(name, value):
    _finite(**{name: value})
    if value < 0:
        raise InvalidModel(f"{name} must be non-negative, got {value}")


def _model(space, h, jumps, name) -> LindbladModel:
    m = LindbladModel(space, OperatorMatrix(space, h, "H"), tuple(jumps), name)
    m.validate()
    return m


# -- tight-binding ring ---------------------------------------------------------


def tight_binding_eigenvalue(theta, theta_t, eta, gamma1, gamma2):
    d = np.subtract(theta, theta_t)
    return (-(gamma1 + gamma2) * (1 - np.cos(d))
            + 1j * ((gamma1 - gamma2) * np.sin(d) - 2 * eta * (np.cos(theta) - np.cos(theta_t))))


def open_tight_binding(eta: float, gamma1: float, gamma2: float, N: int):
    """Particle on an N-site ring with coherent hopping ``η`` and directed incoherent
    hopping ``L1 = Σ|n><n+1|`` (rate γ1) and ``L2 = Σ|n+1><n|`` (rate γ2)."""
    if int(N) != N or N < 3:
        raise InvalidSize(f"the ring needs N >= 3 sites, got {N}")
    N = int(N)
    _finite(eta=eta)
    _rate("gamma1", gamma1)
    _rate("gamma2", gamma2)
    space = HilbertSpace.generic(N, "site")
    down = np.roll(np.eye(N), 1, axis=1)  # |n><n+1|
    h = eta * (down + down.T)
    jumps = [Jump(OperatorMatrix(space, down, "L1"), gamma1, "L1"),
             Jump(OperatorMatrix(space, down.T, "L2"), gamma2, "L2")]
    model = _model(space, h, jumps, "open_tight_binding")
    thetas = 2 * np.pi * np.arange(N) / N

    def all_eigenvalues():
        return tight_binding_eigenvalue(thetas[:, None], thetas[None, :], eta, gamma1, gamma2).reshape(-1)

    ref = AnalyticReference(
        "spectrum-formula",
        lambda theta, theta_t: tight_binding_eigenvalue(theta, theta_t, eta, gamma1, gamma2),
        {"eigenvalues": all_eigenvalues, "thetas": lambda: thetas.copy(), "steady_dim": lambda: N},
    )
    return model, ref


def _ring_observables(model: LindbladModel) -> dict:
    N = model.space.total_dim
    out = {}
    for k in range(N):
        v = np.exp(2j * np.pi * k * np.arange(N) / N) / np.sqrt(N)
        out[f"k{k}"] = OperatorMatrix(model.space, np.outer(v, v.conj()), f"k{k}", hermitian=True)
    site0 = np.zeros((N, N))
    site0[0, 0] = 1
    out["site0"] = OperatorMatrix(model.space, site0, "site0", hermitian=True)
    return out


# -- single boson mode ----------------------------------------------------------


def two_photon_loss(omega: float, gamma: float, n_max: int):
    if int(n_max) != n_max or n_max < 3:
        raise InvalidTruncation(f"two-photon loss needs n_max >= 3, got {n_max}")
    _finite(omega=omega)
    _rate("gamma", gamma)
    dim = int(n_max) + 1
    a = annihilation(dim)
    space = a.space
    model = _model(space, omega * number(dim).entries, [Jump(a @ a, gamma, "a2")], "two_photon_loss")
    ref = AnalyticReference(
        "steady-subspace-dim",
        lambda: 4 if omega == 0 else 2,
        {
            "coherence_eigenvalues": lambda: (1j * omega, -1j * omega),
            "coherence_modes": lambda: (Superket(space, _unit(dim * dim, 1)),
                                        Superket(space, _unit(dim * dim, dim))),
        },
    )
    return model, ref


def _unit(n, k):
    v = np.zeros(n, dtype=complex)
    v[k] = 1
    return v


def incoherently_driven_oscillator(Delta: float, eta: float, n_max: int):
    """``H = Δ a†a + η(a + a†)`` with the Hermitian jump ``a + a†`` at unit rate."""
    if int(n_max) != n_max or n_max < 6:
        raise InvalidTruncation(f"the driven oscillator needs n_max >= 6, got {n_max}")
    _finite(Delta=Delta, eta=eta)
    dim = int(n_max) + 1
    a = annihilation(dim)
    x = a + a.dag()
    h = Delta * number(dim).entries + eta * x.entries
    model = _model(a.space, h, [Jump(x.named("x"), 1.0, "x")], "incoherently_driven_oscillator")
    ref = AnalyticReference(
        "spectrum-formula",
        lambda n, m: 1j * (n - m) * Delta,
        {"low_sector": lambda k_max=3: [1j * k * Delta for k in range(-k_max, k_max + 1)]},
    )
    return model, ref


def _boson_observables(model: LindbladModel) -> dict:
    dim = model.space.total_dim
    n = number(dim)
    a = annihilation(dim)
    return {"n": n, "x": (a + a.dag()).named("x", hermitian=True), "parity": parity_operator(n)}


# -- boson ⊗ atom ---------------------------------------------------------------


def _cavity_atom(n_max):
    dim = int(n_max) + 1
    p = pauli("atom")
    a0 = annihilation(dim)
    space = a0.space @ p.sz.space
    a = lift(a0, space, 0)
    sp, sm, sz = (lift(o, space, 1) for o in (p.splus, p.sminus, p.sz))
    n = lift(number(dim), space, 0)
    return space, a, sp, sm, sz, n


def excitation_number(space: HilbertSpace) -> OperatorMatrix:
    """``N = a†a + (σz + 1)/2`` on boson ⊗ atom."""
    n = lift(number(space.dims[0]), space, 0)
    sz = lift(pauli("atom").sz, space, 1)
    return OperatorMatrix(space, n.entries + (sz.entries + np.eye(space.total_dim)) / 2, "N", hermitian=True)


def jaynes_cummings(delta: float, g: float, n_max: int, drive_eta: float = 0.0,
                    decay: str = "none", gamma: float = 0.0):
    """``H = (Δ/2)σz + g(σ+ a + a† σ-) [+ η(a + a†)]`` with optional decay."""
    if int(n_max) != n_max or n_max < 2:
        raise InvalidTruncation(f"the Jaynes-Cummings model needs n_max >= 2, got {n_max}")
    _finite(delta=delta, g=g, drive_eta=drive_eta, gamma=gamma)
    if decay not in DECAYS:
        raise InvalidModel(f"decay must be one of {DECAYS}, got {decay!r}")
    if decay == "none" and gamma != 0:
        raise InvalidModel("a decay rate was given without a decay channel")
    if decay != "none" and gamma <= 0:
        raise InvalidModel(f"{decay} needs gamma > 0, got {gamma}")
    space, a, sp, sm, sz, _ = _cavity_atom(n_max)
    h = (delta / 2) * sz.entries + g * (sp.entries @ a.entries + a.entries.conj().T @ sm.entries)
    if drive_eta:
        h = h + drive_eta * (a.entries + a.entries.conj().T)
    jumps = []
    if decay == "atom-decay":
        jumps.append(Jump(sm.named("σ-"), gamma, "atom"))
    elif decay == "photon-loss":
        jumps.append(Jump(a.named("a"), gamma, "photon"))
    model = _model(space, h, jumps, "jaynes_cummings")
    ref = None
    if decay != "none" and drive_eta == 0:
        ground = space.ravel((0, 1))
        d = space.total_dim
        ref = AnalyticReference(
            "unique-steady-state",
            lambda: Superket(space, _unit(d * d, ground * d + ground)),
        )
    return model, ref


def quantum_rabi(omega: float, Omega: float, g_rot: float, g_crot: float, n_max: int) -> LindbladModel:
    """Anisotropic Rabi model; ``g_rot = g_crot`` is the ordinary quantum Rabi model."""
    if int(n_max) != n_max or n_max < 2:
        raise InvalidTruncation(f"the Rabi model needs n_max >= 2, got {n_max}")
    _finite(omega=omega, Omega=Omega, g_rot=g_rot, g_crot=g_crot)
    space, a, sp, sm, sz, n = _cavity_atom(n_max)
    ad = a.entries.conj().T
    h = (omega * n.entries + (Omega / 2) * sz.entries
         + g_rot * (sp.entries @ a.entries + ad @ sm.entries)
         + g_crot * (ad @ sp.entries + a.entries @ sm.entries))
    return _model(space, h, [], "quantum_rabi")


def _cavity_atom_observables(model: LindbladModel) -> dict:
    space = model.space
    n_op = excitation_number(space)
    p = pauli("atom")
    return {
        "n": lift(number(space.dims[0]), space, 0).named("n", hermitian=True),
        "sz": lift(p.sz, space, 1).named("sz", hermitian=True),
        "N": n_op,
        "parity": parity_operator(n_op),
    }


# -- spins ----------------------------------------------------------------------


def central_spin(delta_small: float, Delta: float, g: float, N_spins: int) -> LindbladModel:
    """``H = δσz + ΔSz + g σx Sx`` on qubit ⊗ collective spin N/2."""
    if int(N_spins) != N_spins or N_spins < 1:
        raise InvalidSize(f"N_spins must be a positive integer, got {N_spins}")
    _finite(delta_small=delta_small, Delta=Delta, g=g)
    p = pauli("q")
    s = spin_operators(N_spins / 2, "S")
    space = p.sz.space @ s.Sz.space
    h = (delta_small * np.kron(p.sz.entries, np.eye(s.Sz.dim))
         + Delta * np.kron(np.eye(2), s.Sz.entries)
         + g * np.kron(p.sx.entries, s.Sx.entries))
    return _model(space, h, [], "central_spin")


def _central_spin_observables(model: LindbladModel) -> dict:
    space = model.space
    p = pauli("q")
    s = spin_operators((space.dims[1] - 1) / 2, "S")
    return {
        "sz": lift(p.sz, space, 0).named("sz", hermitian=True),
        "Sz": lift(s.Sz, space, 1).named("Sz", hermitian=True),
        "Sx": lift(s.Sx, space, 1).named("Sx", hermitian=True),
    }


def bistability_norm(lam: complex, S) -> float:
    """``D = Σ_m (2S+m+1)! (m!)² / ((2S-m)! (2m+1)!) |λ|^(-2m)``."""
    two_s = int(round(2 * S))
    x = abs(lam) ** -2
    return float(sum(
        math.factorial(two_s + m + 1) * math.factorial(m) ** 2
        / (math.factorial(two_s - m) * math.factorial(2 * m + 1)) * x ** m
        for m in range(two_s + 1)
    ))


def optical_bistability(omega: float, gamma: float, S):
    """``H = ω Sx`` with collective decay ``S-`` at rate ``γ/S``.

    At rate ``γ/S`` the steady state is ``χχ†`` with ``χ ∝ Σ_n (S-/λ)^n`` and
    ``λ = -iωS/γ``.
    """
    _finite(omega=omega, gamma=gamma)
    if gamma <= 0:
        raise InvalidModel(f"optical bistability needs gamma > 0, got {gamma}")
    s = spin_operators(S)
    spin = (s.Sz.dim - 1) / 2
    if spin == 0:
        raise InvalidParameter("optical bistability needs S >= 1/2")
    space = s.Sz.space
    model = _model(space, omega * s.Sx.entries, [Jump(s.Sminus, gamma / spin, "S-")],
                   "optical_bistability")
    lam = -1j * omega * spin / gamma
    d = space.total_dim

    def steady_state():
        if omega == 0:
            rho = np.zeros((d, d), dtype=complex)
            rho[-1, -1] = 1
            return Superket(space, rho.reshape(-1))
        chi = np.zeros((d, d), dtype=complex)
        term = np.eye(d, dtype=complex)
        step = s.Sminus.entries / lam
        for _ in range(d):
            chi += term
            term = term @ step
        chi /= math.sqrt(bistability_norm(lam, spin))
        return Superket(space, (chi @ chi.conj().T).reshape(-1))

    ref = AnalyticReference(
        "steady-state", steady_state,
        {"lambda": lambda: lam,
         "norm": lambda: bistability_norm(lam, spin) if omega else 1.0},
    )
    return model, ref


def _spin_observables(model: LindbladModel) -> dict:
    s = spin_operators((model.space.total_dim - 1) / 2)
    return {"Sx": s.Sx, "Sy": s.Sy, "Sz": s.Sz}


# -- driven, decaying qubit -----------------------------------------------------


def qubit_liouvillian(Omega, g, gamma) -> np.ndarray:
    """The 4×4 generator written out entrywise in the (ee, eg, ge, gg) basis."""
    c = 1j * Omega + gamma / 2
    return np.array([
        [-gamma, 1j * g, -1j * g, 0],
        [1j * g, -c, 0, -1j * g],
        [-1j * g, 0, -np.conj(c), 1j * g],
        [gamma, -1j * g, 1j * g, 0],
    ], dtype=complex)


def qubit_steady_state(Omega, g, gamma) -> np.ndarray:
    """Stationary ``vec(ρ)``; requires ``2g² + γ²/4 + Ω² > 0``."""
    den = 2 * g * g + gamma ** 2 / 4 + Omega ** 2
    if den == 0:
        raise InvalidParameter("the steady state is not unique when g = γ = Ω = 0")
    return np.array([
        g * g,
        (-Omega - 0.5j * gamma) * g,
        (-Omega + 0.5j * gamma) * g,
        g * g + gamma ** 2 / 4 + Omega ** 2,
    ], dtype=complex) / den


def qubit_sic_matrix(Omega, g, gamma) -> np.ndarray:
    """``M_ij = ⟨⟨Π_i|L|Π_j⟩⟩`` for the built-in tetrahedral SIC-POVM."""
    G = gamma
    r3o = math.sqrt(3) * Omega
    r6g = math.sqrt(6) * g
    return np.array([
        [-G / 4, -G / 12, (-G + r6g) / 12, (-G - r6g) / 12],
        [G / 12, -G / 36, (2 * G - 2 * r3o - r6g) / 36, (2 * G + 2 * r3o + r6g) / 36],
        [(G - r6g) / 12, (2 * G + 2 * r3o + r6g) / 36, -G / 36, (G - r3o + r6g) / 18],
        [(G + r6g) / 12, (2 * G - 2 * r3o - r6g) / 36, (G + r3o - r6g) / 18, -G / 36],
    ])


def qubit_sic_source(gamma) -> np.ndarray:
    return np.array([-gamma / 2, gamma / 6, gamma / 6, gamma / 6])


def qubit_sic_steady(Omega, g, gamma) -> np.ndarray:
    """Stationary SIC probabilities for the built-in qubit POVM."""
    den = 2 * g * g + gamma ** 2 / 4 + Omega ** 2
    if den == 0:
        raise InvalidParameter("the steady state is not unique when g = γ = Ω = 0")
    r2, r6 = math.sqrt(2), math.sqrt(6)
    base = 2 * Omega ** 2 + 3 * g * g + gamma ** 2 / 2
    return np.array([
        3 * g * g,
        base - 2 * r2 * Omega * g,
        base + r2 * Omega * g + (r6 / 2) * g * gamma,
        base + r2 * Omega * g - (r6 / 2) * g * gamma,
    ]) / (6 * den)


def decaying_driven_qubit(Omega: float, g: float, gamma: float):
    """``H = (Ω/2)σz + gσx`` with spontaneous decay ``σ-`` at rate ``γ``."""
    _finite(Omega=Omega, g=g)
    _rate("gamma", gamma)
    p = pauli("q")
    h = (Omega / 2) * p.sz.entries + g * p.sx.entries
    model = _model(p.sz.space, h, [Jump(p.sminus, gamma, "σ-")], "decaying_driven_qubit")
    space = p.sz.space
    ref = AnalyticReference(
        "unique-steady-state",
        lambda: Superket(space, qubit_steady_state(Omega, g, gamma)),
        {
            "liouvillian": lambda: qubit_liouvillian(Omega, g, gamma),
            "sic_matrix": lambda: qubit_sic_matrix(Omega, g, gamma),
            "sic_source": lambda: qubit_sic_source(gamma),
            "sic_steady": lambda: qubit_sic_steady(Omega, g, gamma),
        },
    )
    return model, ref


def _qubit_observables(model: LindbladModel) -> dict:
    p = pauli("q")
    excited = OperatorMatrix(p.sz.space, [[1, 0], [0, 0]], "excited", hermitian=True)
    return {"sx": p.sx, "sy": p.sy, "sz": p.sz, "excited": excited}


# -- registry -------------------------------------------------------------------

ZOO: dict[str, tuple[Callable, Callable]] = {
    "open_tight_binding": (open_tight_binding, _ring_observables),
    "two_photon_loss": (two_photon_loss, _boson_observables),
    "jaynes_cummings": (jaynes_cummings, _cavity_atom_observables),
    "quantum_rabi": (quantum_rabi, _cavity_atom_observables),
    "central_spin": (central_spin, _central_spin_observables),
    "optical_bistability": (optical_bistability, _spin_observables),
    "incoherently_driven_oscillator": (incoherently_driven_oscillator, _boson_observables),
    "decaying_driven_qubit": (decaying_driven_qubit, _qubit_observables),
}


def zoo_names() -> list[str]:
    return sorted(ZOO)


def zoo_parameters(name: str) -> dict[str, Any]:
    """Parameter names of a zoo builder mapped to their defaults (``inspect.Parameter.empty`` if required)."""
    builder, _ = ZOO[_canonical(name)]
    return {k: p.default for k, p in inspect.signature(builder).parameters.items()}


def _canonical(name: str) -> str:
    key = name.replace("-", "_")
    if key not in ZOO:
        raise InvalidModel(f"unknown zoo model {name!r}; known: {', '.join(zoo_names())}")
    return key


def build_zoo(name: str, params: Mapping[str, Any]) -> ZooEntry:
    key = _canonical(name)
    builder, observables = ZOO[key]
    expected = zoo_parameters(key)
    unknown = sorted(set(params) - set(expected))
    if unknown:
        raise InvalidParameter(f"{key} does not take {', '.join(unknown)}")
    missing = sorted(k for k, d in expected.items() if d is inspect.Parameter.empty and k not in params)
    if missing:
        raise InvalidParameter(f"{key} is missing {', '.join(missing)}")
    out = builder(**params)
    model, ref = out if isinstance(out, tuple) else (out, None)
    return ZooEntry(model, ref, observables(model))
