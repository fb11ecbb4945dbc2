import numpy as np
import pytest
from hypothesis import strategies as st
from scipy.optimize import linear_sum_assignment

from lfsl.hilbert import HilbertSpace, OperatorMatrix
from lfsl.liouville import Jump, LindbladModel


def lindblad_rhs(h, jumps, rho):
    """Matrix-form Lindblad right-hand side, written without any vectorization."""
    out = -1j * (h @ rho - rho @ h)
    for op, rate in jumps:
        ldl = op.conj().T @ op
        out = out + rate * (op @ rho @ op.conj().T - 0.5 * (ldl @ rho + rho @ ldl))
    return out


def reference_liouvillian(model):
    """Column k holds the action on the k-th matrix unit |n><m|, k = n*D + m."""
    d = model.space.total_dim
    h = model.hamiltonian.entries
    jumps = [(j.operator.entries, j.rate) for j in model.jumps]
    cols = []
    for k in range(d * d):
        e = np.zeros(d * d, dtype=complex)
        e[k] = 1
        cols.append(lindblad_rhs(h, jumps, e.reshape(d, d)).reshape(-1))
    return np.array(cols).T


def multiset_distance(a, b):
    """Largest pairwise distance under the optimal one-to-one matching."""
    a, b = np.asarray(a), np.asarray(b)
    assert a.shape == b.shape
    cost = np.abs(a[:, None] - b[None, :])
    r, c = linear_sum_assignment(cost)
    return float(cost[r, c].max())


def random_density(d, rng, rank=None):
    rank = rank or d
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho)


def random_hermitian(d, rng, scale=1.0):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return scale * (a + a.conj().T) / 2


def random_model(d, n_jumps, rng):
    space = HilbertSpace.generic(d)
    h = OperatorMatrix(space, random_hermitian(d, rng), "H")
    jumps = tuple(
        Jump(OperatorMatrix(space, rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))),
             float(rng.uniform(0, 2)))
        for _ in range(n_jumps)
    )
    return LindbladModel(space, h, jumps)


model_shapes = st.tuples(st.integers(1, 4), st.integers(0, 3), st.integers(0, 2 ** 32 - 1))


@pytest.fixture
def rng():
    return np.random.default_rng(20261014)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
