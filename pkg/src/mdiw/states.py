"""Catalog of concrete states and input ensembles used by the games.

Qubit basis ordering is |0> = (1, 0), |1> = (0, 1); multi-party operators
are ordered A (x) B (x) C.  Transposes are always taken in the computational
basis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .linalg import TOL_HERM, TOL_PSD, TOL_TRACE, as_matrix, check_dims, hermiticity_defect, kron_all

_PAULIS = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def pauli(k: int) -> np.ndarray:
    """The 2x2 Pauli matrix sigma_k, with sigma_0 the identity."""
    if k not in (0, 1, 2, 3):
        raise ValueError(f"Pauli index must be 0..3, got {k}")
    return _PAULIS[k].copy()


@dataclass(frozen=True)
class DensityMatrix:
    """A validated quantum state: Hermitian, PSD, unit trace.

    ``dims`` records the subsystem structure (one entry per tensor factor);
    a trivial dimension-1 factor is allowed so that strategies with no
    shared system fit the same interfaces.
    """

    matrix: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        m = as_matrix(self.matrix)
        if m.shape[0] != m.shape[1]:
            raise ValueError("density matrix must be square")
        dims = check_dims(self.dims, m.shape[0])
        defect = hermiticity_defect(m)
        if defect > TOL_HERM:
            raise ValueError(f"not Hermitian (defect {defect:.3e})")
        tr = float(np.trace(m).real)
        if abs(tr - 1.0) > TOL_TRACE:
            raise ValueError(f"trace {tr} is not 1")
        min_eig = float(np.linalg.eigvalsh(m)[0])
        if min_eig < -TOL_PSD:
            raise ValueError(f"not positive semidefinite (min eigenvalue {min_eig:.3e})")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class InputEnsemble:
    """Labelled quantum inputs handed to one party of the game."""

    party: str
    labels: tuple[str, ...]
    states: tuple[DensityMatrix, ...]
    name: str = field(default="custom")

    def __post_init__(self):
        labels = tuple(str(l) for l in self.labels)
        states = tuple(self.states)
        if len(labels) != len(states):
            raise ValueError("one label per state required")
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate input labels: {labels}")
        if not states:
            raise ValueError("ensemble must contain at least one state")
        d = states[0].dim
        if any(s.dim != d for s in states):
            raise ValueError("all ensemble states must share one dimension")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "states", states)

    @property
    def dim(self) -> int:
        return self.states[0].dim

    def __len__(self) -> int:
        return len(self.states)


def bloch_state(n) -> DensityMatrix:
    """Qubit state (1 + n.sigma)/2 for a Bloch vector with |n| <= 1."""
    n = np.asarray(n, dtype=float)
    if n.shape != (3,):
        raise ValueError("Bloch vector must have three real components")
    norm = float(np.linalg.norm(n))
    if norm > 1.0 + 1e-12:
        raise ValueError(f"|n| = {norm} > 1 is not a state")
    m = 0.5 * (_PAULIS[0] + n[0] * _PAULIS[1] + n[1] * _PAULIS[2] + n[2] * _PAULIS[3])
    return DensityMatrix(m, (2,))


def bloch_vector(rho: DensityMatrix | np.ndarray) -> np.ndarray:
    """Bloch vector of a qubit state, n_k = tr(rho sigma_k)."""
    m = rho.matrix if isinstance(rho, DensityMatrix) else as_matrix(rho)
    return np.array([float(np.trace(m @ _PAULIS[k]).real) for k in (1, 2, 3)])


# Unit vectors to the four vertices of a regular tetrahedron on the Bloch
# sphere; vertex s is the conjugation of vertex 0 by sigma_s.
TETRAHEDRON_VERTICES = np.array(
    [[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float
) / math.sqrt(3.0)


def tetrahedron_ensemble(party: str = "A") -> InputEnsemble:
    """Four pure qubit inputs whose Bloch vectors form a regular tetrahedron."""
    states = tuple(bloch_state(v) for v in TETRAHEDRON_VERTICES)
    return InputEnsemble(party, ("0", "1", "2", "3"), states, name="tetrahedron")


# (sign_bit, axis) pairs defining the six Pauli eigenstates, in label order.
_PAULI6_INDEX = ((0, 1), (0, 2), (0, 3), (1, 1), (1, 2), (1, 3))
_PAULI6_LABELS = ("+x", "+y", "+z", "-x", "-y", "-z")


def pauli6_ensemble(party: str = "A") -> InputEnsemble:
    """The six Pauli eigenstates (1 + (-1)^s1 sigma_s2)/2 as inputs."""
    states = []
    for s1, s2 in _PAULI6_INDEX:
        m = 0.5 * (_PAULIS[0] + (-1.0) ** s1 * _PAULIS[s2])
        states.append(DensityMatrix(m, (2,)))
    return InputEnsemble(party, _PAULI6_LABELS, tuple(states), name="pauli6")


def ket(bits: str, d: int = 2) -> np.ndarray:
    """Computational basis ket for a digit string, e.g. ket('01')."""
    idx = 0
    for c in bits:
        v = int(c)
        if not 0 <= v < d:
            raise ValueError(f"digit {c} out of range for local dimension {d}")
        idx = idx * d + v
    out = np.zeros(d ** len(bits), dtype=complex)
    out[idx] = 1.0
    return out


def singlet_ket() -> np.ndarray:
    """(|01> - |10>)/sqrt(2)."""
    return (ket("01") - ket("10")) / math.sqrt(2.0)


def ghz_ket() -> np.ndarray:
    """(|000> + |111>)/sqrt(2)."""
    return (ket("000") + ket("111")) / math.sqrt(2.0)


def max_entangled(d: int) -> np.ndarray:
    """The maximally entangled ket (1/sqrt(d)) sum_i |ii>."""
    if d < 2:
        raise ValueError(f"local dimension must be >= 2, got {d}")
    v = np.zeros(d * d, dtype=complex)
    for i in range(d):
        v[i * d + i] = 1.0
    return v / math.sqrt(d)


def projector(vec) -> np.ndarray:
    """|v><v| for a (not necessarily normalized) ket."""
    v = np.asarray(vec, dtype=complex).reshape(-1)
    return np.outer(v, v.conj())


def werner_state(v: float) -> DensityMatrix:
    """Two-qubit mixture v |psi-><psi-| + (1-v) 1/4, entangled iff v > 1/3."""
    if not 0.0 <= v <= 1.0:
        raise ValueError(f"mixing parameter must lie in [0, 1], got {v}")
    m = v * projector(singlet_ket()) + (1.0 - v) * np.eye(4, dtype=complex) / 4.0
    return DensityMatrix(m, (2, 2))


def noisy_ghz(v: float) -> DensityMatrix:
    """Three-qubit mixture v |GHZ><GHZ| + (1-v) 1/8.

    Genuinely tripartite entangled iff v > 3/7.
    """
    if not 0.0 <= v <= 1.0:
        raise ValueError(f"mixing parameter must lie in [0, 1], got {v}")
    m = v * projector(ghz_ket()) + (1.0 - v) * np.eye(8, dtype=complex) / 8.0
    return DensityMatrix(m, (2, 2, 2))


def random_density_matrix(dims, rng: np.random.Generator, rank: int | None = None) -> DensityMatrix:
    """Random full-rank (or rank-limited) state from a Ginibre factor."""
    dims = tuple(int(d) for d in dims)
    d = math.prod(dims)
    r = d if rank is None else int(rank)
    g = rng.normal(size=(d, r)) + 1j * rng.normal(size=(d, r))
    m = g @ g.conj().T
    m /= np.trace(m).real
    return DensityMatrix(m, dims)


def random_pure_ket(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random ket via a normalized complex-normal vector."""
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return v / np.linalg.norm(v)


ENSEMBLE_BUILDERS = {
    "tetrahedron": tetrahedron_ensemble,
    "pauli6": pauli6_ensemble,
}


def named_ensemble(name: str, party: str) -> InputEnsemble:
    """Look up one of the built-in input ensembles by name."""
    try:
        builder = ENSEMBLE_BUILDERS[name]
    except KeyError:
        raise ValueError(f"unknown ensemble {name!r}; known: {sorted(ENSEMBLE_BUILDERS)}") from None
    return builder(party)


def product_operator(states: tuple[DensityMatrix, ...]) -> np.ndarray:
    """Tensor product of the given states' matrices, in party order."""
    return kron_all([s.matrix for s in states])
