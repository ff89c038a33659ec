"""Dense statevector backend: exact evolution, Schmidt spectra, entropies.

Amplitude indexing: qubit 0 is the least significant bit of the basis
index, so |x_{n-1} ... x_1 x_0> sits at index sum_q x_q 2^q. The register
is capped at DENSE_LIMIT qubits; everything here is meant as ground truth
for small systems, not as a scalable simulator.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse
import scipy.sparse.linalg

from .hamiltonians import HamiltonianModel
from .pauli import PauliTerm

DENSE_LIMIT = 14
EIGH_LIMIT = 10
EIGENVALUE_FLOOR = 1e-14

_PAULI_MATRICES = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass
class DenseState:
    """Normalized n-qubit statevector. Treated as immutable by the ops here."""

    n: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        if self.n < 1 or self.n > DENSE_LIMIT:
            raise ValueError(f"n must be in [1, {DENSE_LIMIT}], got {self.n}")
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if self.amplitudes.shape != (2**self.n,):
            raise ValueError("amplitude vector has wrong length")

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def from_product(n: int, pattern: str = "zeros") -> DenseState:
    """Product state |0...0>, |+...+>, or an explicit bitstring.

    Bitstrings are read with character position = qubit index, so "101"
    is qubit 0 and qubit 2 set, amplitude at index 5.
    """
    if pattern == "zeros":
        pattern = "0" * n
    if pattern == "plus":
        amps = np.full(2**n, 2.0 ** (-n / 2), dtype=complex)
        return DenseState(n, amps)
    if len(pattern) != n or set(pattern) - {"0", "1"}:
        raise ValueError(f"pattern must be 'zeros', 'plus', or an n-bit string, got {pattern!r}")
    index = sum(1 << q for q, c in enumerate(pattern) if c == "1")
    amps = np.zeros(2**n, dtype=complex)
    amps[index] = 1.0
    return DenseState(n, amps)


def _parity(indices: np.ndarray, mask: int) -> np.ndarray:
    out = np.zeros(indices.shape, dtype=np.int64)
    q = 0
    while mask >> q:
        if (mask >> q) & 1:
            out ^= (indices >> q) & 1
        q += 1
    return out


def apply_pauli_string(amps: np.ndarray, n: int, paulis: dict[int, str]) -> np.ndarray:
    """Apply a unit-coefficient Pauli string to an amplitude vector."""
    flip = 0
    phase_mask = 0
    n_y = 0
    for q, letter in paulis.items():
        if letter in ("X", "Y"):
            flip |= 1 << q
        if letter in ("Y", "Z"):
            phase_mask |= 1 << q
        if letter == "Y":
            n_y += 1
    idx = np.arange(len(amps))
    src = idx ^ flip
    phase = (1j**n_y) * np.where(_parity(src, phase_mask), -1.0, 1.0)
    return phase * amps[src]


def apply_terms(
    state: DenseState, terms: PauliTerm | list[PauliTerm]
) -> DenseState:
    """Apply the operator sum of terms (not unitary in general)."""
    term_list = [terms] if isinstance(terms, PauliTerm) else terms
    out = np.zeros_like(state.amplitudes)
    for t in term_list:
        out += t.coefficient * apply_pauli_string(state.amplitudes, state.n, t.paulis)
    return DenseState(state.n, out)


def expectation(state: DenseState, terms: PauliTerm | list[PauliTerm]) -> complex:
    return complex(np.vdot(state.amplitudes, apply_terms(state, terms).amplitudes))


def apply_term_exponential(state: DenseState, term: PauliTerm, theta: float) -> DenseState:
    """Apply exp(-i * theta * term) using the closed form cos - i sin.

    The term coefficient folds into the rotation angle, so it must be real
    (Hermitian term). Pure identity terms contribute a global phase.
    """
    if abs(term.coefficient.imag) > 1e-12:
        raise ValueError("term exponential requires a real (Hermitian) coefficient")
    angle = theta * term.coefficient.real
    if not term.paulis:
        return DenseState(state.n, np.exp(-1j * angle) * state.amplitudes)
    rotated = apply_pauli_string(state.amplitudes, state.n, term.paulis)
    return DenseState(state.n, math.cos(angle) * state.amplitudes - 1j * math.sin(angle) * rotated)


def apply_single_qubit_unitary(state: DenseState, q: int, u: np.ndarray) -> DenseState:
    """Apply a 2x2 unitary on qubit q (used to build test ensembles)."""
    tensor = state.amplitudes.reshape([2] * state.n)
    axis = state.n - 1 - q
    moved = np.moveaxis(tensor, axis, 0)
    out = np.tensordot(u, moved, axes=([1], [0]))
    return DenseState(state.n, np.moveaxis(out, 0, axis).reshape(-1))


def _term_triplets(model: HamiltonianModel) -> tuple[np.ndarray, np.ndarray]:
    """Stack (rows implied by xor, values) for all terms on the full index set."""
    dim = 2**model.n
    idx = np.arange(dim)
    rows = []
    vals = []
    for t in model.terms:
        flip = 0
        phase_mask = 0
        n_y = 0
        for q, letter in t.paulis.items():
            if letter in ("X", "Y"):
                flip |= 1 << q
            if letter in ("Y", "Z"):
                phase_mask |= 1 << q
            if letter == "Y":
                n_y += 1
        rows.append(idx ^ flip)
        vals.append(
            t.coefficient
            * (1j**n_y)
            * np.where(_parity(idx, phase_mask), -1.0, 1.0)
        )
    return np.concatenate(rows), np.concatenate(vals)


def build_dense_hamiltonian(model: HamiltonianModel) -> np.ndarray:
    if model.n > EIGH_LIMIT:
        raise ValueError(f"dense matrix build capped at n = {EIGH_LIMIT}")
    dim = 2**model.n
    H = np.zeros((dim, dim), dtype=complex)
    idx = np.arange(dim)
    rows, vals = _term_triplets(model)
    cols = np.tile(idx, len(model.terms))
    np.add.at(H, (rows, cols), vals)
    return H


def build_sparse_hamiltonian(model: HamiltonianModel) -> scipy.sparse.csr_matrix:
    dim = 2**model.n
    rows, vals = _term_triplets(model)
    cols = np.tile(np.arange(dim), len(model.terms))
    mat = scipy.sparse.coo_matrix((vals, (rows, cols)), shape=(dim, dim))
    return mat.tocsr()


class ExactPropagator:
    """Reusable exp(-iHt) for one Hamiltonian; cheap per extra time point.

    Uses a full eigendecomposition up to EIGH_LIMIT qubits and sparse
    exponential action (expm_multiply, with its built-in step control)
    beyond that.
    """

    def __init__(self, model: HamiltonianModel):
        if model.n > DENSE_LIMIT:
            raise ValueError(f"exact evolution capped at n = {DENSE_LIMIT}")
        self.model = model
        self._eig = None
        self._sparse = None
        if model.n <= EIGH_LIMIT:
            H = build_dense_hamiltonian(model)
            vals, vecs = np.linalg.eigh(H)
            self._eig = (vals, vecs)
        else:
            self._sparse = build_sparse_hamiltonian(model)

    def evolve(self, state: DenseState, t: float) -> DenseState:
        if state.n != self.model.n:
            raise ValueError("state size does not match Hamiltonian")
        if self._eig is not None:
            vals, vecs = self._eig
            coeffs = vecs.conj().T @ state.amplitudes
            out = vecs @ (np.exp(-1j * vals * t) * coeffs)
            return DenseState(state.n, out)
        out = scipy.sparse.linalg.expm_multiply(-1j * t * self._sparse, state.amplitudes)
        return DenseState(state.n, out)


def exact_evolve(state: DenseState, model: HamiltonianModel, t: float) -> DenseState:
    return ExactPropagator(model).evolve(state, t)


@dataclass
class SchmidtSpectrum:
    """Descending squared Schmidt coefficients across a fixed cut."""

    cut: tuple[int, ...]
    lambdas: np.ndarray

    def __post_init__(self) -> None:
        self.lambdas = np.asarray(self.lambdas, dtype=float)

    @property
    def total(self) -> float:
        return float(self.lambdas.sum())

    def root_sum(self) -> float:
        return float(np.sqrt(self.lambdas.clip(min=0.0)).sum())


def schmidt_spectrum(state: DenseState, cut: tuple[int, ...] | list[int]) -> SchmidtSpectrum:
    """Squared singular values of the amplitude matrix for bipartition (cut, rest)."""
    cut = tuple(sorted(set(cut)))
    if not cut or len(cut) >= state.n:
        raise ValueError("cut must be a proper nonempty subset of the qubits")
    if min(cut) < 0 or max(cut) >= state.n:
        raise ValueError("cut contains qubit indices outside the register")
    n = state.n
    tensor = state.amplitudes.reshape([2] * n)
    axes_a = [n - 1 - q for q in cut]
    axes_b = [ax for ax in range(n) if ax not in axes_a]
    mat = tensor.transpose(axes_a + axes_b).reshape(2 ** len(cut), -1)
    svals = np.linalg.svd(mat, compute_uv=False)
    lams = np.sort(svals**2)[::-1]
    return SchmidtSpectrum(cut=cut, lambdas=lams)


def entanglement_entropy(spectrum: SchmidtSpectrum | np.ndarray) -> float:
    """Von Neumann entropy in bits, with 0 log 0 = 0 and a 1e-14 floor."""
    lams = spectrum.lambdas if isinstance(spectrum, SchmidtSpectrum) else np.asarray(spectrum)
    lams = lams[lams > EIGENVALUE_FLOOR]
    if lams.size == 0:
        return 0.0
    return float(-(lams * np.log2(lams)).sum()) + 0.0


def renyi_half_entropy(spectrum: SchmidtSpectrum | np.ndarray) -> float:
    """Order-1/2 Renyi entropy in bits: 2 log2 (sum sqrt(lambda))."""
    lams = spectrum.lambdas if isinstance(spectrum, SchmidtSpectrum) else np.asarray(spectrum)
    lams = lams[lams > 0]
    return float(2.0 * np.log2(np.sqrt(lams).sum())) if lams.size else 0.0


def max_entropy(state: DenseState, mode: str = "contiguous") -> float:
    """Max bipartite entanglement entropy over a family of cuts.

    "contiguous" scans the n-1 prefix cuts {0..k}; "all-balanced" scans
    every floor(n/2)-subset (so it needs n <= 14, and is exponential).
    """
    if state.n < 2:
        return 0.0
    if mode == "contiguous":
        cuts = [tuple(range(k + 1)) for k in range(state.n - 1)]
    elif mode == "all-balanced":
        half = state.n // 2
        # Fixing qubit 0 in the subset halves the scan; complements have
        # equal entropy.
        cuts = [
            (0, *rest)
            for rest in itertools.combinations(range(1, state.n), half - 1)
        ] if half >= 1 else []
    else:
        raise ValueError(f"unknown cut mode {mode!r}")
    return max(entanglement_entropy(schmidt_spectrum(state, c)) for c in cuts)


def commutator_expectation(
    state: DenseState,
    a: PauliTerm | list[PauliTerm],
    b: PauliTerm | list[PauliTerm],
) -> complex:
    """<psi| [A, B] |psi> evaluated by applying the operator sums."""
    a_psi = apply_terms(state, a).amplitudes
    b_psi = apply_terms(state, b).amplitudes
    # A and B are not assumed Hermitian, so evaluate both orderings directly.
    ab = np.vdot(state.amplitudes, apply_terms(DenseState(state.n, b_psi), a).amplitudes)
    ba = np.vdot(state.amplitudes, apply_terms(DenseState(state.n, a_psi), b).amplitudes)
    return complex(ab - ba)


def state_distance(a: DenseState, b: DenseState) -> float:
    """Plain l2 distance || |a> - |b> ||; global phase is not quotiented."""
    if a.n != b.n:
        raise ValueError("states act on different register sizes")
    return float(np.linalg.norm(a.amplitudes - b.amplitudes))


def random_state(n: int, rng: np.random.Generator) -> DenseState:
    amps = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return DenseState(n, amps / np.linalg.norm(amps))


def random_unitary_2x2(rng: np.random.Generator) -> np.ndarray:
    z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))
