"""Sparse Pauli-string terms and their commutator algebra.

A term is a complex coefficient times a tensor product of single-qubit
Pauli operators, stored sparsely as a map from qubit index to letter.
Identity factors are never stored, so the empty map is the identity
string. Products and commutators of terms are again (sums of) terms,
which is all the product-formula machinery downstream needs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

PAULI_LETTERS = ("X", "Y", "Z")

# Single-qubit products P*Q = phase * R, with R = None meaning identity.
_PRODUCT: dict[tuple[str, str], tuple[complex, str | None]] = {
    ("X", "X"): (1.0, None),
    ("Y", "Y"): (1.0, None),
    ("Z", "Z"): (1.0, None),
    ("X", "Y"): (1j, "Z"),
    ("Y", "X"): (-1j, "Z"),
    ("Y", "Z"): (1j, "X"),
    ("Z", "Y"): (-1j, "X"),
    ("Z", "X"): (1j, "Y"),
    ("X", "Z"): (-1j, "Y"),
}


@dataclass
class PauliTerm:
    """One Pauli string with a complex coefficient.

    ``paulis`` maps qubit index to one of "X", "Y", "Z". Terms are treated
    as immutable after construction; operations return new terms.
    """

    coefficient: complex
    paulis: dict[int, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.coefficient = complex(self.coefficient)
        for q, letter in self.paulis.items():
            if not isinstance(q, int) or q < 0:
                raise ValueError(f"qubit index must be a non-negative int, got {q!r}")
            if letter not in PAULI_LETTERS:
                raise ValueError(f"invalid Pauli letter {letter!r} on qubit {q}")

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(sorted(self.paulis))

    @property
    def weight(self) -> int:
        return len(self.paulis)

    @property
    def norm(self) -> float:
        """Spectral norm; Pauli strings are unitary so it is |coefficient|."""
        return abs(self.coefficient)

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return abs(self.coefficient.imag) <= tol

    def key(self) -> tuple[tuple[int, str], ...]:
        """Canonical identity of the string part, ignoring the coefficient."""
        return tuple(sorted(self.paulis.items()))

    def scaled(self, factor: complex) -> "PauliTerm":
        return PauliTerm(self.coefficient * factor, dict(self.paulis))

    def to_json(self) -> dict:
        return {
            "coeff_re": self.coefficient.real,
            "coeff_im": self.coefficient.imag,
            "paulis": {str(q): letter for q, letter in sorted(self.paulis.items())},
        }

    @staticmethod
    def from_json(obj: dict) -> "PauliTerm":
        coeff = complex(obj["coeff_re"], obj.get("coeff_im", 0.0))
        paulis = {int(q): letter for q, letter in obj["paulis"].items()}
        return PauliTerm(coeff, paulis)


def pauli_product(a: PauliTerm, b: PauliTerm) -> PauliTerm:
    """Operator product a*b as a single term (Pauli strings are closed)."""
    coeff = a.coefficient * b.coefficient
    paulis = dict(a.paulis)
    for q, letter_b in b.paulis.items():
        letter_a = paulis.pop(q, None)
        if letter_a is None:
            paulis[q] = letter_b
            continue
        phase, letter = _PRODUCT[(letter_a, letter_b)]
        coeff *= phase
        if letter is not None:
            paulis[q] = letter
    return PauliTerm(coeff, paulis)


def terms_commute(a: PauliTerm, b: PauliTerm) -> bool:
    """Two Pauli strings commute iff they anticommute on an even number of qubits."""
    clashes = sum(
        1
        for q, letter in a.paulis.items()
        if q in b.paulis and b.paulis[q] != letter
    )
    return clashes % 2 == 0


@dataclass
class CommutatorExpansion:
    """A commutator [A, B] expanded as a combined list of Pauli terms."""

    terms: list[PauliTerm] = field(default_factory=list)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def one_norm(self) -> float:
        return sum(t.norm for t in self.terms)

    def max_imaginary_part_error(self) -> float:
        """Largest |Re coeff| over terms; zero when A, B are Hermitian."""
        return max((abs(t.coefficient.real) for t in self.terms), default=0.0)


def _combine(terms: list[PauliTerm]) -> list[PauliTerm]:
    # Like strings cancel exactly in IEEE arithmetic (products commute),
    # so a plain != 0 test suffices after summation.
    acc: dict[tuple[tuple[int, str], ...], complex] = {}
    for t in terms:
        acc[t.key()] = acc.get(t.key(), 0.0) + t.coefficient
    out = [
        PauliTerm(c, dict(k))
        for k, c in acc.items()
        if c != 0
    ]
    out.sort(key=lambda t: t.key())
    return out


def term_commutator(
    a: PauliTerm | list[PauliTerm], b: PauliTerm | list[PauliTerm]
) -> CommutatorExpansion:
    """[A, B] = AB - BA for terms or term lists, with like terms combined.

    For a single pair of strings the result is either empty (they commute)
    or the single term 2*a*b (they anticommute, so ab = -ba).
    """
    left = [a] if isinstance(a, PauliTerm) else list(a)
    right = [b] if isinstance(b, PauliTerm) else list(b)
    pieces: list[PauliTerm] = []
    for ta in left:
        for tb in right:
            if terms_commute(ta, tb):
                continue
            pieces.append(pauli_product(ta, tb).scaled(2.0))
    return CommutatorExpansion(_combine(pieces))
