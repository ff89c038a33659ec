import numpy as np

from trotterlab.hamiltonians import build_all_to_all_ising
from trotterlab.pauli import CommutatorExpansion, PauliTerm, pauli_product, term_commutator, terms_commute

from oracles import model_matrix, random_term, string_matrix, term_matrix


def test_product_square_is_identity():
    x0 = PauliTerm(1.0, {0: "X"})
    out = pauli_product(x0, x0)
    assert out.paulis == {}
    assert out.coefficient == 1.0


def test_product_zx_same_site():
    # ZX = iY on a single site
    out = pauli_product(PauliTerm(1.0, {0: "Z"}), PauliTerm(1.0, {0: "X"}))
    assert out.paulis == {0: "Y"}
    assert abs(out.coefficient - 1.0j) < 1e-15


def test_product_disjoint_supports():
    out = pauli_product(PauliTerm(1.0, {0: "Z"}), PauliTerm(1.0, {1: "X"}))
    assert out.paulis == {0: "Z", 1: "X"}
    assert out.coefficient == 1.0


def test_product_matches_matrix_oracle():
    rng = np.random.default_rng(11)
    n = 4
    for _ in range(60):
        a = random_term(n, rng)
        b = random_term(n, rng)
        got = term_matrix(n, pauli_product(a, b))
        want = term_matrix(n, a) @ term_matrix(n, b)
        assert np.max(np.abs(got - want)) < 1e-12


def test_product_associative():
    rng = np.random.default_rng(12)
    n = 5
    for _ in range(40):
        a, b, c = (random_term(n, rng) for _ in range(3))
        left = pauli_product(pauli_product(a, b), c)
        right = pauli_product(a, pauli_product(b, c))
        assert left.paulis == right.paulis
        assert abs(left.coefficient - right.coefficient) < 1e-12


def test_commutator_zz_with_x():
    # [Z0 Z1, X0] = 2i Y0 Z1, spectral norm 2
    exp = term_commutator(PauliTerm(1.0, {0: "Z", 1: "Z"}), PauliTerm(1.0, {0: "X"}))
    assert len(exp.terms) == 1
    term = exp.terms[0]
    assert term.paulis == {0: "Y", 1: "Z"}
    assert abs(term.coefficient - 2.0j) < 1e-15
    assert abs(abs(term.coefficient) - 2.0) < 1e-15


def test_commutator_disjoint_z_terms_empty():
    exp = term_commutator(PauliTerm(1.0, {0: "Z"}), PauliTerm(1.0, {1: "Z"}))
    assert exp.terms == []


def test_commutes_predicate():
    assert terms_commute(PauliTerm(1.0, {0: "Z"}), PauliTerm(1.0, {1: "X"}))
    assert not terms_commute(PauliTerm(1.0, {0: "Z"}), PauliTerm(1.0, {0: "X"}))
    # XX vs ZZ on the same pair: two anticommuting overlaps, so they commute
    assert terms_commute(PauliTerm(1.0, {0: "X", 1: "X"}), PauliTerm(1.0, {0: "Z", 1: "Z"}))


def test_commutator_antisymmetry():
    rng = np.random.default_rng(13)
    n = 4
    for _ in range(40):
        a = random_term(n, rng)
        b = random_term(n, rng)
        ab = term_commutator(a, b)
        ba = term_commutator(b, a)
        assert np.max(np.abs(model_matrix(n, ab.terms) + model_matrix(n, ba.terms))) < 1e-12


def test_commutator_matches_matrix_oracle():
    rng = np.random.default_rng(14)
    for _ in range(50):
        n = int(rng.integers(2, 7))
        a = random_term(n, rng)
        b = random_term(n, rng)
        got = model_matrix(n, term_commutator(a, b).terms)
        am, bm = term_matrix(n, a), term_matrix(n, b)
        assert np.max(np.abs(got - (am @ bm - bm @ am))) < 1e-12


def test_commutator_coefficients_imaginary_for_hermitian_inputs():
    rng = np.random.default_rng(15)
    for _ in range(40):
        n = int(rng.integers(2, 6))
        exp = term_commutator(random_term(n, rng), random_term(n, rng))
        for term in exp.terms:
            assert abs(term.coefficient.real) < 1e-14


def test_commutator_accepts_term_lists():
    a = [PauliTerm(1.0, {0: "Z", 1: "Z"}), PauliTerm(1.0, {1: "Z", 2: "Z"})]
    b = [PauliTerm(1.0, {i: "X"}) for i in range(3)]
    got = model_matrix(3, term_commutator(a, b).terms)
    am, bm = model_matrix(3, a), model_matrix(3, b)
    assert np.max(np.abs(got - (am @ bm - bm @ am))) < 1e-12


def test_volume_law_block_commutator_structure():
    # [H_ZZ, H_X] for the normalized all-to-all model at n=3 collapses to
    # (2ih/sqrt(3)) * sum_{i<j} (Y_i Z_j + Z_i Y_j).
    n, h = 3, 1.0
    model = build_all_to_all_ising(n, h)
    hzz = [model.terms[j] for j in model.blocks["ZZ"]]
    hx = [model.terms[j] for j in model.blocks["X"]]
    exp = term_commutator(hzz, hx)
    assert len(exp.terms) == 6

    pref = 2.0j * h / np.sqrt(n)
    want = np.zeros((8, 8), dtype=complex)
    for i in range(n):
        for j in range(i + 1, n):
            want += pref * (string_matrix(n, {i: "Y", j: "Z"}) + string_matrix(n, {i: "Z", j: "Y"}))
    assert np.max(np.abs(model_matrix(n, exp.terms) - want)) < 1e-12


def test_expansion_empty_iff_commuting():
    rng = np.random.default_rng(16)
    for _ in range(60):
        n = int(rng.integers(2, 6))
        a = random_term(n, rng)
        b = random_term(n, rng)
        exp = term_commutator(a, b)
        assert (len(exp.terms) == 0) == terms_commute(a, b)
    assert isinstance(exp, CommutatorExpansion)
