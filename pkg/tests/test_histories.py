import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ssblab.errors import ArgumentError
from ssblab.hilbert import DensityOperator
from ssblab.histories import (Classification, History, ProjectorFamily, additivity_violation, classify_consistency,
                              conservation_check, consistency_measures, decoherence_functional, decoherence_matrix,
                              diagonal_propagator, enumerate_histories, equally_spaced, matrix_propagator, probability,
                              spectral_family, summed)


def random_hamiltonian(d: int, rng: np.random.Generator) -> np.ndarray:
    a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return 0.5 * (a + a.conj().T)


def random_state(d: int, rng: np.random.Generator, rank: int = 2) -> DensityOperator:
    vecs = rng.standard_normal((rank, d)) + 1j * rng.standard_normal((rank, d))
    return DensityOperator.mixture(rng.random(rank) + 0.1, list(vecs))


def coordinate_family(d: int, groups) -> ProjectorFamily:
    mats = []
    for g in groups:
        P = np.zeros((d, d))
        P[g, g] = 1.0
        mats.append(P)
    return ProjectorFamily(tuple(mats), tuple(f"P{i}" for i in range(len(groups))))


@pytest.fixture
def system():
    rng = np.random.default_rng(11)
    H = random_hamiltonian(4, rng)
    return (coordinate_family(4, [[0, 1], [2], [3]]), matrix_propagator(H), random_state(4, rng))


@given(seed=st.integers(0, 10_000), n_times=st.integers(1, 4), tau=st.floats(0.01, 3.0))
def test_decoherence_matrix_invariants(seed, n_times, tau):
    rng = np.random.default_rng(seed)
    family = coordinate_family(3, [[0], [1], [2]])
    U = matrix_propagator(random_hamiltonian(3, rng))
    rho = random_state(3, rng)
    hs = enumerate_histories(family, equally_spaced(tau, n_times))
    dm = decoherence_matrix(rho, hs, family, U)
    D = dm.D
    assert np.allclose(D, D.conj().T, atol=1e-12)
    # the D matrix is a Gram matrix, hence positive semi-definite
    assert np.linalg.eigvalsh(D).min() > -1e-12
    assert math.isclose(D.sum().real, 1.0, abs_tol=1e-12)
    assert math.isclose(dm.total_probability(), sum(np.diag(D).real), abs_tol=1e-14)
    assert np.all(dm.probabilities >= 0)


@given(seed=st.integers(0, 10_000))
def test_branch_vectors_agree_with_direct_functional(seed):
    rng = np.random.default_rng(seed)
    family = coordinate_family(3, [[0, 2], [1]])
    U = matrix_propagator(random_hamiltonian(3, rng))
    rho = random_state(3, rng)
    hs = enumerate_histories(family, (0.0, 0.4, 1.3))
    dm = decoherence_matrix(rho, hs, family, U)
    for i in (0, 3, 5):
        for j in (1, 3, 7):
            assert abs(dm.D[i, j] - decoherence_functional(rho, hs[i], hs[j], family, U)) < 1e-12


@given(seed=st.integers(0, 10_000))
def test_additivity_violation_is_twice_real_part(seed):
    rng = np.random.default_rng(seed)
    family = coordinate_family(3, [[0], [1], [2]])
    U = matrix_propagator(random_hamiltonian(3, rng))
    rho = random_state(3, rng)
    times = (0.0, 0.7, 1.5)
    h1 = History(times, ("P0", "P1", "P2"))
    h2 = History(times, ("P0", "P0", "P2"))
    v = additivity_violation(rho, h1, h2, family, U)
    d = decoherence_functional(rho, h1, h2, family, U)
    assert math.isclose(v, 2 * d.real, abs_tol=1e-14)
    total = probability(rho, summed(h1, h2), family, U, return_raw=True)[1]
    p1 = probability(rho, h1, family, U, return_raw=True)[1]
    p2 = probability(rho, h2, family, U, return_raw=True)[1]
    assert math.isclose(total - p1 - p2, v, abs_tol=1e-12)


def test_summed_requires_single_disjoint_difference():
    t = (0.0, 1.0)
    a, b, c = History(t, ("A", "B")), History(t, ("A", "C")), History(t, ("B", "C"))
    s = summed(a, b)
    assert s.assignments[1] == frozenset({"B", "C"})
    with pytest.raises(ArgumentError):
        summed(a, c)
    with pytest.raises(ArgumentError):
        summed(s, b)
    with pytest.raises(ArgumentError):
        summed(a, History((0.0, 2.0), ("A", "C")))


def test_history_validation_and_labels():
    with pytest.raises(ArgumentError):
        History((1.0, 0.5), ("L", "R"))
    with pytest.raises(ArgumentError):
        History((0.0,), ("L", "R"))
    assert History.fine("LRL", (0, 1, 2)).label == "LRL"
    assert History((0, 1), ("L", ("L", "R"))).label == "L|(L+R)"
    assert History((0, 1, 2), ("L", "L", "L")).is_constant()


def test_family_validation():
    with pytest.raises(ArgumentError, match="complete"):
        ProjectorFamily((np.diag([1.0, 0.0]),), ("a",))
    with pytest.raises(ArgumentError, match="orthogonal"):
        ProjectorFamily((np.diag([1.0, 0.0]), np.diag([1.0, 1.0])), ("a", "b"))
    with pytest.raises(ArgumentError, match="idempotent"):
        ProjectorFamily((np.diag([0.5, 0.0]), np.diag([0.5, 1.0])), ("a", "b"))
    with pytest.raises(ArgumentError, match="unique"):
        ProjectorFamily((np.diag([1.0, 0.0]), np.diag([0.0, 1.0])), ("a", "a"))


def test_history_bound():
    family = coordinate_family(4, [[0], [1], [2], [3]])
    with pytest.raises(ArgumentError, match="exceeds"):
        enumerate_histories(family, equally_spaced(1.0, 13))
    assert len(enumerate_histories(family, equally_spaced(1.0, 3))) == 64


def test_dimension_mismatch(system):
    family, U, _ = system
    with pytest.raises(ArgumentError):
        decoherence_functional(DensityOperator.maximally_mixed(3), History.fine("P0", (0,)),
                               History.fine("P0", (0,)), family, U)


@given(seed=st.integers(0, 10_000), t=st.floats(0.0, 20.0))
def test_spectral_family_is_conserved(seed, t):
    rng = np.random.default_rng(seed)
    energies = np.sort(rng.standard_normal(5))
    fam = spectral_family(5, [[0, 1], [2], [3, 4]])
    assert conservation_check(diagonal_propagator(energies), fam, t) < 1e-14


def test_exact_conservation_classifies_medium_decoherent():
    energies = [0.0, 0.3, 1.1, 2.4]
    fam = spectral_family(4, [[0], [1, 2], [3]])
    rng = np.random.default_rng(3)
    rho = random_state(4, rng, rank=3)
    hs = enumerate_histories(fam, (0.0, 0.5, 1.7, 2.0))
    dm = decoherence_matrix(rho, hs, fam, diagonal_propagator(energies))
    assert dm.classification is Classification.MEDIUM_DECOHERENT
    for i, h in enumerate(hs):
        expected = np.trace(rho.matrix @ fam.projector(h.assignments[0])).real if h.is_constant() else 0.0
        assert abs(dm.D[i, i] - expected) < 1e-12


def test_classification_ladder():
    assert classify_consistency(np.eye(2) / 2) is Classification.MEDIUM_DECOHERENT
    assert classify_consistency(np.array([[0.5, 0.1j], [-0.1j, 0.5]])) is Classification.CONSISTENT
    assert classify_consistency(np.array([[0.5, 1e-4], [1e-4, 0.5]])) is Classification.APPROXIMATELY_CONSISTENT
    assert classify_consistency(np.array([[0.5, 1e-2], [1e-2, 0.5]])) is Classification.INTERFERING
    assert classify_consistency(np.array([[0.5, 1e-2], [1e-2, 0.5]]), 0.1) is Classification.APPROXIMATELY_CONSISTENT
    with pytest.raises(ArgumentError):
        classify_consistency(np.eye(2) / 2, 0.0)


def test_consistency_measures_skip_empty_histories():
    D = np.array([[1.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
    m = consistency_measures(D)
    assert m["skipped_pairs"] == 6 and m["max_re_normalized"] == 0.0


def test_record_round_trip(system):
    family, U, rho = system
    hs = enumerate_histories(family, (0.0, 1.0))
    rec = decoherence_matrix(rho, hs, family, U).to_record()
    assert rec["histories"][0] == "P0|P0"
    D = np.array([[complex(*z) for z in row] for row in rec["entries"]])
    assert D.shape == (9, 9) and math.isclose(np.trace(D).real, 1.0, rel_tol=1e-12)
