"""Tests for exact evolution, Hamiltonian splitting, and trajectory checks."""

import numpy as np

from qrf_lab import FrameSetup, Z2
from qrf_lab.dynamics import (
    dynamical_type_classifier,
    evolve,
    imported_hamiltonian_and_trajectory_check,
    mean_field_hamiltonian,
    propagator,
    split_hamiltonian,
    subsystem_eom_terms,
    transform_hamiltonian_pieces,
)
from qrf_lab.operators import (
    ID2,
    SIGMA_X,
    SIGMA_Z,
    dagger,
    hs_norm,
    kron,
    partial_trace,
    random_hermitian,
)
from qrf_lab.subalgebras import BilocalUnitary

E = (0,)


def qubit_setup():
    return FrameSetup.from_rep_config(Z2, "regular")


def zz_chain(b, j):
    return (b * (kron(SIGMA_Z, ID2) + kron(ID2, SIGMA_Z))
            + 2.0 * j * kron(SIGMA_Z, SIGMA_Z))


def test_propagator_is_unitary():
    rng = np.random.default_rng(0)
    h = random_hermitian(rng, 4)
    u = propagator(h, 0.37)
    assert np.allclose(u @ dagger(u), np.eye(4), atol=1e-12)


def test_evolve_vector_and_density_matrix_agree():
    rng = np.random.default_rng(1)
    h = random_hermitian(rng, 4)
    psi = rng.normal(size=4) + 1j * rng.normal(size=4)
    psi = psi / np.linalg.norm(psi)
    rho = np.outer(psi, psi.conj())
    psi_t = evolve(h, psi, 0.9)
    rho_t = evolve(h, rho, 0.9)
    assert np.allclose(np.outer(psi_t, psi_t.conj()), rho_t, atol=1e-12)


def test_evolve_known_rotation():
    psi = np.array([1.0, 0.0])
    psi_t = evolve(SIGMA_X, psi, np.pi / 2)
    assert np.allclose(np.abs(psi_t), [0.0, 1.0], atol=1e-12)


def test_stationary_state_is_fixed():
    h = np.diag([1.0, -1.0])
    rho = np.diag([0.25, 0.75])
    assert np.allclose(evolve(h, rho, 2.3), rho, atol=1e-12)


def test_split_hamiltonian_reconstructs():
    rng = np.random.default_rng(2)
    h = random_hermitian(rng, 6)
    split = split_hamiltonian(h, 2, 3)
    assert np.allclose(split.total, h, atol=1e-12)
    assert np.isclose(np.trace(split.h_int), 0.0, atol=1e-12)
    assert np.allclose(partial_trace(split.h_int, (2, 3), drop=0), 0.0, atol=1e-12)
    assert np.allclose(partial_trace(split.h_int, (2, 3), drop=1), 0.0, atol=1e-12)


def test_split_identity_is_shared_evenly():
    split = split_hamiltonian(np.eye(4), 2, 2)
    assert np.allclose(split.h_frame, 0.5 * ID2, atol=1e-12)
    assert np.allclose(split.h_s, 0.5 * ID2, atol=1e-12)
    assert np.allclose(split.h_int, 0.0, atol=1e-12)


def test_mean_field_hamiltonian():
    split = split_hamiltonian(kron(SIGMA_Z, SIGMA_Z), 2, 2)
    p = 0.8
    rho_frame = np.diag([p, 1 - p])
    h_tilde = mean_field_hamiltonian(split, rho_frame, on="s")
    assert np.allclose(h_tilde, (2 * p - 1) * SIGMA_Z, atol=1e-12)


def test_transform_pieces_reassemble():
    from qrf_lab.frames import perspective_unitary

    setup = qubit_setup()
    rng = np.random.default_rng(3)
    split = split_hamiltonian(random_hermitian(rng, 4), 2, 2)
    split_new, pieces = transform_hamiltonian_pieces(setup, split, E, E)
    u = perspective_unitary(setup, E, E)
    transformed = u @ split.total @ dagger(u)
    assert np.allclose(split_new.total, transformed, atol=1e-10)
    rebuilt = (kron(pieces.frame_from_diag + pieces.lambda_frame, ID2)
               + kron(ID2, pieces.s_translation_part + pieces.lambda_s)
               + pieces.int_from_locals + pieces.int_from_dt + pieces.lambda_int)
    assert np.allclose(rebuilt, transformed, atol=1e-10)


def test_dynamical_type_classifier():
    setup = qubit_setup()
    closed = split_hamiltonian(kron(SIGMA_Z, ID2) + kron(ID2, SIGMA_X), 2, 2)
    assert dynamical_type_classifier(setup, closed) == "closed_to_closed"
    open_case = split_hamiltonian(kron(SIGMA_Z, ID2) + kron(ID2, SIGMA_Z), 2, 2)
    assert dynamical_type_classifier(setup, open_case) == "closed_to_open"
    interacting = split_hamiltonian(zz_chain(1.0, 1.0), 2, 2)
    assert dynamical_type_classifier(setup, interacting) == "interacting"


def test_effectively_isolated_chain():
    setup = qubit_setup()
    b, j = 0.7, 0.4
    split = split_hamiltonian(zz_chain(b, j), 2, 2)
    amps = np.array([0.6, 0.8])
    rho0 = kron(np.diag([0.0, 1.0]), np.outer(amps, amps))
    terms = subsystem_eom_terms(setup, split, rho0)
    assert terms.effectively_closed
    assert np.allclose(terms.h_tilde_s, -2.0 * j * SIGMA_Z, atol=1e-12)
    assert hs_norm(terms.dissipative_term) < 1e-12


def test_imported_hamiltonian_for_zz_chain():
    setup = qubit_setup()
    b, j = 0.9, 0.35
    h = zz_chain(b, j)
    amps = np.array([1.0, np.sqrt(2.0)]) / np.sqrt(3.0)
    psi = np.kron([0.0, 1.0], amps)
    rho0 = np.outer(psi, psi.conj())
    x = BilocalUnitary(ID2, SIGMA_X)
    times = np.linspace(0.0, 2.0 * np.pi, 11)
    report = imported_hamiltonian_and_trajectory_check(setup, h, x, E, E, rho0, times)
    expected = (b * kron(SIGMA_Z, ID2) - 2.0 * j * kron(ID2, SIGMA_Z)
                - b * kron(SIGMA_Z, SIGMA_Z))
    assert np.allclose(report.h_imported, expected, atol=1e-12)
    assert all(report.in_ax)
    assert max(report.commutator_norms) < 1e-12
    assert report.generator_agreement_residual < 1e-12


def test_trajectory_leaving_the_subalgebra_is_flagged():
    setup = qubit_setup()
    h = kron(SIGMA_X, ID2) + kron(ID2, SIGMA_X)
    psi = np.kron([0.0, 1.0], [1.0, 0.0])
    rho0 = np.outer(psi, psi)
    x = BilocalUnitary(ID2, SIGMA_X)
    times = np.array([0.0, 0.7, np.pi])
    report = imported_hamiltonian_and_trajectory_check(setup, h, x, E, E, rho0, times)
    assert report.in_ax[0]
    assert not report.in_ax[1]
    assert report.in_ax[2]
    assert report.commutator_norms[1] > 1e-3
