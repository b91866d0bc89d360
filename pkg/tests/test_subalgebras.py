"""Tests for invariant-subalgebra projectors, membership, and witnesses."""

import itertools

import numpy as np
import pytest

from qrf_lab import FrameSetup, Z2, Z3
from qrf_lab.operators import (
    ID2,
    PAULI,
    SIGMA_X,
    SIGMA_Z,
    hs_inner,
    hs_norm,
    kron,
    random_hermitian,
)
from qrf_lab.subalgebras import (
    BilocalUnitary,
    LocalityViolationError,
    classify_local_operator,
    four_component_decomposition,
    intersect_projectors,
    invariant_projector,
    membership_scan,
    membership_test,
    pi_d,
    pi_t,
    pure_state_bilocal_witness,
    transport_bilocal,
)

E = (0,)
FLIP = (1,)


def qubit_setup():
    return FrameSetup.from_rep_config(Z2, "regular")


def ising_chain(a, b, c):
    return (a * kron(SIGMA_Z, ID2) + b * kron(ID2, SIGMA_Z)
            + c * kron(SIGMA_Z, SIGMA_Z))


def test_pi_t_examples():
    setup = qubit_setup()
    rng = np.random.default_rng(0)
    assert np.allclose(pi_t(setup, kron(ID2, SIGMA_Z)), 0.0, atol=1e-12)
    a = random_hermitian(rng, 2)
    fixed = kron(a, SIGMA_X)
    assert np.allclose(pi_t(setup, fixed), fixed, atol=1e-12)
    f = random_hermitian(rng, 4)
    assert np.allclose(pi_t(setup, pi_t(setup, f)), pi_t(setup, f), atol=1e-12)


def test_pi_d_examples():
    setup = qubit_setup()
    rng = np.random.default_rng(1)
    a = random_hermitian(rng, 2)
    fixed = kron(SIGMA_Z, a)
    assert np.allclose(pi_d(setup, fixed), fixed, atol=1e-12)
    assert np.allclose(pi_d(setup, kron(SIGMA_X, ID2)), 0.0, atol=1e-12)
    f = random_hermitian(rng, 4)
    comm = pi_d(setup, pi_t(setup, f)) - pi_t(setup, pi_d(setup, f))
    assert hs_norm(comm) < 1e-12


def test_four_component_decomposition():
    setup = FrameSetup.from_rep_config(Z3, "regular")
    rng = np.random.default_rng(2)
    f = random_hermitian(rng, setup.d_perspective)
    parts = four_component_decomposition(setup, f)
    pieces = [parts.dt, parts.dtp, parts.dpt, parts.dptp]
    assert np.allclose(sum(pieces), f, atol=1e-10)
    for x, y in itertools.combinations(pieces, 2):
        assert abs(hs_inner(x, y)) < 1e-10


def test_invariant_projector_dimensions():
    setup = qubit_setup()
    identity_x = BilocalUnitary(ID2, ID2)
    flip_x = BilocalUnitary(ID2, SIGMA_X)
    proj_identity = invariant_projector(setup, identity_x, E, E)
    proj_flip = invariant_projector(setup, flip_x, E, E)
    assert proj_identity.dimension == 10
    assert proj_flip.dimension == 10
    both = intersect_projectors(proj_identity, proj_flip)
    assert both.dimension == 6


def test_invariant_projector_contains_members():
    setup = qubit_setup()
    proj = invariant_projector(setup, BilocalUnitary(ID2, ID2), E, E)
    assert proj.contains(ising_chain(1.0, 1.0, 1.0))
    assert not proj.contains(kron(SIGMA_X, ID2))


def test_ising_membership_follows_transported_witness():
    setup = qubit_setup()
    h = ising_chain(1.0, 1.0, 1.0)
    base = BilocalUnitary(ID2, ID2)
    expected = {
        (E, E): kron(ID2, ID2),
        (E, FLIP): kron(SIGMA_X, SIGMA_X),
        (FLIP, E): kron(SIGMA_X, ID2),
        (FLIP, FLIP): kron(ID2, SIGMA_X),
    }
    for (g1, g2), x_matrix in expected.items():
        x = transport_bilocal(setup, base, (E, E), (g1, g2))
        assert np.allclose(kron(x.y, x.z), x_matrix, atol=1e-12)
        result = membership_test(setup, h, x, g1, g2)
        assert result.is_member
        assert result.residual < 1e-12


def test_ising_with_strong_coupling_has_no_pauli_witness():
    setup = qubit_setup()
    h = ising_chain(1.0, 1.0, 2.0)
    candidates = [BilocalUnitary(PAULI[a], PAULI[b])
                  for a in "IXYZ" for b in "IXYZ"]
    results = membership_scan(setup, h, candidates, FLIP, FLIP)
    assert all(not r.is_member for _, r in results)
    best = min(r.residual for _, r in results)
    assert np.isclose(best, 2.8284271247461903, atol=1e-9)


def test_membership_respects_tolerance_scaling():
    setup = qubit_setup()
    h = ising_chain(1.0, 1.0, 1.0) + 1e-12 * kron(SIGMA_X, ID2)
    result = membership_test(setup, h, BilocalUnitary(ID2, ID2), E, E)
    assert result.is_member


def test_transport_round_trip():
    setup = qubit_setup()
    x = BilocalUnitary(SIGMA_X, SIGMA_Z)
    moved = transport_bilocal(setup, x, (E, E), (FLIP, E))
    back = transport_bilocal(setup, moved, (FLIP, E), (E, E))
    assert np.allclose(back.y, x.y, atol=1e-12)
    assert np.allclose(back.z, x.z, atol=1e-12)


def test_pure_state_witness_found_for_member_state():
    setup = qubit_setup()
    amps = np.array([1.0, np.sqrt(2.0)]) / np.sqrt(3.0)
    psi = np.kron(np.array([0.0, 1.0]), amps)
    witness = pure_state_bilocal_witness(setup, psi, E, E)
    assert witness is not None
    rho = np.outer(psi, psi.conj())
    assert membership_test(setup, rho, witness, E, E).is_member


def test_pure_state_witness_absent_for_generic_state():
    setup = qubit_setup()
    rng = np.random.default_rng(3)
    psi = rng.normal(size=4) + 1j * rng.normal(size=4)
    psi = psi / np.linalg.norm(psi)
    assert pure_state_bilocal_witness(setup, psi, E, E) is None


def test_classify_local_operators():
    setup = qubit_setup()
    s_flip = classify_local_operator(setup, kron(ID2, SIGMA_X), "s_local", E, E)
    assert s_flip.tps_invariant
    assert s_flip.unitary_invariant_all_orientations
    s_z = classify_local_operator(setup, kron(ID2, SIGMA_Z), "s_local", E, E)
    assert not s_z.tps_invariant
    f_z = classify_local_operator(setup, kron(SIGMA_Z, ID2), "frame_local", E, E)
    assert f_z.tps_invariant
    f_x = classify_local_operator(setup, kron(SIGMA_X, ID2), "frame_local", E, E)
    assert not f_x.tps_invariant


def test_classify_rejects_nonlocal_operator():
    setup = qubit_setup()
    with pytest.raises(LocalityViolationError):
        classify_local_operator(setup, kron(SIGMA_Z, SIGMA_Z), "s_local", E, E)
