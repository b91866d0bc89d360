"""Tests for energy accounting, entropy balance, and Gibbs classification."""

import numpy as np
import pytest

from qrf_lab import FrameSetup, Z2
from qrf_lab.dynamics import evolve, split_hamiltonian
from qrf_lab.operators import (
    ID2,
    SIGMA_X,
    SIGMA_Z,
    hs_norm,
    kron,
    random_hermitian,
)
from qrf_lab.states import gibbs_state
from qrf_lab.subalgebras import BilocalUnitary
from qrf_lab.thermo import (
    NonProductInitialStateError,
    Prescription,
    balance_verifiers,
    commutant_projection,
    effective_hamiltonians,
    energetics,
    entropy_production_and_flow,
    gibbs_classification,
)

E = (0,)


def qubit_setup():
    return FrameSetup.from_rep_config(Z2, "regular")


def random_product_state(rng, d_f, d_s):
    def factor(d):
        m = random_hermitian(rng, d)
        m = m @ m.conj().T + 0.1 * np.eye(d)
        return m / np.trace(m)
    return kron(factor(d_f), factor(d_s))


def test_prescription_config():
    p = Prescription.from_config({"prescription": "split_alpha", "alpha_s": 0.25})
    assert p.kind == "split_alpha"
    assert np.isclose(p.alpha_frame, 0.75)
    q = Prescription.from_config({"prescription": "commuting_part"})
    assert q.kind == "commuting_part"
    with pytest.raises(ValueError):
        Prescription(kind="nonsense")
    with pytest.raises(ValueError):
        Prescription(kind="commuting_part", alpha_s=0.5)


def test_no_interaction_means_effective_equals_bare():
    setup = qubit_setup()
    split = split_hamiltonian(kron(SIGMA_Z, ID2) + kron(ID2, SIGMA_X), 2, 2)
    rho = np.eye(4) / 4
    for presc in (Prescription.split_alpha(0.3), Prescription.commuting_part()):
        eff = effective_hamiltonians(setup, split, rho, presc)
        assert np.allclose(eff.h_s_eff, split.h_s, atol=1e-12)
        assert np.allclose(eff.h_frame_eff, split.h_frame, atol=1e-12)
        assert hs_norm(eff.h_tilde_s) < 1e-12


def test_effective_hamiltonians_reconstruct_total():
    setup = qubit_setup()
    rng = np.random.default_rng(0)
    split = split_hamiltonian(random_hermitian(rng, 4), 2, 2)
    rho = random_product_state(rng, 2, 2)
    for presc in (Prescription.split_alpha(0.5), Prescription.commuting_part()):
        eff = effective_hamiltonians(setup, split, rho, presc)
        total = (kron(eff.h_frame_eff, ID2) + kron(ID2, eff.h_s_eff)
                 + eff.h_int_eff)
        assert np.allclose(total, split.total, atol=1e-10)


def test_commuting_part_blocks():
    assert np.allclose(commutant_projection(SIGMA_Z, SIGMA_X), 0.0, atol=1e-12)
    assert np.allclose(commutant_projection(SIGMA_Z, SIGMA_Z), SIGMA_Z, atol=1e-12)
    mixed = 0.4 * SIGMA_Z + 0.7 * SIGMA_X
    assert np.allclose(commutant_projection(SIGMA_Z, mixed), 0.4 * SIGMA_Z, atol=1e-12)


def test_first_law_closure_by_finite_differences():
    setup = qubit_setup()
    rng = np.random.default_rng(1)
    h = random_hermitian(rng, 4)
    split = split_hamiltonian(h, 2, 2)
    rho0 = random_product_state(rng, 2, 2)
    presc = Prescription.split_alpha(0.5)
    t, dt = 0.8, 1e-6
    rho = evolve(h, rho0, t)
    rho_dot = -1j * (h @ rho - rho @ h)
    report = energetics(setup, split, rho, presc, rho_dot=rho_dot)
    e_plus = energetics(setup, split, evolve(h, rho0, t + dt), presc).e_s
    e_minus = energetics(setup, split, evolve(h, rho0, t - dt), presc).e_s
    fd = (e_plus - e_minus) / (2 * dt)
    assert np.isclose(report.qdot_conv_s + report.wdot_conv_s, fd, atol=1e-6)
    assert np.isclose(report.qdot_alt_s + report.wdot_alt_s, fd, atol=1e-6)
    assert np.isclose(report.qdot_alt_s, report.qdot_conv_s - report.e_star_s,
                      atol=1e-10)
    assert np.isclose(report.wdot_alt_s, report.wdot_conv_s + report.e_star_s,
                      atol=1e-10)


def test_total_energy_is_conserved():
    setup = qubit_setup()
    rng = np.random.default_rng(2)
    h = random_hermitian(rng, 4)
    split = split_hamiltonian(h, 2, 2)
    rho0 = random_product_state(rng, 2, 2)
    presc = Prescription.commuting_part()
    e0 = energetics(setup, split, rho0, presc).e_total
    e1 = energetics(setup, split, evolve(h, rho0, 1.7), presc).e_total
    assert np.isclose(e0, e1, atol=1e-10)
    assert np.isclose(e0, np.trace(h @ rho0).real, atol=1e-10)


def test_entropy_balance_identities():
    setup = qubit_setup()
    rng = np.random.default_rng(3)
    h = random_hermitian(rng, 4)
    rho0 = random_product_state(rng, 2, 2)
    rho_t = evolve(h, rho0, 1.1)
    balance = entropy_production_and_flow(setup, rho0, rho_t)
    assert balance.sigma >= -1e-9
    assert np.isclose(balance.sigma,
                      balance.mutual_information + balance.frame_relative_entropy,
                      atol=1e-10)
    assert np.isclose(balance.phi,
                      balance.delta_s_frame + balance.frame_relative_entropy,
                      atol=1e-10)
    assert np.isclose(balance.sigma - balance.phi, balance.delta_s_s, atol=1e-10)


def test_entropy_balance_requires_product_start():
    setup = qubit_setup()
    bell = np.zeros(4)
    bell[[0, 3]] = 1.0 / np.sqrt(2.0)
    rho = np.outer(bell, bell)
    with pytest.raises(NonProductInitialStateError):
        entropy_production_and_flow(setup, rho, rho)


def test_stationary_product_state_has_zero_balance():
    setup = qubit_setup()
    h = kron(SIGMA_Z, ID2) + kron(ID2, SIGMA_Z)
    rho0 = kron(gibbs_state(SIGMA_Z, 0.5), gibbs_state(SIGMA_Z, 1.0))
    rho_t = evolve(h, rho0, 2.0)
    balance = entropy_production_and_flow(setup, rho0, rho_t)
    assert abs(balance.sigma) < 1e-12
    assert abs(balance.phi) < 1e-12


def test_balance_verifiers_on_member_trajectory():
    setup = qubit_setup()
    b, j = 0.9, 0.35
    h = (b * (kron(SIGMA_Z, ID2) + kron(ID2, SIGMA_Z))
         + 2.0 * j * kron(SIGMA_Z, SIGMA_Z))
    amps = np.array([1.0, np.sqrt(2.0)]) / np.sqrt(3.0)
    psi = np.kron([0.0, 1.0], amps)
    rho0 = np.outer(psi, psi.conj())
    split = split_hamiltonian(h, 2, 2)
    x = BilocalUnitary(ID2, SIGMA_X)
    report = balance_verifiers(setup, split, rho0, E, E,
                               Prescription.split_alpha(0.5), 0.0, 2.0,
                               x0=x, x1=x, grid=12)
    assert report.premises_not_met == []
    assert report.membership_ok
    assert report.rates_match
    assert report.rates_max_gap < 1e-8
    assert report.delta_s_s_equal
    assert report.delta_s_frame_equal


def test_balance_verifiers_report_missing_premises():
    setup = qubit_setup()
    rng = np.random.default_rng(4)
    h = random_hermitian(rng, 4)
    rho0 = np.eye(4) / 4
    report = balance_verifiers(setup, split_hamiltonian(h, 2, 2), rho0, E, E,
                               Prescription.split_alpha(0.5), 0.0, 1.0, grid=6)
    assert "no subalgebra witness available at the initial time" in report.premises_not_met


def test_gibbs_classification_translation_invariant():
    setup = qubit_setup()
    report = gibbs_classification(setup, SIGMA_X, E, E)
    assert report.translation_invariant
    assert report.invariant_gibbs
    assert report.sampled_max_deviation < 1e-9


def test_gibbs_classification_detects_rescaling():
    setup = qubit_setup()
    mu = 2.0
    h = (kron(SIGMA_Z, ID2) + kron(ID2, SIGMA_Z) + mu * kron(SIGMA_Z, SIGMA_Z))
    report = gibbs_classification(setup, h, E, E)
    assert not report.translation_invariant
    assert report.in_translation_kernel
    assert report.anticommuting_sector == [(1,)]
    assert report.mu is not None
    assert np.isclose(abs(report.mu), mu, atol=1e-9)
    assert report.mu_fit_residual < 1e-9
