"""Hamiltonian splits, exact evolution, and perspective transport of generators.

A perspective Hamiltonian is stored as frame-local, system-local, and
interaction pieces with the identity component shared evenly between the
two local parts, so the split is unique and reassembles exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .frames import parity_swap, perspective_unitary
from .operators import (
    assert_hermitian,
    dagger,
    hs_norm,
    kron,
    matrix_exp_scaled,
    partial_trace,
)
from .subalgebras import as_matrix, invariant_projector, membership_test, pi_d, pi_t

CLASSIFIER_TOL = 1e-10


@dataclass
class HamiltonianSplit:
    """Perspective Hamiltonian as h_frame (x) 1 + 1 (x) h_s + h_int."""

    h_frame: np.ndarray
    h_s: np.ndarray
    h_int: np.ndarray

    @property
    def d_frame(self):
        return self.h_frame.shape[0]

    @property
    def d_s(self):
        return self.h_s.shape[0]

    @property
    def total(self):
        return (kron(self.h_frame, np.eye(self.d_s))
                + kron(np.eye(self.d_frame), self.h_s)
                + self.h_int)


def split_hamiltonian(hamiltonian, d_frame, d_s):
    """Unique split with both partial traces of h_int vanishing.

    The identity component of the total is shared evenly between the two
    local pieces.
    """
    hamiltonian = assert_hermitian(np.asarray(hamiltonian, dtype=complex), what="Hamiltonian")
    dims = (d_frame, d_s)
    c = float(np.trace(hamiltonian).real) / (d_frame * d_s)
    h_frame = partial_trace(hamiltonian, dims, drop=1) / d_s - (c / 2) * np.eye(d_frame)
    h_s = partial_trace(hamiltonian, dims, drop=0) / d_frame - (c / 2) * np.eye(d_s)
    h_int = hamiltonian - kron(h_frame, np.eye(d_s)) - kron(np.eye(d_frame), h_s)
    return HamiltonianSplit(h_frame=h_frame, h_s=h_s, h_int=h_int)


@dataclass
class TransformedPieces:
    """Where each part of a transformed Hamiltonian comes from.

    Local factors are stored on their own factor space; the three
    interaction contributions live on the full perspective space.
    """

    frame_from_diag: np.ndarray
    lambda_frame: np.ndarray
    s_translation_part: np.ndarray
    lambda_s: np.ndarray
    int_from_locals: np.ndarray
    int_from_dt: np.ndarray
    lambda_int: np.ndarray

    @property
    def assembled(self):
        d_f = self.frame_from_diag.shape[0]
        d_s = self.s_translation_part.shape[0]
        return (kron(self.frame_from_diag + self.lambda_frame, np.eye(d_s))
                + kron(np.eye(d_f), self.s_translation_part + self.lambda_s)
                + self.int_from_locals + self.int_from_dt + self.lambda_int)


def s_factor_twirl(setup, op):
    acc = np.zeros_like(np.asarray(op, dtype=complex))
    for g in setup.group.elements:
        u = setup.u_s(g)
        acc += u @ op @ dagger(u)
    return acc / setup.group.order


def transform_hamiltonian_pieces(setup, split, g_i, g_j):
    """Transform a split Hamiltonian and attribute every piece of the result."""
    d_f, d_s = setup.d_frame, setup.d_s
    u = perspective_unitary(setup, g_i, g_j)
    new_total = u @ split.total @ dagger(u)
    split_new = split_hamiltonian(new_total, d_f, d_s)

    parity = parity_swap(setup, g_i, g_j)
    h_frame_diag = np.diag(np.diag(split.h_frame))
    h_frame_off = split.h_frame - h_frame_diag
    h_s_trans = s_factor_twirl(setup, split.h_s)
    h_s_rest = split.h_s - h_s_trans

    dt_int = pi_d(setup, pi_t(setup, split.h_int))
    rest_int = split.h_int - dt_int

    int_from_locals = u @ (kron(h_frame_off, np.eye(d_s)) + kron(np.eye(d_f), h_s_rest)) @ dagger(u)
    p_full = kron(parity, np.eye(d_s))
    int_from_dt = p_full @ dt_int @ dagger(p_full)
    leftovers = split_hamiltonian(u @ rest_int @ dagger(u), d_f, d_s)

    pieces = TransformedPieces(
        frame_from_diag=parity @ h_frame_diag @ dagger(parity),
        lambda_frame=leftovers.h_frame,
        s_translation_part=h_s_trans,
        lambda_s=leftovers.h_s,
        int_from_locals=int_from_locals,
        int_from_dt=int_from_dt,
        lambda_int=leftovers.h_int,
    )
    return split_new, pieces


def propagator(hamiltonian, t):
    return matrix_exp_scaled(hamiltonian, -1j * t)


def evolve(hamiltonian, state, t):
    """Exact evolution of a vector or density matrix by the given time."""
    u = propagator(hamiltonian, t)
    state = np.asarray(state, dtype=complex)
    if state.ndim == 1:
        return u @ state
    return u @ state @ dagger(u)


@dataclass
class SubsystemEOMTerms:
    rho_s: np.ndarray
    rho_frame: np.ndarray
    omega: np.ndarray
    h_tilde_s: np.ndarray
    unitary_term: np.ndarray
    dissipative_term: np.ndarray
    effectively_closed: bool


def mean_field_hamiltonian(split, rho_other, on="s"):
    """Partial average of the interaction against the other factor's state."""
    d_f, d_s = split.d_frame, split.d_s
    if on == "s":
        return partial_trace(split.h_int @ kron(rho_other, np.eye(d_s)), (d_f, d_s), drop=0)
    if on == "frame":
        return partial_trace(split.h_int @ kron(np.eye(d_f), rho_other), (d_f, d_s), drop=1)
    raise ValueError('on must be "s" or "frame"')


def subsystem_eom_terms(setup, split, rho_ibar, tol=1e-10):
    """Terms of the reduced system equation of motion in one perspective."""
    rho_ibar = np.asarray(rho_ibar, dtype=complex)
    dims = (setup.d_frame, setup.d_s)
    rho_s = partial_trace(rho_ibar, dims, drop=0)
    rho_frame = partial_trace(rho_ibar, dims, drop=1)
    omega = rho_ibar - kron(rho_frame, rho_s)
    h_tilde_s = mean_field_hamiltonian(split, rho_frame, on="s")
    h_eff = split.h_s + h_tilde_s
    unitary_term = -1j * (h_eff @ rho_s - rho_s @ h_eff)
    comm = split.h_int @ omega - omega @ split.h_int
    dissipative_term = -1j * partial_trace(comm, dims, drop=0)
    closed_comm = kron(np.eye(setup.d_frame), rho_s) @ omega - omega @ kron(np.eye(setup.d_frame), rho_s)
    return SubsystemEOMTerms(
        rho_s=rho_s,
        rho_frame=rho_frame,
        omega=omega,
        h_tilde_s=h_tilde_s,
        unitary_term=unitary_term,
        dissipative_term=dissipative_term,
        effectively_closed=bool(hs_norm(closed_comm) <= tol * max(1.0, hs_norm(omega))),
    )


def dynamical_type_classifier(setup, split, tol=CLASSIFIER_TOL):
    """Classify the induced system dynamics as closed, open, or interacting."""
    scale = max(1.0, hs_norm(split.total))
    interacting = hs_norm(split.h_int) > tol * scale
    frame_diagonal = hs_norm(split.h_frame - np.diag(np.diag(split.h_frame))) <= tol * scale
    s_translation_invariant = hs_norm(split.h_s - s_factor_twirl(setup, split.h_s)) <= tol * scale
    if interacting:
        return "interacting"
    if frame_diagonal and s_translation_invariant:
        return "closed_to_closed"
    return "closed_to_open"


@dataclass
class TrajectoryImportReport:
    h_imported: np.ndarray
    times: np.ndarray
    in_ax: list[bool]
    commutator_norms: list[float]
    generator_agreement_residual: float


def imported_hamiltonian_and_trajectory_check(setup, hamiltonian, x, g_i, g_j, rho0, time_grid):
    """Pull the other perspective's Hamiltonian back through x and test a trajectory.

    For every grid time the report records subalgebra membership of the
    evolved state and the norm of the commutator between the state and the
    difference of the two generators.
    """
    hamiltonian = np.asarray(hamiltonian, dtype=complex)
    x_mat = as_matrix(x)
    u = perspective_unitary(setup, g_i, g_j)
    h_imported = dagger(x_mat) @ (u @ hamiltonian @ dagger(u)) @ x_mat
    projector = invariant_projector(setup, x_mat, g_i, g_j)
    agreement = hs_norm(projector.apply(hamiltonian) - projector.apply(h_imported))
    times = np.asarray(time_grid, dtype=float)
    in_ax, comm_norms = [], []
    diff = hamiltonian - h_imported
    for t in times:
        rho_t = evolve(hamiltonian, rho0, t)
        in_ax.append(membership_test(setup, rho_t, x_mat, g_i, g_j).is_member)
        comm_norms.append(hs_norm(diff @ rho_t - rho_t @ diff))
    return TrajectoryImportReport(
        h_imported=h_imported,
        times=times,
        in_ax=in_ax,
        commutator_norms=comm_norms,
        generator_agreement_residual=float(agreement),
    )
