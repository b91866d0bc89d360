"""Operator subalgebras singled out by a change of tensor product structure.

An operator f on a perspective space belongs to the subalgebra labeled by
a unitary X when conjugation by the perspective-change unitary agrees with
conjugation by X.  Tests, projectors, transport between orientations, and
witness construction for pure states live here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .frames import parity_swap, perspective_unitary
from .operators import (
    FixedSpace,
    assert_unitary,
    conjugation_superop,
    dagger,
    degenerate_blocks,
    fixed_space_projector,
    hs_norm,
    kron,
    partial_trace,
    polar_unitary,
    unvec,
    vec,
)

MEMBERSHIP_TOL = 1e-9
LOCALITY_TOL = 1e-10
DEGENERACY_GAP = 1e-8


class LocalityViolationError(ValueError):
    """Operator is not local on the declared factor."""


@dataclass(frozen=True)
class BilocalUnitary:
    """Product unitary y (x) z across the (frame, system) split."""

    y: np.ndarray
    z: np.ndarray

    def __post_init__(self):
        assert_unitary(self.y, what="frame factor")
        assert_unitary(self.z, what="system factor")

    @property
    def matrix(self):
        return kron(self.y, self.z)


def as_matrix(x):
    return x.matrix if isinstance(x, BilocalUnitary) else np.asarray(x, dtype=complex)


def pi_t(setup, op):
    """Project onto the commutant of the system translations (system side twirl)."""
    d_f = setup.d_frame
    acc = np.zeros_like(np.asarray(op, dtype=complex))
    for g in setup.group.elements:
        u = kron(np.eye(d_f), setup.u_s(g))
        acc += u @ op @ dagger(u)
    return acc / setup.group.order


def pi_d(setup, op):
    """Pinch to the frame-diagonal blocks of the perspective space."""
    op = np.asarray(op, dtype=complex)
    d_f, d_s = setup.d_frame, setup.d_s
    out = np.zeros_like(op)
    for k in range(d_f):
        sl = slice(k * d_s, (k + 1) * d_s)
        out[sl, sl] = op[sl, sl]
    return out


@dataclass
class FourComponentDecomposition:
    """Operator split along the diagonal pinch and the translation twirl."""

    dt: np.ndarray
    dtp: np.ndarray
    dpt: np.ndarray
    dptp: np.ndarray

    @property
    def total(self):
        return self.dt + self.dtp + self.dpt + self.dptp


def four_component_decomposition(setup, op):
    op = np.asarray(op, dtype=complex)
    diag = pi_d(setup, op)
    off = op - diag
    dt = pi_t(setup, diag)
    dpt = pi_t(setup, off)
    return FourComponentDecomposition(dt=dt, dtp=diag - dt, dpt=dpt, dptp=off - dpt)


@dataclass
class MembershipResult:
    is_member: bool
    residual: float
    tolerance: float


def membership_test(setup, f, x, g_i, g_j, tol=MEMBERSHIP_TOL):
    """Check whether conjugating f by the perspective change equals conjugation by x."""
    f = np.asarray(f, dtype=complex)
    x = as_matrix(x)
    u = perspective_unitary(setup, g_i, g_j)
    residual = hs_norm(u @ f @ dagger(u) - x @ f @ dagger(x))
    threshold = tol * max(1.0, hs_norm(f))
    return MembershipResult(is_member=bool(residual <= threshold), residual=float(residual), tolerance=threshold)


def membership_scan(setup, f, candidates, g_i, g_j, tol=MEMBERSHIP_TOL):
    """Run membership_test over a finite candidate family; returns all results."""
    return [(x, membership_test(setup, f, x, g_i, g_j, tol=tol)) for x in candidates]


def transport_bilocal(setup, x: BilocalUnitary, old, new) -> BilocalUnitary:
    """Move a membership witness from one orientation pair to another."""
    group = setup.group
    g_i, g_j = (group.check_element(g) for g in old)
    g_i2, g_j2 = (group.check_element(g) for g in new)
    shift_frame = group.compose(group.inverse(group.compose(g_i2, g_j2)), group.compose(g_i, g_j))
    shift_system = group.compose(g_j, group.inverse(g_j2))
    y_new = x.y @ setup.u_frame(shift_frame)
    z_new = x.z @ setup.u_s(shift_system)
    return BilocalUnitary(y=y_new, z=z_new)


@dataclass
class SubalgebraProjector:
    """Orthogonal projector onto the fixed operators of one subalgebra map."""

    fixed_space: FixedSpace
    operand_dim: int

    @property
    def matrix(self):
        return self.fixed_space.projector

    @property
    def dimension(self):
        return self.fixed_space.dimension

    def apply(self, op):
        return unvec(self.matrix @ vec(op), self.operand_dim)

    def contains(self, op, tol=MEMBERSHIP_TOL):
        v = vec(np.asarray(op, dtype=complex))
        return bool(np.linalg.norm(self.matrix @ v - v) <= tol * max(1.0, np.linalg.norm(v)))


def invariant_projector(setup, x, g_i, g_j, tol=1e-9):
    """Projector onto the subalgebra labeled by x at the given orientations."""
    x = as_matrix(x)
    u = perspective_unitary(setup, g_i, g_j)
    superop = conjugation_superop(dagger(x)) @ conjugation_superop(u)
    space = fixed_space_projector(superop, tol=tol)
    return SubalgebraProjector(fixed_space=space, operand_dim=setup.d_perspective)


def intersect_projectors(a: SubalgebraProjector, b: SubalgebraProjector, tol=1e-9):
    """Projector onto the intersection of two subalgebras."""
    space = fixed_space_projector(a.matrix @ b.matrix, tol=tol)
    return SubalgebraProjector(fixed_space=space, operand_dim=a.operand_dim)


@dataclass
class LocalOperatorReport:
    which: str
    factor: np.ndarray
    tps_invariant: bool
    unitary_invariant_all_orientations: bool
    witness: BilocalUnitary | None
    in_diagonal_translation_range: bool


def classify_local_operator(setup, op, which, g_i, g_j):
    """Classify a factor-local operator's behavior under the perspective change.

    which is "s_local" or "frame_local"; op lives on the full perspective
    space and must be identity on the other factor.
    """
    op = np.asarray(op, dtype=complex)
    d_f, d_s = setup.d_frame, setup.d_s
    scale = max(1.0, hs_norm(op))
    if which == "s_local":
        factor = partial_trace(op, (d_f, d_s), drop=0) / d_f
        if hs_norm(op - kron(np.eye(d_f), factor)) > LOCALITY_TOL * scale:
            raise LocalityViolationError("operator is not identity on the frame factor")
        translation_invariant = all(
            hs_norm(factor @ setup.u_s(g) - setup.u_s(g) @ factor) <= LOCALITY_TOL * scale
            for g in setup.group.elements)
        witness = None
        if translation_invariant:
            witness = BilocalUnitary(y=np.eye(d_f, dtype=complex), z=np.eye(d_s, dtype=complex))
        return LocalOperatorReport(
            which=which,
            factor=factor,
            tps_invariant=translation_invariant,
            unitary_invariant_all_orientations=translation_invariant,
            witness=witness,
            in_diagonal_translation_range=translation_invariant,
        )
    if which == "frame_local":
        factor = partial_trace(op, (d_f, d_s), drop=1) / d_s
        if hs_norm(op - kron(factor, np.eye(d_s))) > LOCALITY_TOL * scale:
            raise LocalityViolationError("operator is not identity on the system factor")
        diagonal = hs_norm(factor - np.diag(np.diag(factor))) <= LOCALITY_TOL * scale
        witness = None
        if diagonal:
            witness = BilocalUnitary(y=parity_swap(setup, g_i, g_j), z=np.eye(d_s, dtype=complex))
        return LocalOperatorReport(
            which=which,
            factor=factor,
            tps_invariant=diagonal,
            unitary_invariant_all_orientations=False,
            witness=witness,
            in_diagonal_translation_range=diagonal,
        )
    raise ValueError('which must be "s_local" or "frame_local"')


def pure_state_bilocal_witness(setup, psi, g_i, g_j, tol=MEMBERSHIP_TOL, gap=DEGENERACY_GAP):
    """Product unitary relating a pure state to its perspective-changed image.

    Returns None when the two states have different Schmidt spectra across
    the (frame, system) split, in which case no such unitary exists.
    """
    psi = np.asarray(psi, dtype=complex).ravel()
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > 1e-10:
        raise ValueError("state vector must be normalized")
    u = perspective_unitary(setup, g_i, g_j)
    phi = u @ psi
    d_f, d_s = setup.d_frame, setup.d_s
    m_psi = psi.reshape(d_f, d_s)
    m_phi = phi.reshape(d_f, d_s)
    a, lam_psi, bh = np.linalg.svd(m_psi)
    c, lam_phi, dh = np.linalg.svd(m_phi)
    if np.abs(lam_psi - lam_phi).max() > tol:
        return None
    b, d = dagger(bh), dagger(dh)
    a, b, c, d = (np.array(m, dtype=complex) for m in (a, b, c, d))
    k = lam_psi.size
    for blk in degenerate_blocks(lam_psi, gap):
        w = polar_unitary(dagger(c[:, blk]) @ a[:, blk] + dagger(d[:, blk]) @ b[:, blk])
        c[:, blk] = c[:, blk] @ w
        d[:, blk] = d[:, blk] @ w
    if d_f > k:
        w = polar_unitary(dagger(c[:, k:]) @ a[:, k:])
        c[:, k:] = c[:, k:] @ w
    if d_s > k:
        w = polar_unitary(dagger(d[:, k:]) @ b[:, k:])
        d[:, k:] = d[:, k:] @ w
    y = c @ dagger(a)
    z = d.conj() @ b.T
    witness = BilocalUnitary(y=y, z=z)
    check = membership_test(setup, np.outer(psi, psi.conj()), witness, g_i, g_j, tol=tol)
    if not check.is_member:
        return None
    return witness
