"""State constructors, entropies, and state transport between perspectives.

Entropies use the natural logarithm.  Relative entropy returns math.inf
when the support condition fails; the tagged infinity propagates through
downstream balances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .frames import perspective_unitary
from .operators import (
    IndefiniteOperatorError,
    assert_hermitian,
    dagger,
    degenerate_blocks,
    hs_norm,
    kron,
    partial_trace,
    polar_unitary,
)

SUPPORT_CUTOFF = 1e-12
SPECTRUM_TOL = 1e-9


class DensityMatrix:
    """Validated density operator with a cached purity."""

    def __init__(self, matrix):
        matrix = np.asarray(matrix, dtype=complex)
        assert_hermitian(matrix, what="density matrix")
        tr = float(np.trace(matrix).real)
        if abs(tr - 1.0) > 1e-10:
            raise ValueError(f"density matrix must have unit trace, got {tr}")
        vals = np.linalg.eigvalsh(matrix)
        if vals.min() < -1e-10:
            raise IndefiniteOperatorError(f"density matrix has eigenvalue {vals.min():.3e}")
        self.matrix = matrix
        self._purity = None

    @classmethod
    def from_vector(cls, psi):
        psi = np.asarray(psi, dtype=complex).ravel()
        norm = np.linalg.norm(psi)
        if abs(norm - 1.0) > 1e-10:
            raise ValueError("state vector must be normalized")
        return cls(np.outer(psi, psi.conj()))

    @property
    def purity(self):
        if self._purity is None:
            self._purity = float(np.trace(self.matrix @ self.matrix).real)
        return self._purity


def _mat(rho):
    return rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)


def w_state(n):
    """Equal superposition of single-excitation basis states on n qubits."""
    n = int(n)
    if n < 1:
        raise ValueError("w_state needs at least one qubit")
    v = np.zeros(2 ** n, dtype=complex)
    for k in range(n):
        v[1 << (n - 1 - k)] = 1.0 / math.sqrt(n)
    return v


def ghz_state(group, n):
    """Equal superposition of |g>^(x n) over the group elements."""
    n = int(n)
    if n < 2:
        raise ValueError("ghz_state needs at least two factors")
    order = group.order
    v = np.zeros(order ** n, dtype=complex)
    for g in group.elements:
        idx = group.index(g)
        pos = sum(idx * order ** (n - 1 - m) for m in range(n))
        v[pos] = 1.0 / math.sqrt(order)
    return v


def gb_state(group, h, k):
    """Two-frame basis state labeled by a relative shift h and a character k."""
    h = group.check_element(h)
    k = group.check_element(k)
    order = group.order
    v = np.zeros(order ** 2, dtype=complex)
    for g in group.elements:
        v[group.index(g) * order + group.index(group.compose(g, h))] += group.character(k, g)
    return v / math.sqrt(order)


def gibbs_state(hamiltonian, beta):
    """exp(-beta H) / Z."""
    hamiltonian = assert_hermitian(np.asarray(hamiltonian, dtype=complex), what="Hamiltonian")
    vals, vecs = np.linalg.eigh(hamiltonian)
    weights = np.exp(-beta * (vals - vals.min()))
    weights /= weights.sum()
    return (vecs * weights) @ dagger(vecs)


def product_state(*vectors):
    out = np.asarray(vectors[0], dtype=complex).ravel()
    for v in vectors[1:]:
        out = np.kron(out, np.asarray(v, dtype=complex).ravel())
    return out


def basis_state(dim, index):
    v = np.zeros(int(dim), dtype=complex)
    v[int(index)] = 1.0
    return v


def _clean_spectrum(rho, what="state"):
    vals = np.linalg.eigvalsh(_mat(rho))
    if vals.min() < -1e-8:
        raise IndefiniteOperatorError(f"{what} has eigenvalue {vals.min():.3e}")
    vals = vals[vals > SUPPORT_CUTOFF]
    return vals


def von_neumann_entropy(rho):
    vals = _clean_spectrum(rho)
    return float(-(vals * np.log(vals)).sum())


def renyi_entropy(rho, alpha):
    """Renyi entropy of order alpha > 0; alpha = 1 falls back to von Neumann."""
    alpha = float(alpha)
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if alpha == 1.0:
        return von_neumann_entropy(rho)
    vals = _clean_spectrum(rho)
    return float(np.log((vals ** alpha).sum()) / (1.0 - alpha))


def relative_entropy(rho, sigma):
    """S(rho || sigma), math.inf when supp(rho) is not inside supp(sigma)."""
    rho, sigma = _mat(rho), _mat(sigma)
    svals, svecs = np.linalg.eigh(sigma)
    outside = svecs[:, svals <= SUPPORT_CUTOFF]
    if outside.size and hs_norm(dagger(outside) @ rho @ outside) > 1e-12:
        return math.inf
    rvals, rvecs = np.linalg.eigh(rho)
    keep = rvals > SUPPORT_CUTOFF
    safe = np.where(svals > SUPPORT_CUTOFF, svals, 1.0)
    log_sigma = (svecs * np.log(safe)) @ dagger(svecs)
    entropy_term = float((rvals[keep] * np.log(rvals[keep])).sum())
    cross_term = float(np.trace(rho @ log_sigma).real)
    return entropy_term - cross_term


def mutual_information(rho, dims):
    rho = _mat(rho)
    rho_a = partial_trace(rho, dims, drop=1)
    rho_b = partial_trace(rho, dims, drop=0)
    return von_neumann_entropy(rho_a) + von_neumann_entropy(rho_b) - von_neumann_entropy(rho)


def purity(rho):
    rho = _mat(rho)
    return float(np.trace(rho @ rho).real)


@dataclass
class SubsystemStates:
    rho_jbar: np.ndarray
    rho_s: np.ndarray
    rho_frame: np.ndarray


def subsystem_transform(setup, rho_ibar, g_i, g_j):
    """State in the other perspective together with its marginals."""
    rho_ibar = _mat(rho_ibar)
    u = perspective_unitary(setup, g_i, g_j)
    rho_jbar = u @ rho_ibar @ dagger(u)
    dims = (setup.d_frame, setup.d_s)
    return SubsystemStates(
        rho_jbar=rho_jbar,
        rho_s=partial_trace(rho_jbar, dims, drop=0),
        rho_frame=partial_trace(rho_jbar, dims, drop=1),
    )


@dataclass
class EquivalenceWitness:
    z: np.ndarray
    rho_a_translation_invariant: bool | None


def subsystem_equivalence_witness(rho_a, rho_b, setup=None, tol=SPECTRUM_TOL, gap=1e-8):
    """Unitary z with rho_b = z rho_a z', or None when the spectra differ.

    When a setup is supplied the report also notes whether rho_a commutes
    with every system translation.
    """
    rho_a, rho_b = _mat(rho_a), _mat(rho_b)
    vals_a, vecs_a = np.linalg.eigh(rho_a)
    vals_b, vecs_b = np.linalg.eigh(rho_b)
    order_a, order_b = np.argsort(vals_a)[::-1], np.argsort(vals_b)[::-1]
    vals_a, vecs_a = vals_a[order_a], vecs_a[:, order_a]
    vals_b, vecs_b = vals_b[order_b], vecs_b[:, order_b]
    if np.abs(vals_a - vals_b).max() > tol:
        return None
    vecs_b = np.array(vecs_b, dtype=complex)
    for blk in degenerate_blocks(vals_a, gap):
        w = polar_unitary(dagger(vecs_b[:, blk]) @ vecs_a[:, blk])
        vecs_b[:, blk] = vecs_b[:, blk] @ w
    z = vecs_b @ dagger(vecs_a)
    invariant = None
    if setup is not None:
        invariant = all(
            hs_norm(rho_a @ setup.u_s(g) - setup.u_s(g) @ rho_a) <= 1e-10 * max(1.0, hs_norm(rho_a))
            for g in setup.group.elements)
    return EquivalenceWitness(z=z, rho_a_translation_invariant=invariant)


@dataclass
class NegativeTemperatureReport:
    anticommuting_sector: list
    commuting_sector: list
    q_a: float
    predicted: np.ndarray


def negative_temperature_predict(setup, h_s, beta, rho_frame, g_j, require_flip=False):
    """Predicted system state in the other perspective for a frame (x) Gibbs product.

    The prediction mixes the two Gibbs states at +/- beta with the weight
    q_a read off the frame populations over the anticommuting sector.
    """
    h_s = assert_hermitian(np.asarray(h_s, dtype=complex), what="Hamiltonian")
    rho_frame = _mat(rho_frame)
    group = setup.group
    g_j = group.check_element(g_j)
    scale = max(1.0, hs_norm(h_s))
    anti, comm = [], []
    for g in group.elements:
        u = setup.u_s(g)
        if hs_norm(u @ h_s + h_s @ u) <= 1e-10 * scale:
            anti.append(g)
        elif hs_norm(u @ h_s - h_s @ u) <= 1e-10 * scale:
            comm.append(g)
        else:
            raise ValueError(f"element {g} neither commutes nor anticommutes with the Hamiltonian")
    if require_flip and not anti:
        raise ValueError("no group element anticommutes with the Hamiltonian, a flip is impossible")
    q_a = 0.0
    for h in anti:
        idx = group.index(group.compose(g_j, group.inverse(h)))
        q_a += float(rho_frame[idx, idx].real)
    predicted = q_a * gibbs_state(h_s, -beta) + (1.0 - q_a) * gibbs_state(h_s, beta)
    return NegativeTemperatureReport(
        anticommuting_sector=anti,
        commuting_sector=comm,
        q_a=q_a,
        predicted=predicted,
    )


def random_global_with_s_marginal(rng, d_frame, marginal, kind="mixed"):
    """Random state on (frame, system) whose system marginal equals marginal.

    kind "pure" draws a Haar-like purification (needs d_frame >= rank),
    kind "mixed" attaches random pure frame states to the eigenbasis.
    """
    marginal = _mat(marginal)
    vals, vecs = np.linalg.eigh(marginal)
    keep = vals > SUPPORT_CUTOFF
    vals, vecs = vals[keep], vecs[:, keep]
    rank = vals.size
    if kind == "pure":
        if d_frame < rank:
            raise ValueError("purification needs frame dimension >= marginal rank")
        g = rng.normal(size=(d_frame, rank)) + 1j * rng.normal(size=(d_frame, rank))
        frame_vecs = np.linalg.qr(g)[0]
        psi = sum(
            math.sqrt(vals[k]) * np.kron(frame_vecs[:, k], vecs[:, k])
            for k in range(rank))
        return np.outer(psi, psi.conj())
    if kind == "mixed":
        out = np.zeros((d_frame * marginal.shape[0],) * 2, dtype=complex)
        for k in range(rank):
            v = rng.normal(size=d_frame) + 1j * rng.normal(size=d_frame)
            v /= np.linalg.norm(v)
            out += vals[k] * kron(np.outer(v, v.conj()), np.outer(vecs[:, k], vecs[:, k].conj()))
        return out
    raise ValueError('kind must be "pure" or "mixed"')
