"""Dense complex operator utilities on tensor-factor spaces.

Conventions used throughout the package:

* vectorization is column-major (Fortran order), so the superoperator of
  the conjugation f -> W f W' is kron(conj(W), W);
* Hermiticity is checked as max|A - A'| <= 1e-10 absolute;
* eigenvalues below -1e-8 on nominally positive operators are treated as
  a real indefiniteness, smaller negatives as round-off.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np
from scipy.linalg import polar, schur

HERMITICITY_TOL = 1e-10
UNITARITY_TOL = 1e-10
INDEFINITENESS_TOL = -1e-8
EIGENVALUE_CLAMP = 1e-12


class IndefiniteOperatorError(ValueError):
    """Nominally positive operator has an eigenvalue below -1e-8."""


class NumericalRankError(ValueError):
    """Eigenvalue clustering too close to the selection tolerance."""


def dagger(mat):
    return np.asarray(mat).conj().T


def kron(*mats):
    """Kronecker product of the given matrices, left to right."""
    return reduce(np.kron, mats)


def assert_hermitian(mat, tol=HERMITICITY_TOL, what="operator"):
    mat = np.asarray(mat)
    defect = np.abs(mat - dagger(mat)).max()
    if defect > tol:
        raise ValueError(f"{what} is not Hermitian: max|A - A'| = {defect:.3e}")
    return mat


def assert_unitary(mat, tol=UNITARITY_TOL, what="operator"):
    mat = np.asarray(mat)
    defect = np.abs(mat @ dagger(mat) - np.eye(mat.shape[0])).max()
    if defect > tol:
        raise ValueError(f"{what} is not unitary: max|U U' - 1| = {defect:.3e}")
    return mat


def embed_operator(ops, dims):
    """Embed single-factor operators into the full tensor space.

    ops maps factor position -> square matrix; absent factors get the
    identity.  Factor order in the product follows dims.
    """
    parts = []
    for site, d in enumerate(dims):
        if site in ops:
            op = np.asarray(ops[site])
            if op.shape != (d, d):
                raise ValueError(f"operator at factor {site} has shape {op.shape}, expected ({d}, {d})")
            parts.append(op)
        else:
            parts.append(np.eye(d))
    return kron(*parts)


def partial_trace(mat, dims, drop):
    """Trace out the factors listed in drop (positions into dims)."""
    dims = tuple(int(d) for d in dims)
    drop = (drop,) if np.isscalar(drop) else tuple(drop)
    if any(not 0 <= k < len(dims) for k in drop):
        raise ValueError(f"factor index out of range: {drop}")
    n = len(dims)
    tensor = np.asarray(mat).reshape(dims + dims)
    for k in sorted(drop, reverse=True):
        tensor = np.trace(tensor, axis1=k, axis2=k + n)
        n -= 1
    keep = [d for k, d in enumerate(dims) if k not in drop]
    size = int(np.prod(keep)) if keep else 1
    return tensor.reshape(size, size)


def hs_inner(a, b):
    """Hilbert-Schmidt inner product Tr(a' b)."""
    return complex(np.trace(dagger(a) @ np.asarray(b)))


def hs_norm(a):
    return float(np.linalg.norm(np.asarray(a)))


def vec(mat):
    """Column-major vectorization."""
    return np.asarray(mat).reshape(-1, order="F")


def unvec(v, d=None):
    v = np.asarray(v)
    if d is None:
        d = round(np.sqrt(v.size))
    return v.reshape((d, d), order="F")


def conjugation_superop(w, check=True):
    """Superoperator of f -> w f w' acting on column-major vec(f)."""
    w = np.asarray(w, dtype=complex)
    if check:
        assert_unitary(w)
    return np.kron(w.conj(), w)


def _spectral(mat):
    mat = assert_hermitian(np.asarray(mat, dtype=complex))
    return np.linalg.eigh(mat)


def matrix_function(mat, fn, clamp=False):
    """Apply fn to the eigenvalues of a Hermitian matrix.

    With clamp=True, eigenvalues in [-1e-8, 1e-12] are set to zero before
    fn is applied; an eigenvalue below -1e-8 raises IndefiniteOperatorError.
    """
    vals, vecs = _spectral(mat)
    if clamp:
        if vals.min() < INDEFINITENESS_TOL:
            raise IndefiniteOperatorError(f"eigenvalue {vals.min():.3e} below {INDEFINITENESS_TOL:.0e}")
        vals = np.where(vals < EIGENVALUE_CLAMP, 0.0, vals)
    return (vecs * fn(vals)) @ dagger(vecs)


def matrix_exp_scaled(mat, c):
    """exp(c * mat) for Hermitian mat; c = -i t gives unitary evolution."""
    vals, vecs = _spectral(mat)
    return (vecs * np.exp(c * vals)) @ dagger(vecs)


def matrix_log(mat):
    """Logarithm on the support of a positive semidefinite matrix."""
    def safe_log(vals):
        out = np.full_like(vals, 0.0)
        pos = vals > 0
        out[pos] = np.log(vals[pos])
        return out
    return matrix_function(mat, safe_log, clamp=True)


def matrix_power(mat, alpha):
    """Power of a positive semidefinite matrix."""
    return matrix_function(mat, lambda v: np.where(v > 0, v, 0.0) ** alpha, clamp=True)


@dataclass
class FixedSpace:
    """Eigenvalue-1 subspace of a matrix: orthogonal projector and basis."""

    projector: np.ndarray
    basis: np.ndarray

    @property
    def dimension(self):
        return self.basis.shape[1]

    def apply(self, mat):
        """Project vec(mat) onto the fixed space and reshape back."""
        d = np.asarray(mat).shape[0]
        return unvec(self.projector @ vec(mat), d)

    def contains(self, v, tol=1e-9):
        v = np.asarray(v, dtype=complex)
        return np.linalg.norm(self.projector @ v - v) <= tol * max(1.0, np.linalg.norm(v))


def fixed_space_projector(superop, tol=1e-9, guard=10.0):
    """Orthogonal projector onto the eigenvalue-1 subspace of superop.

    Uses an ordered Schur decomposition so the leading Schur vectors span
    the selected invariant subspace.  Eigenvalues in the annulus
    (tol, guard*tol] around 1 mean the rank is numerically ambiguous and
    raise NumericalRankError with the observed gap.
    """
    superop = np.asarray(superop, dtype=complex)

    def near_one(lam):
        return abs(lam - 1.0) <= tol

    triangular, q, sdim = schur(superop, output="complex", sort=near_one)
    eigs = np.diag(triangular)
    rejected = eigs[sdim:]
    if rejected.size:
        gap = float(np.abs(rejected - 1.0).min())
        if gap <= guard * tol:
            raise NumericalRankError(
                f"eigenvalue at distance {gap:.3e} from 1 is inside the guard band {guard * tol:.3e}")
    basis = q[:, :sdim]
    return FixedSpace(projector=basis @ dagger(basis), basis=basis)


def polar_unitary(mat):
    """Unitary factor of the polar decomposition."""
    u, _ = polar(np.asarray(mat, dtype=complex))
    return u


def degenerate_blocks(values, gap):
    """Group indices of a descending value list into blocks split by gaps."""
    blocks = []
    start = 0
    for k in range(1, len(values) + 1):
        if k == len(values) or values[k - 1] - values[k] > gap:
            blocks.append(slice(start, k))
            start = k
    return blocks


def random_hermitian(rng, d, scale=1.0):
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return scale * (g + dagger(g)) / 2


def haar_unitary(rng, d):
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def haar_state(rng, d):
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return v / np.linalg.norm(v)


SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
ID2 = np.eye(2, dtype=complex)
PAULI = {"I": ID2, "X": SIGMA_X, "Y": SIGMA_Y, "Z": SIGMA_Z}
