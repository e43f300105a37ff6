"""Translation-invariant matrix product states.

An :class:`Mps` holds ``d`` square matrices ``A[i]`` of size ``D``. The ring
state has amplitudes ``Tr(A[i1] ... A[iN])``; the open-boundary form adds a
``D``-dimensional boundary site on each end.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike, NDArray

from . import _contract
from .errors import InvalidInput, NonUnique, NotProjectivePair
from .linalg import (
    EPS_RANK,
    ComplexMatrix,
    StateVector,
    as_matrix,
    null_space,
    psd_sqrt,
    same_state,
    span_basis,
)

DEGENERACY_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class Mps:
    """Tensors ``A[0], ..., A[d-1]``, stored as an array of shape ``(d, D, D)``."""

    tensors: NDArray[np.complex128]

    def __post_init__(self) -> None:
        arr = np.asarray(self.tensors, dtype=np.complex128)
        if arr.ndim != 3 or arr.shape[1] != arr.shape[2]:
            raise InvalidInput(f"MPS tensors must have shape (d, D, D), got {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise InvalidInput("MPS needs d >= 1 and D >= 1")
        if not np.all(np.isfinite(arr)):
            raise InvalidInput("MPS tensors have non-finite entries")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "tensors", arr)

    @classmethod
    def from_matrices(cls, mats: list[ArrayLike]) -> Mps:
        return cls(np.stack([as_matrix(m) for m in mats]))

    @property
    def d(self) -> int:
        return int(self.tensors.shape[0])

    @property
    def bond_dim(self) -> int:
        return int(self.tensors.shape[1])

    def __getitem__(self, i: int) -> ComplexMatrix:
        return self.tensors[i]


@dataclass(frozen=True)
class NormalityReport:
    """Outcome of an injectivity-length search.

    ``span_dims`` lists ``(L, dimension)`` pairs. For split-index tensors the
    dimension at each ``L`` is the smallest ratio-to-target over boundary pairs
    and ``target_dims`` holds the per-pair dimensions at the last ``L`` tried.
    """

    is_normal: bool
    injectivity_length: int | None
    span_dims: tuple[tuple[int, int], ...]
    search_cap: int
    target: int
    pair_dims: dict[tuple[int, int], tuple[int, int]] = field(default_factory=dict)

    def describe(self) -> str:
        if self.is_normal:
            return f"normal (injectivity length {self.injectivity_length})"
        last = self.span_dims[-1][1] if self.span_dims else 0
        return f"not normal (span {last} < {self.target} at cap)"


def mps_evaluate_pbc(m: Mps, n_sites: int) -> StateVector:
    """Ring state with amplitudes ``Tr(A[i1] ... A[iN])``, not normalized."""
    if n_sites < 1:
        raise InvalidInput("n_sites must be at least 1")
    return StateVector((m.d,) * n_sites, _contract.mps_pbc(m.tensors, n_sites))


def mps_evaluate_obc(m: Mps, n_sites: int) -> StateVector:
    """Open chain ``<a|A[i1] ... A[iN]|b>`` with boundary sites first and last."""
    if n_sites < 1:
        raise InvalidInput("n_sites must be at least 1")
    dims = (m.bond_dim,) + (m.d,) * n_sites + (m.bond_dim,)
    return StateVector(dims, _contract.mps_obc(m.tensors, n_sites))


def default_search_cap(bond_dim: int) -> int:
    return 2 * bond_dim * bond_dim


def mps_normality(m: Mps, search_cap: int | None = None) -> NormalityReport:
    """Smallest ``L`` at which length-``L`` products span all ``D x D`` matrices.

    The span at ``L + 1`` is ``span{M @ A[i]}`` over a basis ``M`` of the span at
    ``L``, so only an orthonormal basis (at most ``D**2`` matrices) is carried
    between lengths instead of all ``d**L`` products.
    """
    cap = default_search_cap(m.bond_dim) if search_cap is None else int(search_cap)
    if cap < 1:
        raise InvalidInput("search_cap must be at least 1")
    dim = m.bond_dim
    target = dim * dim
    basis = span_basis(m.tensors.reshape(m.d, -1), EPS_RANK)
    dims: list[tuple[int, int]] = [(1, basis.shape[0])]
    length = 1
    while basis.shape[0] < target and length < cap:
        mats = basis.reshape(-1, dim, dim)
        grown = np.einsum("pab,ibc->piac", mats, m.tensors).reshape(-1, target)
        basis = span_basis(grown, EPS_RANK)
        length += 1
        dims.append((length, basis.shape[0]))
    normal = basis.shape[0] == target
    return NormalityReport(
        is_normal=normal,
        injectivity_length=length if normal else None,
        span_dims=tuple(dims),
        search_cap=cap,
        target=target,
    )


def transfer_matrix(m: Mps) -> NDArray[np.complex128]:
    """``E = sum_i A[i] (x) conj(A[i])``, acting on row-major ``vec(X)`` as ``sum A X A^dag``."""
    return np.einsum("iab,icd->acbd", m.tensors, m.tensors.conj()).reshape(
        m.bond_dim**2, m.bond_dim**2
    )


def _leading_fixed_point(e: NDArray[np.complex128], dim: int) -> tuple[complex, ComplexMatrix]:
    w, v = np.linalg.eig(e)
    order = np.argsort(-np.abs(w))
    lead = w[order[0]]
    if abs(lead) == 0.0:
        raise NonUnique("transfer matrix is nilpotent")
    if len(w) > 1 and abs(abs(w[order[1]]) - abs(lead)) <= DEGENERACY_TOL * abs(lead):
        raise NonUnique(
            f"leading transfer eigenvalue is degenerate: |{w[order[0]]}| ~ |{w[order[1]]}|"
        )
    fp = v[:, order[0]].reshape(dim, dim)
    fp = fp / np.trace(fp)
    fp = (fp + fp.conj().T) / 2
    return lead, fp


def transfer_fixed_points(m: Mps) -> tuple[complex, ComplexMatrix, ComplexMatrix]:
    """Leading eigenvalue and unit-trace left/right fixed points of the transfer map.

    The right fixed point solves ``sum A r A^dag = lam r``; the left one solves
    ``sum A^dag l A = lam l``.
    """
    e = transfer_matrix(m)
    lam, right = _leading_fixed_point(e, m.bond_dim)
    # the left map is the adjoint of E under the Hilbert-Schmidt product
    _, left_c = _leading_fixed_point(e.conj().T, m.bond_dim)
    return lam, left_c, right


def transfer_spectrum(m: Mps) -> list[float]:
    """Half-infinite-chain entanglement spectrum from the transfer fixed points.

    Raises:
        NonUnique: the leading transfer eigenvalue is degenerate, as happens for
            non-normal tensors.
    """
    _, left, right = transfer_fixed_points(m)
    sl = psd_sqrt(left)
    vals = np.linalg.eigvalsh((sl @ right @ sl + (sl @ right @ sl).conj().T) / 2)
    vals = np.clip(vals, 0.0, None)
    vals = vals[vals > EPS_RANK * vals.max()]
    vals = vals / vals.sum()
    return sorted((float(x) for x in vals), reverse=True)


def boundary_weighted_obc(m: Mps, n_sites: int) -> StateVector:
    """Open chain whose boundary weights are the square-rooted transfer fixed points.

    With these weights every bond of the finite chain sees the same environment
    as a bond in the middle of an infinite chain, so its Schmidt spectra equal
    the thermodynamic-limit spectrum.
    """
    _, left, right = transfer_fixed_points(m)
    wl = psd_sqrt(left)
    wr = psd_sqrt(right)
    tens = m.tensors
    first = np.einsum("ab,ibc->iac", wl, tens)
    last = np.einsum("iab,bc->iac", tens, wr)
    if n_sites == 1:
        prod = np.einsum("ab,ibc,cd->iad", wl, tens, wr)
    else:
        prod = first
        for _ in range(n_sites - 2):
            prod = np.einsum("pab,ibc->piac", prod, tens).reshape(-1, m.bond_dim, m.bond_dim)
        prod = np.einsum("pab,ibc->piac", prod, last).reshape(-1, m.bond_dim, m.bond_dim)
    dims = (m.bond_dim,) + (m.d,) * n_sites + (m.bond_dim,)
    return StateVector(dims, np.transpose(prod, (1, 0, 2)).reshape(-1))


def _is_unitary(u: ComplexMatrix, tol: float = 1e-10) -> bool:
    return np.allclose(u.conj().T @ u, np.eye(u.shape[0]), atol=tol, rtol=0.0)


def apply_onsite(state: StateVector, u: ComplexMatrix) -> StateVector:
    """``u`` applied to every site of a uniform-dimension state."""
    t = state.tensor()
    for k in range(state.n_sites):
        t = np.moveaxis(np.tensordot(u, t, axes=([1], [k])), 0, k)
    return StateVector(state.site_dims, t.reshape(-1))


def check_onsite_symmetry(
    m: Mps, u: ArrayLike, max_n: int = 6
) -> tuple[bool, ComplexMatrix | None]:
    """Test ``u^{(x)N} |psi> ~ |psi>`` and solve ``sum_j u_ij A[j] = V A[i] V^dag``.

    The state-level check runs for ``N = 1 .. max_n`` (zero states are skipped).
    ``V`` comes from the kernel of the linear system ``u.A[i] V - V A[i] = 0``
    and is scaled so that ``V^dag V = 1`` with its largest entry real positive.

    Returns:
        ``(True, V)`` when both checks pass, otherwise ``(False, None)``.
    """
    umat = as_matrix(u)
    if umat.shape != (m.d, m.d) or not _is_unitary(umat):
        raise InvalidInput("u must be a unitary d x d matrix")
    for n in range(1, max_n + 1):
        psi = mps_evaluate_pbc(m, n)
        if psi.is_zero:
            continue
        if not same_state(apply_onsite(psi, umat), psi):
            return False, None
    rotated = np.einsum("ij,jab->iab", umat, m.tensors)
    dim = m.bond_dim
    eye = np.eye(dim)
    rows = [np.kron(rotated[i], eye) - np.kron(eye, m.tensors[i].T) for i in range(m.d)]
    kernel = null_space(np.vstack(rows))
    if kernel.shape[1] == 0:
        return False, None
    v = kernel[:, 0].reshape(dim, dim)
    gram = v.conj().T @ v
    scale = np.trace(gram).real / dim
    if not np.allclose(gram, scale * eye, atol=1e-8 * max(scale, 1.0), rtol=0.0):
        return False, None
    v = v / np.sqrt(scale)
    big = np.unravel_index(np.argmax(np.abs(v)), v.shape)
    v = v * (abs(v[big]) / v[big])
    return True, v


def commutator_phase(v: ArrayLike, w: ArrayLike, tol: float = 1e-9) -> complex:
    """Scalar ``Omega`` with ``v w = Omega w v``.

    Raises:
        NotProjectivePair: ``v w v^-1 w^-1`` is not a multiple of the identity.
    """
    a = as_matrix(v)
    b = as_matrix(w)
    try:
        comm = a @ b @ np.linalg.inv(a) @ np.linalg.inv(b)
    except np.linalg.LinAlgError as exc:
        raise NotProjectivePair("v and w must be invertible") from exc
    omega = np.trace(comm) / comm.shape[0]
    if not np.allclose(comm, omega * np.eye(comm.shape[0]), atol=tol, rtol=0.0):
        raise NotProjectivePair("group commutator is not proportional to the identity")
    return complex(omega)
