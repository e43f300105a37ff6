"""Dense complex linear algebra and many-body state vectors.

Everything here works on plain ``numpy`` arrays of dtype ``complex128``.
State vectors use the leftmost site as the most significant digit, which is
the native C ordering of ``numpy.reshape``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import reduce

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import InvalidInput, RankZero, TooLarge

EPS_RANK = 1e-10
FIDELITY_TOL = 1e-9
DEFAULT_AMPLITUDE_BUDGET = 4**14
BUDGET_ENV_VAR = "SPLITMPS_AMPLITUDE_BUDGET"

ComplexMatrix = NDArray[np.complex128]


def as_matrix(m: ArrayLike) -> ComplexMatrix:
    """Coerce ``m`` to a finite 2-D complex array."""
    arr = np.asarray(m, dtype=np.complex128)
    if arr.ndim != 2:
        raise InvalidInput(f"expected a matrix, got array of shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInput("matrix has non-finite entries")
    return arr


def amplitude_budget() -> int:
    """Largest number of amplitudes a dense state may have.

    Read from the ``SPLITMPS_AMPLITUDE_BUDGET`` environment variable on every
    call so that the CLI and tests can override it.
    """
    raw = os.environ.get(BUDGET_ENV_VAR)
    if raw is None:
        return DEFAULT_AMPLITUDE_BUDGET
    try:
        return int(raw)
    except ValueError as exc:
        raise InvalidInput(f"{BUDGET_ENV_VAR} must be an integer, got {raw!r}") from exc


def check_budget(n_amplitudes: int) -> None:
    budget = amplitude_budget()
    if n_amplitudes > budget:
        raise TooLarge(f"{n_amplitudes} amplitudes exceed the budget of {budget}")


@dataclass(frozen=True)
class StateVector:
    """Dense amplitudes over a tensor product of sites.

    Attributes:
        site_dims: Per-site local dimensions, leftmost site first.
        amplitudes: Flat array of length ``prod(site_dims)``.
    """

    site_dims: tuple[int, ...]
    amplitudes: NDArray[np.complex128]

    def __post_init__(self) -> None:
        dims = tuple(int(x) for x in self.site_dims)
        amps = np.asarray(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amps.size != int(np.prod(dims, dtype=np.int64)):
            raise InvalidInput(
                f"{amps.size} amplitudes do not match site dimensions {dims}"
            )
        if not np.all(np.isfinite(amps)):
            raise InvalidInput("state has non-finite amplitudes")
        amps.setflags(write=False)
        object.__setattr__(self, "site_dims", dims)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n_sites(self) -> int:
        return len(self.site_dims)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    @property
    def is_zero(self) -> bool:
        return self.norm == 0.0

    def tensor(self) -> NDArray[np.complex128]:
        """Amplitudes reshaped to one axis per site."""
        return self.amplitudes.reshape(self.site_dims)

    def normalized(self) -> StateVector:
        nrm = self.norm
        if nrm == 0.0:
            raise InvalidInput("cannot normalize the zero vector")
        return StateVector(self.site_dims, self.amplitudes / nrm)

    @classmethod
    def from_tensor(cls, t: ArrayLike) -> StateVector:
        arr = np.asarray(t, dtype=np.complex128)
        return cls(arr.shape, arr.reshape(-1))


@dataclass(frozen=True)
class SvdResult:
    """Thin SVD ``m = u @ diag(singular_values) @ v.conj().T``."""

    u: ComplexMatrix
    singular_values: NDArray[np.float64]
    v: ComplexMatrix
    numerical_rank: int


def _rank_from_singular_values(s: NDArray[np.float64], eps: float) -> int:
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > eps * s[0]))


def svd(m: ArrayLike, eps: float = EPS_RANK) -> SvdResult:
    """Thin singular value decomposition with a relative rank cut."""
    a = as_matrix(m)
    if a.size == 0:
        raise InvalidInput("svd of an empty matrix")
    u, s, vh = np.linalg.svd(a, full_matrices=False)
    return SvdResult(u, s, vh.conj().T, _rank_from_singular_values(s, eps))


def numerical_rank(m: ArrayLike, eps: float = EPS_RANK) -> int:
    """Number of singular values above ``eps`` times the largest one."""
    if not 0.0 < eps < 1.0:
        raise InvalidInput(f"eps must lie in (0, 1), got {eps}")
    a = as_matrix(m)
    if a.size == 0:
        return 0
    return svd(a, eps).numerical_rank


def range_isometry(m: ArrayLike, eps: float = EPS_RANK) -> ComplexMatrix:
    """Isometry ``P`` onto the support of ``m.conj().T`` (the domain of ``m``).

    ``P.conj().T @ P`` is the identity of size ``rank(m)`` and
    ``m @ P @ P.conj().T == m``. Columns follow descending singular value.
    """
    res = svd(m, eps)
    if res.numerical_rank == 0:
        raise RankZero("range_isometry of a zero matrix")
    return res.v[:, : res.numerical_rank]


def null_space(m: ArrayLike, rtol: float = 1e-9) -> ComplexMatrix:
    """Orthonormal basis (as columns) of the kernel of ``m``."""
    a = np.asarray(m, dtype=np.complex128)
    n = a.shape[1]
    if a.shape[0] == 0:
        return np.eye(n, dtype=np.complex128)
    _, s, vh = np.linalg.svd(a, full_matrices=True)
    scale = s[0] if s.size and s[0] > 0 else 1.0
    rank = int(np.count_nonzero(s > rtol * scale))
    return vh[rank:].conj().T


def span_basis(vectors: NDArray[np.complex128], eps: float = EPS_RANK) -> NDArray[np.complex128]:
    """Orthonormal rows spanning the row space of ``vectors``."""
    if vectors.shape[0] == 0:
        return vectors
    _, s, vh = np.linalg.svd(vectors, full_matrices=False)
    return vh[: _rank_from_singular_values(s, eps)]


def psd_sqrt(h: ArrayLike) -> ComplexMatrix:
    """Square root of a Hermitian positive semi-definite matrix."""
    a = np.asarray(h, dtype=np.complex128)
    a = (a + a.conj().T) / 2
    w, v = np.linalg.eigh(a)
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


def kron_all(mats: list[ArrayLike]) -> NDArray[np.complex128]:
    return reduce(np.kron, [np.asarray(m, dtype=np.complex128) for m in mats])


def fidelity(phi: StateVector | ArrayLike, psi: StateVector | ArrayLike) -> float:
    """Global-phase-insensitive overlap ``|<phi|psi>|^2 / (<phi|phi><psi|psi>)``.

    Two zero vectors are reported as identical; a zero and a non-zero vector
    have fidelity zero.
    """
    a = phi.amplitudes if isinstance(phi, StateVector) else np.asarray(phi).reshape(-1)
    b = psi.amplitudes if isinstance(psi, StateVector) else np.asarray(psi).reshape(-1)
    if a.shape != b.shape:
        raise InvalidInput(f"state sizes differ: {a.shape} vs {b.shape}")
    na = np.vdot(a, a).real
    nb = np.vdot(b, b).real
    if na == 0.0 and nb == 0.0:
        return 1.0
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(abs(np.vdot(a, b)) ** 2 / (na * nb))


def same_state(phi: StateVector | ArrayLike, psi: StateVector | ArrayLike, tol: float = FIDELITY_TOL) -> bool:
    return fidelity(phi, psi) >= 1.0 - tol


def schmidt_spectrum(psi: StateVector, cut: int) -> list[float]:
    """Reduced density matrix eigenvalues of sites ``[0, cut)``.

    The state is normalized first, so the result sums to one. Eigenvalues whose
    Schmidt coefficient is below the relative rank tolerance are dropped.
    """
    if not 0 < cut < psi.n_sites:
        raise InvalidInput(f"cut {cut} must lie strictly between 0 and {psi.n_sites}")
    if psi.is_zero:
        raise InvalidInput("schmidt_spectrum of the zero vector")
    left = int(np.prod(psi.site_dims[:cut]))
    mat = psi.amplitudes.reshape(left, -1) / psi.norm
    s = np.linalg.svd(mat, compute_uv=False)
    keep = s[s > EPS_RANK * s[0]]
    vals = keep**2
    vals = vals / vals.sum()
    return sorted((float(x) for x in vals), reverse=True)


def entropy_bits(probabilities: ArrayLike) -> float:
    p = np.asarray(probabilities, dtype=float)
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())
