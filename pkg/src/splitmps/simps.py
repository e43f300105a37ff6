"""Split-index matrix product states.

A :class:`Simps` assigns a ``chi[i] x chi[j]`` matrix ``B[i][j]`` to every
pair of neighbouring physical values, so the ring state has amplitudes
``Tr(B[i1][i2] B[i2][i3] ... B[iN][i1])``. This module evaluates such states,
certifies normality, converts to and from ordinary MPS with minimal bond
dimensions, and solves for the per-index gauge relating two representations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from . import _contract
from .errors import (
    DegenerateGauge,
    InvalidInput,
    NoGauge,
    NotNormal,
    RankZero,
    UnsupportedBoundary,
)
from .linalg import ComplexMatrix, StateVector, as_matrix, null_space, span_basis, svd
from .mps import Mps, NormalityReport, mps_normality

GAUGE_RESIDUAL_TOL = 1e-8
GAUGE_COND_MAX = 1e8


class Simps:
    """Split-index tensor table.

    Args:
        tensors: Nested ``d x d`` sequence with ``tensors[i][j]`` of shape
            ``(chi[i], chi[j])``. Scalars are accepted when the relevant bond
            dimensions are one.
    """

    __slots__ = ("_chi", "_tensors")

    def __init__(self, tensors: list[list[ArrayLike]]) -> None:
        d = len(tensors)
        if d < 1 or any(len(row) != d for row in tensors):
            raise InvalidInput("SIMPS tensor table must be d x d with d >= 1")
        raw = [[np.asarray(t, dtype=np.complex128) for t in row] for row in tensors]
        chi = []
        for i in range(d):
            m = raw[i][0]
            chi.append(int(m.shape[0]) if m.ndim == 2 else 1)
        table = []
        for i in range(d):
            row = []
            for j in range(d):
                m = raw[i][j]
                if m.ndim == 0:
                    m = m.reshape(1, 1)
                elif m.ndim == 1:
                    # a bare vector is a column when chi[j] == 1, a row otherwise
                    m = m.reshape(-1, 1) if chi[j] == 1 and m.size == chi[i] else m.reshape(1, -1)
                if m.shape != (chi[i], chi[j]):
                    raise InvalidInput(
                        f"B[{i}][{j}] has shape {m.shape}, expected {(chi[i], chi[j])}"
                    )
                if not np.all(np.isfinite(m)):
                    raise InvalidInput(f"B[{i}][{j}] has non-finite entries")
                m = m.copy()
                m.setflags(write=False)
                row.append(m)
            table.append(tuple(row))
        self._chi = tuple(chi)
        self._tensors = tuple(table)

    @property
    def d(self) -> int:
        return len(self._chi)

    @property
    def chi(self) -> tuple[int, ...]:
        return self._chi

    @property
    def tensors(self) -> tuple[tuple[ComplexMatrix, ...], ...]:
        return self._tensors

    @property
    def uniform_chi(self) -> int | None:
        return self._chi[0] if len(set(self._chi)) == 1 else None

    def __getitem__(self, ij: tuple[int, int]) -> ComplexMatrix:
        i, j = ij
        return self._tensors[i][j]

    def __repr__(self) -> str:
        return f"Simps(d={self.d}, chi={self.chi})"

    def padded(self) -> NDArray[np.complex128]:
        """All blocks zero-padded to ``max(chi)``, shape ``(d, d, chi_max, chi_max)``.

        Padding in the top-left corner preserves every product and trace.
        """
        cmax = max(self._chi)
        out = np.zeros((self.d, self.d, cmax, cmax), dtype=np.complex128)
        for i in range(self.d):
            for j in range(self.d):
                out[i, j, : self._chi[i], : self._chi[j]] = self._tensors[i][j]
        return out

    def block_matrix(self) -> ComplexMatrix:
        """The matrix ``sum B[i][j]_{ab} |i a><j b|`` of size ``sum(chi)``."""
        return np.block([[self._tensors[i][j] for j in range(self.d)] for i in range(self.d)])

    def offsets(self) -> NDArray[np.int64]:
        return np.concatenate([[0], np.cumsum(self._chi)]).astype(np.int64)

    def map(self, fn) -> Simps:
        """New table with ``fn(i, j, B[i][j])`` in every slot."""
        return Simps([[fn(i, j, self._tensors[i][j]) for j in range(self.d)] for i in range(self.d)])


@dataclass(frozen=True)
class GaugeSolution:
    """Invertible ``V[i]`` with ``A[i][j] @ V[j] == V[i] @ B[i][j]``."""

    gauges: tuple[ComplexMatrix, ...]
    residual: float
    null_dim: int
    condition: float


def simps_evaluate_pbc(s: Simps, n_sites: int) -> StateVector:
    """Ring state ``Tr(B[i1][i2] ... B[iN][i1])``, not normalized."""
    if n_sites < 2:
        raise InvalidInput("a split-index ring needs at least 2 sites")
    return StateVector((s.d,) * n_sites, _contract.split_pbc(s.padded(), n_sites))


def simps_evaluate_obc(s: Simps, n_sites: int) -> StateVector:
    """Open chain ``<alpha|B[i1][i2] ... B[i_{N-1}][iN]|beta>`` with chi-dimensional ends."""
    if n_sites < 2:
        raise InvalidInput("an open split-index chain needs at least 2 sites")
    chi = s.uniform_chi
    if chi is None:
        raise UnsupportedBoundary(f"open boundaries need uniform chi, got {s.chi}")
    dims = (chi,) + (s.d,) * n_sites + (chi,)
    return StateVector(dims, _contract.split_obc(s.padded(), n_sites))


def simps_normality(s: Simps, search_cap: int | None = None) -> NormalityReport:
    """Smallest ``L`` with ``span{B[s1][i1] ... B[iL][s2]}`` full for every ``(s1, s2)``.

    Spans are propagated one index at a time: ``Q[s1][j]`` spans the products
    ``B[s1][i1] ... B[i_{k-1}][j]`` and the length-``L`` span for ``(s1, s2)`` is
    ``span{Q[s1][i] @ B[i][s2]}``.
    """
    cmax = max(s.chi)
    cap = 2 * cmax * cmax + 2 if search_cap is None else int(search_cap)
    if cap < 1:
        raise InvalidInput("search_cap must be at least 1")
    d, chi = s.d, s.chi
    q = {(a, j): span_basis(s[a, j].reshape(1, -1)) for a in range(d) for j in range(d)}

    def close(q_cur: dict) -> dict[tuple[int, int], NDArray[np.complex128]]:
        spans = {}
        for a in range(d):
            for b in range(d):
                parts = [
                    (q_cur[a, i].reshape(-1, chi[a], chi[i]) @ s[i, b]).reshape(-1, chi[a] * chi[b])
                    for i in range(d)
                    if q_cur[a, i].shape[0]
                ]
                stacked = np.vstack(parts) if parts else np.zeros((0, chi[a] * chi[b]))
                spans[a, b] = span_basis(stacked)
        return spans

    dims: list[tuple[int, int]] = []
    pair_dims: dict[tuple[int, int], tuple[int, int]] = {}
    length = 0
    normal = False
    while length < cap:
        length += 1
        spans = close(q)
        pair_dims = {k: (v.shape[0], chi[k[0]] * chi[k[1]]) for k, v in spans.items()}
        worst = min(pair_dims.values(), key=lambda t: t[0] / t[1])
        dims.append((length, worst[0]))
        if all(got == want for got, want in pair_dims.values()):
            normal = True
            break
        q = spans
    worst_target = min(pair_dims.values(), key=lambda t: t[0] / t[1])[1]
    return NormalityReport(
        is_normal=normal,
        injectivity_length=length if normal else None,
        span_dims=tuple(dims),
        search_cap=cap,
        target=worst_target,
        pair_dims=pair_dims,
    )


def simps_to_mps(s: Simps) -> Mps:
    """Cut the block matrix by SVD and rebuild ``A[i] = w^dag (|i><i| (x) 1) u``.

    The resulting bond dimension is the rank of the block matrix.
    """
    res = svd(s.block_matrix())
    dim = res.numerical_rank
    if dim == 0:
        raise RankZero("the split-index block matrix is zero")
    u = res.u[:, :dim]
    w_dag = res.singular_values[:dim, None] * res.v[:, :dim].conj().T
    off = s.offsets()
    mats = [w_dag[:, off[i] : off[i + 1]] @ u[off[i] : off[i + 1], :] for i in range(s.d)]
    return Mps(np.stack(mats))


def simps_from_mps(m: Mps) -> Simps:
    """Split-index form ``B[i][j] = P[i]^dag A[j] P[j]`` with ``P[i]`` onto the domain of ``A[i]``.

    Raises:
        RankZero: some ``A[i]`` vanishes.
    """
    isos = []
    for i in range(m.d):
        res = svd(m[i])
        if res.numerical_rank == 0:
            raise RankZero(f"A[{i}] is zero")
        isos.append(res.v[:, : res.numerical_rank])
    return Simps(
        [[isos[i].conj().T @ m[j] @ isos[j] for j in range(m.d)] for i in range(m.d)]
    )


def solve_gauge(a: Simps, b: Simps, check_normal: bool = True) -> GaugeSolution:
    """Find ``V[i]`` with ``a[i][j] = V[i] b[i][j] V[j]^-1`` for every pair.

    The homogeneous system ``a[i][j] V[j] - V[i] b[i][j] = 0`` is solved for all
    blocks at once. The kernel vector is scaled so the largest entry of
    ``V[0]`` equals one.

    Raises:
        NotNormal: either input is not normal.
        NoGauge: the kernel is trivial.
        DegenerateGauge: the solution has a singular block.
    """
    if a.d != b.d:
        raise InvalidInput(f"local dimensions differ: {a.d} vs {b.d}")
    if a.chi != b.chi:
        raise InvalidInput(f"per-index bond dimensions differ: {a.chi} vs {b.chi}")
    if check_normal:
        for name, t in (("a", a), ("b", b)):
            if not simps_normality(t).is_normal:
                raise NotNormal(f"{name} is not normal")
    chi = a.chi
    sizes = [c * c for c in chi]
    col_off = np.concatenate([[0], np.cumsum(sizes)]).astype(int)
    blocks = []
    for i in range(a.d):
        for j in range(a.d):
            row = np.zeros((chi[i] * chi[j], col_off[-1]), dtype=np.complex128)
            row[:, col_off[j] : col_off[j + 1]] += np.kron(a[i, j], np.eye(chi[j]))
            row[:, col_off[i] : col_off[i + 1]] -= np.kron(np.eye(chi[i]), b[i, j].T)
            blocks.append(row)
    system = np.vstack(blocks)
    kernel = null_space(system)
    if kernel.shape[1] == 0:
        raise NoGauge("no gauge transformation relates the two tensors")
    vec = kernel[:, 0]
    gauges = [vec[col_off[i] : col_off[i + 1]].reshape(chi[i], chi[i]) for i in range(a.d)]
    big = np.unravel_index(np.argmax(np.abs(gauges[0])), gauges[0].shape)
    pin = gauges[0][big]
    if abs(pin) == 0.0:
        raise DegenerateGauge("V[0] vanishes")
    gauges = [g / pin for g in gauges]
    cond = max(np.linalg.cond(g) for g in gauges)
    if not np.isfinite(cond) or cond > GAUGE_COND_MAX:
        raise DegenerateGauge(f"gauge block is singular (condition number {cond:.3g})")
    residual = max(
        float(np.abs(a[i, j] @ gauges[j] - gauges[i] @ b[i, j]).max(initial=0.0))
        for i in range(a.d)
        for j in range(a.d)
    )
    if residual > GAUGE_RESIDUAL_TOL:
        raise NoGauge(f"gauge residual {residual:.3g} exceeds tolerance")
    for g in gauges:
        g.setflags(write=False)
    return GaugeSolution(tuple(gauges), residual, int(kernel.shape[1]), float(cond))


def fingerprint_compose(j_tensors: list[ArrayLike], s: Simps) -> Simps:
    """Kronecker-compose ``J[i] (x) B[i][j]``; bond dimensions grow by ``dim(J)``."""
    if len(j_tensors) != s.d:
        raise InvalidInput(f"need {s.d} J matrices, got {len(j_tensors)}")
    js = [as_matrix(j) for j in j_tensors]
    shape = js[0].shape
    if shape[0] != shape[1] or any(j.shape != shape for j in js):
        raise InvalidInput("J matrices must be square with a common dimension")
    return s.map(lambda i, _j, blk: np.kron(js[i], blk))


def prop1_bounds(s: Simps) -> tuple[int, int, bool]:
    """Check the injectivity-length bounds between the two representations.

    Returns ``(L1, L0, ok)`` where ``L1`` belongs to ``s`` and ``L0`` to
    ``simps_to_mps(s)``; ``ok`` requires ``L0 <= L1 + 2`` and that converting
    that MPS back gives a split-index tensor with injectivity length ``<= L0``.
    """
    rep = simps_normality(s)
    if not rep.is_normal:
        raise NotNormal("prop1_bounds needs a normal split-index tensor")
    l1 = rep.injectivity_length
    m = simps_to_mps(s)
    mrep = mps_normality(m)
    if not mrep.is_normal:
        return l1, -1, False
    l0 = mrep.injectivity_length
    back = simps_normality(simps_from_mps(m))
    ok = l0 <= l1 + 2 and back.is_normal and back.injectivity_length <= l0
    return l1, l0, bool(ok)


def random_gauge(chi: tuple[int, ...], rng: np.random.Generator, cond_max: float = 50.0) -> list[ComplexMatrix]:
    """Random well-conditioned complex matrices, one per index."""
    out = []
    for c in chi:
        while True:
            g = rng.standard_normal((c, c)) + 1j * rng.standard_normal((c, c))
            if np.linalg.cond(g) < cond_max:
                out.append(g)
                break
    return out


def gauge_transform(s: Simps, gauges: list[ArrayLike]) -> Simps:
    """``V[i] @ B[i][j] @ inv(V[j])``."""
    vs = [as_matrix(g) for g in gauges]
    inv = [np.linalg.inv(v) for v in vs]
    return s.map(lambda i, j, blk: vs[i] @ blk @ inv[j])


def is_gauge_equivalent(a: Simps, b: Simps) -> bool:
    try:
        solve_gauge(a, b)
    except (NoGauge, DegenerateGauge, NotNormal, InvalidInput):
        return False
    return True


def all_unitary(s: Simps, tol: float = 1e-10) -> bool:
    for row in s.tensors:
        for blk in row:
            if blk.shape[0] != blk.shape[1]:
                return False
            if not np.allclose(blk.conj().T @ blk, np.eye(blk.shape[0]), atol=tol, rtol=0.0):
                return False
    return True

