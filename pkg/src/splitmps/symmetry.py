"""Non-onsite symmetries of split-index states.

Symmetries here are products of diagonal two-site gates around the ring,
optionally followed by an onsite permutation. On tensors such a symmetry acts
as ``B[i][j] -> phases[i, j] * B[perm[i]][perm[j]]``; on states it multiplies
each amplitude by the product of bond phases after relabelling every site.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from . import _contract
from .errors import (
    InvalidGeometry,
    InvalidInput,
    NotEigenstate,
    NotInvertible,
    TooLarge,
    UnsupportedBoundary,
)
from .linalg import EPS_RANK, ComplexMatrix, StateVector, same_state, schmidt_spectrum, svd
from .pauli import X, Z, BinarySymmetryData
from .simps import Simps, simps_evaluate_obc, simps_evaluate_pbc, simps_normality, solve_gauge

UNIT_TOL = 1e-10
EIGEN_TOL = 1e-8
SNAP_TOL = 1e-6
DISCOVERY_MAX_D = 4
STRING_BUDGET = 4**5
_FOURTH_ROOTS = (1.0 + 0j, 1j, -1.0 + 0j, -1j)


@dataclass(frozen=True)
class DiagonalTwoSiteSymmetry:
    """``prod_k u_{k,k+1}`` with ``u|ij> = phases[i, j] |ij>`` plus an onsite permutation."""

    phases: NDArray[np.complex128]
    onsite_perm: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        ph = np.asarray(self.phases, dtype=np.complex128)
        if ph.ndim != 2 or ph.shape[0] != ph.shape[1]:
            raise InvalidInput(f"phase table must be square, got shape {ph.shape}")
        if not np.allclose(np.abs(ph), 1.0, atol=UNIT_TOL, rtol=0.0):
            raise InvalidInput("phases must have unit modulus")
        ph = ph.copy()
        ph.setflags(write=False)
        object.__setattr__(self, "phases", ph)
        if self.onsite_perm is not None:
            perm = tuple(int(p) for p in self.onsite_perm)
            if sorted(perm) != list(range(ph.shape[0])):
                raise InvalidInput(f"{perm} is not a permutation of 0..{ph.shape[0] - 1}")
            if perm == tuple(range(ph.shape[0])):
                perm = None
            object.__setattr__(self, "onsite_perm", perm)

    @property
    def d(self) -> int:
        return int(self.phases.shape[0])

    @property
    def perm(self) -> tuple[int, ...]:
        return self.onsite_perm if self.onsite_perm is not None else tuple(range(self.d))

    @classmethod
    def from_signs(cls, bits: ArrayLike, onsite_perm: tuple[int, ...] | None = None) -> DiagonalTwoSiteSymmetry:
        """Phases ``(-1)**bits[i, j]``."""
        b = np.asarray(bits, dtype=np.int64) % 2
        return cls(1.0 - 2.0 * b, onsite_perm)

    def sign_bits(self) -> NDArray[np.int8] | None:
        """The 0/1 table when every phase is +-1, else ``None``."""
        ph = self.phases
        if not np.allclose(ph.imag, 0.0, atol=UNIT_TOL) or not np.allclose(np.abs(ph.real), 1.0, atol=UNIT_TOL):
            return None
        return (ph.real < 0).astype(np.int8)

    def compose(self, other: DiagonalTwoSiteSymmetry) -> DiagonalTwoSiteSymmetry:
        """Tensor action of ``self`` after ``other``."""
        if self.onsite_perm is None and other.onsite_perm is None:
            return DiagonalTwoSiteSymmetry(self.phases * other.phases)
        p = np.array(self.perm)
        q = np.array(other.perm)
        phases = self.phases * other.phases[np.ix_(p, p)]
        return DiagonalTwoSiteSymmetry(phases, tuple(int(x) for x in q[p]))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DiagonalTwoSiteSymmetry):
            return NotImplemented
        return self.perm == other.perm and bool(
            np.allclose(self.phases, other.phases, atol=UNIT_TOL, rtol=0.0)
        )

    def __hash__(self) -> int:
        return hash((self.perm, np.round(self.phases, 8).tobytes()))


@dataclass(frozen=True)
class CocycleData:
    """Finite group with a three-index phase table ``omega[g, k, m]``."""

    mult_table: NDArray[np.int64]
    omega: NDArray[np.complex128]

    def __post_init__(self) -> None:
        mt = np.asarray(self.mult_table, dtype=np.int64)
        n = mt.shape[0] if mt.ndim == 2 else 0
        if mt.shape != (n, n) or n == 0:
            raise InvalidInput("multiplication table must be a non-empty square array")
        if mt.min() < 0 or mt.max() >= n:
            raise InvalidInput("multiplication table entries out of range")
        for row in itertools.chain(mt, mt.T):
            if len(set(row.tolist())) != n:
                raise InvalidInput("multiplication table is not a Latin square")
        if not _associative(mt):
            raise InvalidInput("multiplication is not associative")
        if _identity(mt) is None:
            raise InvalidInput("group has no identity element")
        om = np.asarray(self.omega, dtype=np.complex128)
        if om.shape != (n, n, n):
            raise InvalidInput(f"omega must have shape {(n, n, n)}, got {om.shape}")
        if not np.allclose(np.abs(om), 1.0, atol=UNIT_TOL, rtol=0.0):
            raise InvalidInput("omega entries must have unit modulus")
        mt.setflags(write=False)
        om = om.copy()
        om.setflags(write=False)
        object.__setattr__(self, "mult_table", mt)
        object.__setattr__(self, "omega", om)

    @property
    def group_order(self) -> int:
        return int(self.mult_table.shape[0])

    @property
    def identity(self) -> int:
        e = _identity(self.mult_table)
        assert e is not None
        return e

    def inverse(self, g: int) -> int:
        return int(np.flatnonzero(self.mult_table[g] == self.identity)[0])


def _identity(mt: NDArray[np.int64]) -> int | None:
    n = mt.shape[0]
    for e in range(n):
        if np.array_equal(mt[e], np.arange(n)) and np.array_equal(mt[:, e], np.arange(n)):
            return e
    return None


def _associative(mt: NDArray[np.int64]) -> bool:
    # (gh)k == g(hk) for all triples
    return bool(np.array_equal(mt[mt, :], mt[:, mt]))


def czx_cocycle() -> CocycleData:
    """Z2 data with ``omega(1, k, m) = (-1)**(m + m k)`` and trivial ``omega(0, ., .)``."""
    om = np.ones((2, 2, 2), dtype=np.complex128)
    for k, m in itertools.product(range(2), repeat=2):
        om[1, k, m] = (-1) ** (m + m * k)
    return CocycleData(np.array([[0, 1], [1, 0]]), om)


def czx_symmetry() -> DiagonalTwoSiteSymmetry:
    """Bit flip on every site with bond phases ``(-1)**(i + i j)``."""
    i, j = np.indices((2, 2))
    return DiagonalTwoSiteSymmetry.from_signs(i + i * j, (1, 0))


def cocycle_symmetry(c: CocycleData, g: int) -> DiagonalTwoSiteSymmetry:
    """Left multiplication by ``g`` on every site after the phases ``omega(g, k, k^-1 h)``.

    Relabelled to the tensor convention ``phases[h', k'] * B[perm[h']][perm[k']]``
    with ``perm[h'] = g^-1 h'``.
    """
    n = c.group_order
    if not 0 <= int(g) < n:
        raise InvalidInput(f"group element {g} out of range 0..{n - 1}")
    mt = c.mult_table
    g_inv = c.inverse(int(g))
    perm = tuple(int(mt[g_inv, h]) for h in range(n))
    phases = np.empty((n, n), dtype=np.complex128)
    for hp, kp in itertools.product(range(n), repeat=2):
        h, k = perm[hp], perm[kp]
        phases[hp, kp] = c.omega[g, k, mt[c.inverse(k), h]]
    return DiagonalTwoSiteSymmetry(phases, perm)


def build_psi_ab(data: BinarySymmetryData) -> Simps:
    """Tensors ``X**a[i, j] @ Z**b[i, j]``."""
    return Simps(
        [
            [data.pauli(i, j).to_matrix() for j in range(data.d)]
            for i in range(data.d)
        ]
    )


def as_psi_ab(s: Simps, atol: float = 1e-12) -> BinarySymmetryData | None:
    """Recover ``(a, b)`` when every tensor is ``X**a Z**b`` up to a unit-modulus factor, else ``None``."""
    if s.uniform_chi != 2:
        return None
    a = np.zeros((s.d, s.d), dtype=np.int8)
    b = np.zeros((s.d, s.d), dtype=np.int8)
    paulis = {(x, z): np.linalg.matrix_power(X, x) @ np.linalg.matrix_power(Z, z) for x in (0, 1) for z in (0, 1)}
    for i, j in itertools.product(range(s.d), repeat=2):
        for (x, z), m in paulis.items():
            blk = s[i, j]
            phase = np.vdot(m, blk) / 2
            if abs(abs(phase) - 1.0) <= 1e-9 and np.allclose(blk, phase * m, atol=atol, rtol=0.0):
                a[i, j], b[i, j] = x, z
                break
        else:
            return None
    return BinarySymmetryData(a, b)


def _check_dims(s: Simps, u: DiagonalTwoSiteSymmetry) -> None:
    if s.d != u.d:
        raise InvalidInput(f"symmetry acts on d={u.d}, tensor has d={s.d}")


def apply_diagonal_symmetry(s: Simps, u: DiagonalTwoSiteSymmetry) -> Simps:
    """``B[i][j] -> phases[i, j] * B[perm[i]][perm[j]]``."""
    _check_dims(s, u)
    p = u.perm
    return Simps([[u.phases[i, j] * s[p[i], p[j]] for j in range(s.d)] for i in range(s.d)])


def ring_phase_table(phases: ArrayLike, n_sites: int, cyclic: bool = True) -> NDArray[np.complex128]:
    """``prod_k phases[i_k, i_{k+1}]`` as an array with one axis per site."""
    ph = np.asarray(phases, dtype=np.complex128)
    d = ph.shape[0]
    out = np.ones((d,) * n_sites, dtype=np.complex128)
    bonds = n_sites if cyclic else n_sites - 1
    for k in range(bonds):
        k2 = (k + 1) % n_sites
        shape = [1] * n_sites
        if k2 == k:
            out = out * np.diagonal(ph)
            continue
        shape[k] = d
        shape[k2] = d
        local = ph if k < k2 else ph.T
        out = out * local.reshape(shape)
    return out


def apply_global_symmetry(psi: StateVector, u: DiagonalTwoSiteSymmetry) -> StateVector:
    """Ring action ``psi'(i) = prod_k phases[i_k, i_{k+1}] * psi(perm[i_1], ..., perm[i_N])``."""
    dims = set(psi.site_dims)
    if dims != {u.d}:
        raise InvalidInput(f"state site dimensions {psi.site_dims} do not match d={u.d}")
    t = psi.tensor()
    if u.onsite_perm is not None:
        perm = np.array(u.perm)
        for k in range(psi.n_sites):
            t = np.take(t, perm, axis=k)
    t = t * ring_phase_table(u.phases, psi.n_sites)
    return StateVector(psi.site_dims, t.reshape(-1))


def check_symmetry(s: Simps, u: DiagonalTwoSiteSymmetry, max_n: int = 6, gauge_check: bool = True) -> bool:
    """Whether the global operator fixes the ring state for ``N = 3 .. max_n``.

    Zero states are skipped. For a normal tensor the answer is also required to
    agree with a successful gauge solve between the transformed and original
    tensors.
    """
    _check_dims(s, u)
    for n in range(3, max_n + 1):
        psi = simps_evaluate_pbc(s, n)
        if psi.is_zero:
            continue
        if not same_state(apply_global_symmetry(psi, u), psi):
            return False
    if gauge_check:
        try:
            moved = apply_diagonal_symmetry(s, u)
        except InvalidInput:
            return True
        if moved.chi == s.chi and simps_normality(s).is_normal:
            try:
                solve_gauge(moved, s)
            except Exception:
                return False
    return True


def _bond_counts(configs: NDArray[np.int64], d: int) -> NDArray[np.int64]:
    """Per configuration, the number of cyclic bonds carrying each pair ``(i, j)``."""
    n = configs.shape[1]
    pairs = configs * d + np.roll(configs, -1, axis=1)
    counts = np.zeros((configs.shape[0], d * d), dtype=np.int64)
    for k in range(n):
        np.add.at(counts, (np.arange(configs.shape[0]), pairs[:, k]), 1)
    return counts


def _gf2_row_basis(rows: NDArray[np.int8]) -> NDArray[np.int8]:
    mat = rows.copy() % 2
    basis = []
    col = 0
    ncols = mat.shape[1]
    while mat.shape[0] and col < ncols:
        piv = np.flatnonzero(mat[:, col])
        if piv.size == 0:
            col += 1
            continue
        row = mat[piv[0]].copy()
        basis.append(row)
        mat = np.delete(mat, piv[0], axis=0)
        hit = mat[:, col] == 1
        mat[hit] ^= row
        col += 1
    return np.array(basis, dtype=np.int8).reshape(-1, ncols)


def discover_z2_symmetries(s: Simps, max_n: int = 6) -> list[DiagonalTwoSiteSymmetry]:
    """All sign patterns ``phases[i, j] = +-1`` that are symmetries for ``N = 3 .. max_n``.

    A pattern fixes the state exactly when the product of bond signs is the
    same on every configuration in the support, which is a linear condition
    over GF(2) on the pattern bits. Candidates are found by solving that
    condition for all ``2**(d*d)`` patterns at once, then confirmed with
    :func:`check_symmetry`.

    Raises:
        TooLarge: ``d > 4``.
    """
    d = s.d
    if d > DISCOVERY_MAX_D:
        raise TooLarge(f"pattern search needs d <= {DISCOVERY_MAX_D}, got d={d}")
    diffs = []
    for n in range(3, max_n + 1):
        psi = simps_evaluate_pbc(s, n)
        amps = np.abs(psi.amplitudes)
        if amps.max(initial=0.0) == 0.0:
            continue
        support = np.flatnonzero(amps > EPS_RANK * amps.max())
        configs = np.array(np.unravel_index(support, (d,) * n)).T
        counts = _bond_counts(configs, d)
        diffs.append(((counts - counts[0]) % 2).astype(np.int8))
    constraints = _gf2_row_basis(np.vstack(diffs)) if diffs else np.zeros((0, d * d), np.int8)
    patterns = ((np.arange(2 ** (d * d))[:, None] >> np.arange(d * d)[::-1]) & 1).astype(np.int64)
    ok = ~np.any((patterns @ constraints.T.astype(np.int64)) % 2, axis=1)
    found = []
    for bits in patterns[ok]:
        u = DiagonalTwoSiteSymmetry.from_signs(bits.reshape(d, d))
        if check_symmetry(s, u, max_n, gauge_check=False):
            found.append(u)
    return found


def _split_blocks(s: Simps) -> NDArray[np.complex128]:
    if s.uniform_chi is None:
        raise UnsupportedBoundary(f"virtual insertion needs uniform chi, got {s.chi}")
    return s.padded()


def _window_products(
    table: NDArray[np.complex128], window: int, p: NDArray | None, site: int
) -> NDArray[np.complex128]:
    """Products over ``window + 2`` sites with ``p[i_site]`` inserted at the virtual index of ``site``.

    Returns shape ``(d**(window + 2), chi, chi)``. ``p`` is a stack of ``d``
    matrices indexed by the physical value at ``site``; site 0 inserts to the
    left of the first tensor and the last site to the right of the last one.
    """
    d, _, chi, _ = table.shape
    n = window + 2
    prod = np.broadcast_to(np.eye(chi, dtype=np.complex128), (d, chi, chi)).reshape(1, d, chi, chi)
    if p is not None and site == 0:
        prod = np.einsum("kab,pkbc->pkac", p, prod)
    for k in range(1, n):
        prod = np.einsum("pkab,kqbc->pkqac", prod, table).reshape(-1, d, chi, chi)
        if p is not None and site == k:
            prod = np.einsum("pkab,kbc->pkac", prod, p)
    return prod.reshape(-1, chi, chi)


def _boundary_values(n_cfg: int, d: int, window: int) -> tuple[NDArray[np.int64], NDArray[np.int64]]:
    idx = np.arange(n_cfg)
    return idx // d ** (window + 1), idx % d


def _full_map(prods: NDArray[np.complex128], d: int, window: int) -> NDArray[np.complex128]:
    """Columns ``(s1, s2, X)`` to window amplitudes ``Tr(prod @ X)``."""
    chi = prods.shape[1]
    n_cfg = prods.shape[0]
    s1, s2 = _boundary_values(n_cfg, d, window)
    out = np.zeros((n_cfg, d, d, chi, chi), dtype=np.complex128)
    # Tr(prod @ X) = sum_ab prod[a, b] X[b, a]
    out[np.arange(n_cfg), s1, s2] = prods.transpose(0, 2, 1)
    return out.reshape(n_cfg, -1)


def _ring_map(s: Simps, prods: NDArray[np.complex128], window: int) -> NDArray[np.complex128]:
    """Columns ``Y`` (``D x D``) to ``Tr(prod @ u[s2] @ Y @ w[s1])``.

    On a ring every environment of the window has the form ``u[s2] Y w[s1]``
    with ``u``, ``w`` the factors of the split-index block matrix, so this is
    the window map restricted to environments that can actually occur.
    """
    res = svd(s.block_matrix())
    dim = res.numerical_rank
    chi, d = s.uniform_chi, s.d
    u = res.u[:, :dim].reshape(d, chi, dim)
    w = (res.singular_values[:dim, None] * res.v[:, :dim].conj().T).reshape(dim, d, chi).transpose(1, 0, 2)
    s1, s2 = _boundary_values(prods.shape[0], d, window)
    m = np.einsum("pab,pbc,pcd->pad", w[s1], prods, u[s2])
    return m.transpose(0, 2, 1).reshape(prods.shape[0], -1)


ENVIRONMENTS = ("full", "ring")


def _window_map(
    s: Simps, window: int, insertion: tuple[int, NDArray] | None, environment: str
) -> NDArray[np.complex128]:
    table = _split_blocks(s)
    site, p = insertion if insertion is not None else (0, None)
    prods = _window_products(table, window, p, site)
    if environment == "full":
        return _full_map(prods, s.d, window)
    if environment == "ring":
        return _ring_map(s, prods, window)
    raise InvalidInput(f"environment must be one of {ENVIRONMENTS}, got {environment!r}")


def _as_stack(p: ArrayLike, d: int, chi: int) -> NDArray[np.complex128]:
    arr = np.asarray(p, dtype=np.complex128)
    if arr.shape == (chi, chi):
        return np.broadcast_to(arr, (d, chi, chi)).copy()
    if arr.shape == (d, chi, chi):
        return arr
    raise InvalidInput(f"insertion must have shape {(chi, chi)} or {(d, chi, chi)}, got {arr.shape}")


def virtual_rewrite_operator(
    s: Simps,
    window: int,
    before: tuple[int, ArrayLike] | None,
    after: tuple[int, ArrayLike] | None,
    environment: str = "full",
) -> ComplexMatrix:
    """Physical operator on ``window + 2`` sites that turns one virtual insertion into another.

    ``before`` and ``after`` are ``(site, p)`` pairs or ``None`` for no
    insertion. The operator is ``M_after @ pinv(M_before)`` where ``M`` sends
    the environment of the window to its amplitudes. With ``environment="full"``
    every boundary matrix is allowed; ``"ring"`` restricts to environments
    produced by the rest of a ring, which needs shorter windows.

    Raises:
        NotInvertible: ``M_after`` does not vanish on the kernel of ``M_before``.
    """
    if window < 0:
        raise InvalidInput("window must be non-negative")
    chi = s.uniform_chi
    if chi is None:
        raise UnsupportedBoundary(f"virtual insertion needs uniform chi, got {s.chi}")

    def norm_ins(ins):
        if ins is None:
            return None
        site, p = ins
        if not 0 <= int(site) <= window + 1:
            raise InvalidInput(f"site {site} outside the window 0..{window + 1}")
        return int(site), _as_stack(p, s.d, chi)

    m_before = _window_map(s, window, norm_ins(before), environment)
    m_after = _window_map(s, window, norm_ins(after), environment)
    res = svd(m_before)
    r = res.numerical_rank
    pinv = (res.v[:, :r] / res.singular_values[:r]) @ res.u[:, :r].conj().T
    op = m_after @ pinv
    scale = max(float(np.abs(m_after).max(initial=0.0)), 1.0)
    resid = float(np.abs(op @ m_before - m_after).max(initial=0.0))
    if resid > 1e-9 * scale:
        raise NotInvertible(
            f"window of {window + 2} sites cannot realise the insertion (residual {resid:.3g})"
        )
    return op


def virtual_insertion_operator(
    s: Simps, p: ArrayLike, window: int, site: int | None = None, environment: str = "full"
) -> ComplexMatrix:
    """Physical operator on ``window + 2`` sites that inserts ``p`` into the virtual chain.

    The insertion sits at the virtual index of window site ``site`` (default the
    centre, ``(window + 1) // 2``). ``p`` may be one ``chi x chi`` matrix or one
    matrix per physical value of that site.

    Raises:
        NotInvertible: the window map is not injective at this length.
    """
    site = (window + 1) // 2 if site is None else int(site)
    return virtual_rewrite_operator(s, window, None, (site, p), environment)


@dataclass(frozen=True)
class StringObservable:
    """Endpoint operators around a string of two-site gates on bonds ``left .. right - 1``.

    ``left_window`` and ``right_window`` list the (unreduced) sites each
    endpoint acts on, in order.
    """

    left_site: int
    right_site: int
    bulk: DiagonalTwoSiteSymmetry
    left_op: ComplexMatrix
    left_window: tuple[int, ...]
    right_op: ComplexMatrix
    right_window: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.right_site <= self.left_site:
            raise InvalidGeometry("the string needs right_site > left_site")
        if self.bulk.onsite_perm is not None:
            raise InvalidInput("string operators need a purely diagonal bulk symmetry")
        for op, win in ((self.left_op, self.left_window), (self.right_op, self.right_window)):
            dim = self.bulk.d ** len(win)
            if np.shape(op) != (dim, dim):
                raise InvalidInput(f"endpoint operator shape {np.shape(op)} does not match window {win}")

    @property
    def span(self) -> int:
        return max(self.right_window) - min(self.left_window) + 1


def _try(fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except NotInvertible:
        return None


def string_observable(
    s: Simps,
    u: DiagonalTwoSiteSymmetry,
    left_site: int,
    right_site: int,
    p: ArrayLike | None = None,
    max_window: int | None = None,
    environment: str = "ring",
) -> StringObservable:
    """String of ``u`` with endpoints that cancel its virtual action.

    ``p`` is the virtual representation, ``phases[i, j] B[i][j] = p_i B[i][j] p_j^-1``,
    solved for with :func:`solve_gauge` when omitted. The string leaves ``p`` at
    ``left_site`` and ``p^-1`` at ``right_site``. The right endpoint, applied
    first, inserts ``p`` at ``right_site``; the left endpoint, applied last,
    removes ``p`` from ``left_site``. Among all window sizes and offsets that
    realise these two rewrites, the pair of disjoint windows with the smallest
    total span is used.

    Raises:
        NotInvertible: no windows up to ``max_window`` work.
        InvalidGeometry: ``right_site <= left_site``.
    """
    _check_dims(s, u)
    sep = right_site - left_site
    if sep < 1:
        raise InvalidGeometry("the string needs right_site > left_site")
    chi = s.uniform_chi
    if chi is None:
        raise UnsupportedBoundary("string endpoints need uniform chi")
    if p is None:
        pst = np.stack(solve_gauge(apply_diagonal_symmetry(s, u), s).gauges)
    else:
        pst = _as_stack(p, s.d, chi)
    if max_window is None:
        max_window = 2 * max(s.chi) ** 2 + 2
    # keep window maps within the dense budget
    while max_window > 0 and s.d ** (max_window + 2) > STRING_BUDGET:
        max_window -= 1

    def lefts(w):
        return [
            (t, op)
            for t in range(w + 2)
            if (op := _try(virtual_rewrite_operator, s, w, (t, pst), None, environment)) is not None
        ]

    def rights(w):
        return [
            (h, op)
            for h in range(w + 2)
            if (op := _try(virtual_rewrite_operator, s, w, None, (h, pst), environment)) is not None
        ]

    left_c: dict[int, list] = {}
    right_c: dict[int, list] = {}
    best = None
    # windows are disjoint, so the span is at least the sum of their sizes
    for total in range(2 * max_window + 1):
        if best is not None and total + 4 >= best[0][0]:
            break
        for w_left in range(max(0, total - max_window), min(total, max_window) + 1):
            w_right = total - w_left
            if w_left not in left_c:
                left_c[w_left] = lefts(w_left)
            if not left_c[w_left]:
                continue
            if w_right not in right_c:
                right_c[w_right] = rights(w_right)
            for (t, lop), (h, rop) in itertools.product(left_c[w_left], right_c[w_right]):
                # left window ends at left + w_left + 1 - t, right one starts at right - h
                if w_left + 1 - t + h >= sep:
                    continue
                span = sep + t - h + w_right + 2
                key = (span, total, w_left, t, h)
                if best is None or key < best[0]:
                    best = (key, w_left, t, lop, w_right, h, rop)
    if best is None:
        raise NotInvertible(f"no endpoint windows up to {max_window + 2} sites realise the string")
    _, w_left, t, lop, w_right, h, rop = best
    left_win = tuple(range(left_site - t, left_site - t + w_left + 2))
    right_win = tuple(range(right_site - h, right_site - h + w_right + 2))
    return StringObservable(left_site, right_site, u, lop, left_win, rop, right_win)


def apply_local(state: StateVector, op: ArrayLike, sites: tuple[int, ...]) -> StateVector:
    """Apply ``op`` to the listed sites (indices taken modulo the chain length)."""
    n = state.n_sites
    sites = tuple(s % n for s in sites)
    if len(set(sites)) != len(sites):
        raise InvalidGeometry(f"window {sites} wraps onto itself on {n} sites")
    dims = [state.site_dims[s] for s in sites]
    k = len(sites)
    opt = np.asarray(op, dtype=np.complex128).reshape(dims + dims)
    t = np.tensordot(opt, state.tensor(), axes=(list(range(k, 2 * k)), list(sites)))
    t = np.moveaxis(t, list(range(k)), list(sites))
    return StateVector(state.site_dims, t.reshape(-1))


def string_order_expectation(s: Simps, obs: StringObservable, n_sites: int) -> complex:
    """``<psi|O_left (prod u) O_right|psi>`` on the normalized ring state.

    Raises:
        InvalidGeometry: the endpoint windows overlap or do not fit the ring.
    """
    left = {x % n_sites for x in obs.left_window}
    right = {x % n_sites for x in obs.right_window}
    if len(left) != len(obs.left_window) or len(right) != len(obs.right_window):
        raise InvalidGeometry("an endpoint window wraps around the ring")
    if left & right:
        raise InvalidGeometry(f"endpoint windows overlap on sites {sorted(left & right)}")
    if obs.right_site - obs.left_site >= n_sites:
        raise InvalidGeometry("string longer than the ring")
    psi = simps_evaluate_pbc(s, n_sites).normalized()
    phi = apply_local(psi, obs.right_op, obs.right_window)
    t = phi.tensor()
    d = s.d
    for k in range(obs.left_site, obs.right_site):
        a, b = k % n_sites, (k + 1) % n_sites
        shape = [1] * n_sites
        shape[a] = d
        shape[b] = d
        local = obs.bulk.phases if a < b else obs.bulk.phases.T
        t = t * local.reshape(shape)
    phi = StateVector(psi.site_dims, t.reshape(-1))
    phi = apply_local(phi, obs.left_op, obs.left_window)
    return complex(np.vdot(psi.amplitudes, phi.amplitudes))


def bare_string_expectation(s: Simps, u: DiagonalTwoSiteSymmetry, left: int, right: int, n_sites: int) -> complex:
    """The string of ``u`` on bonds ``left .. right - 1`` with identity endpoints."""
    psi = simps_evaluate_pbc(s, n_sites).normalized()
    t = psi.tensor()
    for k in range(left, right):
        a, b = k % n_sites, (k + 1) % n_sites
        shape = [1] * n_sites
        shape[a] = s.d
        shape[b] = s.d
        t = t * (u.phases if a < b else u.phases.T).reshape(shape)
    return complex(np.vdot(psi.amplitudes, t.reshape(-1)))


class FluxState:
    """Twisted ring states ``Tr(V[i1] B[i1][i2] ... B[iN][i1])`` for any ``N``."""

    def __init__(self, s: Simps, v: ArrayLike) -> None:
        chi = s.uniform_chi
        if chi is None:
            raise InvalidInput(f"flux insertion needs uniform chi, got {s.chi}")
        arr = np.asarray(v, dtype=np.complex128)
        if arr.shape not in ((chi, chi), (s.d, chi, chi)):
            raise InvalidInput(f"flux must have shape {(chi, chi)} or {(s.d, chi, chi)}, got {arr.shape}")
        self.simps = s
        self.flux = arr

    def evaluate(self, n_sites: int) -> StateVector:
        if n_sites < 2:
            raise InvalidInput("a twisted ring needs at least 2 sites")
        amps = _contract.split_pbc(self.simps.padded(), n_sites, twist=self.flux)
        return StateVector((self.simps.d,) * n_sites, amps)


def insert_flux(s: Simps, v: ArrayLike) -> FluxState:
    return FluxState(s, v)


def symmetry_charge(psi: StateVector, u: DiagonalTwoSiteSymmetry, tol: float = EIGEN_TOL) -> complex:
    """Eigenvalue of the global symmetry on ``psi``.

    Raises:
        NotEigenstate: ``psi`` is zero or not an eigenvector within ``tol``.
    """
    if psi.is_zero:
        raise NotEigenstate("the zero vector has no charge")
    phi = apply_global_symmetry(psi, u).amplitudes
    a = psi.amplitudes
    lam = np.vdot(a, phi) / np.vdot(a, a)
    resid = np.linalg.norm(phi - lam * a) / np.linalg.norm(a)
    if resid > tol:
        raise NotEigenstate(f"state is not an eigenvector (residual {resid:.3g})")
    return complex(lam)


def snap_charge(charge: complex) -> tuple[complex, float]:
    """Nearest fourth root of unity and its distance; unsnapped if farther than ``1e-6``."""
    dists = [abs(charge - r) for r in _FOURTH_ROOTS]
    k = int(np.argmin(dists))
    if dists[k] < SNAP_TOL:
        return _FOURTH_ROOTS[k], float(dists[k])
    return complex(charge), float(dists[k])


def ab_symmetries(data: BinarySymmetryData) -> tuple[DiagonalTwoSiteSymmetry, DiagonalTwoSiteSymmetry]:
    """``(U^a, U^b)`` with bond signs ``(-1)**a[i, j]`` and ``(-1)**b[i, j]``."""
    return DiagonalTwoSiteSymmetry.from_signs(data.a), DiagonalTwoSiteSymmetry.from_signs(data.b)


def ab_virtual_reps() -> tuple[ComplexMatrix, ComplexMatrix]:
    """Virtual counterparts of ``(U^a, U^b)`` on the ``X**a Z**b`` family: ``Z`` and ``X``."""
    return Z.copy(), X.copy()


def _open_parities(bits: NDArray[np.int8], n_sites: int) -> NDArray[np.int64]:
    d = bits.shape[0]
    configs = np.array(list(itertools.product(range(d), repeat=n_sites)), dtype=np.int64)
    if n_sites < 2:
        return np.zeros(len(configs), dtype=np.int64)
    return bits[configs[:, :-1], configs[:, 1:]].sum(axis=1) % 2


def check_faithful(data: BinarySymmetryData, n_sites: int) -> bool:
    """Whether none of ``U^a``, ``U^b``, ``U^a U^b`` is a multiple of the identity.

    Evaluated on an open chain of ``n_sites`` spins by enumerating every index
    string.
    """
    if n_sites < 2:
        raise InvalidInput("n_sites must be at least 2")
    if data.d**n_sites > 2**20:
        raise TooLarge(f"{data.d}**{n_sites} index strings exceed the enumeration budget")
    alpha = _open_parities(data.a, n_sites)
    beta = _open_parities(data.b, n_sites)
    return all(np.unique(x).size > 1 for x in (alpha, beta, (alpha + beta) % 2))


def gamma_surjective(data: BinarySymmetryData, length: int) -> bool:
    """Whether every ``(s1, s2)`` sees all four parity pairs over inner strings of ``length``."""
    if length < 0:
        raise InvalidInput("length must be non-negative")
    d = data.d
    inner = list(itertools.product(range(d), repeat=length))
    for s1, s2 in itertools.product(range(d), repeat=2):
        seen = set()
        for mid in inner:
            path = (s1, *mid, s2)
            alpha = sum(int(data.a[x, y]) for x, y in zip(path, path[1:])) % 2
            beta = sum(int(data.b[x, y]) for x, y in zip(path, path[1:])) % 2
            seen.add((alpha, beta))
        if len(seen) < 4:
            return False
    return True


def projected_spectrum(s: Simps, n_sites: int, site: int, value: int) -> list[float]:
    """Schmidt spectrum of the open chain after fixing ``site`` to ``value``, cut across that site.

    The open chain keeps its two ``chi``-dimensional boundary spins; ``site``
    counts bulk sites from 0 and must not be the first or last one.
    """
    if not 0 < site < n_sites - 1:
        raise InvalidGeometry(f"projected site must be interior, got {site} of {n_sites}")
    if not 0 <= value < s.d:
        raise InvalidInput(f"value {value} out of range 0..{s.d - 1}")
    t = simps_evaluate_obc(s, n_sites).tensor()
    # axis 0 is the left boundary spin
    proj = np.take(t, value, axis=site + 1)
    psi = StateVector(proj.shape, proj.reshape(-1))
    if psi.is_zero:
        raise InvalidInput(f"projection of site {site} onto {value} annihilates the state")
    return schmidt_spectrum(psi, site + 1)


def is_twofold_degenerate(values: list[float], tol: float = 1e-9) -> bool:
    """Whether sorted eigenvalues pair up into equal neighbours."""
    vals = sorted(values, reverse=True)
    if len(vals) % 2:
        return False
    return all(abs(vals[k] - vals[k + 1]) <= tol for k in range(0, len(vals), 2))
