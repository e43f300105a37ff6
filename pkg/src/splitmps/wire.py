"""Bulk measurements on open split-index chains.

Measuring every bulk spin of the open chain in the computational basis with
outcomes ``s_1 .. s_N`` leaves the two boundary spins in the state with
amplitudes ``<alpha|M|beta>``, ``M = B[s1][s2] ... B[s_{N-1}][s_N]``. The
helpers below compute that state, its Born weight, the byproduct operator and
its classical decoding, and simulate teleportation through the chain.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from . import _contract
from .errors import InvalidInput, NotAWire, NotInjective, TooLarge, UnsupportedBoundary
from .linalg import EPS_RANK, ComplexMatrix, StateVector, check_budget, entropy_bits, fidelity
from .pauli import BinarySymmetryData, PauliString
from .simps import Simps, simps_normality

ENUMERATION_BUDGET = 2**20


@dataclass(frozen=True)
class MeasurementRecord:
    """Computational-basis outcomes, one per measured site."""

    outcomes: tuple[int, ...]

    def __post_init__(self) -> None:
        out = tuple(int(x) for x in self.outcomes)
        if any(x < 0 for x in out):
            raise InvalidInput("outcomes must be non-negative")
        object.__setattr__(self, "outcomes", out)

    @classmethod
    def from_string(cls, text: str) -> MeasurementRecord:
        """Parse ``"0110"`` or ``"0,1,1,0"``."""
        text = text.strip()
        parts = text.split(",") if "," in text else list(text)
        try:
            return cls(tuple(int(p) for p in parts if p.strip()))
        except ValueError as exc:
            raise InvalidInput(f"cannot parse outcome string {text!r}") from exc

    def __len__(self) -> int:
        return len(self.outcomes)

    def __str__(self) -> str:
        if all(x < 10 for x in self.outcomes):
            return "".join(str(x) for x in self.outcomes)
        return ",".join(str(x) for x in self.outcomes)


@dataclass(frozen=True)
class WireResult:
    """Boundary state after a bulk measurement.

    ``boundary_state`` is ``None`` when the outcome has zero weight.
    ``byproduct`` is a :class:`PauliString` (without phase) when ``M`` is
    proportional to a Pauli, otherwise ``M`` rescaled to Frobenius norm
    ``sqrt(chi)``.
    """

    outcomes: MeasurementRecord
    boundary_state: StateVector | None
    byproduct: PauliString | ComplexMatrix | None
    probability: float
    decoded_bits: tuple[int, int] | None

    @property
    def defined(self) -> bool:
        return self.boundary_state is not None

    def byproduct_matrix(self) -> ComplexMatrix | None:
        if isinstance(self.byproduct, PauliString):
            return self.byproduct.to_matrix()
        return self.byproduct

    def entanglement_bits(self) -> float:
        if self.boundary_state is None:
            raise InvalidInput("zero-weight outcome has no boundary state")
        chi = self.boundary_state.site_dims[0]
        sv = np.linalg.svd(self.boundary_state.amplitudes.reshape(chi, -1), compute_uv=False)
        return entropy_bits(sv**2)


def _uniform(s: Simps) -> int:
    chi = s.uniform_chi
    if chi is None:
        raise UnsupportedBoundary(f"open-chain measurements need uniform chi, got {s.chi}")
    return chi


def _check_record(s: Simps, rec: MeasurementRecord) -> None:
    if len(rec) < 2:
        raise InvalidInput("need at least two measured sites")
    if max(rec.outcomes) >= s.d:
        raise InvalidInput(f"outcomes must lie in 0..{s.d - 1}")


def bulk_product(s: Simps, rec: MeasurementRecord) -> ComplexMatrix:
    """``B[s1][s2] @ B[s2][s3] @ ... @ B[s_{N-1}][s_N]``."""
    _check_record(s, rec)
    out = s[rec.outcomes[0], rec.outcomes[1]]
    for a, b in zip(rec.outcomes[1:], rec.outcomes[2:]):
        out = out @ s[a, b]
    return out


def partition_function(s: Simps, n_sites: int) -> float:
    """``sum over outcome strings of ||M||_F**2``, by a transfer recursion."""
    chi = _uniform(s)
    envs = [np.eye(chi, dtype=np.complex128) for _ in range(s.d)]
    for _ in range(n_sites - 1):
        envs = [
            sum(s[j, jp].conj().T @ envs[j] @ s[j, jp] for j in range(s.d))
            for jp in range(s.d)
        ]
    return float(sum(np.trace(e).real for e in envs))


def pauli_pattern(s: Simps, atol: float = 1e-10) -> BinarySymmetryData | None:
    """Bits ``(a, b)`` when every tensor is a unit-modulus multiple of ``X**a Z**b``."""
    if s.uniform_chi != 2:
        return None
    a = np.zeros((s.d, s.d), dtype=np.int8)
    b = np.zeros((s.d, s.d), dtype=np.int8)
    for i, j in itertools.product(range(s.d), repeat=2):
        try:
            p, c = PauliString.proportional_from_matrix(s[i, j], atol)
        except InvalidInput:
            return None
        if abs(abs(c) - 1.0) > atol:
            return None
        a[i, j], b[i, j] = p.x_exp, p.z_exp
    return BinarySymmetryData(a, b)


def decode_byproduct(data: BinarySymmetryData, rec: MeasurementRecord) -> PauliString:
    """Classical byproduct ``X**x Z**z`` with ``x = sum a[s_k, s_k+1]``, ``z = sum b[s_k, s_k+1]`` mod 2."""
    if rec.outcomes and max(rec.outcomes) >= data.d:
        raise InvalidInput(f"outcomes must lie in 0..{data.d - 1}")
    o = np.asarray(rec.outcomes, dtype=np.int64)
    if o.size < 2:
        return PauliString()
    x = int(data.a[o[:-1], o[1:]].sum() % 2)
    z = int(data.b[o[:-1], o[1:]].sum() % 2)
    return PauliString(x, z)


def measure_bulk(s: Simps, rec: MeasurementRecord) -> WireResult:
    """Post-measurement boundary state, Born weight and byproduct of an outcome string."""
    chi = _uniform(s)
    m = bulk_product(s, rec)
    weight = float(np.vdot(m, m).real)
    total = partition_function(s, len(rec))
    prob = weight / total if total > 0 else 0.0
    data = pauli_pattern(s)
    bits = None
    if data is not None:
        dec = decode_byproduct(data, rec)
        bits = (dec.x_exp, dec.z_exp)
    nrm = np.sqrt(weight)
    if nrm <= EPS_RANK * max(1.0, np.sqrt(total / s.d ** len(rec))):
        return WireResult(rec, None, None, 0.0, bits)
    state = StateVector((chi, chi), m.reshape(-1) / nrm)
    scaled = m * (np.sqrt(chi) / nrm)
    return WireResult(rec, state, _as_byproduct(scaled), prob, bits)


def _as_byproduct(m: ComplexMatrix) -> PauliString | ComplexMatrix:
    if m.shape == (2, 2):
        try:
            return PauliString.proportional_from_matrix(m)[0]
        except InvalidInput:
            pass
    m.setflags(write=False)
    return m


def _tensors_unitary(s: Simps, tol: float = 1e-10) -> bool:
    for row in s.tensors:
        for blk in row:
            if not np.allclose(blk.conj().T @ blk, np.eye(blk.shape[1]), atol=tol, rtol=0.0):
                return False
    return True


def teleport(s: Simps, input_state: StateVector | ArrayLike, rec: MeasurementRecord) -> tuple[StateVector, float]:
    """Send ``input_state`` from the left boundary to the right one.

    The left boundary spin is projected onto the complex conjugate of the input,
    which leaves ``M^T |input>`` on the right. The byproduct is then undone,
    using the classically decoded Pauli when the tensors are Pauli and the
    inverse of ``M^T`` otherwise.

    Warns:
        NotAWire: some tensor is not unitary; the simulation still runs.
    """
    chi = _uniform(s)
    vec = input_state.amplitudes if isinstance(input_state, StateVector) else np.asarray(input_state, dtype=np.complex128).reshape(-1)
    if vec.shape != (chi,):
        raise InvalidInput(f"input state must have dimension {chi}")
    if not _tensors_unitary(s):
        warnings.warn("tensors are not unitary; teleportation is not guaranteed", NotAWire, stacklevel=2)
    m = bulk_product(s, rec)
    out = m.T @ vec
    data = pauli_pattern(s)
    if data is not None:
        correction = decode_byproduct(data, rec).to_matrix().conj()
    else:
        correction = np.linalg.pinv(m.T)
    out = correction @ out
    nrm = np.linalg.norm(out)
    result = StateVector((chi,), out / nrm if nrm > 0 else out)
    return result, fidelity(vec, result.amplitudes)


def sample_outcomes(s: Simps, n_sites: int, seed: int) -> MeasurementRecord:
    """Draw one outcome string from the Born distribution of the open chain.

    Sites are sampled left to right using exact right environments, so the
    draw is deterministic for a given seed.
    """
    chi = _uniform(s)
    if n_sites < 2:
        raise InvalidInput("need at least two measured sites")
    rng = np.random.default_rng(seed)
    # envs[k][j]: sum over completions from site k with value j of M M^dag
    envs = [[np.eye(chi, dtype=np.complex128) for _ in range(s.d)]]
    for _ in range(n_sites - 1):
        nxt = envs[0]
        envs.insert(
            0,
            [sum(s[j, jp] @ nxt[jp] @ s[j, jp].conj().T for jp in range(s.d)) for j in range(s.d)],
        )
    weights = np.array([np.trace(e).real for e in envs[0]])
    first = int(rng.choice(s.d, p=weights / weights.sum()))
    outcomes = [first]
    left = np.eye(chi, dtype=np.complex128)
    for k in range(1, n_sites):
        cands = [left @ s[outcomes[-1], j] for j in range(s.d)]
        w = np.array([np.trace(c @ envs[k][j] @ c.conj().T).real for j, c in enumerate(cands)])
        w = np.clip(w, 0.0, None)
        nxt = int(rng.choice(s.d, p=w / w.sum()))
        outcomes.append(nxt)
        left = cands[nxt] / np.linalg.norm(cands[nxt])
    return MeasurementRecord(tuple(outcomes))


def born_probabilities(s: Simps, n_sites: int) -> NDArray[np.float64]:
    """Born weight of every outcome string, in lexicographic order."""
    _uniform(s)
    if s.d**n_sites > ENUMERATION_BUDGET:
        raise TooLarge(f"{s.d}**{n_sites} outcome strings exceed the enumeration budget")
    check_budget(s.d**n_sites)
    prods = _contract.split_products(s.padded(), n_sites)
    w = np.einsum("pab,pab->p", prods, prods.conj()).real
    return w / w.sum()


def all_records(d: int, n_sites: int) -> list[MeasurementRecord]:
    return [MeasurementRecord(t) for t in itertools.product(range(d), repeat=n_sites)]


def localizable_entanglement_profile(s: Simps, n_sites: int) -> tuple[float, float]:
    """Minimum and Born-weighted mean boundary entanglement (bits) over all outcome strings.

    Raises:
        TooLarge: more than ``2**20`` outcome strings.
    """
    chi = _uniform(s)
    if s.d**n_sites > ENUMERATION_BUDGET:
        raise TooLarge(f"{s.d}**{n_sites} outcome strings exceed the enumeration budget")
    prods = _contract.split_products(s.padded(), n_sites)
    w = np.einsum("pab,pab->p", prods, prods.conj()).real
    keep = w > EPS_RANK**2 * w.max()
    if chi == 1:
        return 0.0, 0.0
    sv = np.linalg.svd(prods[keep], compute_uv=False) ** 2
    sv = sv / sv.sum(axis=1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        ent = -np.where(sv > 0, sv * np.log2(np.where(sv > 0, sv, 1.0)), 0.0).sum(axis=1)
    probs = w[keep] / w[keep].sum()
    return float(ent.min()), float((probs * ent).sum())


@dataclass(frozen=True)
class SiteDependentMps:
    """Ring MPS with a separate tensor stack on each site, ``tensors[k]`` of shape ``(d, D, D)``."""

    tensors: tuple[NDArray[np.complex128], ...]

    def evaluate(self) -> StateVector:
        n = len(self.tensors)
        d, dim, _ = self.tensors[0].shape
        check_budget(d**n)
        prod = self.tensors[0]
        for t in self.tensors[1:]:
            prod = np.einsum("pab,ibc->piac", prod, t).reshape(-1, dim, dim)
        return StateVector((d,) * n, np.einsum("paa->p", prod))


def reduce_odd_measurements(s: Simps, odd_outcomes: list[int] | tuple[int, ...]) -> SiteDependentMps:
    """State of the even sites after measuring every odd site of the ring.

    With outcomes ``s_1, s_3, ..., s_{N-1}`` the even site between ``s`` and
    ``s'`` carries the tensors ``A[i] = B[s][i] @ B[i][s']`` (the last one wraps
    around to ``s_1``).

    Raises:
        NotInjective: the tensor is not normal at length one.
    """
    outs = [int(x) for x in odd_outcomes]
    if not outs:
        raise InvalidInput("need at least one odd outcome")
    if any(not 0 <= x < s.d for x in outs):
        raise InvalidInput(f"outcomes must lie in 0..{s.d - 1}")
    rep = simps_normality(s, search_cap=1)
    if not rep.is_normal:
        raise NotInjective("reduction needs a tensor that is normal at length one")
    chi = _uniform(s)
    sites = []
    for k, a in enumerate(outs):
        b = outs[(k + 1) % len(outs)]
        sites.append(np.stack([s[a, i] @ s[i, b] for i in range(s.d)]).reshape(s.d, chi, chi))
    return SiteDependentMps(tuple(sites))


def certify_pauli_set(tensors: NDArray[np.complex128], atol: float = 1e-10) -> dict[int, str] | None:
    """Map each physical value to its Pauli label when the set is ``{I, X, Z, XZ}`` up to phases."""
    labels = {}
    for i, m in enumerate(tensors):
        try:
            p, c = PauliString.proportional_from_matrix(m, atol)
        except InvalidInput:
            return None
        if abs(abs(c) - 1.0) > atol:
            return None
        labels[i] = p.label
    if sorted(labels.values()) != sorted(["I", "X", "Z", "XZ"]):
        return None
    return labels
