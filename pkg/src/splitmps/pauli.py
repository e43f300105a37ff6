"""Single-qubit Pauli group in normal form ``i^k X^x Z^z`` and binary pattern data."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import InvalidInput

I2 = np.eye(2, dtype=np.complex128)
X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
Y = 1j * X @ Z

_PHASES = (1.0 + 0j, 1j, -1.0 + 0j, -1j)


@dataclass(frozen=True, order=True)
class PauliString:
    """The operator ``i**phase_exp @ X**x_exp @ Z**z_exp``.

    X is always written to the left of Z, so ``Y == PauliString(1, 1, 1)``.
    """

    x_exp: int = 0
    z_exp: int = 0
    phase_exp: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "x_exp", int(self.x_exp) % 2)
        object.__setattr__(self, "z_exp", int(self.z_exp) % 2)
        object.__setattr__(self, "phase_exp", int(self.phase_exp) % 4)

    def __mul__(self, other: PauliString) -> PauliString:
        return pauli_mul(self, other)

    @property
    def phase(self) -> complex:
        return _PHASES[self.phase_exp]

    @property
    def label(self) -> str:
        """Name of the Pauli ignoring phase: ``I``, ``X``, ``Z`` or ``XZ``."""
        return {(0, 0): "I", (1, 0): "X", (0, 1): "Z", (1, 1): "XZ"}[(self.x_exp, self.z_exp)]

    def to_matrix(self) -> NDArray[np.complex128]:
        m = I2.copy()
        if self.x_exp:
            m = m @ X
        if self.z_exp:
            m = m @ Z
        return self.phase * m

    def modulo_phase(self) -> PauliString:
        return PauliString(self.x_exp, self.z_exp, 0)

    def equal_up_to_phase(self, other: PauliString) -> bool:
        return (self.x_exp, self.z_exp) == (other.x_exp, other.z_exp)

    @classmethod
    def from_matrix(cls, m: ArrayLike, atol: float = 1e-10) -> PauliString:
        """Identify ``m`` as a Pauli with a fourth-root-of-unity phase.

        Raises:
            InvalidInput: ``m`` is not of that form within ``atol``.
        """
        arr = np.asarray(m, dtype=np.complex128)
        if arr.shape != (2, 2):
            raise InvalidInput(f"expected a 2x2 matrix, got shape {arr.shape}")
        for x, z in itertools.product((0, 1), repeat=2):
            for k in range(4):
                cand = cls(x, z, k)
                if np.allclose(arr, cand.to_matrix(), atol=atol, rtol=0.0):
                    return cand
        raise InvalidInput("matrix is not a Pauli operator with phase in {1, i, -1, -i}")

    @classmethod
    def proportional_from_matrix(cls, m: ArrayLike, atol: float = 1e-10) -> tuple[PauliString, complex]:
        """Write ``m = c * P`` with ``P`` a phase-free Pauli; returns ``(P, c)``."""
        arr = np.asarray(m, dtype=np.complex128)
        if arr.shape != (2, 2):
            raise InvalidInput(f"expected a 2x2 matrix, got shape {arr.shape}")
        for x, z in itertools.product((0, 1), repeat=2):
            p = cls(x, z)
            pm = p.to_matrix()
            c = np.trace(pm.conj().T @ arr) / 2
            if abs(c) > atol and np.allclose(arr, c * pm, atol=atol * max(1.0, abs(c)), rtol=0.0):
                return p, complex(c)
        raise InvalidInput("matrix is not proportional to a Pauli operator")

    def __str__(self) -> str:
        prefix = {0: "", 1: "i", 2: "-", 3: "-i"}[self.phase_exp]
        return prefix + self.label


IDENTITY = PauliString()


def pauli_mul(p: PauliString, q: PauliString) -> PauliString:
    """Product ``p @ q`` kept in normal form; moving Z past X costs a sign."""
    return PauliString(
        p.x_exp + q.x_exp,
        p.z_exp + q.z_exp,
        p.phase_exp + q.phase_exp + 2 * (p.z_exp * q.x_exp),
    )


@dataclass(frozen=True)
class BinarySymmetryData:
    """Bit tables ``a`` and ``b`` defining the tensors ``X**a[i,j] @ Z**b[i,j]``."""

    a: NDArray[np.int8]
    b: NDArray[np.int8]

    def __post_init__(self) -> None:
        a = np.asarray(self.a, dtype=np.int8)
        b = np.asarray(self.b, dtype=np.int8)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape != b.shape:
            raise InvalidInput(f"a and b must be equal square tables, got {a.shape} and {b.shape}")
        if not (np.isin(a, (0, 1)).all() and np.isin(b, (0, 1)).all()):
            raise InvalidInput("entries of a and b must be bits")
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def d(self) -> int:
        return int(self.a.shape[0])

    def pauli(self, i: int, j: int) -> PauliString:
        return PauliString(int(self.a[i, j]), int(self.b[i, j]))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BinarySymmetryData):
            return NotImplemented
        return bool(np.array_equal(self.a, other.a) and np.array_equal(self.b, other.b))

    def __hash__(self) -> int:
        return hash((self.a.tobytes(), self.b.tobytes(), self.d))


def factorize_bits(m: ArrayLike) -> tuple[tuple[int, ...], tuple[int, ...]] | None:
    """Find bit vectors ``c, d`` with ``m[i, j] == c[i] ^ d[j]``, or ``None``.

    Exhaustive over all ``2**(2n)`` candidate pairs.
    """
    mat = np.asarray(m, dtype=np.int8) % 2
    n = mat.shape[0]
    for c in itertools.product((0, 1), repeat=n):
        for dvec in itertools.product((0, 1), repeat=mat.shape[1]):
            if np.array_equal(np.bitwise_xor.outer(np.array(c), np.array(dvec)), mat):
                return c, dvec
    return None


def is_factorizable(data: BinarySymmetryData, which: Literal["a", "b"]) -> bool:
    """Whether the selected two-site sign pattern splits into single-site signs."""
    if which not in ("a", "b"):
        raise InvalidInput(f"which must be 'a' or 'b', got {which!r}")
    return factorize_bits(getattr(data, which)) is not None


def is_affine_gf2(values: ArrayLike) -> bool:
    """Whether a truth table ``f`` on ``n`` bits is affine over GF(2).

    ``values[k]`` is ``f`` at the bit vector whose big-endian reading is ``k``.
    An affine ``f`` is fixed by its value at zero and at the unit vectors, so
    the table is compared against that reconstruction.
    """
    f = np.asarray(values, dtype=np.int64).reshape(-1) % 2
    n = int(f.size).bit_length() - 1
    if f.size != 1 << n:
        raise InvalidInput(f"truth table length {f.size} is not a power of two")
    idx = np.arange(f.size)
    pred = np.full(f.size, f[0])
    for k in range(n):
        bit = 1 << (n - 1 - k)
        pred ^= ((idx & bit) > 0) * (f[bit] ^ f[0])
    return bool(np.array_equal(pred, f))
