"""Nearest-neighbour constraints, the Rydberg chi=1 family and the AKLT example."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput, RankZero
from .linalg import StateVector
from .mps import Mps
from .simps import Simps

STATE_TOL = 1e-12

# AKLT physical labels
AKLT_ZERO, AKLT_UP, AKLT_DOWN = 0, 1, 2


@dataclass(frozen=True)
class LocalConstraint:
    """Neighbouring index pairs that must never appear."""

    forbidden_pairs: frozenset[tuple[int, int]]
    d: int

    def __post_init__(self) -> None:
        pairs = frozenset((int(i), int(j)) for i, j in self.forbidden_pairs)
        if any(not (0 <= i < self.d and 0 <= j < self.d) for i, j in pairs):
            raise InvalidInput(f"forbidden pairs must lie in 0..{self.d - 1}")
        object.__setattr__(self, "forbidden_pairs", pairs)

    def mask(self) -> np.ndarray:
        m = np.zeros((self.d, self.d), dtype=bool)
        for i, j in self.forbidden_pairs:
            m[i, j] = True
        return m


def rydberg_constraint() -> LocalConstraint:
    return LocalConstraint(frozenset({(1, 1)}), 2)


def aklt_constraint() -> LocalConstraint:
    return LocalConstraint(frozenset({(AKLT_UP, AKLT_UP), (AKLT_DOWN, AKLT_DOWN)}), 3)


def check_state_constraint(
    psi: StateVector, c: LocalConstraint, cyclic: bool = True, tol: float = STATE_TOL
) -> tuple[bool, float]:
    """Largest normalized amplitude on a configuration with a forbidden neighbour pair.

    Returns ``(max_violation <= tol, max_violation)``. Bonds wrap around when
    ``cyclic``. A zero state trivially satisfies every constraint.
    """
    if set(psi.site_dims) != {c.d}:
        raise InvalidInput(f"state site dimensions {psi.site_dims} do not match d={c.d}")
    if psi.is_zero:
        return True, 0.0
    n = psi.n_sites
    amps = np.abs(psi.tensor()) / psi.norm
    bad = np.zeros(amps.shape, dtype=bool)
    mask = c.mask()
    bonds = n if cyclic and n > 1 else n - 1
    for k in range(bonds):
        k2 = (k + 1) % n
        shape = [1] * n
        shape[k] = c.d
        shape[k2] = c.d
        bad = bad | (mask if k < k2 else mask.T).reshape(shape)
    worst = float(amps[bad].max(initial=0.0))
    return worst <= tol, worst


def check_simps_constraint(s: Simps, c: LocalConstraint, atol: float = 0.0) -> bool:
    """Whether every forbidden block ``B[i][j]`` vanishes (exactly unless ``atol`` is given)."""
    if s.d != c.d:
        raise InvalidInput(f"constraint has d={c.d}, tensor has d={s.d}")
    return all(np.abs(s[i, j]).max(initial=0.0) <= atol for i, j in c.forbidden_pairs)


def build_rydberg_family(a: complex, b: complex) -> Simps:
    """Bond-dimension-one table ``B00 = a, B01 = b, B10 = a, B11 = 0``."""
    if a == 0 and b == 0:
        raise RankZero("a and b cannot both vanish")
    return Simps([[a, b], [a, 0.0]])


def rydberg_mps(a: complex, b: complex) -> Mps:
    """Two-dimensional MPS with ``A0 = [[a, 0], [a, 0]]`` and ``A1 = [[0, b], [0, 0]]``."""
    return Mps(np.array([[[a, 0], [a, 0]], [[0, b], [0, 0]]], dtype=np.complex128))


def random_constrained_simps(d: int, chi: int, c: LocalConstraint, seed: int) -> Simps:
    """Random blocks with real and imaginary parts uniform on ``[-1, 1]``; forbidden blocks zeroed."""
    if chi < 1 or d < 1:
        raise InvalidInput("d and chi must be at least 1")
    if c.d != d:
        raise InvalidInput(f"constraint has d={c.d}, expected {d}")
    rng = np.random.default_rng(seed)
    blocks = rng.uniform(-1.0, 1.0, (d, d, chi, chi)) + 1j * rng.uniform(-1.0, 1.0, (d, d, chi, chi))
    blocks[c.mask()] = 0.0
    return Simps([[blocks[i, j] for j in range(d)] for i in range(d)])


def build_aklt() -> tuple[Mps, Simps]:
    """AKLT tensors (up to normalization) in the order ``0, up, down``.

    The MPS is ``A0 = Z``, ``A_up = |0><1|``, ``A_down = |1><0|``; the split
    form has bond dimensions ``(2, 1, 1)``.
    """
    mps = Mps(
        np.array(
            [
                [[1, 0], [0, -1]],
                [[0, 1], [0, 0]],
                [[0, 0], [1, 0]],
            ],
            dtype=np.complex128,
        )
    )
    simps = Simps(
        [
            [np.diag([1.0, -1.0]), np.array([[1.0], [0.0]]), np.array([[0.0], [1.0]])],
            [np.array([[0.0, -1.0]]), np.zeros((1, 1)), np.ones((1, 1))],
            [np.array([[1.0, 0.0]]), np.ones((1, 1)), np.zeros((1, 1))],
        ]
    )
    return mps, simps
