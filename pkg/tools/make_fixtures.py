"""Regenerate the JSON fixtures under src/splitmps/data/fixtures."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from splitmps.mps import Mps
from splitmps.simps import Simps
from splitmps.tensorfile import write_file

OUT = Path(__file__).resolve().parents[1] / "src" / "splitmps" / "data" / "fixtures"

I = np.eye(2)
X = np.array([[0.0, 1.0], [1.0, 0.0]])
Z = np.diag([1.0, -1.0])
Y = 1j * X @ Z
H = (X + Z) / np.sqrt(2)
PLUS = np.array([1.0, 1.0]) / np.sqrt(2)
MINUS = np.array([1.0, -1.0]) / np.sqrt(2)
E0 = np.array([1.0, 0.0])
E1 = np.array([0.0, 1.0])


def mps(*mats):
    return Mps(np.stack([np.asarray(m, dtype=complex) for m in mats]))


FIXTURES = {
    "cluster-z-mps": (
        mps(np.outer(E0, PLUS), np.outer(E1, MINUS)),
        "cluster state, computational basis: C0 = |0><+|, C1 = |1><-|",
    ),
    "cluster-z-simps": (
        Simps([[1.0, 1.0], [1.0, -1.0]]),
        "cluster state, bond dimension one: B[i][j] = (-1)**(i*j)",
    ),
    "cluster-x-mps": (
        mps(H, H @ Z),
        "cluster state, X basis: C+ = H, C- = H Z",
    ),
    "cluster-two-site-mps": (
        mps(I, Z, X, X @ Z),
        "cluster state, two-site unit cell in the X basis: ++ = 1, +- = Z, -+ = X, -- = XZ",
    ),
    "nice-mps": (
        mps([[1, 0, 0], [0, 0, 0], [0, 1, 1]], [[0, 1, -1], [-1, 0, 0], [0, 0, 0]]),
        "non-onsite SPT example, D = 3 MPS",
    ),
    "nice-simps": (
        Simps([[I, I], [X, X @ Z]]),
        "non-onsite SPT example, Pauli table: B00 = 1, B01 = 1, B10 = X, B11 = XZ",
    ),
    "ghz-mps": (
        mps(np.diag([1.0, 0.0]), np.diag([0.0, 1.0])),
        "GHZ state: A[i] = |i><i|",
    ),
    "ghz-simps": (
        Simps([[1.0, 0.0], [0.0, 1.0]]),
        "GHZ state, bond dimension one: B[i][j] = delta(i, j)",
    ),
    "anomalous-mps": (
        mps([[1, 0, 0], [0, 1, 1], [0, 0, 0]], [[1, 0, 0], [0, 0, 0], [0, -1, 1]]),
        "superposition symmetric under the anomalous CZX symmetry, direct-sum MPS",
    ),
    "anomalous-simps": (
        Simps([[I, I], [Z, I]]),
        "superposition symmetric under the anomalous CZX symmetry: B00 = 1, B01 = 1, B10 = Z, B11 = 1",
    ),
    "mbqc-simps": (
        Simps(
            [
                [I, X, I, X],
                [I, X, I, X],
                [Z, Y, Y, Z],
                [Z, Y, Y, Z],
            ]
        ),
        "d = 4 universal MBQC resource with Pauli tensors",
    ),
    "rydberg-mps": (
        mps([[1, 0], [1, 0]], [[0, 1], [0, 0]]),
        "Rydberg-blockade family at a = b = 1: A0 = [[a, 0], [a, 0]], A1 = [[0, b], [0, 0]]",
    ),
    "rydberg-simps": (
        Simps([[1.0, 1.0], [1.0, 0.0]]),
        "Rydberg-blockade family at a = b = 1: B00 = a, B01 = b, B10 = a, B11 = 0",
    ),
    "aklt-mps": (
        mps(Z, np.outer(E0, E1), np.outer(E1, E0)),
        "AKLT state up to normalization, index order 0, up, down",
    ),
    "aklt-simps": (
        Simps(
            [
                [Z, E0.reshape(2, 1), E1.reshape(2, 1)],
                [-E1.reshape(1, 2), [[0.0]], [[1.0]]],
                [E0.reshape(1, 2), [[1.0]], [[0.0]]],
            ]
        ),
        "AKLT state, mixed bond dimensions (2, 1, 1), index order 0, up, down",
    ),
    "wahl-mps": (
        mps(
            [[1, 0, 0], [0, 1, 0], [1, 0, 0]],
            [[0, 0, 1], [0, 1, 0], [0, 0, -1]],
            [[0, 1, 0], [1, 0, 0], [0, 1, 0]],
        ),
        "d = D = 3 MPS with long-range localizable entanglement",
    ),
    "wahl-simps": (
        Simps([[I, X, I], [X, Z, X], [X, I, X]]),
        "split-index form of the d = D = 3 wire example, Pauli table",
    ),
}


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    for name, (obj, description) in FIXTURES.items():
        write_file(OUT / f"{name}.json", obj, {"description": description, "id": name})


if __name__ == "__main__":
    main()
