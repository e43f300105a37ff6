"""Split-index matrix product states: conversion, symmetry and wire analysis."""

from .errors import (
    DegenerateGauge,
    InvalidGeometry,
    InvalidInput,
    NoGauge,
    NonUnique,
    NotAWire,
    NotEigenstate,
    NotFound,
    NotInjective,
    NotInvertible,
    NotNormal,
    NotProjectivePair,
    RankZero,
    SplitMpsError,
    TooLarge,
    UnsupportedBoundary,
)
from .fixtures import list_fixtures, load_fixture
from .linalg import StateVector, fidelity, schmidt_spectrum
from .mps import (
    Mps,
    NormalityReport,
    mps_evaluate_obc,
    mps_evaluate_pbc,
    mps_normality,
    transfer_spectrum,
)
from .pauli import BinarySymmetryData, PauliString
from .simps import (
    GaugeSolution,
    Simps,
    fingerprint_compose,
    prop1_bounds,
    simps_evaluate_obc,
    simps_evaluate_pbc,
    simps_from_mps,
    simps_normality,
    simps_to_mps,
    solve_gauge,
)

__all__ = [
    "BinarySymmetryData",
    "DegenerateGauge",
    "GaugeSolution",
    "InvalidGeometry",
    "InvalidInput",
    "Mps",
    "NoGauge",
    "NonUnique",
    "NormalityReport",
    "NotAWire",
    "NotEigenstate",
    "NotFound",
    "NotInjective",
    "NotInvertible",
    "NotNormal",
    "NotProjectivePair",
    "PauliString",
    "RankZero",
    "Simps",
    "SplitMpsError",
    "StateVector",
    "TooLarge",
    "UnsupportedBoundary",
    "fidelity",
    "fingerprint_compose",
    "list_fixtures",
    "load_fixture",
    "mps_evaluate_obc",
    "mps_evaluate_pbc",
    "mps_normality",
    "prop1_bounds",
    "schmidt_spectrum",
    "simps_evaluate_obc",
    "simps_evaluate_pbc",
    "simps_from_mps",
    "simps_normality",
    "simps_to_mps",
    "solve_gauge",
    "transfer_spectrum",
]
