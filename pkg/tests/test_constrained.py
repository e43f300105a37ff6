import itertools

import numpy as np
import pytest

from splitmps import RankZero, load_fixture, mps_evaluate_pbc, simps_evaluate_pbc, simps_from_mps, simps_to_mps
from splitmps.constrained import (
    AKLT_DOWN,
    AKLT_UP,
    LocalConstraint,
    aklt_constraint,
    build_aklt,
    build_rydberg_family,
    check_simps_constraint,
    check_state_constraint,
    random_constrained_simps,
    rydberg_constraint,
    rydberg_mps,
)
from splitmps.errors import InvalidInput
from splitmps.linalg import fidelity
from splitmps.simps import is_gauge_equivalent


def test_constraint_validation():
    with pytest.raises(InvalidInput):
        LocalConstraint(frozenset({(0, 2)}), 2)


def test_state_constraint_examples():
    ryd = simps_evaluate_pbc(build_rydberg_family(1, 1), 6)
    assert check_state_constraint(ryd, rydberg_constraint())[0]
    ghz = simps_evaluate_pbc(load_fixture("ghz-simps"), 4)
    ok, worst = check_state_constraint(ghz, rydberg_constraint())
    assert not ok and worst == pytest.approx(1 / np.sqrt(2))
    mps, _ = build_aklt()
    assert check_state_constraint(mps_evaluate_pbc(mps, 6), aklt_constraint())[0]


def test_simps_constraint_examples():
    _, aklt = build_aklt()
    assert check_simps_constraint(aklt, aklt_constraint())
    assert check_simps_constraint(build_rydberg_family(1, 2), rydberg_constraint())
    assert not check_simps_constraint(load_fixture("nice-simps"), rydberg_constraint())


def test_rydberg_examples():
    prod = simps_evaluate_pbc(build_rydberg_family(1, 0), 5).normalized()
    expected = np.zeros(32)
    expected[0] = 1
    assert np.allclose(np.abs(prod.amplitudes), expected)
    psi = simps_evaluate_pbc(build_rydberg_family(1, 1), 4)
    allowed = [
        k
        for k, cfg in enumerate(itertools.product((0, 1), repeat=4))
        if not any(cfg[i] and cfg[(i + 1) % 4] for i in range(4))
    ]
    assert len(allowed) == 7
    expected = np.zeros(16)
    expected[allowed] = 1
    assert fidelity(psi, expected) == pytest.approx(1.0)
    s = build_rydberg_family(1, 2)
    for n in range(3, 9):
        assert fidelity(simps_evaluate_pbc(s, n), mps_evaluate_pbc(rydberg_mps(1, 2), n)) == pytest.approx(1.0)
    with pytest.raises(RankZero):
        build_rydberg_family(0, 0)


def test_rydberg_conversion_matches_table():
    assert is_gauge_equivalent(simps_from_mps(rydberg_mps(0.7, 1.3)), build_rydberg_family(0.7, 1.3))


@pytest.mark.parametrize("d,chi,c", [(2, 2, rydberg_constraint()), (3, 2, aklt_constraint())])
def test_random_constrained(d, chi, c):
    s = random_constrained_simps(d, chi, c, seed=5)
    assert check_simps_constraint(s, c)
    for n in range(3, 9 if d == 2 else 7):
        assert check_state_constraint(simps_evaluate_pbc(s, n), c)[0]
    # the tensor is generic, so every first index of a forbidden pair loses rank
    m = simps_to_mps(s)
    for i in {i for i, _ in c.forbidden_pairs}:
        assert np.linalg.matrix_rank(m[i], tol=1e-10) < m.bond_dim


def test_all_but_one_pair_forbidden():
    c = LocalConstraint(frozenset({(0, 1), (1, 0), (1, 1)}), 2)
    s = random_constrained_simps(2, 2, c, seed=1)
    psi = simps_evaluate_pbc(s, 5)
    assert np.count_nonzero(np.abs(psi.amplitudes) > 1e-12) == 1


def test_aklt_tables():
    mps, simps = build_aklt()
    assert simps.chi == (2, 1, 1)
    assert simps[AKLT_UP, AKLT_DOWN] == pytest.approx(1)
    assert simps[AKLT_DOWN, AKLT_UP] == pytest.approx(1)
    assert simps[AKLT_UP, AKLT_UP] == 0 and simps[AKLT_DOWN, AKLT_DOWN] == 0
    for n in range(3, 9):
        assert fidelity(mps_evaluate_pbc(mps, n), simps_evaluate_pbc(simps, n)) == pytest.approx(1.0, abs=1e-9)
