import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from splitmps import (
    InvalidInput,
    Mps,
    NoGauge,
    NotNormal,
    RankZero,
    Simps,
    UnsupportedBoundary,
    load_fixture,
    mps_evaluate_pbc,
    prop1_bounds,
    simps_evaluate_obc,
    simps_evaluate_pbc,
    simps_from_mps,
    simps_normality,
    simps_to_mps,
    solve_gauge,
)
from splitmps.linalg import fidelity, svd
from splitmps.simps import fingerprint_compose, gauge_transform, is_gauge_equivalent, random_gauge


def _ring_oracle(s, n):
    # direct sum over configurations, independent of the library contraction
    d = s.d
    out = []
    for cfg in itertools.product(range(d), repeat=n):
        m = np.eye(s.chi[cfg[0]])
        for k in range(n):
            m = m @ s[cfg[k], cfg[(k + 1) % n]]
        out.append(np.trace(m))
    return np.array(out)


def test_block_matrix_of_cluster():
    s = load_fixture("cluster-z-simps")
    res = svd(s.block_matrix())
    assert res.numerical_rank == 2
    assert np.allclose(res.singular_values, [np.sqrt(2)] * 2)


def test_cluster_and_ghz_rings():
    cluster = simps_evaluate_pbc(load_fixture("cluster-z-simps"), 4)
    assert fidelity(cluster, mps_evaluate_pbc(load_fixture("cluster-z-mps"), 4)) == pytest.approx(1.0)
    ghz = simps_evaluate_pbc(load_fixture("ghz-simps"), 4).amplitudes
    expected = np.zeros(16)
    expected[0] = expected[-1] = 1
    assert np.allclose(ghz, expected)


@pytest.mark.parametrize("name", ["nice-simps", "mbqc-simps", "aklt-simps", "wahl-simps"])
def test_ring_matches_configuration_sum(name):
    s = load_fixture(name)
    assert np.allclose(simps_evaluate_pbc(s, 4).amplitudes, _ring_oracle(s, 4))


def test_obc_two_sites():
    s = load_fixture("nice-simps")
    t = simps_evaluate_obc(s, 2).tensor()
    for a, i, j, b in itertools.product(range(2), repeat=4):
        assert t[a, i, j, b] == pytest.approx(s[i, j][a, b])


def test_obc_needs_uniform_chi():
    with pytest.raises(UnsupportedBoundary):
        simps_evaluate_obc(load_fixture("aklt-simps"), 3)


def test_normality_examples():
    nice = simps_normality(load_fixture("nice-simps"))
    assert nice.is_normal
    assert simps_normality(load_fixture("mbqc-simps")).injectivity_length == 1
    assert not simps_normality(load_fixture("anomalous-simps")).is_normal


def test_mbqc_blocks_span_all_matrices():
    s = load_fixture("mbqc-simps")
    for s1, s2 in itertools.product(range(4), repeat=2):
        prods = np.array([(s[s1, i] @ s[i, s2]).ravel() for i in range(4)])
        assert np.linalg.matrix_rank(prods) == 4


@pytest.mark.parametrize("name", ["cluster-z-simps", "nice-simps", "ghz-simps", "mbqc-simps", "wahl-simps"])
def test_to_mps_preserves_state(name):
    s = load_fixture(name)
    m = simps_to_mps(s)
    for n in (3, 4, 5):
        assert fidelity(mps_evaluate_pbc(m, n), simps_evaluate_pbc(s, n)) == pytest.approx(1.0, abs=1e-10)


def test_nice_conversion_dimensions():
    assert simps_to_mps(load_fixture("nice-simps")).bond_dim == 3
    back = simps_from_mps(load_fixture("nice-mps"))
    assert back.chi == (2, 2)
    sol = solve_gauge(back, load_fixture("nice-simps"))
    assert sol.residual <= 1e-9


def test_cluster_x_basis_keeps_its_tensors():
    m = load_fixture("cluster-x-mps")
    s = simps_from_mps(m)
    assert s.chi == (2, 2)
    for n in (3, 4, 5):
        assert fidelity(simps_evaluate_pbc(s, n), mps_evaluate_pbc(m, n)) == pytest.approx(1.0)


def test_aklt_conversion_is_mixed():
    s = simps_from_mps(load_fixture("aklt-mps"))
    assert sorted(s.chi) == [1, 1, 2]
    assert is_gauge_equivalent(s, load_fixture("aklt-simps"))


def test_from_mps_rejects_rank_zero():
    m = Mps(np.array([np.eye(2), np.zeros((2, 2))]))
    with pytest.raises(RankZero):
        simps_from_mps(m)


def test_solve_gauge_recovers_random_gauge():
    s = load_fixture("nice-simps")
    rng = np.random.default_rng(7)
    gauges = random_gauge(s.chi, rng)
    t = gauge_transform(s, gauges)
    sol = solve_gauge(t, s)
    assert sol.residual <= 1e-9
    assert sol.null_dim == 1
    for v, g in zip(sol.gauges, gauges):
        ratio = v @ np.linalg.inv(g)
        assert np.allclose(ratio, ratio[0, 0] * np.eye(2), atol=1e-8)


def test_solve_gauge_failures():
    with pytest.raises(NotNormal):
        solve_gauge(load_fixture("anomalous-simps"), load_fixture("anomalous-simps"))
    nice = load_fixture("nice-simps")
    other = nice.map(lambda i, j, b: b * (-1) ** (i * j) if (i, j) != (1, 1) else 2 * b)
    with pytest.raises((NoGauge, NotNormal)):
        solve_gauge(nice, other)


def test_injectivity_length_bounds():
    for name in ("nice-simps", "mbqc-simps", "cluster-z-simps"):
        assert prop1_bounds(load_fixture(name))[2]


def test_fingerprint_compose_grows_bond():
    s = load_fixture("nice-simps")
    j = [np.eye(2), np.diag([1.0, 2.0])]
    f = fingerprint_compose(j, s)
    assert f.chi == (4, 4)
    assert np.allclose(f[1, 0], np.kron(j[1], s[1, 0]))
    with pytest.raises(InvalidInput):
        fingerprint_compose([np.eye(2)], s)


def test_constructor_validation():
    with pytest.raises(InvalidInput):
        Simps([[np.eye(2), np.eye(3)], [np.eye(2), np.eye(2)]])
    with pytest.raises(InvalidInput):
        Simps([[1.0, 2.0]])


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**31 - 1), st.integers(1, 2), st.integers(2, 3))
def test_round_trip_state_property(seed, chi, d):
    rng = np.random.default_rng(seed)
    blocks = rng.standard_normal((d, d, chi, chi)) + 1j * rng.standard_normal((d, d, chi, chi))
    s = Simps([[blocks[i, j] for j in range(d)] for i in range(d)])
    m = simps_to_mps(s)
    back = simps_from_mps(m)
    for n in (3, 4):
        ref = simps_evaluate_pbc(s, n)
        assert fidelity(mps_evaluate_pbc(m, n), ref) == pytest.approx(1.0, abs=1e-9)
        assert fidelity(simps_evaluate_pbc(back, n), ref) == pytest.approx(1.0, abs=1e-9)
