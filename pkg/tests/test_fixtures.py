import numpy as np
import pytest

from splitmps import NotFound, list_fixtures, load_fixture, mps_evaluate_pbc, simps_evaluate_pbc
from splitmps.fixtures import FIXTURE_IDS, PAIRS, fixture_metadata
from splitmps.linalg import fidelity
from splitmps.pauli import X, Z


def test_catalog_is_complete():
    assert list_fixtures() == sorted(FIXTURE_IDS)


def test_unknown_fixture():
    with pytest.raises(NotFound):
        load_fixture("no-such-state")


def test_every_fixture_has_a_description():
    for name in FIXTURE_IDS:
        meta = fixture_metadata(name)
        assert meta["id"] == name
        assert meta["description"]


def test_cluster_z_simps_table():
    s = load_fixture("cluster-z-simps")
    assert s.chi == (1, 1)
    assert np.allclose([[s[i, j][0, 0] for j in range(2)] for i in range(2)], [[1, 1], [1, -1]])


def test_wahl_tables():
    m = load_fixture("wahl-mps")
    assert m.d == 3 and m.bond_dim == 3
    s = load_fixture("wahl-simps")
    assert np.allclose(s[1, 1], Z) and np.allclose(s[1, 2], X)


@pytest.mark.parametrize("mps_id,simps_id", PAIRS)
def test_pairs_describe_the_same_state(mps_id, simps_id):
    m = load_fixture(mps_id)
    s = load_fixture(simps_id)
    for n in range(3, 9 if m.d == 2 else 7):
        a = mps_evaluate_pbc(m, n)
        b = simps_evaluate_pbc(s, n)
        if a.is_zero and b.is_zero:
            continue
        assert fidelity(a, b) >= 1 - 1e-9


def test_custom_directory(tmp_path):
    src = load_fixture("ghz-mps")
    from splitmps.tensorfile import write_file

    write_file(tmp_path / "mine.json", src)
    assert list_fixtures(tmp_path) == ["mine"]
    assert np.array_equal(load_fixture("mine", tmp_path).tensors, src.tensors)
