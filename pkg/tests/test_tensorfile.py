import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from splitmps import Mps, Simps
from splitmps.fixtures import FIXTURE_IDS, fixture_path
from splitmps.tensorfile import ParseError, dumps, loads, read_file, write_file


@pytest.mark.parametrize("name", FIXTURE_IDS)
def test_fixture_text_is_canonical(name):
    text = fixture_path(name).read_text(encoding="utf-8")
    obj, meta = loads(text)
    assert dumps(obj, meta) == text


@pytest.mark.parametrize(
    "text,line",
    [
        ("", 1),
        ("{\n  \"kind\": \"mps\",\n  oops\n}", 3),
    ],
)
def test_parse_errors_carry_position(text, line):
    with pytest.raises(ParseError) as info:
        loads(text)
    assert info.value.line == line


@pytest.mark.parametrize(
    "raw",
    [
        '[]',
        '{"kind": "mps"}',
        '{"kind": "peps", "d": 1, "bond": 1, "tensors": [[[[1, 0]]]], "metadata": {}}',
        '{"kind": "mps", "d": 2, "bond": 1, "tensors": [[[[1, 0]]]], "metadata": {}}',
        '{"kind": "mps", "d": 1, "bond": 2, "tensors": [[[[1, 0]]]], "metadata": {}}',
        '{"kind": "mps", "d": 1, "bond": 1, "tensors": [[[[1]]]], "metadata": {}}',
        '{"kind": "simps", "d": 1, "bond": 1, "tensors": [[[[[1, 0]]]]], "metadata": {}}',
        '{"kind": "mps", "d": 1, "bond": 1, "tensors": [[[[1, 0]]]], "metadata": {}, "x": 1}',
    ],
)
def test_rejects_malformed(raw):
    with pytest.raises(ParseError):
        loads(raw)


def test_write_and_read(tmp_path):
    s = Simps([[np.eye(2), np.ones((2, 1))], [np.ones((1, 2)), 1j * np.ones((1, 1))]])
    path = tmp_path / "t.json"
    write_file(path, s, {"note": "mixed"})
    back, meta = read_file(path)
    assert back.chi == (2, 1)
    assert meta == {"note": "mixed"}
    assert np.array_equal(back[1, 1], s[1, 1])


def test_non_utf8(tmp_path):
    path = tmp_path / "bad.json"
    path.write_bytes(b"\xff\xfe\x00")
    with pytest.raises(ParseError):
        read_file(path)


floats = st.floats(allow_nan=False, allow_infinity=False, width=64)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3), st.integers(1, 3), st.data())
def test_round_trip_is_exact(d, bond, data):
    vals = data.draw(st.lists(floats, min_size=2 * d * bond * bond, max_size=2 * d * bond * bond))
    arr = np.array(vals[0::2]) + 1j * np.array(vals[1::2])
    m = Mps(arr.reshape(d, bond, bond))
    text = dumps(m)
    back, _ = loads(text)
    assert np.array_equal(back.tensors, m.tensors)
    assert dumps(back) == text
