import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from srbe.datasets import (
    Dataset,
    builtin_rnd_dataset,
    load_csv,
    parse_csv_text,
    select_columns,
    write_csv,
)
from srbe.errors import DimensionMismatch, MissingColumn, ParseError, ValidationError

BUILTIN_SHA256 = "355929802025e5e692bd0b95ceedcc9f3bbe815bbad262f469d442bd34a97240"


def test_builtin_shape_and_values():
    ds = builtin_rnd_dataset()
    assert ds.shape == (10, 4)
    assert ds.x[0].tolist() == [1.9, 2.2, 1.9, 3.7]
    assert ds.x[-1].tolist() == [2.3, 2.7, 2.8, 3.8]
    assert ds.y[0] == 2.3 and ds.y[-1] == 2.7
    assert ds.column_names[0] == "x1_ussr"


def test_builtin_checksum_is_pinned():
    assert builtin_rnd_dataset().checksum() == BUILTIN_SHA256


def test_round_trip(tmp_path):
    ds = builtin_rnd_dataset()
    path = write_csv(ds, tmp_path / "d.csv")
    back = load_csv(path, ds.response_name)
    assert np.array_equal(back.x, ds.x) and np.array_equal(back.y, ds.y)
    assert back.column_names == ds.column_names
    assert back.checksum() == ds.checksum()


def test_blank_cell_reports_position():
    with pytest.raises(ParseError) as err:
        parse_csv_text("a,b,y\n1,2,3\n4,,6\n", "y")
    # rows count from 1 after the header
    assert err.value.row == 2 and err.value.column == "b"
    assert "row 2" in str(err.value)


def test_bad_inputs():
    with pytest.raises(MissingColumn):
        parse_csv_text("a,b\n1,2\n", "y")
    with pytest.raises(ParseError):
        parse_csv_text("a,a,y\n1,2,3\n", "y")
    with pytest.raises(ParseError):
        parse_csv_text("a,y\n1,2,3\n", "y")
    with pytest.raises(ParseError):
        parse_csv_text("a,y\n1,nan\n", "y")
    with pytest.raises(ParseError):
        parse_csv_text("a,y\n1,abc\n", "y")
    with pytest.raises(ParseError):
        parse_csv_text("", "y")
    with pytest.raises(ParseError):
        parse_csv_text("a,y\n", "y")


def test_dataset_validation():
    with pytest.raises(DimensionMismatch):
        Dataset("d", np.ones((3, 2)), np.ones(2), ("a", "b"))
    with pytest.raises(DimensionMismatch):
        Dataset("d", np.ones((3, 2)), np.ones(3), ("a",))
    with pytest.raises(ValidationError):
        Dataset("d", np.array([[1.0], [np.inf]]), np.ones(2), ("a",))


def test_select_columns():
    ds = builtin_rnd_dataset()
    sub = select_columns(ds, ["x4_japan", "x1_ussr"])
    assert np.array_equal(sub.x, ds.x[:, [3, 0]])
    with pytest.raises(MissingColumn):
        select_columns(ds, ["nope"])


def test_large_file_matches_independent_parser(tmp_path):
    rng = np.random.default_rng(40)
    data = rng.standard_normal((1000, 4)) * 10.0 ** rng.integers(-3, 4, size=(1000, 4))
    lines = ["a,b,c,y"] + [",".join(repr(float(v)) for v in row) for row in data]
    text = "\n".join(lines) + "\n"
    ds = parse_csv_text(text, "y")
    ref = np.genfromtxt(io.StringIO(text), delimiter=",", skip_header=1)
    assert np.array_equal(ds.x, ref[:, :3])
    assert np.array_equal(ds.y, ref[:, 3])


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 8), st.integers(2, 4)),
              elements=st.floats(-1e12, 1e12, allow_nan=False)))
def test_csv_round_trip_is_exact(values):
    names = tuple(f"c{i}" for i in range(values.shape[1] - 1))
    ds = Dataset("h", values[:, :-1], values[:, -1], names, response_name="target")
    back = parse_csv_text(ds.to_csv_text(), "target")
    assert np.array_equal(back.x, ds.x) and np.array_equal(back.y, ds.y)
