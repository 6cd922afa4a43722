import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from gapfuse.grid import RainGrid
from gapfuse.gridio import FormatError, dumps, loads, read_grid, write_grid

CANONICAL = "RAINGRID 1 3 2 0.25\n0.0 1.5 NA\n0.1 NA 12.0\n"


def test_canonical_text():
    g = RainGrid.from_array([[0.0, 1.5, 0.0], [0.1, 0.0, 12.0]], [[True, True, False], [True, False, True]])
    assert dumps(g) == CANONICAL


def test_loads_reads_missing():
    g = loads(CANONICAL)
    assert g.valid.tolist() == [[True, True, False], [True, False, True]]
    assert g.values[1, 2] == 12.0 and g.meta.cell_size_deg == 0.25


def test_file_round_trip_is_byte_identical(tmp_path):
    src = tmp_path / "in.grid"
    src.write_bytes(CANONICAL.encode("ascii"))
    out = tmp_path / "out.grid"
    write_grid(out, read_grid(src))
    assert out.read_bytes() == src.read_bytes()


@given(arrays(np.float64, (3, 4), elements=st.floats(0, 1e9)), arrays(np.bool_, (3, 4)))
def test_values_round_trip_exactly(values, valid):
    g = RainGrid.from_array(values, valid)
    back = loads(dumps(g))
    assert back.equals(g)
    assert dumps(back) == dumps(g)


def test_shortest_repr():
    assert dumps(RainGrid.from_array([[0.1]])).splitlines()[1] == "0.1"


@pytest.mark.parametrize(
    "text",
    [
        "",
        "RASTER 1 1 1 0.25\n0\n",
        "RAINGRID 2 1 1 0.25\n0\n",
        "RAINGRID 1 x 1 0.25\n0\n",
        "RAINGRID 1 2 1 0.25\n0\n",
        "RAINGRID 1 1 2 0.25\n0\n",
        "RAINGRID 1 1 1 0.25\nabc\n",
        "RAINGRID 1 1 1 0.25\n-1.0\n",
        "RAINGRID 1 1 1 0.25\nnan\n",
    ],
)
def test_malformed(text):
    with pytest.raises(FormatError):
        loads(text)


def test_write_leaves_no_temp_files(tmp_path):
    write_grid(tmp_path / "g.grid", loads(CANONICAL))
    assert [p.name for p in tmp_path.iterdir()] == ["g.grid"]
