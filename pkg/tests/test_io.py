import json

import numpy as np
import pytest

from modalqm.contexts import random_context, standard_context, transition_matrix
from modalqm.exceptions import DimensionMismatch, InvalidTarget, ModalQMError
from modalqm.io import (
    context_from_json,
    context_to_json,
    dumps,
    fmt,
    histogram_csv,
    load_context,
    read_matrix_csv,
    round15,
    save_context,
    transition_from_csv,
    transition_to_csv,
    write_matrix_csv,
)
from modalqm.measurement import run_sequence


def test_fmt_fixed_precision():
    assert fmt(1 / 3) == "0.333333333333333"
    assert fmt(-0.0) == "0"
    assert fmt(1e-20) == "1e-20"


def test_round15_nested():
    assert round15({"a": [1 / 3, 2], "b": (0.1 + 0.2,)}) == {"a": [0.333333333333333, 2], "b": [0.3]}


def test_dumps_is_stable():
    assert dumps({"x": 2 / 3}) == '{\n  "x": 0.666666666666667\n}\n'


def test_context_round_trip(tmp_path):
    ctx = random_context(4, 3, id="E")
    path = tmp_path / "e.json"
    save_context(ctx, path)
    back = load_context(path)
    assert back.id == "E" and back.labels == ctx.labels
    np.testing.assert_array_equal(back.basis, ctx.basis)


def test_context_json_schema():
    obj = context_to_json(standard_context(2, id="std"))
    assert set(obj) == {"id", "dim", "basis", "labels"}
    assert obj["basis"] == {"rows": 2, "cols": 2, "re": [1.0, 0.0, 0.0, 1.0], "im": [0.0, 0.0, 0.0, 0.0]}
    json.dumps(obj)


def test_context_dim_mismatch():
    obj = context_to_json(standard_context(2))
    obj["dim"] = 3
    with pytest.raises(DimensionMismatch):
        context_from_json(obj)
    with pytest.raises(DimensionMismatch):
        context_from_json({"id": "x"})


def test_bad_json_file(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(ModalQMError):
        load_context(path)


def test_transition_csv_round_trip():
    tm = transition_matrix(random_context(3, 1, id="a"), random_context(3, 2, id="b"))
    text = transition_to_csv(tm)
    assert text.startswith("# source=a target=b\n")
    back = transition_from_csv(text)
    assert (back.source_context, back.target_context) == ("a", "b")
    np.testing.assert_allclose(back.probs, tm.probs, rtol=1e-14, atol=1e-15)


def test_read_matrix_csv():
    B = read_matrix_csv("# target\n0.25,0.75\n0.75,0.25\n")
    np.testing.assert_array_equal(B, [[0.25, 0.75], [0.75, 0.25]])
    assert read_matrix_csv(write_matrix_csv(B)).tolist() == B.tolist()


@pytest.mark.parametrize("text", ["", "1,0\n0\n", "a,b\nc,d\n", "1,0,0\n0,1,0\n"])
def test_read_matrix_csv_errors(text):
    with pytest.raises(InvalidTarget):
        read_matrix_csv(text)


def test_histogram_csv():
    ctx = standard_context(2, id="std")
    text = histogram_csv(run_sequence((ctx, 1), [ctx, ctx], 10, 0))
    assert text == 'outcome_tuple,count,frequency\n"(1,1)",10,1\n'
