import json
import os

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lerchz import DomainError
from lerchz.catalog import (CSV_COLUMNS, Catalog, atomic_write, dumps, loads, plot_csv,
                            read_catalog, to_csv, trajectory_dict, write_catalog)
from lerchz.trajectory import Trajectory
from lerchz.zeros import RectBox, ZeroRecord

@st.composite
def records(draw):
    b = draw(st.floats(-2, 3))
    t = draw(st.floats(0, 500))
    box = RectBox(b - draw(st.floats(1e-9, 1)), b + draw(st.floats(1e-9, 1)),
                  t - draw(st.floats(1e-9, 1)), t + draw(st.floats(1e-9, 1)))
    return ZeroRecord(complex(b, t), draw(st.sampled_from(["L", "Lprime"])),
                      draw(st.floats(0, 1e-8)), draw(st.integers(1, 3)), box,
                      draw(st.integers(0, 60)), 0.85, 0.85,
                      draw(st.one_of(st.none(), st.text(max_size=20))))


def catalog_of(recs):
    meta = {"params": {"lambda": 0.85, "alpha": 0.85}, "kind": "L",
            "box": [-2.0, 1.5, 0.0, 100.0], "version": "0.1.0",
            "timestamp": "2026-01-01T00:00:00Z", "policy": {"target_tol": 1e-10}}
    return Catalog(meta, recs)


@settings(max_examples=400)
@given(st.lists(records(), max_size=12))
def test_round_trip_is_byte_identical(recs):
    text = dumps(catalog_of(recs))
    again = dumps(loads(text))
    assert again == text
    back = loads(text).records
    assert [r.location for r in back] == [r.location for r in catalog_of(recs).records]


def test_records_sorted_by_t_then_sigma():
    box = RectBox(0, 1, 0, 1)
    recs = [ZeroRecord(c, "L", 0.0, 1, box, 0) for c in (0.9 + 20j, 0.1 + 20j, 0.5 + 10j)]
    assert [r.location for r in catalog_of(recs).records] == [0.5 + 10j, 0.1 + 20j, 0.9 + 20j]


def test_complex_encoding_and_schema():
    rec = ZeroRecord(0.1 + 14.134725141734695j, "L", 1e-14, 1, RectBox(0, 1, 14, 15), 4)
    obj = json.loads(dumps(catalog_of([rec])))
    assert obj["schema"] == 1
    assert obj["records"][0]["location"] == {"re": 0.1, "im": 14.134725141734695}
    with pytest.raises(DomainError):
        loads(json.dumps({**obj, "schema": 2}))


def test_csv_export(tmp_path):
    rec = ZeroRecord(0.5 + 14.1j, "L", 1e-14, 1, RectBox(0, 1, 14, 15), 4)
    text = to_csv(catalog_of([rec]))
    lines = text.splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert lines[1].startswith("0.5,14.1,L,")
    path = tmp_path / "c.csv"
    write_catalog(catalog_of([rec]), path, "csv")
    assert path.read_text() == text
    with pytest.raises(DomainError):
        write_catalog(catalog_of([rec]), path, "xml")


def test_file_round_trip(tmp_path):
    rec = ZeroRecord(0.5 + 14.1j, "L", 1e-14, 1, RectBox(0, 1, 14, 15), 4)
    path = tmp_path / "c.json"
    write_catalog(catalog_of([rec]), path)
    first = path.read_bytes()
    write_catalog(read_catalog(path), path)
    assert path.read_bytes() == first


def test_atomic_write_leaves_no_partial_file(tmp_path):
    path = tmp_path / "out.json"
    atomic_write(path, "old\n")

    with pytest.raises(TypeError):
        atomic_write(path, 12345)          # write() fails mid-way
    assert path.read_text() == "old\n"
    assert [p.name for p in tmp_path.iterdir()] == ["out.json"]


def test_atomic_write_replaces(tmp_path):
    path = tmp_path / "x.txt"
    atomic_write(path, "a")
    atomic_write(path, "b")
    assert path.read_text() == "b"
    assert os.listdir(tmp_path) == ["x.txt"]


def _traj(truncated=False):
    t = Trajectory("Lprime", [(1.0, 0.4 + 150j, 1e-13), (0.999, 0.6 + 150.1j, 2e-13)],
                   truncated=truncated, diagnostic="StepUnderflow: x" if truncated else None)
    return t


def test_trajectory_dict():
    d = trajectory_dict(_traj(), {"version": "0.1.0"}, [(0.9995, 0.5 + 150.05j)])
    assert d["status"] == "COMPLETE"
    assert d["samples"][1] == {"lambda": 0.999, "position": {"re": 0.6, "im": 150.1},
                               "residual": 2e-13}
    assert d["crossings"][0]["lambda"] == 0.9995
    assert trajectory_dict(_traj(True), {})["status"] == "TRUNCATED"


def test_plot_csv():
    text = plot_csv(_traj(True), [(0.9995, 0.5 + 150.05j)])
    lines = text.splitlines()
    assert lines[0] == "lambda,sigma,t,event"
    assert lines[1] == "1.0,0.4,150.0,"
    assert "0.9995,0.5,150.05,crossing" in lines
    assert lines[-1].endswith(",TRUNCATED")
