import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mpi1d.config import ConfigError, parse_config, serialize_config
from mpi1d.grids import SpaceGrid
from mpi1d.imaging import Phantom, Signal, make_phantom
from mpi1d.io import (FormatError, fmt_float, matrix_from_bytes, matrix_to_bytes, read_matrix,
                      read_phantom_csv, read_signal_csv, read_spectrum_csv, write_matrix,
                      write_phantom_csv, write_signal_csv, write_spectrum_csv)
from mpi1d.operator import OperatorMatrix
from mpi1d.spectral import SpectrumReport

MINIMAL = {"A": 1.0, "G": 2.0, "T": 0.5, "a": 1.0, "beta": 3.0, "n_space": 11}


def op_of(data, dom="fov", cod="time"):
    return OperatorMatrix(np.asarray(data, dtype=float), dom, cod)


# binary matrix -----------------------------------------------------------------------

def test_matrix_round_trip(tmp_path):
    data = np.random.default_rng(0).standard_normal((7, 5))
    data[0, 0] = -0.0
    data[1, 1] = 5e-324
    op = op_of(data, "fov", "freq")
    back = matrix_from_bytes(matrix_to_bytes(op))
    assert back.data.tobytes() == data.tobytes()
    assert (back.domain_tag, back.codomain_tag) == ("fov", "freq")
    write_matrix(tmp_path / "m.bin", op)
    assert read_matrix(tmp_path / "m.bin").data.tobytes() == data.tobytes()


def test_matrix_header_layout():
    buf = matrix_to_bytes(op_of(np.ones((2, 3)), "fov", "time"))
    assert buf[:8] == b"MPI1DMAT" and buf[8] == 1
    assert int.from_bytes(buf[9:17], "little") == 2
    assert int.from_bytes(buf[17:25], "little") == 3
    assert buf[25:29] == b"\x03fov" and buf[29:34] == b"\x04time"
    assert len(buf) == 34 + 8 * 6


def test_matrix_rejects_corruption():
    buf = matrix_to_bytes(op_of(np.ones((2, 3))))
    for bad in (b"XXXXXXXX" + buf[8:], buf[:20], buf[:-1], buf + b"\0", buf[:8] + b"\x02" + buf[9:]):
        with pytest.raises(FormatError):
            matrix_from_bytes(bad)


# CSV ------------------------------------------------------------------------------------

@given(st.floats(allow_nan=False, allow_infinity=False))
def test_float_format_round_trips(x):
    assert float(fmt_float(x)) == x


def test_spectrum_csv_round_trip(tmp_path):
    rep = SpectrumReport([2.0, 1.0 / 3.0, 1e-30])
    write_spectrum_csv(tmp_path / "s.csv", rep)
    text = (tmp_path / "s.csv").read_text()
    assert text.splitlines()[0] == "index,sigma,trusted"
    assert text.splitlines()[3] == "3,1e-30,false"
    assert np.array_equal(read_spectrum_csv(tmp_path / "s.csv").sigmas, rep.sigmas)


def test_spectrum_csv_rejects_bad_indices(tmp_path):
    (tmp_path / "s.csv").write_text("index,sigma,trusted\n2,1.0,true\n")
    with pytest.raises(FormatError):
        read_spectrum_csv(tmp_path / "s.csv")


def test_phantom_csv_round_trip_and_grid_check(tmp_path):
    g = SpaceGrid(41, -2.0, 2.0)
    c = make_phantom("gaussian", 0.2, 0.3, 1.5, g)
    write_phantom_csv(tmp_path / "c.csv", c)
    assert (tmp_path / "c.csv").read_text().startswith("coordinate,value\n")
    back = read_phantom_csv(tmp_path / "c.csv", g)
    assert np.array_equal(back.values, c.values)
    with pytest.raises(FormatError):
        read_phantom_csv(tmp_path / "c.csv", SpaceGrid(41, -1.0, 1.0))


def test_signal_csv_round_trip(tmp_path):
    t = Signal("time", [1.0, -2.5, 0.1], coords=[0.0, 0.25, 0.5], noise_level=0.01, seed=42)
    write_signal_csv(tmp_path / "t.csv", t)
    lines = (tmp_path / "t.csv").read_text().splitlines()
    assert lines[:2] == ["# noise=0.01 seed=42", "time,value"]
    back = read_signal_csv(tmp_path / "t.csv")
    assert back.kind == "time" and (back.noise_level, back.seed) == (0.01, 42)
    assert np.array_equal(back.samples, t.samples) and np.array_equal(back.coords, t.coords)
    f = Signal("freq", [0.5, 0.0, -0.25])
    write_signal_csv(tmp_path / "f.csv", f)
    assert (tmp_path / "f.csv").read_text().splitlines()[1:3] == ["index,value", "1,0.5"]
    back = read_signal_csv(tmp_path / "f.csv")
    assert back.kind == "freq" and back.seed is None
    assert np.array_equal(back.samples, f.samples)


# config --------------------------------------------------------------------------------------

def test_minimal_config_defaults():
    cfg = parse_config(json.dumps(MINIMAL))
    assert (cfg.trajectory, cfg.oversample, cfg.window) == ("cosine", 4, "half")
    assert cfg.n_max is None and cfg.frequencies == 11
    assert cfg.params.T_period == 0.5
    assert cfg.time_grid().n_points == 44


def test_config_errors_name_the_key():
    with pytest.raises(ConfigError, match="n_space must be ≥ 2"):
        parse_config(json.dumps(dict(MINIMAL, n_space=1)))
    cases = [(dict(MINIMAL, colour="red"), "colour"),
             ({k: v for k, v in MINIMAL.items() if k != "G"}, "G"),
             (dict(MINIMAL, A="1"), "A"),
             (dict(MINIMAL, beta=-1), "beta"),
             (dict(MINIMAL, n_space=10.5), "n_space"),
             (dict(MINIMAL, oversample=0), "oversample"),
             (dict(MINIMAL, window="quarter"), "window"),
             (dict(MINIMAL, trajectory="spiral"), "trajectory")]
    for d, key in cases:
        with pytest.raises(ConfigError) as info:
            parse_config(json.dumps(d))
        assert info.value.key == key
    with pytest.raises(ConfigError):
        parse_config("{not json")
    with pytest.raises(ConfigError):
        parse_config("[1, 2]")


@given(st.fixed_dictionaries(
    {"A": st.floats(1e-3, 1e3), "G": st.floats(1e-3, 1e4), "T": st.floats(1e-6, 10),
     "a": st.floats(1e-3, 10), "beta": st.floats(1e-6, 10), "n_space": st.integers(2, 10_000)},
    optional={"trajectory": st.sampled_from(["cosine", "sawtooth"]),
              "oversample": st.integers(1, 8), "window": st.sampled_from(["half", "full"]),
              "n_max": st.integers(2, 500),
              "paths": st.dictionaries(st.sampled_from(["out", "in"]), st.text(max_size=8))}))
def test_config_round_trip(d):
    cfg = parse_config(json.dumps(d))
    assert parse_config(serialize_config(cfg)) == cfg
