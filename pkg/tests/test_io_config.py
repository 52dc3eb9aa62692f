import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import lvpoisson as lv
from lvpoisson import (
    CanonicalSystem,
    FormatError,
    ParseError,
    ValidationError,
    bundled_config,
    load_config,
    read_trajectory,
    simulate,
    write_trajectory,
)
from lvpoisson.config import parse_config
from lvpoisson.trajectory import Trajectory


class TestConfig:
    def test_bundled_has_four_systems(self):
        cfg = bundled_config()
        assert len(cfg.systems) == 4
        assert isinstance(cfg.system("harmonic-oscillator"), CanonicalSystem)
        assert cfg.system("integrable-5d").dim == 5
        assert cfg.tolerances.solver_tol == 1e-12
        assert cfg.tolerances.report_tol == 1e-9

    def test_load_from_file(self, tmp_path):
        path = tmp_path / "conf.yaml"
        path.write_text(
            "systems:\n"
            "  pp:\n"
            "    dim: 2\n"
            "    A: [[0, 1], [-1, 0]]\n"
            "    eps: [-1, 1]\n"
        )
        cfg = load_config(path)
        np.testing.assert_allclose(cfg.system("pp").q, [1.0, 1.0])

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.yaml"
        path.write_text("")
        with pytest.raises(ParseError):
            load_config(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ParseError):
            load_config(tmp_path / "nope.yaml")

    def test_malformed_yaml(self):
        with pytest.raises(ParseError):
            parse_config("systems: [unclosed")

    def test_antisymmetry_violation_named(self):
        text = (
            "systems:\n"
            "  bad:\n"
            "    dim: 2\n"
            "    A: [[0, 1], [-0.999, 0]]\n"
            "    eps: [-1, 1]\n"
        )
        with pytest.raises(ValidationError, match="NotAntisymmetric"):
            parse_config(text)

    def test_ragged_matrix(self):
        text = (
            "systems:\n"
            "  bad:\n"
            "    dim: 2\n"
            "    A: [[0, 1, 3], [-1, 0]]\n"
            "    eps: [-1, 1]\n"
        )
        with pytest.raises(ValidationError, match="row-major"):
            parse_config(text)

    def test_missing_key(self):
        with pytest.raises(ValidationError, match="eps"):
            parse_config("systems:\n  bad:\n    dim: 2\n    A: [[0, 1], [-1, 0]]\n")

    def test_experiment_reference_checked(self):
        text = (
            "systems: {}\n"
            "experiments:\n"
            "  exp:\n"
            "    system: ghost\n"
            "    h: 0.1\n"
            "    n_steps: 5\n"
        )
        with pytest.raises(ValidationError, match="ghost"):
            parse_config(text)

    def test_first_integral_roundtrip(self):
        cfg = bundled_config()
        sys5 = cfg.system("integrable-5d")
        names = [fi.name for fi in sys5.first_integrals]
        assert names == ["I1", "I2"]
        x = np.full(5, 2.0)
        total = sum(fi.value(x) for fi in sys5.first_integrals)
        assert total == pytest.approx(lv.hamiltonian(sys5, x), rel=1e-14)

    def test_unknown_system_lookup(self):
        with pytest.raises(ValidationError, match="unknown system"):
            bundled_config().system("missing")

    def test_bad_tolerance(self):
        with pytest.raises(ValidationError, match="solver_tol"):
            parse_config("systems: {}\ntolerances:\n  solver_tol: -1\n")


def _sample_traj(sys5, n=7):
    return simulate(sys5, "hp1", np.full(5, 2.0), 0.5, n)


class TestTrajectoryIO:
    def test_roundtrip_bit_exact(self, sys5, tmp_path):
        traj = _sample_traj(sys5)
        path = tmp_path / "traj.csv"
        write_trajectory(traj, path)
        back = read_trajectory(path)
        np.testing.assert_array_equal(back.times, traj.times)
        np.testing.assert_array_equal(back.states, traj.states)
        assert list(back.diagnostics) == list(traj.diagnostics)
        for name in traj.diagnostics:
            np.testing.assert_array_equal(
                back.diagnostics[name], traj.diagnostics[name], err_msg=name
            )

    def test_header_layout(self, sys5, tmp_path):
        path = tmp_path / "traj.csv"
        write_trajectory(_sample_traj(sys5), path)
        header = path.read_text().splitlines()[0]
        assert header == "t,x1,x2,x3,x4,x5,H,C1,I1,I2,stage_iters,stage_residual"

    def test_nan_rejected_at_write(self, tmp_path):
        traj = Trajectory(
            times=np.arange(3.0),
            states=np.ones((3, 2)),
            diagnostics={"H": np.array([1.0, np.nan, 1.0])},
        )
        with pytest.raises(FormatError):
            write_trajectory(traj, tmp_path / "bad.csv")

    def test_header_mismatch(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("time,x1,H\n0,1,1\n")
        with pytest.raises(FormatError):
            read_trajectory(path)

    def test_no_state_columns(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("t,H\n0,1\n")
        with pytest.raises(FormatError):
            read_trajectory(path)

    def test_ragged_row(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("t,x1,H\n0,1,1\n1,2\n")
        with pytest.raises(FormatError):
            read_trajectory(path)

    def test_stage_iters_integer_dtype(self, sys5, tmp_path):
        path = tmp_path / "traj.csv"
        write_trajectory(_sample_traj(sys5), path)
        back = read_trajectory(path)
        assert back.diagnostics["stage_iters"].dtype.kind == "i"

    @settings(max_examples=30, deadline=None)
    @given(
        st.lists(
            st.floats(
                min_value=-1e300, max_value=1e300,
                allow_nan=False, allow_infinity=False,
            ),
            min_size=4,
            max_size=4,
        )
    )
    def test_seventeen_digits_roundtrip(self, vals):
        # 17 significant decimal digits reproduce any double bit-exactly
        import tempfile, os
        traj = Trajectory(
            times=np.arange(2.0),
            states=np.array(vals, dtype=float).reshape(2, 2),
            diagnostics={},
        )
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "t.csv")
            write_trajectory(traj, path)
            back = read_trajectory(path)
        np.testing.assert_array_equal(back.states, traj.states)


class TestTrajectoryInvariants:
    def test_nonuniform_spacing_rejected(self):
        with pytest.raises(FormatError):
            Trajectory(
                times=np.array([0.0, 1.0, 3.0]),
                states=np.ones((3, 1)),
                diagnostics={},
            )

    def test_decreasing_times_rejected(self):
        with pytest.raises(FormatError):
            Trajectory(
                times=np.array([0.0, -1.0]), states=np.ones((2, 1)), diagnostics={}
            )

    def test_length_mismatch_rejected(self):
        with pytest.raises(FormatError):
            Trajectory(
                times=np.arange(3.0),
                states=np.ones((2, 1)),
                diagnostics={},
            )

    def test_column_lookup(self, sys5):
        traj = _sample_traj(sys5)
        np.testing.assert_array_equal(traj.column("t"), traj.times)
        np.testing.assert_array_equal(traj.column("x2"), traj.states[:, 1])
        with pytest.raises(FormatError):
            traj.column("x9")
        with pytest.raises(FormatError):
            traj.column("bogus")
