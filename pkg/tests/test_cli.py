import json

import numpy as np
import pytest

from mdiw import serialize
from mdiw.cli import ConfigError, ScenarioConfig, main
from mdiw.states import projector, singlet_ket


BASE_CONFIG = {
    "parties": 2,
    "witness": "singlet",
    "ensembles": ["tetrahedron", "tetrahedron"],
    "state": {"family": "werner", "v": 1.0},
    "decomposition": "paper",
    "loss": [1.0, 1.0],
    "seed": 7,
    "attack": {"restarts": 4, "iterations": 60, "mixture_size": 2, "share_dim": 2},
}


def write_config(tmp_path, overrides=None, name="cfg.json"):
    data = json.loads(json.dumps(BASE_CONFIG))
    for key, value in (overrides or {}).items():
        data[key] = value
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


class TestScenarioConfig:
    def test_round_trip(self):
        cfg = ScenarioConfig.from_dict(BASE_CONFIG)
        assert ScenarioConfig.from_dict(cfg.to_dict()) == cfg

    def test_defaults_fill_in(self):
        cfg = ScenarioConfig.from_dict(
            {
                "parties": 2,
                "witness": "singlet",
                "ensembles": ["tetrahedron", "tetrahedron"],
                "state": {"family": "werner", "v": 0.5},
            }
        )
        assert cfg.loss == (1.0, 1.0)
        assert cfg.attack["kind"] == "separable"
        assert cfg.decomposition == "paper"

    @pytest.mark.parametrize(
        "overrides",
        [
            {"parties": 4},
            {"ensembles": ["tetrahedron"]},
            {"state": {"family": "werner", "v": 1.5}},
            {"state": {"family": "unknown", "v": 0.5}},
            {"loss": [1.0, 0.0]},
            {"decomposition": "guess"},
            {"seed": -3},
            {"attack": {"kind": "quantum"}},
            {"extra_key": 1},
        ],
    )
    def test_invalid_configs_rejected(self, overrides):
        data = json.loads(json.dumps(BASE_CONFIG))
        data.update(overrides)
        with pytest.raises(ConfigError):
            ScenarioConfig.from_dict(data)

    def test_unresolvable_tabulated_combination(self):
        cfg = ScenarioConfig.from_dict(
            {
                "parties": 2,
                "witness": "singlet",
                "ensembles": ["tetrahedron", "pauli6"],
                "state": {"family": "werner", "v": 0.5},
            }
        )
        with pytest.raises(ConfigError, match="tabulated"):
            cfg.resolve_decomposition()

    def test_witness_ensemble_dims_cross_checked(self):
        cfg = ScenarioConfig.from_dict(
            {
                "parties": 3,
                "witness": "singlet",
                "ensembles": ["tetrahedron"] * 3,
                "state": {"family": "noisy_ghz", "v": 0.5},
            }
        )
        with pytest.raises(ConfigError, match="dims"):
            cfg.resolve_witness()


class TestDecomposeCommand:
    def test_tabulated_singlet(self, tmp_path, capsys):
        cfg = write_config(tmp_path)
        assert main(["decompose", "-c", cfg]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["ensembles"] == ["tetrahedron", "tetrahedron"]
        assert doc["residual"] < 1e-10
        assert doc["beta"][0][0] == pytest.approx(0.625)

    def test_solved_pauli6(self, tmp_path, capsys):
        cfg = write_config(
            tmp_path,
            {"ensembles": ["pauli6", "pauli6"], "decomposition": "solve"},
        )
        assert main(["decompose", "-c", cfg]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["residual"] < 1e-10

    def test_bad_config_exits_2(self, tmp_path, capsys):
        cfg = write_config(tmp_path, {"ensembles": ["tetrahedron"]})
        assert main(["decompose", "-c", cfg]) == 2
        assert "error" in capsys.readouterr().err

    def test_missing_file_exits_2(self, capsys):
        assert main(["decompose", "-c", "/nonexistent.json"]) == 2

    def test_output_file(self, tmp_path):
        cfg = write_config(tmp_path)
        out = tmp_path / "dec.json"
        assert main(["decompose", "-c", cfg, "-o", str(out)]) == 0
        assert json.loads(out.read_text())["residual"] < 1e-10


class TestSimulateCommand:
    def test_werner_v1(self, tmp_path, capsys):
        cfg = write_config(tmp_path)
        table_path = tmp_path / "table.csv"
        assert main(["simulate", "-c", cfg, "-o", str(table_path)]) == 0
        summary = json.loads(capsys.readouterr().out)
        assert summary["I"] == pytest.approx(-0.125, abs=1e-12)
        assert summary["expected"] == pytest.approx(-0.125, abs=1e-12)
        assert summary["witness_value_scaled"] == pytest.approx(-0.125, abs=1e-12)
        lines = table_path.read_text().splitlines()
        assert lines[0] == "A,B,p_all_ones"
        assert len(lines) == 17

    def test_werner_threshold_value(self, tmp_path, capsys):
        cfg = write_config(tmp_path, {"state": {"family": "werner", "v": 1 / 3}})
        assert main(["simulate", "-c", cfg, "-o", str(tmp_path / "t.csv")]) == 0
        summary = json.loads(capsys.readouterr().out)
        assert abs(summary["I"]) < 1e-12

    def test_noisy_ghz_v1(self, tmp_path, capsys):
        cfg = write_config(
            tmp_path,
            {
                "parties": 3,
                "witness": "ghz",
                "ensembles": ["tetrahedron"] * 3,
                "state": {"family": "noisy_ghz", "v": 1.0},
                "loss": [1.0, 1.0, 1.0],
            },
        )
        assert main(["simulate", "-c", cfg, "-o", str(tmp_path / "t.csv")]) == 0
        summary = json.loads(capsys.readouterr().out)
        assert summary["I"] == pytest.approx(-0.0625, abs=1e-12)

    def test_full_distribution_columns(self, tmp_path, capsys):
        cfg = write_config(tmp_path)
        table_path = tmp_path / "full.csv"
        assert main(["simulate", "-c", cfg, "-o", str(table_path), "--full"]) == 0
        header = table_path.read_text().splitlines()[0]
        assert header == "A,B,p_all_ones,p_00,p_01,p_10,p_11"

    def test_lossy_full_table_flags_folding_convention(self, tmp_path, capsys):
        cfg = write_config(tmp_path, {"loss": [0.8, 0.9]})
        assert main(["simulate", "-c", cfg, "-o", str(tmp_path / "t.csv"), "--full"]) == 0
        summary = json.loads(capsys.readouterr().out)
        assert summary["loss_folding"] == "outcome-0"
        assert summary["I"] == pytest.approx(0.72 * -0.125, abs=1e-13)

    def test_explicit_state_matrix_has_null_expected(self, tmp_path, capsys):
        state = {
            "matrix": serialize.matrix_to_json(np.eye(4) / 4),
            "dims": [2, 2],
        }
        cfg = write_config(tmp_path, {"state": state})
        assert main(["simulate", "-c", cfg, "-o", str(tmp_path / "t.csv")]) == 0
        summary = json.loads(capsys.readouterr().out)
        assert summary["expected"] is None
        assert summary["I"] == pytest.approx(1 / 16, abs=1e-12)


class TestScanCommand:
    def test_werner_closed_form_curve(self, tmp_path):
        cfg = write_config(tmp_path)
        out = tmp_path / "curve.csv"
        assert main(["scan", "-c", cfg, "--from", "0", "--to", "1", "--steps", "11",
                     "-o", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "v,I,expected,abs_err"
        assert len(lines) == 12
        for line in lines[1:]:
            v, value, expected, err = (float(x) for x in line.split(","))
            assert err < 1e-12
            assert value == pytest.approx((1 - 3 * v) / 16, abs=1e-12)

    def test_loss_scales_curve(self, tmp_path):
        plain_cfg = write_config(tmp_path, name="plain.json")
        lossy_cfg = write_config(tmp_path, {"loss": [0.5, 0.5]}, name="lossy.json")
        plain_out = tmp_path / "plain.csv"
        lossy_out = tmp_path / "lossy.csv"
        assert main(["scan", "-c", plain_cfg, "--steps", "9", "-o", str(plain_out)]) == 0
        assert main(["scan", "-c", lossy_cfg, "--steps", "9", "-o", str(lossy_out)]) == 0
        plain_rows = plain_out.read_text().splitlines()[1:]
        lossy_rows = lossy_out.read_text().splitlines()[1:]
        for p_row, l_row in zip(plain_rows, lossy_rows):
            p_i = float(p_row.split(",")[1])
            l_i = float(l_row.split(",")[1])
            assert l_i == pytest.approx(0.25 * p_i, abs=1e-15)

    def test_ghz_crossing_bracketed(self, tmp_path):
        cfg = write_config(
            tmp_path,
            {
                "parties": 3,
                "witness": "ghz",
                "ensembles": ["tetrahedron"] * 3,
                "state": {"family": "noisy_ghz", "v": 0.5},
                "loss": [1.0, 1.0, 1.0],
            },
        )
        out = tmp_path / "ghz.csv"
        # 10 steps keep the crossing strictly between grid points
        assert main(["scan", "-c", cfg, "--steps", "10", "-o", str(out)]) == 0
        rows = [line.split(",") for line in out.read_text().splitlines()[1:]]
        signs = [(float(v), float(i) > 0) for v, i, *_ in rows]
        flips = [
            (a[0], b[0]) for a, b in zip(signs, signs[1:]) if a[1] != b[1]
        ]
        assert len(flips) == 1
        low, high = flips[0]
        assert low < 3 / 7 < high

    def test_bad_range_exits_2(self, tmp_path):
        cfg = write_config(tmp_path)
        assert main(["scan", "-c", cfg, "--from", "0.9", "--to", "0.2"]) == 2

    def test_explicit_state_cannot_scan(self, tmp_path):
        state = {"matrix": serialize.matrix_to_json(np.eye(4) / 4), "dims": [2, 2]}
        cfg = write_config(tmp_path, {"state": state})
        assert main(["scan", "-c", cfg]) == 2


class TestAttackCommand:
    def test_bounded_expectation_passes(self, tmp_path, capsys):
        cfg = write_config(tmp_path)
        out = tmp_path / "report.json"
        assert main(["attack", "-c", cfg, "-o", str(out)]) == 0
        doc = json.loads(out.read_text())
        assert doc["min_I"] >= -1e-9
        assert doc["seed"] == 7
        assert len(doc["restart_minima"]) == 4

    def test_power_check_violable(self, tmp_path):
        non_witness = {
            "matrix": serialize.matrix_to_json(-projector(singlet_ket())),
            "dims": [2, 2],
        }
        cfg = write_config(
            tmp_path,
            {
                "witness": non_witness,
                "decomposition": "solve",
                "attack": {
                    "restarts": 10,
                    "iterations": 300,
                    "mixture_size": 2,
                    "share_dim": 2,
                    "expectation": "violable",
                },
            },
        )
        assert main(["attack", "-c", cfg, "-o", str(tmp_path / "r.json")]) == 0
        doc = json.loads((tmp_path / "r.json").read_text())
        assert doc["min_I"] < 0

    def test_deterministic_output_bytes(self, tmp_path):
        cfg = write_config(tmp_path)
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        assert main(["attack", "-c", cfg, "-o", str(a)]) == 0
        assert main(["attack", "-c", cfg, "-o", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_env_seed_override(self, tmp_path, monkeypatch):
        cfg = write_config(tmp_path)
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        monkeypatch.setenv("MDIW_SEED", "99")
        assert main(["attack", "-c", cfg, "-o", str(a)]) == 0
        monkeypatch.delenv("MDIW_SEED")
        assert main(["attack", "-c", cfg, "-o", str(b)]) == 0
        doc_a = json.loads(a.read_text())
        doc_b = json.loads(b.read_text())
        assert doc_a["seed"] == 99
        assert doc_b["seed"] == 7
        assert doc_a["restart_minima"] != doc_b["restart_minima"]

    def test_biseparable_kind(self, tmp_path, capsys):
        cfg = write_config(
            tmp_path,
            {
                "parties": 3,
                "witness": "ghz",
                "ensembles": ["tetrahedron"] * 3,
                "state": {"family": "noisy_ghz", "v": 0.5},
                "loss": [1.0, 1.0, 1.0],
                "attack": {
                    "kind": "biseparable",
                    "restarts": 2,
                    "iterations": 40,
                    "mixture_size": 2,
                    "share_dim": 2,
                },
            },
        )
        assert main(["attack", "-c", cfg]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["min_I"] >= -1e-9


class TestSerializeHelpers:
    def test_floats_have_17_significant_digits(self):
        assert serialize.fmt_float(1 / 3) == "0.33333333333333331"
        assert serialize.fmt_float(-0.125) == "-0.125"

    def test_float_round_trip(self):
        rng = np.random.default_rng(70)
        for x in rng.normal(size=100):
            assert float(serialize.fmt_float(x)) == x

    def test_matrix_round_trip(self):
        rng = np.random.default_rng(71)
        m = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        again = serialize.matrix_from_json(serialize.matrix_to_json(m))
        assert np.array_equal(m, again)

    def test_dumps_is_valid_json(self):
        doc = {"a": [1.5, None, True], "b": {"c": "text \" with quotes"}}
        assert json.loads(serialize.dumps(doc, indent=2)) == doc


class TestVerifyPlumbing:
    def test_corrupted_coefficients_fail_named_criterion(self, monkeypatch):
        import mdiw.verify as verify
        from mdiw.witness import Decomposition, reconstruct, tetrahedron_beta
        from mdiw.linalg import frobenius_distance
        from mdiw.witness import singlet_witness

        good = tetrahedron_beta()
        beta = np.array(good.beta)
        beta[0, 0] += 0.05
        corrupted = Decomposition(beta, good.ensembles, 0.0)
        residual = frobenius_distance(singlet_witness().matrix, reconstruct(corrupted))
        corrupted = Decomposition(beta, good.ensembles, residual)
        monkeypatch.setattr(verify, "tetrahedron_beta", lambda: corrupted)
        verdict = verify.check_closed_form_reconstructions()
        assert verdict.criterion == "closed_form_reconstructions"
        assert not verdict.passed
        assert verdict.details["tetrahedron_residual"] > 1e-10

    def test_cheap_checks_deterministic(self):
        import mdiw.verify as verify

        first = [
            verify.check_werner_closed_form(),
            verify.check_closed_form_reconstructions(),
            verify.check_ghz_threshold(),
        ]
        second = [
            verify.check_werner_closed_form(),
            verify.check_closed_form_reconstructions(),
            verify.check_ghz_threshold(),
        ]
        for a, b in zip(first, second):
            assert verify.verdict_to_dict(a) == verify.verdict_to_dict(b)
