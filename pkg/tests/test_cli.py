import json

import numpy as np
import pytest

from paulicloner import analytic, cli, optimize


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestFidelitiesCommand:
    def test_uqcm_preset_single_qubit(self, capsys):
        code, out, _ = run_cli(
            capsys, "fidelities", "--kind", "ng", "--n", "1", "--preset", "uqcm-sym"
        )
        assert code == 0
        payload = json.loads(out)
        for lbl in "ZXY":
            assert payload["f_ab"][lbl] == pytest.approx(5 / 6, abs=1e-10)
            assert payload["f_ae"][lbl] == pytest.approx(5 / 6, abs=1e-10)

    def test_uqcm_preset_two_qubit(self, capsys):
        code, out, _ = run_cli(
            capsys, "fidelities", "--kind", "ng", "--n", "2", "--preset", "uqcm-sym"
        )
        assert code == 0
        payload = json.loads(out)
        values = list(payload["f_ab"].values()) + list(payload["f_ae"].values())
        assert len(values) == 10
        np.testing.assert_allclose(values, 0.7, atol=1e-10)

    def test_amplitudes_with_noise(self, capsys):
        code, out, _ = run_cli(
            capsys,
            "fidelities",
            "--kind",
            "ng",
            "--n",
            "1",
            "--amplitudes",
            "1,0,0,0",
            "--noise",
            "X=0.25",
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["f_ab"]["Z"] == pytest.approx(0.75)
        assert payload["f_ab"]["X"] == pytest.approx(1.0)

    def test_qid_uqcm_preset(self, capsys):
        code, out, _ = run_cli(
            capsys, "fidelities", "--kind", "qid", "--n", "2", "--preset", "qid-uqcm-sym"
        )
        payload = json.loads(out)
        np.testing.assert_allclose(list(payload["f_ab"].values()), 0.7, atol=1e-10)

    def test_csv_output(self, capsys, tmp_path):
        path = tmp_path / "fid.csv"
        code, _, _ = run_cli(
            capsys,
            "fidelities",
            "--kind",
            "ng",
            "--n",
            "1",
            "--preset",
            "pccm-sym",
            "--out",
            str(path),
        )
        assert code == 0
        lines = path.read_text().splitlines()
        assert lines[0].startswith("# ")
        assert lines[1] == "basis,state,F_AB,F_AE"
        assert len(lines) == 2 + 6  # three bases, two states each

    def test_conflicting_program_sources(self, capsys):
        code, _, err = run_cli(
            capsys,
            "fidelities",
            "--kind",
            "ng",
            "--n",
            "1",
            "--preset",
            "uqcm-sym",
            "--amplitudes",
            "1,0,0,0",
        )
        assert code == 2
        assert "exactly one" in err

    def test_unknown_preset(self, capsys):
        code, _, _ = run_cli(
            capsys, "fidelities", "--kind", "ng", "--n", "1", "--preset", "bogus"
        )
        assert code == 2

    def test_imbalanced_preset_parses_eta(self, capsys):
        code, out, _ = run_cli(
            capsys,
            "fidelities",
            "--kind",
            "ng",
            "--n",
            "1",
            "--preset",
            "imbalanced(1.0)",
        )
        assert code == 0
        ref = analytic.table1_angles("pccm").to_program()
        payload = json.loads(out)
        got = [complex(re, im) for re, im in payload["program"]]
        np.testing.assert_allclose(got, ref.amplitudes, atol=1e-10)


class TestValidateCommand:
    def test_default_run_passes(self, capsys):
        code, out, _ = run_cli(capsys, "validate", "--trials", "10", "--seed", "7")
        assert code == 0
        assert "[FAIL]" not in out
        assert "checks passed" in out

    def test_deterministic_report(self, capsys):
        _, out1, _ = run_cli(capsys, "validate", "--trials", "5", "--seed", "3")
        _, out2, _ = run_cli(capsys, "validate", "--trials", "5", "--seed", "3")
        assert out1 == out2

    def test_corrupted_table_fails_with_named_check(self, capsys, monkeypatch):
        # flip one sign in a coefficient table: the qid-2q oracle must trip
        bad = tuple(
            (i, j, -s) if idx == 0 else (i, j, s)
            for idx, (i, j, s) in enumerate(analytic._QID2Q_AB_M2)
        )
        monkeypatch.setattr(analytic, "_QID2Q_AB_M2", bad)
        code, out, _ = run_cli(capsys, "validate", "--trials", "5", "--seed", "3")
        assert code == 1
        assert "[FAIL] analytic-vs-sim-qid-2q" in out


class TestSweepCommand:
    def test_b92_sweep_csv_is_deterministic(self, capsys, tmp_path):
        path1 = tmp_path / "a.csv"
        argv = [
            "sweep",
            "--task",
            "b92",
            "--f",
            "0.8:0.8:0.1",
            "--steps",
            "5",
            "--restarts",
            "2",
            "--seed",
            "9",
            "--grid-resolution",
            "16",
        ]
        code, _, _ = run_cli(capsys, *argv, "--out", str(path1))
        assert code == 0
        first = path1.read_bytes()
        run_cli(capsys, *argv, "--out", str(path1))
        assert first == path1.read_bytes()
        lines = path1.read_text().splitlines()
        assert lines[0].startswith("# ")
        assert "b92" in lines[0]
        header = lines[1].split(",")
        assert header[:5] == ["f_target", "series", "label", "F_AB_avg", "F_AE_avg"]
        series = {line.split(",")[1] for line in lines[2:]}
        assert series == {"qml", "grid-ng", "grid-qid"}

    def test_bad_range_exits_2(self, capsys):
        code, _, _ = run_cli(
            capsys, "sweep", "--task", "b92", "--f", "0.9:0.5:0.1"
        )
        assert code == 2
        code, _, _ = run_cli(capsys, "sweep", "--task", "b92", "--f", "nonsense")
        assert code == 2

    def test_optimizer_failure_exits_1(self, capsys, monkeypatch):
        def exploding(*args, **kwargs):
            raise RuntimeError("objective diverged")

        monkeypatch.setattr(optimize, "adam_optimize", exploding)
        code, _, err = run_cli(
            capsys, "sweep", "--task", "bb84", "--noise", "X=0.25", "--f", "0.7:0.7:0.1"
        )
        assert code == 1
        assert "diverged" in err

    def test_unknown_task_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            run_cli(capsys, "sweep", "--task", "everything")
        assert exc.value.code == 2


class TestOptimizeCommand:
    def test_single_target_json(self, capsys):
        code, out, _ = run_cli(
            capsys,
            "optimize",
            "--task",
            "bb84",
            "--noise",
            "X=0.25",
            "--f-target",
            "0.7",
            "--steps",
            "30",
            "--restarts",
            "1",
            "--seed",
            "2",
        )
        assert code == 0
        payload = json.loads(out)
        ng_rows = [r for r in payload["rows"] if r["series"] == "ng"]
        assert len(ng_rows) == 1
        assert len(ng_rows[0]["params"]) == 3
        assert 0.5 <= ng_rows[0]["f_ab_avg"] <= 1.0


class TestTableAndMubs:
    def test_table_two_qubits(self, capsys):
        code, out, _ = run_cli(capsys, "table", "--n", "2")
        assert code == 0
        assert "XX, IX, XI" in out
        row = next(l for l in out.splitlines() if l.startswith("ZZ"))
        assert row.split()[-5:] == ["0", "1", "1", "1", "1"]

    def test_table_three_qubits_lists_classes(self, capsys):
        code, out, _ = run_cli(capsys, "table", "--n", "3")
        assert code == 0
        assert "9 commuting classes of 7" in out

    def test_table_rejects_bad_size(self, capsys):
        with pytest.raises(SystemExit) as exc:
            run_cli(capsys, "table", "--n", "4")
        assert exc.value.code == 2

    def test_mubs_check(self, capsys):
        code, out, _ = run_cli(capsys, "mubs", "--n", "2", "--check")
        assert code == 0
        dev = float(out.splitlines()[-1].split()[-1])
        assert dev < 1e-12
