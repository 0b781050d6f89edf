import json
import math
import os

import pytest

from kms_cayley.cli import run


def capture(capsys, argv):
    code = run(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


class TestCriticalBeta:
    def test_heisenberg_payload(self, capsys):
        code, out, _ = capture(capsys, ["critical-beta", "--group", "heisenberg"])
        assert code == 0
        payload = json.loads(out)
        assert payload["beta0"] == pytest.approx(math.log(6), abs=1e-12)

    def test_check_mode(self, capsys):
        code, out, _ = capture(
            capsys, ["critical-beta", "--group", "dihedral_infinite", "--check"])
        assert code == 0
        assert json.loads(out)["residual"] <= 1e-12

    def test_seventeen_digit_floats(self, capsys):
        _, out, _ = capture(capsys, ["critical-beta", "--group", "heisenberg"])
        assert '"beta0": 1.791759469228055' in out

    def test_deterministic_output(self, capsys):
        _, first, _ = capture(capsys, ["critical-beta", "--group", "heisenberg"])
        _, second, _ = capture(capsys, ["critical-beta", "--group", "heisenberg"])
        assert first == second


class TestKmsEval:
    def test_critical_cylinder(self, capsys):
        code, out, _ = capture(capsys, [
            "kms-eval", "--group", "heisenberg", "--beta-critical",
            "--t", "a,b", "--u", "a,b"])
        assert code == 0
        assert json.loads(out)["value"] == pytest.approx(1 / 36, abs=1e-14)

    def test_endpoint_mismatch_exits_2(self, capsys):
        code, _, err = capture(capsys, [
            "kms-eval", "--group", "heisenberg", "--beta-critical",
            "--t", "a", "--u", "b"])
        assert code == 2
        assert "endpoint" in err

    def test_state_file(self, capsys, tmp_path):
        state = {"beta": math.log(2.5),
                 "mixture": [{"w": 0.5, "dihedral_t": 0.0},
                             {"w": 0.5, "dihedral_t": 1.0}]}
        path = tmp_path / "state.json"
        path.write_text(json.dumps(state))
        code, out, _ = capture(capsys, [
            "kms-eval", "--group", "dihedral_infinite", "--state", str(path),
            "--t", "a", "--u", "a"])
        assert code == 0
        assert json.loads(out)["value"] == pytest.approx(0.5, abs=1e-12)

    def test_malformed_word_exits_1(self, capsys):
        code, _, err = capture(capsys, [
            "kms-eval", "--group", "heisenberg", "--beta-critical",
            "--t", "a,zz", "--u", "a,zz"])
        assert code == 1
        assert "zz" in err


class TestQBeta:
    def test_below_critical_exits_2(self, capsys):
        code, _, err = capture(capsys, [
            "q-beta", "--group", "heisenberg", "--beta", "1.7"])
        assert code == 2
        assert "beta0" in err

    def test_sphere_csv(self, capsys):
        code, out, _ = capture(capsys, [
            "q-beta", "--group", "heisenberg", "--beta", "2.5",
            "--grid", "8", "--format", "csv", "--check"])
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "u1,u2,p_a,p_a_inv,p_b,p_b_inv,p_c,p_c_inv,residual"
        assert len(lines) == 9

    def test_critical_single_point(self, capsys):
        code, out, _ = capture(capsys, [
            "q-beta", "--group", "heisenberg", "--beta-critical"])
        assert code == 0
        payload = json.loads(out)
        assert len(payload["points"]) == 1

    def test_rank_zero_exits_2(self, capsys):
        code, _, _ = capture(capsys, [
            "q-beta", "--group", "dihedral_infinite", "--beta", "1.0"])
        assert code == 2


class TestChecksAndVectors:
    def test_beta_of_u(self, capsys):
        code, out, _ = capture(capsys, [
            "beta-of-u", "--group", "zn:1", "--u", "1.0", "--check"])
        assert code == 0
        payload = json.loads(out)
        assert payload["beta"] == pytest.approx(
            math.log(math.exp(1) + math.exp(-1)), abs=1e-12)

    def test_beta_of_u_rank_zero(self, capsys):
        code, out, _ = capture(capsys, [
            "beta-of-u", "--group", "cyclic:3"])
        assert code == 0
        assert json.loads(out)["beta"] == pytest.approx(math.log(2), abs=1e-12)

    def test_harmonic_check_dihedral(self, capsys):
        code, out, _ = capture(capsys, [
            "harmonic-check", "--group", "dihedral_infinite",
            "--beta", str(math.log(2.5)), "--t-param", "0.25",
            "--radius", "6", "--check"])
        assert code == 0
        assert json.loads(out)["residual"] <= 1e-10

    def test_harmonic_check_failing_vector(self, capsys):
        code, _, err = capture(capsys, [
            "harmonic-check", "--group", "heisenberg", "--beta", "2.8",
            "--u", "0,0", "--radius", "2", "--check"])
        assert code == 2
        assert "check failed" in err

    def test_kms_check(self, capsys):
        code, out, _ = capture(capsys, [
            "kms-check", "--group", "dihedral_infinite",
            "--beta", str(math.log(2.5)), "--t-param", "1.0",
            "--max-len", "5", "--check"])
        assert code == 0
        assert json.loads(out)["violation"] <= 1e-10


class TestFanAndNinf:
    def test_fan_json(self, capsys):
        code, out, _ = capture(capsys, ["fan", "--group", "heisenberg"])
        assert code == 0
        payload = json.loads(out)
        dims = sorted(c["dim"] for c in payload["cones"])
        assert dims == [0, 1, 1, 1, 1, 2, 2, 2, 2]

    def test_ninf_single_direction_check(self, capsys):
        code, out, _ = capture(capsys, [
            "ninf", "--group", "heisenberg", "--v", "2,1", "--check"])
        assert code == 0
        payload = json.loads(out)
        assert payload["p"]["a"] == pytest.approx(1 / (3 - math.sqrt(2)), abs=1e-9)
        assert payload["oracle_gap"] <= 1e-6

    def test_ninf_grid_csv(self, capsys):
        code, out, _ = capture(capsys, [
            "ninf", "--group", "zn:1", "--grid", "2", "--format", "csv"])
        assert code == 0
        lines = out.strip().splitlines()
        assert lines == ["v1,p_e1,p_e1_inv", "1,1,0", "-1,0,1"]

    def test_ninf_rank_zero_exits_2(self, capsys):
        code, _, _ = capture(capsys, [
            "ninf", "--group", "dihedral_infinite", "--v", "1"])
        assert code == 2

    def test_env_override_applies(self, capsys, monkeypatch):
        monkeypatch.setenv("KMS_CAYLEY_EPS_LIMIT", "1e-30")
        code, _, err = capture(capsys, [
            "ninf", "--group", "heisenberg", "--v", "2,1", "--check"])
        assert code == 2
        assert "oracle gap" in err

    def test_dihedral_subcommand(self, capsys):
        code, out, _ = capture(capsys, [
            "dihedral", "--group", "dihedral_infinite",
            "--beta", str(math.log(2.5)), "--t-param", "1.0",
            "--range", "2", "--check"])
        assert code == 0
        payload = json.loads(out)
        assert payload["c_beta"] == pytest.approx(math.log(2), abs=1e-12)
        assert payload["x"]["2"] == pytest.approx(4.0, abs=1e-12)
        assert payload["y"]["1"] == pytest.approx(1.0, abs=1e-12)


class TestValidateAndUsage:
    def test_validate_builtin(self, capsys):
        code, out, _ = capture(capsys, ["validate", "--group", "heisenberg"])
        assert code == 0
        assert json.loads(out)["ok"] is True

    def test_validate_bad_group_exits_2(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({
            "name": "quadrant", "generators": ["p", "q"],
            "F": {"p": 1.0, "q": 1.0}, "rank": 2,
            "c": {"p": [1.0, 0.0], "q": [0.0, 1.0]},
            "oracle": "free_abelian"}))
        code, out, _ = capture(capsys, ["validate", "--group", str(path)])
        assert code == 2
        assert json.loads(out)["ok"] is False

    def test_unknown_group_exits_1(self, capsys):
        code, _, _ = capture(capsys, ["critical-beta", "--group", "nope"])
        assert code == 1

    def test_bad_flag_exits_1(self, capsys):
        code, _, _ = capture(capsys, ["critical-beta", "--group", "heisenberg",
                                      "--bogus"])
        assert code == 1

    def test_bad_vector_exits_1(self, capsys):
        code, _, _ = capture(capsys, [
            "beta-of-u", "--group", "zn:2", "--u", "1.0"])
        assert code == 1


class TestReport:
    def test_writes_bundle(self, capsys, tmp_path):
        out_dir = tmp_path / "bundle"
        code, out, _ = capture(capsys, [
            "report", "--group", "heisenberg", "--out", str(out_dir),
            "--grid", "24"])
        assert code == 0
        written = json.loads(out)["written"]
        names = {os.path.basename(p) for p in written}
        assert {"summary.json", "qbeta_grid.csv", "qbeta.png",
                "ninf_grid.csv", "ninf_profile.png"} <= names
        for path in written:
            assert os.path.getsize(path) > 0

    def test_dihedral_bundle(self, capsys, tmp_path):
        out_dir = tmp_path / "dinf"
        code, out, _ = capture(capsys, [
            "report", "--group", "dihedral_infinite", "--out", str(out_dir)])
        assert code == 0
        names = {os.path.basename(p) for p in json.loads(out)["written"]}
        assert "dihedral_family.png" in names
