import math

import numpy as np
import pytest

from tribell import cli, qcore


R3 = 1 / math.sqrt(3)


def test_parse_angle_fractions():
    assert cli.parse_angle("pi/4") == pytest.approx(math.pi / 4)
    assert cli.parse_angle("3pi/8") == pytest.approx(3 * math.pi / 8)
    assert cli.parse_angle("2*pi") == pytest.approx(2 * math.pi)
    assert cli.parse_angle("-pi/2") == pytest.approx(-math.pi / 2)
    assert cli.parse_angle("pi") == pytest.approx(math.pi)
    assert cli.parse_angle("0.75") == pytest.approx(0.75)
    with pytest.raises(qcore.ValidationError):
        cli.parse_angle("four")


def test_eval_fraction():
    assert cli.eval_fraction("2/3") == pytest.approx(2.0 / 3.0)
    assert cli.eval_fraction("0.45") == pytest.approx(0.45)


def test_parse_state_spec_ghz():
    spec = cli.parse_state_spec("family: ghz\ntheta: pi/4\ntheta3: pi/2\n")
    assert spec.kind == "ghz"
    assert spec.ghz.theta == pytest.approx(math.pi / 4)


def test_parse_state_spec_w():
    text = f"family: w\nalpha: {R3}\nbeta: {R3}\ngamma: {R3}\n"
    spec = cli.parse_state_spec(text)
    assert spec.kind == "w"
    assert spec.w.alpha == pytest.approx(R3)


def test_parse_state_spec_raw():
    text = "family: raw\namp0: [0.6, 0]\namp7: [0, 0.8]\n"
    spec = cli.parse_state_spec(text)
    amps = spec.state().amplitudes
    assert amps[0] == pytest.approx(0.6)
    assert amps[7] == pytest.approx(0.8j)


def test_parse_state_spec_rejects_unknown_family():
    with pytest.raises(qcore.ValidationError):
        cli.parse_state_spec("family: cluster\n")
    with pytest.raises(qcore.ValidationError):
        cli.parse_state_spec("theta: pi/4\n")


def test_parse_settings_file():
    lines = "\n".join(
        f"{name}: pi/2 0" for name in
        ("a", "a_prime", "b", "b_prime", "c", "c_prime"))
    ms = cli.parse_settings_file(lines + "\n")
    assert np.allclose(ms.a.cartesian, [1.0, 0.0, 0.0], atol=1e-12)
    with pytest.raises(qcore.ValidationError):
        cli.parse_settings_file("a: pi/2 0\n")
    with pytest.raises(qcore.ValidationError):
        cli.parse_settings_file(lines.replace("a: pi/2 0", "a: pi/2"))


def test_analyze_ghz(capsys):
    code = cli.main(["analyze", "--ghz", "pi/4", "pi/2"])
    out = capsys.readouterr().out
    assert code == 0
    assert "GHZ-class" in out
    assert "5.65685425" in out
    assert "violates" in out


def test_analyze_w_symmetric(capsys):
    code = cli.main(["analyze", "--w", str(R3), str(R3), str(R3)])
    out = capsys.readouterr().out
    assert code == 0
    assert "W-class" in out
    assert "4.35464843" in out
    assert "54.73561" in out


def test_analyze_raw_product(tmp_path, capsys):
    path = tmp_path / "state.txt"
    path.write_text("family: raw\namp0: [1, 0]\n")
    code = cli.main(["analyze", "--state", str(path)])
    out = capsys.readouterr().out
    assert code == 0
    assert "no violation" in out


def test_analyze_missing_file_is_input_error(capsys):
    code = cli.main(["analyze", "--state", "/nonexistent/state.txt"])
    assert code == 2
    assert "input error" in capsys.readouterr().err


def test_analyze_malformed_spec_is_input_error(tmp_path, capsys):
    path = tmp_path / "state.txt"
    path.write_text("family: ghz\ntheta: pi/4\ntheta3: junk\n")
    assert cli.main(["analyze", "--state", str(path)]) == 2


def test_sweep_ghz_csv(tmp_path, capsys):
    out_path = tmp_path / "fig1.csv"
    args = ["sweep-ghz", "--theta-steps", "5", "--theta3", "pi/2",
            "--out", str(out_path)]
    assert cli.main(args) == 0
    capsys.readouterr()
    lines = out_path.read_text().splitlines()
    assert lines[0] == ("theta,theta3,tau,c12_sq,smax_closed,smax_numeric,"
                        "branch,gap")
    assert len(lines) == 6
    first = lines[1].split(",")
    assert float(first[0]) == 0.0
    assert float(first[4]) == pytest.approx(4.0)
    # Byte-identical rerun under the same seed.
    blob = out_path.read_bytes()
    assert cli.main(args) == 0
    capsys.readouterr()
    assert out_path.read_bytes() == blob


def test_sweep_w_csv(tmp_path, capsys):
    out_path = tmp_path / "fig2.csv"
    args = ["sweep-w", "--c12", "2/3", "--sum-steps", "6",
            "--out", str(out_path)]
    assert cli.main(args) == 0
    out = capsys.readouterr().out
    assert "skipping unrealizable point" in out
    lines = out_path.read_text().splitlines()
    assert lines[0] == "c12,c23,c31,sum_c,smax_closed,smax_numeric,gap"
    rows = [line.split(",") for line in lines[1:]]
    assert all(float(r[0]) == pytest.approx(2.0 / 3.0, abs=1e-8)
               for r in rows)
    # The sum = 2 endpoint is the symmetric state at the global maximum.
    assert float(rows[-1][3]) == pytest.approx(2.0, abs=1e-8)
    assert float(rows[-1][4]) == pytest.approx(4.3546, abs=1e-4)
    # Closed-form values are non-decreasing along the curve.
    closed = [float(r[4]) for r in rows]
    assert all(b >= a - 1e-9 for a, b in zip(closed, closed[1:]))


def test_sweep_unwritable_path_is_io_error(capsys):
    args = ["sweep-ghz", "--theta-steps", "2", "--theta3", "pi/2",
            "--out", "/nonexistent/dir/out.csv"]
    assert cli.main(args) == 3
    assert "cannot write" in capsys.readouterr().err


def test_simulate_ghz(capsys):
    code = cli.main(["simulate", "--ghz", "pi/4", "pi/2",
                     "--shots", "20000", "--seed", "5"])
    out = capsys.readouterr().out
    assert code == 0
    assert "exact value:          5.65685425" in out
    z_line = [l for l in out.splitlines() if l.startswith("z-score")][0]
    assert abs(float(z_line.split(":")[1])) < 5.0


def test_simulate_settings_file(tmp_path, capsys):
    path = tmp_path / "settings.txt"
    path.write_text("\n".join(
        f"{name}: pi/2 0" for name in
        ("a", "a_prime", "b", "b_prime", "c", "c_prime")) + "\n")
    code = cli.main(["simulate", "--ghz", "pi/4", "pi/2", "--shots", "100",
                     "--settings", str(path)])
    out = capsys.readouterr().out
    assert code == 0
    assert "shots per correlator: 100" in out


def test_simulate_missing_settings_file(capsys):
    code = cli.main(["simulate", "--ghz", "pi/4", "pi/2",
                     "--settings", "/nonexistent/settings.txt"])
    assert code == 2


def test_global_flags_accepted_on_both_sides(tmp_path, capsys):
    out_a = tmp_path / "a.csv"
    out_b = tmp_path / "b.csv"
    assert cli.main(["--seed", "9", "sweep-ghz", "--theta-steps", "2",
                     "--theta3", "pi/2", "--out", str(out_a)]) == 0
    assert cli.main(["sweep-ghz", "--theta-steps", "2", "--theta3", "pi/2",
                     "--seed", "9", "--out", str(out_b)]) == 0
    capsys.readouterr()
    assert out_a.read_bytes() == out_b.read_bytes()


def test_verification_battery_suites():
    results = cli.verification_battery(seed=123)
    names = [r.name for r in results]
    assert names == ["eq12-oracle", "eq24-oracle", "w-reduced-oracle",
                     "tensor-vs-direct", "monogamy", "branch-continuity",
                     "mermin-factor", "ceiling"]
    assert all(r.passed for r in results)


def test_verify_command_exit_code(capsys, monkeypatch):
    sample = [cli.SuiteResult("demo", True, 5, 1e-12, "")]
    monkeypatch.setattr(cli, "verification_battery", lambda seed: sample)
    assert cli.main(["verify"]) == 0
    assert "pass" in capsys.readouterr().out
    failing = [cli.SuiteResult("demo", False, 5, 1.0, "case 3")]
    monkeypatch.setattr(cli, "verification_battery", lambda seed: failing)
    assert cli.main(["verify"]) == 1
    out = capsys.readouterr().out
    assert "FAIL" in out and "case 3" in out
