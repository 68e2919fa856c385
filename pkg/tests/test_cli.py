"""The sim command line: run exports, stats readout, and error exits."""

import json

import pytest

from peercourse.cli import main


def test_run_writes_csv(tmp_path, capsys):
    code = main([
        "run",
        "--cohort", "6",
        "--rounds", "2",
        "--condition", "identified-incentive",
        "--seed", "3",
        "--out", str(tmp_path),
    ])
    assert code == 0
    out_path = tmp_path / "sim_identified-incentive_seed3.csv"
    assert out_path.exists()
    printed = capsys.readouterr().out
    assert str(out_path) in printed
    assert "r1" in printed and "r2" in printed
    header = out_path.read_text().split("\n", 1)[0]
    assert header == "round,condition,metric,value,sample_size"


def test_repeat_runs_byte_identical(tmp_path):
    args = [
        "run",
        "--cohort", "5",
        "--condition", "blind-random",
        "--seed", "12",
    ]
    first_dir, second_dir = tmp_path / "one", tmp_path / "two"
    first_dir.mkdir()
    second_dir.mkdir()
    assert main(args + ["--out", str(first_dir)]) == 0
    assert main(args + ["--out", str(second_dir)]) == 0
    name = "sim_blind-random_seed12.csv"
    assert (first_dir / name).read_bytes() == (second_dir / name).read_bytes()


def test_run_with_agents_file(tmp_path, capsys):
    agents = [
        {"agent_id": f"a{i:03d}", "quality": i / 7, "message_propensity": 0.0}
        for i in range(8)
    ]
    agents_path = tmp_path / "agents.json"
    agents_path.write_text(json.dumps(agents))
    code = main([
        "run",
        "--condition", "identified-random",
        "--seed", "1",
        "--agents", str(agents_path),
        "--out", str(tmp_path),
    ])
    assert code == 0  # cohort defaults to the roster size
    assert (tmp_path / "sim_identified-random_seed1.csv").exists()


def test_run_requires_cohort_without_agents(tmp_path, capsys):
    code = main(["run", "--condition", "blind-random", "--out", str(tmp_path)])
    assert code == 2
    assert "--cohort" in capsys.readouterr().err


def test_run_rejects_unknown_condition(tmp_path, capsys):
    with pytest.raises(SystemExit) as exc:
        main([
            "run", "--cohort", "5", "--condition", "double-blind", "--out", str(tmp_path)
        ])
    assert exc.value.code == 2
    assert "invalid choice" in capsys.readouterr().err


def test_run_surfaces_config_errors_as_exit_two(tmp_path, capsys):
    code = main([
        "run", "--cohort", "1", "--condition", "blind-random", "--out", str(tmp_path)
    ])
    assert code == 2
    assert "error: ConfigInvalid" in capsys.readouterr().err


def test_stats_readout(tmp_path, capsys):
    a = tmp_path / "a.txt"
    b = tmp_path / "b.txt"
    a.write_text("# group a\n1\n2\n3\n4\n5\n")
    b.write_text("3\n4\n5\n6\n7\n")
    assert main(["stats", "--a", str(a), "--b", str(b)]) == 0
    out = capsys.readouterr().out
    assert "a: n=5 mean=3 std=1.58113883" in out
    assert "b: n=5 mean=5 std=1.58113883" in out
    assert "t=-2 df=8 p=0.0805162" in out


def test_stats_identical_samples(tmp_path, capsys):
    a = tmp_path / "a.txt"
    a.write_text("2\n4\n6\n")
    assert main(["stats", "--a", str(a), "--b", str(a)]) == 0
    assert "t=0 df=4 p=1" in capsys.readouterr().out


def test_stats_rejects_short_input(tmp_path, capsys):
    a = tmp_path / "a.txt"
    b = tmp_path / "b.txt"
    a.write_text("1\n")
    b.write_text("1\n2\n")
    assert main(["stats", "--a", str(a), "--b", str(b)]) == 2
    assert "error: TooFewSamples" in capsys.readouterr().err


def test_stats_missing_file(tmp_path, capsys):
    b = tmp_path / "b.txt"
    b.write_text("1\n2\n")
    assert main(["stats", "--a", str(tmp_path / "nope.txt"), "--b", str(b)]) == 2
    assert "error:" in capsys.readouterr().err
