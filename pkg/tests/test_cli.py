import json

from radiohit.cli import EXIT_CONFIG, EXIT_OK, EXIT_VIOLATION, main
from radiohit.families import all_pairs_family, sample_candidate_family


def write(tmp_path, name, data):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def test_run_and_summarize(tmp_path, capsys):
    cfg = write(tmp_path, "c.json", {"scenario": "hitting", "sweep": [8, 16], "player": "basic:decay",
                                     "referee": "pairs", "trials": 5})
    out, summary = tmp_path / "r.csv", tmp_path / "s.json"
    assert main(["run", cfg, "-o", str(out), "--summary", str(summary)]) == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0] == "scenario,point,seed,rounds,proposals,timeout" and len(lines) == 11
    assert [s["point"] for s in json.loads(summary.read_text())] == ["k=8", "k=16"]
    assert main(["summarize", str(out)]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)[0]["trials"] == 5


def test_run_to_stdout_is_deterministic(tmp_path, capsys):
    cfg = write(tmp_path, "c.json", {"scenario": "wakeup", "sweep": [16], "algorithm": "decay", "trials": 4})
    main(["run", cfg])
    first = capsys.readouterr().out
    main(["run", cfg])
    assert capsys.readouterr().out == first


def test_config_errors_exit_two(tmp_path, capsys):
    assert main(["run", str(tmp_path / "missing.json")]) == EXIT_CONFIG
    bad = write(tmp_path, "bad.json", {"scenario": "hitting", "sweep": [8], "player": "cd:willard",
                                       "referee": "singletons"})
    assert main(["run", bad]) == EXIT_CONFIG
    assert main(["check-consistency", bad]) == EXIT_CONFIG
    assert main(["summarize", str(tmp_path / "none.csv")]) == EXIT_CONFIG
    assert "configuration error" in capsys.readouterr().err


def test_check_consistency_ok(tmp_path, capsys):
    cfg = write(tmp_path, "c.json", {"scenario": "hitting", "sweep": [8], "player": "cd:willard",
                                     "referee": "pairs", "trials": 5})
    assert main(["check-consistency", cfg]) == EXIT_OK
    assert "5/5 checks passed" in capsys.readouterr().out


def test_check_consistency_violation(tmp_path, capsys, monkeypatch):
    from radiohit.reductions import checks

    def broken(*args):
        return checks.CheckResult("basic", False, 1, 2)
    monkeypatch.setattr(checks, "check_basic", broken)
    cfg = write(tmp_path, "c.json", {"scenario": "hitting", "sweep": [8], "player": "basic:decay",
                                     "referee": "pairs", "trials": 3})
    assert main(["check-consistency", cfg]) == EXIT_VIOLATION
    out = capsys.readouterr().out
    assert "VIOLATION" in out and "0/3 checks passed" in out


def test_gadget_check_mode(tmp_path, capsys):
    cfg = write(tmp_path, "g.json", {"scenario": "gadget", "sweep": [2, 5]})
    assert main(["check-consistency", cfg]) == EXIT_OK
    assert "29/29 checks passed" in capsys.readouterr().out


def test_verify_family(tmp_path, capsys):
    fam = sample_candidate_family(8, 60, seed=1)
    path = write(tmp_path, "f.json", fam.to_json())
    assert main(["verify-family", path, "--min-hitting", "--budget", "2000"]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["property2"]["exhaustive"] and "property1" in report
    assert main(["verify-family", path, "--max-fraction", "0.01"]) == EXIT_VIOLATION
    capsys.readouterr()
    pairs = write(tmp_path, "p.json", all_pairs_family(20).to_json())
    assert main(["verify-family", pairs, "--limit", "8"]) == EXIT_CONFIG
    assert main(["verify-family", str(tmp_path / "none.json")]) == EXIT_CONFIG
