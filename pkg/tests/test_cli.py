import json

import pytest
import yaml

from netrewrite.cli import main
from netrewrite.fixtures import fixture_text


@pytest.fixture
def c17_file(tmp_path):
    p = tmp_path / "c17.v"
    p.write_text(fixture_text("c17"))
    return p


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_characterize(capsys, c17_file):
    code, out, _ = run(capsys, "characterize", c17_file)
    assert code == 0
    rows = out.strip().splitlines()
    assert rows[1].split() == ["NAND", "2", "6"] and len(rows) == 2


def test_characterize_merges(capsys, c17_file):
    code, out, _ = run(capsys, "characterize", "--json", c17_file, "fixture:c17", "fixture:parity16")
    assert code == 0
    assert json.loads(out) == [
        {"operator": "NAND", "fan_in": 2, "count": 12},
        {"operator": "XOR", "fan_in": 2, "count": 15},
    ]


def test_missing_file_is_input_error(capsys, tmp_path):
    code, _, err = run(capsys, "characterize", tmp_path / "nope.v")
    assert code == 2 and "nope.v" in err


def test_bad_netlist_is_input_error(capsys, tmp_path):
    p = tmp_path / "bad.v"
    p.write_text("module m (a); input a; nand (a, a); endmodule")
    assert run(capsys, "characterize", p)[0] == 2


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == 1
    code, _, err = run(capsys, "detect", "fixture:c17", "fixture:c17", "--detector", "bogus")
    assert code == 1 and "bogus" in err


def test_transform_pirate_detect_verify(capsys, tmp_path, c17_file):
    dict_path = tmp_path / "dict.json"
    code, out, _ = run(capsys, "transform", c17_file, "-o", dict_path, "--run-dir", tmp_path / "t")
    assert code == 0
    entries = json.loads(dict_path.read_text())["entries"]
    assert len(entries) == 3
    assert all(e["provenance"]["attempt"] == 1 for e in entries)
    assert (tmp_path / "t" / "config.yaml").exists()
    assert len(list((tmp_path / "t" / "transcripts").iterdir())) == 3

    code, out, _ = run(capsys, "pirate", c17_file, "-d", dict_path, "-s", "NOR", "-N", 5, "--run-dir", tmp_path / "p")
    assert code == 0
    files = sorted((tmp_path / "p").glob("*.v"))
    assert len(files) == 5
    verdicts = json.loads((tmp_path / "p" / "verdicts.json").read_text())
    assert [v["status"] for v in verdicts] == ["equivalent"] * 5

    code, out, _ = run(capsys, "pirate", c17_file, "-d", dict_path, "-s", "all", "-N", 5, "--run-dir", tmp_path / "all")
    assert code == 0 and len(list((tmp_path / "all").glob("*.v"))) == 25

    code, out, _ = run(capsys, "detect", files[0], files[0])
    assert code == 0 and out.count("pirated") == 4 and "1.0000" in out

    scores = tmp_path / "scores.json"
    details = tmp_path / "details.json"
    code, out, _ = run(capsys, "detect", c17_file, files[0], "--json", scores, "--details", details, "--k", 4)
    assert code == 0
    data = json.loads(scores.read_text())
    assert data["moss-analog"]["params"]["k"] == 4
    assert "tiles" in json.loads(details.read_text())

    code, out, _ = run(capsys, "verify", c17_file, files[0])
    assert code == 0 and json.loads(out)["status"] == "equivalent"


def test_pirate_coverage_gap(capsys, tmp_path, c17_file):
    dict_path = tmp_path / "dict.json"
    run(capsys, "transform", c17_file, "-o", dict_path, "--run-dir", tmp_path / "t")
    code, _, err = run(capsys, "pirate", "fixture:parity16", "-d", dict_path, "-N", 1, "--run-dir", tmp_path / "p")
    assert code == 2 and "XOR2" in err


def test_transform_with_always_wrong_script(capsys, tmp_path, c17_file):
    script = tmp_path / "wrong.txt"
    script.write_text("Y = NAND(A1, A2)\n---\n" * 3)
    dict_path = tmp_path / "d.json"
    code, out, _ = run(
        capsys, "transform", c17_file, "-M", 1, "--backend", "scripted", "--script", script,
        "-o", dict_path, "--run-dir", tmp_path / "r",
    )
    assert code == 0
    assert json.loads(dict_path.read_text())["entries"] == []
    assert out.count("exhausted") == 3


def test_http_without_key_is_config_error(capsys, tmp_path, c17_file, monkeypatch):
    monkeypatch.delenv("NR_MISSING_KEY", raising=False)
    code, _, err = run(
        capsys, "transform", c17_file, "--backend", "http", "--endpoint", "http://127.0.0.1:9",
        "--model", "m", "--api-key-env", "NR_MISSING_KEY", "--run-dir", tmp_path / "r",
    )
    assert code == 1 and "NR_MISSING_KEY" in err
    assert not (tmp_path / "r").exists()


def test_transport_failure_exit_code(capsys, tmp_path, c17_file, monkeypatch):
    monkeypatch.setenv("NR_KEY", "x")
    cfg = tmp_path / "cfg.yaml"
    cfg.write_text(yaml.safe_dump({"backend": {"kind": "http", "endpoint": "http://127.0.0.1:9", "model": "m",
                                               "api_key_env": "NR_KEY", "max_retries": 0, "timeout": 2}}))
    code, out, _ = run(capsys, "transform", c17_file, "--config", cfg, "--run-dir", tmp_path / "r")
    assert code == 3 and out.count("aborted") == 3
    assert (tmp_path / "r" / "dictionary.json").exists()


def _campaign_cfg(tmp_path, **extra):
    cfg = {"netlists": ["fixture:c17", "fixture:parity16"], "N": 2, "seed": 11, "strategies": ["all"]}
    cfg.update(extra)
    p = tmp_path / "campaign.yaml"
    p.write_text(yaml.safe_dump(cfg))
    return p


def test_campaign_outputs(capsys, tmp_path):
    cfg = _campaign_cfg(tmp_path)
    code, out, _ = run(capsys, "campaign", cfg, "--run-dir", tmp_path / "a")
    assert code == 0
    assert "gnn4ip-analog" in out and "c17" in out
    report = json.loads((tmp_path / "a" / "report.json").read_text())
    assert report["metadata"]["seed"] == 11 and report["metadata"]["N"] == 2
    assert report["metadata"]["backend"] == "oracle"
    assert [len(n["variants"]) for n in report["netlists"]] == [10, 10]
    snap = yaml.safe_load((tmp_path / "a" / "config.yaml").read_text())
    assert snap["seed"] == 11


def test_campaign_flag_overrides_and_determinism(capsys, tmp_path):
    cfg = _campaign_cfg(tmp_path)
    run(capsys, "campaign", cfg, "--run-dir", tmp_path / "a", "--seed", 5)
    run(capsys, "campaign", cfg, "--run-dir", tmp_path / "b", "--seed", 5, "--workers", 3)
    a = (tmp_path / "a" / "report.json").read_bytes()
    assert a == (tmp_path / "b" / "report.json").read_bytes()
    assert json.loads(a)["metadata"]["seed"] == 5


def test_campaign_timestamped_dirs(capsys, tmp_path):
    cfg = _campaign_cfg(tmp_path, N=0, output_dir=str(tmp_path / "runs"))
    run(capsys, "campaign", cfg)
    run(capsys, "campaign", cfg)
    dirs = sorted((tmp_path / "runs").iterdir())
    assert len(dirs) == 2 and all(d.name.startswith("campaign-") for d in dirs)


def test_campaign_empty_netlist_list(capsys, tmp_path):
    cfg = _campaign_cfg(tmp_path, netlists=[])
    code, _, _ = run(capsys, "campaign", cfg, "--run-dir", tmp_path / "e")
    assert code == 0
    assert json.loads((tmp_path / "e" / "report.json").read_text())["netlists"] == []


def test_campaign_config_errors(capsys, tmp_path):
    assert run(capsys, "campaign", _campaign_cfg(tmp_path, M=0))[0] == 1
    assert run(capsys, "campaign", _campaign_cfg(tmp_path, strategies=["XOR"]))[0] == 1
    assert run(capsys, "campaign", _campaign_cfg(tmp_path, detectors={"moss": {}}))[0] == 1
    bad = tmp_path / "bad.yaml"
    bad.write_text("bogus_key: 1\n")
    assert run(capsys, "campaign", bad)[0] == 1
    assert run(capsys, "campaign", tmp_path / "absent.yaml")[0] == 1


def test_module_entry_point():
    import subprocess
    import sys

    res = subprocess.run([sys.executable, "-m", "netrewrite", "characterize", "fixture:c17"], capture_output=True, text=True)
    assert res.returncode == 0 and "NAND" in res.stdout
