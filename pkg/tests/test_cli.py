import io
import json
import os
import subprocess
import sys
import threading
from importlib import resources

import pytest

from gpmirror import CACHE_VERSION
from gpmirror.cache import Cache, make_key
from gpmirror.cli import run, schema_validator

REPORT = schema_validator("report.schema.json")


@pytest.fixture(scope="module")
def data_files(tmp_path_factory):
    root = tmp_path_factory.mktemp("inputs")
    out = {}
    for name in ("quintic", "cubic", "interval", "mirror_quartic"):
        text = resources.files("gpmirror").joinpath("data", f"{name}.json").read_text()
        (root / f"{name}.json").write_text(text)
        out[name] = str(root / f"{name}.json")
    heights = {"points": [[0], [1], [2]], "heights": [1, 0, 1]}
    (root / "heights.json").write_text(json.dumps(heights))
    out["heights"] = str(root / "heights.json")
    cube = {"terms": [{"e": [3, 0], "c": 1}]}
    (root / "cube.json").write_text(json.dumps(cube))
    out["cube"] = str(root / "cube.json")
    (root / "flat.json").write_text(json.dumps({"vertices": [[2, 0], [0, 2], [-2, -2]]}))
    out["not_reflexive"] = str(root / "flat.json")
    (root / "garbage.json").write_text("{not json")
    out["garbage"] = str(root / "garbage.json")
    return out


def call(*argv):
    buf = io.StringIO()
    code = run([str(a) for a in argv], out=buf)
    text = buf.getvalue()
    try:
        parsed = json.loads(text)
    except ValueError:
        parsed = None
    return code, parsed, text


def test_polytope_command(data_files):
    code, report, _ = call("polytope", data_files["quintic"])
    assert code == 0
    REPORT.validate(report)
    assert report["greene_plesser_group"] == [5, 5, 5]
    assert report["total_degree"] == 5


def test_monoid_command_and_jsonl(data_files):
    code, report, _ = call("monoid", data_files["mirror_quartic"], "--order", "4")
    assert code == 0
    REPORT.validate(report)
    assert report["rank"] == 19 and report["num_points"] == 22
    assert len(report["elements"]) == 26
    code, _, text = call("--format", "jsonl", "monoid", data_files["mirror_quartic"], "--order", "4")
    lines = text.strip().splitlines()
    assert code == 0 and len(lines) == 26
    assert json.loads(lines[0])["grade"] == "0"


def test_monoid_kp_selector(data_files):
    code, report, _ = call("monoid", data_files["mirror_quartic"], "--order", "1", "--selector", "Kp",
                           "--p", "0")
    assert code == 0 and all(e["u"][0] <= 0 for e in report["elements"][1:])
    assert call("monoid", data_files["mirror_quartic"], "--order", "1", "--selector", "Kp")[0] == 2
    assert call("monoid", data_files["mirror_quartic"], "--order", "1", "--selector", "Kp",
                "--p", "99")[0] == 2


def test_mirror_map_command(data_files):
    code, report, _ = call("mirror-map", data_files["quintic"], "--order", "15", "--check-integrality",
                           "--u", "1,1,1,1,1")
    assert code == 0
    REPORT.validate(report)
    assert report["integrality"]["all_integral"]
    code, _, _ = call("mirror-map", data_files["quintic"], "--order", "5", "--u", "1,1,1")
    assert code == 2


def test_hypersurface_command():
    code, report, _ = call("hypersurface", "--n", "5", "--order", "4")
    assert code == 0
    REPORT.validate(report)
    assert report["q"][2] == "770" and report["integral"]
    assert call("hypersurface", "--n", "2", "--order", "4")[0] == 2


def test_gkz_commands(data_files):
    code, report, _ = call("gkz-verify", data_files["cubic"], "--order", "6")
    assert code == 0 and report["passed"]
    REPORT.validate(report)
    code, report, _ = call("gkz-verify", "--lemma-c4")
    assert code == 0
    REPORT.validate(report)
    assert {r["verdict"] for r in report["lemma_c4"]} == {"matches", "sign_corrected"}
    assert call("gkz-verify")[0] == 2


def test_subdivision_commands(data_files):
    code, report, _ = call("subdivision", data_files["heights"], "--char", "2")
    assert code == 0 and report["verdict"] == "smooth"
    REPORT.validate(report)
    code, report, _ = call("subdivision", data_files["quintic"], "--normalization", "degree-sublattice")
    assert code == 0
    REPORT.validate(report)
    assert report["volumes"]["lcm"] == 125 and report["volumes"]["rescaled_lcm"] == 1


def test_smooth_check_commands(data_files):
    code, report, _ = call("smooth-check", data_files["quintic"], "--char", "5")
    assert code == 0
    REPORT.validate(report)
    assert report["bruteforce"]["verdict"] == "singular"
    assert report["tropical"]["verdict"] == "inconclusive"
    code, report, _ = call("smooth-check", data_files["cube"], "--char", "2")
    assert report["bruteforce"]["witness"] == [0, 1]
    code, report, _ = call("smooth-check", "--soundness", "10", "--seed", "3")
    assert code == 0 and report["false_positives"] == 0
    REPORT.validate(report)
    assert call("smooth-check", data_files["cube"], "--char", "4")[0] == 2
    assert call("smooth-check", data_files["cube"], "--char", "2", "--degree", "11")[0] == 2


@pytest.mark.parametrize("argv", [
    ["polytope", "/nonexistent.json"],
    ["polytope", "GARBAGE"],
    ["polytope", "NOT_REFLEXIVE"],
    ["monoid", "QUINTIC", "--order", "-1"],
    ["monoid", "QUINTIC", "--order", "x"],
    ["frobnicate"],
    ["--jobs", "0", "polytope", "QUINTIC"],
])
def test_usage_errors_exit_2(data_files, argv):
    subst = {"GARBAGE": data_files["garbage"], "NOT_REFLEXIVE": data_files["not_reflexive"],
             "QUINTIC": data_files["quintic"]}
    assert call(*[subst.get(a, a) for a in argv])[0] == 2


# -- cache ---------------------------------------------------------------------

def test_cache_round_trip_and_quarantine(tmp_path):
    cache = Cache(tmp_path)
    key = make_key("polytope", {"x": 1}, None, CACHE_VERSION)
    assert cache.get(key) is None
    cache.put(key, "payload\n")
    assert cache.get(key) == "payload\n"
    path = cache.path(key)
    entry = json.loads(path.read_text())
    entry["payload"] = "tampered\n"
    path.write_text(json.dumps(entry))
    assert cache.get(key) is None
    assert not path.exists()
    assert any(p.name.startswith(path.name + ".corrupt-") for p in path.parent.iterdir())
    path.write_text("{truncated")
    assert cache.get(key) is None


def test_cache_keys_depend_on_everything():
    base = make_key("monoid", {"a": 1}, "2", "v1")
    assert base == make_key("monoid", {"a": 1}, "2", "v1")
    assert len({base, make_key("monoid", {"a": 2}, "2", "v1"), make_key("monoid", {"a": 1}, "3", "v1"),
                make_key("monoid", {"a": 1}, "2", "v2"), make_key("polytope", {"a": 1}, "2", "v1")}) == 5


def test_concurrent_puts(tmp_path):
    cache = Cache(tmp_path)
    key = make_key("x", {}, None, "v")
    payload = json.dumps({"big": list(range(5000))})
    threads = [threading.Thread(target=cache.put, args=(key, payload)) for _ in range(16)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert cache.get(key) == payload
    assert not [p for p in cache.path(key).parent.iterdir() if p.name.startswith(".tmp-")]


def test_warm_cache_and_jobs_are_deterministic(tmp_path, data_files, monkeypatch):
    argv = ["mirror-map", data_files["mirror_quartic"], "--order", "2", "--check-integrality"]
    _, _, cold = call(*argv)
    _, _, threaded = call("--jobs", "4", *argv)
    _, _, first = call("--cache", tmp_path, *argv)
    assert list(tmp_path.rglob("*.json"))
    _, _, warm = call("--cache", tmp_path, *argv)
    monkeypatch.setenv("GPMIRROR_CACHE", str(tmp_path))
    _, _, env = call(*argv)
    assert cold == threaded == first == warm == env


def test_corrupt_cache_entry_does_not_change_result(tmp_path, data_files):
    argv = ["--cache", tmp_path, "polytope", data_files["quintic"]]
    code, _, first = call(*argv)
    for entry in tmp_path.rglob("*.json"):
        entry.write_text("garbage")
    code2, _, second = call(*argv)
    assert code == code2 == 0 and first == second


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "gpmirror", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and "gpmirror" in res.stdout


def test_concurrent_processes_share_cache(tmp_path, data_files):
    cmd = [sys.executable, "-m", "gpmirror", "--cache", str(tmp_path), "hypersurface", "--n", "4",
           "--order", "8"]
    procs = [subprocess.Popen(cmd, stdout=subprocess.PIPE, text=True) for _ in range(4)]
    outs = [p.communicate()[0] for p in procs]
    assert all(p.returncode == 0 for p in procs)
    assert len(set(outs)) == 1
    assert len(list(tmp_path.rglob("*.json"))) == 1
