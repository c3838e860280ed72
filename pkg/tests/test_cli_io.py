import json
import subprocess
import sys

import pytest

from geosched import io
from geosched.cli import main
from geosched.gencache import CacheInterval, CachingInstance
from geosched.generate import GeneratorConfig, generate
from geosched.gsp import Constant, DeadlineStep, GspInstance, Job, SquaredFlow, Table
from geosched.reduction import Cover, reduce_to_r2c

from helpers import desk1


@pytest.fixture
def desk_file(tmp_path):
    path = tmp_path / "desk1.json"
    path.write_text(io.dumps(io.instance_to_json(desk1())))
    return path


def run(*args):
    return subprocess.run([sys.executable, "-m", "geosched.cli", *map(str, args)], capture_output=True, text=True)


def test_instance_round_trip():
    inst = GspInstance((
        Job("a", 1, 2, Constant(3)),
        Job("b", 2, 1, SquaredFlow()),
        Job("c", 1, 1, DeadlineStep(4, 2)),
        Job("d", 3, 2, Table(((5, 2), (7, 9)))),
    ))
    doc = json.loads(io.dumps(io.instance_to_json(inst)))
    assert io.instance_from_json(doc) == inst


def test_big_integers_use_strings():
    inst = GspInstance((Job("a", 1, 1, Constant(2**60)),))
    doc = io.instance_to_json(inst)
    assert doc["jobs"][0]["weight"]["w"] == str(2**60)
    assert io.instance_from_json(json.loads(io.dumps(doc))) == inst


def test_r2c_cover_caching_round_trip():
    r2c = reduce_to_r2c(desk1())
    back = io.r2c_from_json(json.loads(io.dumps(io.r2c_to_json(r2c))))
    assert back.points == r2c.points
    assert [r.id for r in back.rects] == [r.id for r in r2c.rects]
    cover = Cover.of(["a:1", "b:2"], "heavy")
    assert io.cover_from_json(io.cover_to_json(cover)).ids == cover.ids
    cache = CachingInstance({0: 2, 1: 1}, [CacheInterval("x", 0, 1, 2, 3)])
    again = io.caching_from_json(io.caching_to_json(cache))
    assert again.demands == cache.demands and list(again.intervals) == list(cache.intervals)


def test_malformed_documents(tmp_path):
    with pytest.raises(io.DocumentError):
        io.instance_from_json({"jobs": [{"id": "a"}]})
    with pytest.raises(io.DocumentError):
        io.weight_from_json({"kind": "nope"})
    bad = tmp_path / "bad.json"
    bad.write_text('{"jobs": [\n  1,\n}')
    with pytest.raises(io.DocumentError, match=r"bad\.json:3:1"):
        io.load(bad)


def test_gen_is_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["gen", "--family", "wflow", "--n", "3", "--seed", "7", "-o", str(a)]) == 0
    assert main(["gen", "--family", "wflow", "--n", "3", "--seed", "7", "-o", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_gen_seed_from_environment(tmp_path, monkeypatch):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    monkeypatch.setenv("GEOSCHED_SEED", "11")
    main(["gen", "-o", str(a)])
    main(["gen", "--seed", "11", "-o", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_tardiness_generator_respects_release():
    for seed in range(30):
        inst = generate(GeneratorConfig("tardiness", n=3, seed=seed))
        assert all(j.weight.d >= j.release for j in inst.jobs)


def test_solve_then_verify(tmp_path, desk_file):
    out, audit, lp = tmp_path / "sol.json", tmp_path / "audit.json", tmp_path / "lp.json"
    assert main(["solve", str(desk_file), "--seed", "3", "-o", str(out),
                 "--emit-audit", str(audit), "--dump-lp", str(lp)]) == 0
    assert main(["verify", str(desk_file), str(out)]) == 0
    doc = json.loads(audit.read_text())
    assert doc["opt_gsp"] == 5 and doc["opt_r2c"] == 7
    dumped = json.loads(lp.read_text())
    assert isinstance(dumped["cuts"], list) and dumped["objective"] <= 7 + 1e-6


def test_solve_is_byte_identical(tmp_path, desk_file):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    main(["solve", str(desk_file), "--seed", "1", "-o", str(a)])
    main(["solve", str(desk_file), "--seed", "1", "--jobs", "3", "-o", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_verify_rejects_tampered_solution(tmp_path, desk_file):
    out = tmp_path / "sol.json"
    main(["solve", str(desk_file), "-o", str(out)])
    doc = json.loads(out.read_text())
    doc["cover_weight"] = 1
    out.write_text(json.dumps(doc))
    assert main(["verify", str(desk_file), str(out)]) == 1
    doc["cover"] = []
    out.write_text(json.dumps(doc))
    assert main(["verify", str(desk_file), str(out)]) == 1


def test_baseline_prints_opt(desk_file):
    res = run("baseline", desk_file)
    assert res.returncode == 0
    assert res.stdout.splitlines()[0] == "OPT 5"
    assert "OPT_R2C 7" in res.stdout


def test_report(tmp_path, desk_file):
    audit = tmp_path / "audit.json"
    main(["solve", str(desk_file), "-o", str(tmp_path / "s.json"), "--emit-audit", str(audit)])
    csv_path, md = tmp_path / "r.csv", tmp_path / "r.md"
    assert main(["report", str(audit), "--csv", str(csv_path), "--markdown", str(md)]) == 0
    assert "schedule/opt_gsp" in csv_path.read_text()
    assert "schedule/OPT over 1 audits" in md.read_text()


def test_cache_command(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(io.dumps(io.caching_to_json(CachingInstance({0: 1}, [CacheInterval("a", 0, 0, 1, 2), CacheInterval("b", 0, 0, 1, 5)]))))
    out = tmp_path / "o.json"
    assert main(["cache", str(path), "-o", str(out)]) == 0
    assert json.loads(out.read_text())["chosen"] == ["a"]


def test_exit_codes(tmp_path):
    assert run("solve").returncode == 2
    assert run("solve", tmp_path / "missing.json").returncode == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    res = run("reduce", bad)
    assert res.returncode == 2 and "bad.json:1:2" in res.stderr
    assert run("solve", bad, "--beta", "1/2").returncode == 2
    infeasible = tmp_path / "inf.json"
    infeasible.write_text(io.dumps(io.caching_to_json(CachingInstance({0: 3}, [CacheInterval("a", 0, 0, 1, 1)]))))
    assert run("cache", infeasible).returncode == 1
