import json
import subprocess
import sys

import pytest

from petersonmap.cli import (
    EXIT_FAIL,
    EXIT_INTERNAL,
    EXIT_OK,
    EXIT_USAGE,
    RunConfig,
    TableFile,
    compute_gr_table,
    gr_pairs,
    gr_table_file,
    main,
    qh_table_file,
    read_table,
)
from petersonmap.exactalg import parse_poly
from petersonmap.qhring import qh_ring
from petersonmap.rootdata import ParabolicType, build_root_system


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def data_rows(text):
    return [line for line in text.strip().splitlines()[1:]]


@pytest.mark.parametrize("argv,n", [
    (["--type", "A1", "--max-length", "3"], 4),
    (["--type", "A1", "--max-length", "0"], 1),
    (["--type", "A2", "--parabolic", "2", "--finite"], 3),
    (["--type", "G", "--finite"], 12),
])
def test_enumerate_rows(capsys, argv, n):
    code, out, _ = run(capsys, "enumerate", *argv)
    assert code == EXIT_OK
    assert len(data_rows(out)) == n


def test_enumerate_json_columns(capsys):
    code, out, _ = run(capsys, "enumerate", "--type", "A2", "--parabolic", "1", "--max-length", "2", "--json")
    rows = json.loads(out)
    assert code == EXIT_OK and rows[0]["element"] == "w=e;lam=0,0"
    assert {"in_WP_af", "condition_C", "word", "length"} <= set(rows[0])


@pytest.mark.parametrize("argv", [
    ["enumerate", "--type", "Q2", "--max-length", "1"],
    ["enumerate", "--type", "A2", "--parabolic", "5", "--max-length", "1"],
    ["enumerate", "--type", "A2", "--rank", "3", "--max-length", "1"],
    ["enumerate", "--type", "A", "--max-length", "1"],
    ["enumerate", "--type", "A2"],
    ["verify", "--type", "A1", "--max-length", "-1"],
    ["verify", "--type", "A3", "--max-length", "40"],
    ["qh", "product", "--type", "A2", "--parabolic", "2", "--u", "s2", "--v", "e"],
    ["qh", "product", "--type", "A2", "--u", "s1"],
    ["gr", "constants", "--type", "A2", "--u", "s1", "--v", "e"],
    ["nonsense"],
    [],
])
def test_usage_errors(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == EXIT_USAGE


def test_gr_constants_a1(capsys):
    code, out, _ = run(capsys, "gr", "constants", "--type", "A1", "--max-length", "2")
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["header"]["basis"] == "xi" and data["header"]["schema_version"] == 1
    assert {"u": "w=s1;lam=-1", "v": "w=s1;lam=-1", "z": "w=e;lam=-1", "coeff": "1"} in data["rows"]


def test_gr_constants_single_pair(capsys):
    code, out, _ = run(capsys, "gr", "constants", "--type", "A1", "--u", "s0", "--v", "s0", "--format", "csv")
    assert code == EXIT_OK
    assert out.splitlines() == [
        "u,v,z,coeff",
        "w=s1;lam=-1,w=s1;lam=-1,w=e;lam=-1,1",
        "w=s1;lam=-1,w=s1;lam=-1,w=s1;lam=-2,a1",
    ]


def test_qh_product_examples(capsys):
    code, out, _ = run(capsys, "qh", "product", "--type", "A1", "--u", "s1", "--v", "s1")
    rows = json.loads(out)["rows"]
    assert code == EXIT_OK
    assert rows == [
        {"u": "s1", "v": "s1", "beta": [0], "w": "s1", "coeff": "a1"},
        {"u": "s1", "v": "s1", "beta": [1], "w": "e", "coeff": "1"},
    ]
    code, out, _ = run(capsys, "qh", "product", "--type", "A2", "--parabolic", "2", "--u", "s1", "--v", "s1")
    rows = json.loads(out)["rows"]
    assert {(r["w"], r["coeff"]) for r in rows} == {("s1", "a1"), ("s2*s1", "1")}
    code, out, _ = run(capsys, "qh", "product", "--type", "A2", "--parabolic", "2",
                       "--u", "s1", "--v", "s2*s1", "--non-equivariant")
    rows = json.loads(out)["rows"]
    assert rows == [{"u": "s1", "v": "s2*s1", "beta": [1], "w": "e", "coeff": "1"}]


def test_verify_exit_and_report(capsys, tmp_path):
    code, out, err = run(capsys, "verify", "--type", "A1", "--max-length", "3")
    rep = json.loads(out)
    assert code == EXIT_OK and rep["pairs_checked"] == 16 and rep["passed"]
    assert "timing" in rep and "PASS" in err
    path = tmp_path / "r.json"
    code, out, _ = run(capsys, "verify", "--type", "A1", "--max-length", "0", "--report", str(path))
    assert code == EXIT_OK and out == ""
    assert json.loads(path.read_text())["pairs_checked"] == 1


def test_verify_failure_exit_code(capsys, monkeypatch):
    import petersonmap.peterson as pet

    monkeypatch.setattr(pet.PetersonMap, "image_product", lambda self, u, v: {})
    code, out, _ = run(capsys, "verify", "--type", "A1", "--max-length", "1", "--omit-timing")
    assert code == EXIT_FAIL
    assert json.loads(out)["failures"]


def test_internal_error_exit_code(capsys, monkeypatch):
    import petersonmap.grring as grr
    from petersonmap.exactalg import NotPolynomial

    def boom(self, u, v):
        raise NotPolynomial("forced")

    monkeypatch.setattr(grr.GrRing, "product", boom)
    code, _, err = run(capsys, "gr", "constants", "--type", "A1", "--max-length", "1")
    assert code == EXIT_INTERNAL and "forced" in err


def test_determinism(capsys):
    argv = ["verify", "--type", "A2", "--parabolic", "1", "--max-length", "2", "--omit-timing"]
    assert run(capsys, *argv)[1] == run(capsys, *argv)[1]
    argv = ["gr", "constants", "--type", "C2", "--max-length", "2"]
    assert run(capsys, *argv)[1] == run(capsys, *argv)[1]


def test_warm_cache_matches_cold(capsys, tmp_path):
    cache = tmp_path / "cache"
    argv = ["verify", "--type", "C2", "--parabolic", "2", "--max-length", "3", "--omit-timing"]
    plain = run(capsys, *argv)[1]
    cold = run(capsys, *argv, "--cache-dir", str(cache))[1]
    files = sorted(p.name for p in cache.glob("*.json"))
    assert len(files) == 2
    warm = run(capsys, *argv, "--cache-dir", str(cache))[1]
    assert plain == cold == warm
    assert not list(cache.glob(".tmp-*"))


def test_stale_cache_is_ignored(capsys, tmp_path, monkeypatch):
    import petersonmap.cli as cli

    cache = tmp_path / "cache"
    argv = ["verify", "--type", "A1", "--max-length", "2", "--omit-timing", "--cache-dir", str(cache)]
    first = run(capsys, *argv)[1]
    for p in cache.glob("*.json"):
        data = json.loads(p.read_text())
        data["header"]["convention"] = "something else"
        p.write_text(json.dumps(data))
    assert run(capsys, *argv)[1] == first
    assert cli.convention_fingerprint() in next(cache.glob("gr_*.json")).read_text()


@pytest.mark.parametrize("label,P,n", [("A1", (), 3), ("A2", (), 2), ("G2", (), 2)])
def test_gr_table_round_trip(label, P, n):
    cfg = RunConfig(label[0], int(label[1]), P, n)
    table = compute_gr_table(cfg, gr_pairs(cfg))
    tf = gr_table_file(cfg, table)
    text = tf.to_json()
    back = read_table(text)
    assert back == {k: v for k, v in table.items() if v}
    assert gr_table_file(cfg, back).to_json() == text
    assert TableFile.from_json(text).to_json() == text
    for row in tf.rows:
        assert parse_poly(row["coeff"], cfg.rank)


@pytest.mark.parametrize("label,P", [("A2", (2,)), ("C2", ()), ("A3", (1, 3))])
def test_qh_table_round_trip(label, P):
    cfg = RunConfig(label[0], int(label[1]), P)
    rs = build_root_system(cfg.type_label, cfg.rank)
    table = qh_ring(rs, ParabolicType.of(P)).product_table()
    text = qh_table_file(cfg, table).to_json()
    assert read_table(text) == table
    assert qh_table_file(cfg, read_table(text)).to_json() == text


def test_table_requires_schema_version():
    with pytest.raises(ValueError):
        TableFile.from_json(json.dumps({"header": {"basis": "xi"}, "rows": []}))


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "petersonmap", "enumerate", "--type", "A1", "--max-length", "1"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0 and len(proc.stdout.strip().splitlines()) == 3
