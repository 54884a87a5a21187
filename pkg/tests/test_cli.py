import json
import shutil

import pytest

from artifact.builders import artin_generator, b4_1
from artifact.cli import run
from artifact.golden import CORPUS_DIR, FAIL, ORIENTED, load_corpus, run_case, run_corpus, summary
from artifact.semidirect import IteratedProduct


def out_of(capsys, argv):
    code = run(argv)
    return code, capsys.readouterr()


def test_validate(capsys):
    code, cap = out_of(capsys, ["validate", "--group", "builtin:pure_braid(4)"])
    assert code == 0 and cap.out.strip() == "valid"


def test_validate_reports_invalid_group(capsys, tmp_path):
    G = b4_1()
    actions = dict(G.actions)
    actions[(3, 2, 2)] = artin_generator(3, 2)
    path = tmp_path / "bad.toml"
    path.write_text(IteratedProduct(G.exponents, actions).description(), encoding="utf-8")
    code, _ = out_of(capsys, ["validate", "--group", str(path)])
    assert code == 1


def test_usage_errors(capsys):
    assert out_of(capsys, ["bogus"])[0] == 2
    assert out_of(capsys, ["resolution", "--group", "missing-file.toml"])[0] == 2
    assert out_of(capsys, ["rep", "--kind", "burau"])[0] == 2


def test_computation_error(capsys):
    code, cap = out_of(capsys, ["rep", "--kind", "gassner", "--l", "3", "--q", "2", "--k", "2", "--reduce", "homology"])
    assert code == 1 and "NotFree" in cap.err


def test_milnor_row(capsys):
    code, cap = out_of(capsys, ["milnor", "--l", "4"])
    assert code == 0
    assert "b_0(F) = 1  b_1(F) = 7  b_2(F) = 18" in cap.out
    assert "p_2(t) = (1-t)^3(1-t^3)(1-t^6)^2" in cap.out


def test_milnor_json(capsys):
    code, cap = out_of(capsys, ["milnor", "--l", "3", "--format", "json"])
    data = json.loads(cap.out)
    assert code == 0 and data["betti"] == [1, 4] and data["zeta"] == "(1-t^3)"


def test_homology_json(capsys):
    code, cap = out_of(capsys, ["homology", "--group", "builtin:b4_1()", "--format", "json"])
    data = json.loads(cap.out)
    assert code == 0 and [d["rank"] for d in data] == [1, 2, 2, 1]


def test_resolution_out_file(capsys, tmp_path):
    path = tmp_path / "d.json"
    code, _ = out_of(capsys, ["resolution", "--group", "builtin:b4_1()", "--degree", "1", "--out", str(path), "--verify", "--format", "json"])
    assert code == 0 and path.is_file()
    json.loads(path.read_text(encoding="utf-8"))


def test_rep_eval_and_detect(capsys):
    code, cap = out_of(capsys, ["rep", "eval", "--kind", "burau", "--l", "3", "--word", "s1 s1^-1"])
    assert code == 0
    code, cap = out_of(capsys, ["rep", "detect", "--kind", "burau", "--l", "6", "--q", "2", "--m", "1", "--k", "2", "--word", "@longpaton-xi"])
    assert code == 0 and cap.out.startswith("NOT identity")
    code, cap = out_of(capsys, ["rep", "detect", "--kind", "burau", "--l", "6", "--word", "@longpaton-xi"])
    assert code == 0 and cap.out.startswith("identity")


def test_vanish(capsys):
    code, cap = out_of(capsys, ["vanish", "--n", "4", "--l", "2", "--q", "2"])
    assert code == 0 and "dim H_2 = 2" in cap.out


def test_output_is_deterministic_with_cache(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("FOXRES_CACHE_DIR", str(tmp_path / "cache"))
    argv = ["rep", "--kind", "burau", "--l", "3", "--q", "2", "--k", "2", "--reduce", "homology", "--format", "json"]
    first = out_of(capsys, argv)
    assert first[0] == 0
    assert any((tmp_path / "cache").iterdir())
    second = out_of(capsys, argv)
    assert first[1].out == second[1].out
    monkeypatch.delenv("FOXRES_CACHE_DIR")
    assert out_of(capsys, argv)[1].out == first[1].out


# -- golden corpus ------------------------------------------------------------------


def test_full_corpus_passes():
    results = run_corpus(include_slow=True)
    assert len(results) == 25
    failed = [r.line() + "\n" + r.diff for r in results if r.status == FAIL]
    assert not failed, "\n".join(failed)
    assert summary(results).startswith("25 pass")


def test_corrupted_corpus_file_fails_with_diff(capsys, tmp_path):
    shutil.copy(CORPUS_DIR / "b4_1_delta_1.json", tmp_path)
    data = json.loads((tmp_path / "b4_1_delta_1.json").read_text(encoding="utf-8"))
    data["expected"] = json.loads(json.dumps(data["expected"]).replace("x1_1", "x1_2", 1))
    (tmp_path / "b4_1_delta_1.json").write_text(json.dumps(data), encoding="utf-8")
    res = run_case(load_corpus(tmp_path)[0])
    assert res.status == FAIL and res.diff
    code, cap = out_of(capsys, ["golden", "--corpus", str(tmp_path)])
    assert code == 1 and "---" in cap.out


def test_orientation_is_a_distinct_status():
    data = json.loads((CORPUS_DIR / "burau_3_2_1_2_charpoly.json").read_text(encoding="utf-8"))
    # replace each coefficient by its t -> t^-1 image
    from artifact.rings import LaurentInt
    from artifact.magnus import flip

    R = LaurentInt(1)
    for key, coeffs in data["expected"].items():
        data["expected"][key] = [R.fmt(flip(R, R.parse(c))) for c in coeffs]
    assert run_case(data).status == ORIENTED


def test_empty_corpus_is_vacuous_pass(capsys, tmp_path):
    code, cap = out_of(capsys, ["golden", "--corpus", str(tmp_path)])
    assert code == 0 and "empty corpus" in cap.out


def test_unknown_kind():
    assert run_case({"name": "x", "kind": "nope", "expected": {}}).status == FAIL


@pytest.mark.parametrize("name", ["pure_braid_4_homology", "b4_1_homology"])
def test_cli_golden_subset(capsys, name):
    code, cap = out_of(capsys, ["golden", "--only", name])
    assert code == 0 and f"{name}" in cap.out
