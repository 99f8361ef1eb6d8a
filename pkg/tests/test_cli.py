import json
import subprocess
import sys
from pathlib import Path

import pytest

from locprod.cli import main
from locprod.formats import parse_model_text, parse_space_text

DATA = Path(__file__).resolve().parent.parent / "data"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def structured(capsys, *argv):
    code, out, err = run(capsys, *argv, "--format", "structured")
    return code, json.loads(out)


def test_analyze_l_shape(capsys):
    code, doc = structured(capsys, "analyze", str(DATA / "s2xs2_l_shape.space"))
    assert code == 0
    assert doc["schema_version"] == 1
    assert doc["hypotheses"]["locally_product"] is False
    assert doc["failing_point"] == [0, 0]
    assert doc["exact"] is False and doc["theorem_violation"] is False


def test_analyze_diagonal(capsys):
    code, doc = structured(capsys, "analyze", str(DATA / "discrete_diagonal.space"))
    assert code == 0
    assert doc["hypotheses"] == {"closed": True, "path_connected": False, "locally_product": True}
    assert doc["A"] == [0, 1] and doc["B"] == [0, 1]


def test_enumerate(capsys):
    code, doc = structured(capsys, "enumerate", "--points", "2")
    assert code == 0 and doc["listed_count"] == 4 and len(doc["spaces"]) == 4
    code, out, _ = run(capsys, "enumerate", "--points", "3")
    assert len(parse_space_text(out).spaces) == 29
    code, doc = structured(capsys, "enumerate", "--points", "4", "--up-to-homeomorphism")
    assert (doc["labeled_count"], doc["listed_count"]) == (355, 33)


def test_verify_and_search(capsys):
    code, doc = structured(capsys, "verify", "--nx", "2", "--ny", "2")
    assert code == 0 and doc["violations"] == [] and doc["status"] == "ok"
    code, doc = structured(capsys, "search", "--nx", "2", "--ny", "2", "--drop", "path_connected", "--limit", "20")
    assert code == 0
    assert [[0, 0], [1, 1]] in [c["subset"] for c in doc["counterexamples"]]


def test_verify_violation_exit_code(capsys):
    code, doc = structured(capsys, "verify", "--nx", "2", "--ny", "2", "--require", "closed")
    assert code == 1 and doc["violations"]


def test_counterexample_file_reanalyzes(capsys, tmp_path):
    _, doc = structured(capsys, "search", "--nx", "2", "--ny", "2", "--drop", "path_connected")
    path = tmp_path / "cx.space"
    path.write_text(doc["counterexamples"][0]["file"])
    _, again = structured(capsys, "analyze", str(path))
    assert again["exact"] is False and again["hypotheses"]["path_connected"] is False


def test_fences(capsys):
    code, doc = structured(capsys, "fences", "--nx", "2", "--ny", "2", "--max-length", "3")
    assert code == 0 and doc["max_fence_length"] == 3 and doc["fences_examined"] > 0


def test_workers_from_environment(capsys, monkeypatch):
    _, base = structured(capsys, "verify", "--nx", "2", "--ny", "3")
    monkeypatch.setenv("LOCPROD_WORKERS", "2")
    _, env = structured(capsys, "verify", "--nx", "2", "--ny", "3")
    assert base == env
    monkeypatch.setenv("LOCPROD_WORKERS", "many")
    code, _, err = run(capsys, "verify", "--nx", "2", "--ny", "2")
    assert code == 2 and "LOCPROD_WORKERS" in err


def test_sampling_echoes_seed(capsys):
    code, doc = structured(capsys, "verify", "--nx", "4", "--ny", "4", "--seed", "5", "--samples", "50")
    assert code == 0 and doc["seed"] == 5 and doc["exhaustive"] is False


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "--nx", "5", "--ny", "1"],
        ["verify", "--nx", "4", "--ny", "1"],
        ["search", "--nx", "2", "--ny", "2", "--drop", "compactness"],
        ["search", "--nx", "2", "--ny", "2", "--drop", "closed", "--require", "closed"],
        ["analyze", "/nonexistent/file.space"],
    ],
)
def test_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err.startswith("locprod: error:")


def test_parse_error_reports_line(capsys, tmp_path):
    bad = tmp_path / "bad.space"
    bad.write_text("space X\npoints 2\nrel 0 9\n")
    code, _, err = run(capsys, "analyze", str(bad))
    assert code == 2 and "line 3" in err


def test_strict_relations_flag(capsys, tmp_path):
    f = tmp_path / "t.space"
    f.write_text("space X\npoints 3\nrel 0 1\nrel 1 2\nspace Y\npoints 1\nsubset C\npair 0 0\n")
    assert run(capsys, "analyze", str(f))[0] == 0
    assert run(capsys, "analyze", str(f), "--strict-relations")[0] == 2


def test_argparse_usage_exit_code(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_check_2space(capsys):
    code, doc = structured(capsys, "check-2space", str(DATA / "column.model"), "--strict")
    assert code == 0 and doc["valid"] and doc["strict_valid"]


def test_check_2space_invalid(capsys, tmp_path):
    f = tmp_path / "empty.model"
    f.write_text("2space\nbase\nspace W\npoints 1\nend\n")
    code, doc = structured(capsys, "check-2space", str(f))
    assert code == 1 and doc["reason"] == "not-covered"


def test_check_2map_swap(capsys):
    code, doc = structured(capsys, "check-2map", str(DATA / "swap.2map"))
    assert code == 1
    assert doc["valid"] is False and doc["where"] == {"point": 2, "source_chart": 0, "target_chart": 0}


def test_2product_round_trips(capsys, tmp_path):
    out = tmp_path / "prod.model"
    code, _, _ = run(capsys, "2product", str(DATA / "column.model"), str(DATA / "s2xs2.model"), "-o", str(out))
    assert code == 0
    model = parse_model_text(out.read_text())
    assert model.base.n == 8 and len(model.charts) == 2
    code, doc = structured(capsys, "check-2space", str(out))
    assert code == 0 and doc["valid"]


def test_structured_output_is_stable(tmp_path):
    outs = []
    for k in range(2):
        path = tmp_path / f"r{k}.json"
        subprocess.run(
            [sys.executable, "-m", "locprod", "verify", "--nx", "2", "--ny", "2",
             "--format", "structured", "-o", str(path)],
            check=True,
        )
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
