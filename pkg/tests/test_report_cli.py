import json
import subprocess
import sys

import pytest

from causal_moments import IntegrationConfig
from causal_moments.bootstrap import BootstrapConfig
from causal_moments.cli import main
from causal_moments.quantities import QuantitySpec, run_quantity
from causal_moments.report import EstimateReport, emit_json, format_table, parse_json
from causal_moments.reproduce import format_study, run_study, to_json
from causal_moments.synthetic import preset, simulate

FAST = ["--mc-points", "20000"]


@pytest.fixture(scope="module")
def csv_a(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "a.csv"
    assert main(["simulate", "--preset", "scm-a", "--n", "400", "--seed", "7", "--output", str(path)]) == 0
    return path


@pytest.fixture(scope="module")
def csv_b(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "b.csv"
    assert main(["simulate", "--preset", "scm-b", "--n", "300", "--seed", "1", "--output", str(path)]) == 0
    return path


def test_report_round_trip_corpus():
    t = simulate(preset("scm-b"), 200, 1)
    cfg = IntegrationConfig(n_joint=5000)
    specs = [QuantitySpec("moment", (1, 0), order=2), QuantitySpec("product_bounds", (1, 0), (0, -1)),
             QuantitySpec("correlation", (1, 0), (0, -1)), QuantitySpec("ate", (1, 0)),
             QuantitySpec("moment", (1, 9), order=2)]
    reports = [run_quantity(t, s, cfg) for s in specs]
    reports.append(run_quantity(t, QuantitySpec("ate", (1, 0)), cfg, BootstrapConfig(replicates=10)))
    assert parse_json(emit_json(reports)) == reports
    for r in reports:
        assert EstimateReport.from_dict(json.loads(json.dumps(r.to_dict()))) == r
    text = format_table(reports)
    assert "ERROR" in text and "sharp" not in text.split("\n")[2]


def test_simulate_is_reproducible(tmp_path, csv_a):
    again = tmp_path / "again.csv"
    main(["simulate", "--preset", "scm-a", "--n", "400", "--seed", "7", "--output", str(again)])
    assert again.read_bytes() == csv_a.read_bytes()
    manifest = json.loads((tmp_path / "again.csv.manifest.json").read_text())
    assert manifest["seed"] == 7 and manifest["preset"] == "scm-a"
    assert len(csv_a.read_text().splitlines()) == 401


def test_estimate_json(csv_a, capsys):
    assert main(["estimate", "--input", str(csv_a), "--moment", "2", "--arms", "1,0"] + FAST) == 0
    doc = json.loads(capsys.readouterr().out)
    (rep,) = doc["reports"]
    assert set(rep) == {"quantity", "arms", "order", "estimate", "ci", "flags", "config"}
    assert rep["quantity"] == "moment" and rep["order"] == 2 and isinstance(rep["estimate"], float)
    assert doc["manifest"]["integration"]["n_joint"] == 20000
    assert rep["config"]["integration"]["seed"] == 0


def test_bounds_report_sharpness(csv_a, capsys):
    main(["bounds", "--input", str(csv_a), "--moment", "2", "--moment", "3", "--arms", "1,0"] + FAST)
    reports = json.loads(capsys.readouterr().out)["reports"]
    assert [r["estimate"]["sharp"] for r in reports] == ["upper", "none"]


def test_product_pipeline_and_bootstrap(csv_b, capsys):
    code = main(["estimate", "--input", str(csv_b), "--product", "--arms-left", "1,0", "--arms-right", "0,-1",
                 "--bootstrap", "20", "--resample", "within-arm"] + FAST)
    assert code == 0
    rep = json.loads(capsys.readouterr().out)["reports"][0]
    assert rep["ci"]["lower"] <= rep["ci"]["upper"] and rep["ci"]["level"] == 0.95


def test_condition_on(tmp_path, capsys):
    path = tmp_path / "w.csv"
    path.write_text("x,y,w\n0,1,0\n1,3,0\n0,2,1\n1,7,1\n0,1.5,1\n")
    assert main(["estimate", "--input", str(path), "--ate", "--arms", "1,0", "--condition-on", "w=1"]) == 0
    rep = json.loads(capsys.readouterr().out)["reports"][0]
    assert rep["estimate"] == 7 - 1.75
    assert main(["estimate", "--input", str(path), "--ate", "--arms", "1,0", "--condition-on", "w=5"]) == 1


@pytest.mark.parametrize("argv", [
    ["estimate", "--input", "x.csv", "--moment", "0", "--arms", "1,0"],
    ["estimate", "--input", "x.csv", "--moment", "2"],
    ["estimate", "--input", "x.csv"],
    ["estimate", "--input", "x.csv", "--ate", "--arms", "1,0", "--level", "1.5"],
    ["estimate", "--input", "x.csv", "--ate", "--arms", "1,0", "--bootstrap", "1"],
    ["estimate", "--input", "x.csv", "--ate", "--arms", "1,0", "--condition-on", "v=1"],
    ["bounds", "--input", "x.csv", "--moment", "2", "--arms", "1,0", "--bounds-override", "2,1"],
    ["simulate", "--preset", "nope", "--n", "5"],
])
def test_usage_errors_exit_2(argv):
    with pytest.raises(SystemExit) as info:
        main(argv)
    assert info.value.code == 2


def test_failed_quantity_exit_1(csv_a, capsys):
    code = main(["estimate", "--input", str(csv_a), "--ate", "--arms", "1,0", "--moment", "2", "--arms", "1,4"]
                + FAST)
    assert code == 1


def test_missing_input_exit_1(tmp_path):
    assert main(["estimate", "--input", str(tmp_path / "none.csv"), "--ate", "--arms", "1,0"]) == 1


def test_table_format(csv_a, capsys):
    main(["bounds", "--input", str(csv_a), "--skewness", "--kurtosis", "--arms", "1,0", "--format", "table"]
         + FAST)
    out = capsys.readouterr().out
    assert out.splitlines()[0].split()[:3] == ["quantity", "arms", "order"]
    assert "skewness_bounds" in out and "kurtosis_bounds" in out


def test_console_entry_point_stdin_pipeline(csv_b):
    cmd = [sys.executable, "-m", "causal_moments", "estimate", "--input", "-", "--product",
           "--arms-left", "1,0", "--arms-right", "0,-1"] + FAST
    out = subprocess.run(cmd, input=csv_b.read_text(), capture_output=True, text=True, check=True).stdout
    assert json.loads(out)["reports"][0]["quantity"] == "product"


def test_reproduce_small_study(tmp_path):
    doc = run_study(2, (20, 50), seed=3, mc_points=5000)
    truth = {r["quantity"]: r["ground_truth"] for r in doc["rows"]}
    assert truth["moment_2"] == 1 / 3 and truth["product"] == -1 / 3
    table = format_study(doc)
    assert "0.333" in table and "-0.250" in table and "0.200" in table and "-0.333" in table
    out = tmp_path / "r.json"
    assert main(["reproduce", "--replications", "2", "--sizes", "20", "--mc-points", "5000",
                 "--output", str(out)]) == 0
    assert json.loads(out.read_text())["settings"]["sizes"] == [20]
    assert to_json(doc) == to_json(run_study(2, (20, 50), seed=3, mc_points=5000))
