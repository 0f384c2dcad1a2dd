import io
import json

import numpy as np
import pytest

from polykern import cli
from polykern.errors import ConfigError
from polykern.report import CheckResult, VerificationReport, config_from_dict, emit_report, load_config, run_suite
from polykern.serialize import dumps, eigenvalues_csv, format_float, kernel_to_json

C1 = {"n": 1, "alpha": [2], "lambda": [2.0], "mu": {"0": 1, "1": 1, "2": 1}, "seed": 5, "samples": 10}
C2 = {"n": 2, "alpha": [0, 1], "lambda": [2.0, 3.0], "seed": 5, "samples": 10}


@pytest.fixture
def write(tmp_path):
    def _write(name, data):
        path = tmp_path / name
        path.write_text(json.dumps(data))
        return str(path)

    return _write


def run(argv):
    out = io.StringIO()
    code = cli.main(argv, out)
    return code, out.getvalue()


@pytest.mark.parametrize(
    "patch, path",
    [
        ({"lambda": [2.0, 1.0]}, "lambda"),
        ({"lambda": [-1.0]}, "lambda[0]"),
        ({"alpha": [2.5]}, "alpha[0]"),
        ({"n": 2}, "n"),
        ({"mu": {"3": 1.0}}, "mu.3"),
        ({"mu": {"0": 2.0}}, "mu.0"),
        ({"mu": {"1,0": 1.0}}, "mu.1,0"),
        ({"samples": 0}, "samples"),
        ({"degree": 2}, "degree"),
        ({"tolerances": {"nope": 1}}, "tolerances.nope"),
        ({"tolerances": {"psd": -1}}, "tolerances.psd"),
        ({"quadrature": {"radius": 1.5}}, "quadrature.radius"),
        ({"mobius": [[{"a_re": 2, "a_im": 0, "t": 0}]]}, "mobius[0]"),
        ({"polynomial": {"1": [1]}}, "polynomial.1"),
        ({"colour": "red"}, "colour"),
    ],
)
def test_config_errors_name_the_field(patch, path):
    with pytest.raises(ConfigError) as err:
        config_from_dict({**C1, **patch})
    assert err.value.path == path


def test_config_missing_required():
    with pytest.raises(ConfigError) as err:
        config_from_dict({"alpha": [1]})
    assert err.value.path == "lambda"


def test_overrides_win():
    cfg = config_from_dict(C1, {"seed": 9, "samples": None, "quadrature": {"nodes": 24, "radius": None}})
    assert cfg.seed == 9 and cfg.samples == 10 and cfg.nodes == 24 and cfg.radius == 0.4


def test_load_config_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(str(bad))
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / "missing.json"))


def test_canonical_suite_passes():
    rep = run_suite(config_from_dict(C1), "canonical")
    assert rep.overall == "pass" and rep.exit_code == 0
    assert rep.checks[0].residual < 1e-10


def test_unknown_suite():
    with pytest.raises(ConfigError):
        run_suite(config_from_dict(C1), "bogus")


def test_witness_guard_exit(write):
    path = write("w.json", {"alpha": [1, 0], "lambda": [2, 3]})
    code, text = run(["verify", "--config", path, "--suite", "witness"])
    assert code == 2
    rep = json.loads(text)
    assert rep["checks"][0]["verdict"] == "guard"


def test_all_skips_witness_outside_hypothesis():
    rep = run_suite(config_from_dict(C1), "all")
    verdicts = {c.check: c.verdict for c in rep.checks}
    assert verdicts["witness"] == "skipped"
    assert rep.overall == "pass" and rep.exit_code == 0


def test_all_on_c2(write, tmp_path):
    out = tmp_path / "r.json"
    code, _ = run(["verify", "--config", write("c2.json", C2), "--out", str(out)])
    rep = json.loads(out.read_text())
    assert code == 0 and rep["overall"] == "pass"
    names = {c["check"] for c in rep["checks"]}
    assert {"canonical.direct-sum", "curvature.oracle", "witness.entry", "irreducibility.commutant"} <= names
    assert all("wall_time" not in c for c in rep["checks"])


def test_determinism(write, tmp_path):
    path = write("c2.json", C2)
    texts = []
    for k in range(2):
        out = tmp_path / f"r{k}.json"
        run(["verify", "--config", path, "--out", str(out), "--workers", str(1 + 3 * k)])
        texts.append(out.read_bytes())
    assert texts[0] == texts[1]


def test_seed_changes_report(write):
    path = write("c1.json", C1)
    a = run(["verify", "--config", path, "--suite", "canonical"])[1]
    b = run(["verify", "--config", path, "--suite", "canonical", "--seed", "6"])[1]
    assert a != b


def test_timings_flag(write):
    code, text = run(["verify", "--config", write("c1.json", C1), "--suite", "canonical", "--timings"])
    assert "wall_time" in json.loads(text)["checks"][0]


def test_failed_check_exit(write):
    path = write("c1.json", {**C1, "tolerances": {"canonical": 1e-30}})
    code, text = run(["verify", "--config", path, "--suite", "canonical"])
    assert code == 1 and json.loads(text)["overall"] == "fail"


def test_config_error_exit(write, capsys):
    code, _ = run(["verify", "--config", write("bad.json", {**C1, "lambda": [0]})])
    assert code == 3
    assert "lambda[0]" in capsys.readouterr().err


def test_empty_report():
    rep = VerificationReport({}, "all", [])
    data = json.loads(emit_report(rep))
    assert data["overall"] == "pass" and data["checks"] == []
    assert rep.exit_code == 0


def test_single_failed_check():
    rep = VerificationReport({}, "x", [CheckResult("x", 1.0, 0.5, "fail")])
    assert rep.overall == "fail" and rep.exit_code == 1


def test_csv_summary_golden():
    rep = VerificationReport({}, "x", [CheckResult("b", 0.25, 1e-10, "pass"), CheckResult("a", 3.0, 1.0, "fail")])
    assert emit_report(rep, "csv-summary") == (
        "check,residual,threshold,verdict\n"
        "b,0.25,1e-10,pass\n"
        "a,3,1,fail\n"
    )


def test_emit_to_path(tmp_path):
    rep = VerificationReport({"a": 1}, "x", [])
    path = tmp_path / "out.csv"
    text = emit_report(rep, "csv-summary", str(path))
    assert path.read_text() == text


def test_float_format():
    assert format_float(0.1) == "0.10000000000000001"
    assert format_float(float("nan")) == "null"
    text = dumps({"b": [1.0, 2], "a": {"z": 0.5, "y": None}, "c": 1 + 2j})
    assert text.index('"a"') < text.index('"b"') < text.index('"c"')
    assert json.loads(text)["c"] == [1, 2]


def test_eval(write):
    code, text = run(["eval", "--config", write("c1.json", C1), "--z", "0", "--w", "0"])
    data = json.loads(text)
    assert code == 0 and data["r"] == 3
    np.testing.assert_allclose(np.array(data["entries"])[..., 0], np.diag([1, 1.5, 7 / 3]))
    code, text = run(["eval", "--config", write("c1.json", C1), "--z", "0.3j", "--w", "0.3j", "--normalized"])
    assert code == 0


def test_eval_bad_point(write):
    assert run(["eval", "--config", write("c1.json", C1), "--z", "0,0", "--w", "0"])[0] == 3
    assert run(["eval", "--config", write("c1.json", C1), "--z", "1.2", "--w", "0"])[0] == 3


def test_classify_cli(write):
    a = write("a.json", C1)
    b = write("b.json", {**C1, "lambda": [2.5]})
    code, text = run(["classify", "--config1", a, "--config2", b])
    data = json.loads(text)
    assert code == 0 and not data["equivalent"] and data["witness"]["kind"] == "trace"
    assert json.loads(run(["classify", "--config1", a, "--config2", a])[1])["equivalent"]
    assert run(["classify", "--config1", a, "--config2", write("c.json", C2)])[0] == 2


def test_witness_cli():
    code, text = run(["witness", "--alpha", "2,0"])
    assert code == 0 and json.loads(text) == {"alpha": [2, 0], "holds": True, "i": 0, "j": 1, "theta": [1, 0]}
    assert run(["witness", "--alpha", "1,0"])[0] == 2
    assert run(["witness", "--alpha", "x"])[0] == 3


def test_exports():
    data = kernel_to_json(np.array([[1 + 1j, 0], [0, 2]]))
    assert data["entries"][0][0] == [1.0, 1.0]
    assert eigenvalues_csv([0.5, 2.0]) == "index,eigenvalue\n0,0.5\n1,2\n"
