import json
import subprocess
import sys

import numpy as np
import pytest

from prodchan import channels as chn
from prodchan import cli, corpus, states


@pytest.fixture
def write_json(tmp_path):
    def _write(name, obj):
        path = tmp_path / name
        path.write_text(obj if isinstance(obj, str) else json.dumps(obj))
        return str(path)

    return _write


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_validate_identity(write_json, capsys):
    path = write_json("id.json", chn.channel_to_json(chn.identity_channel(2)))
    code, out, _ = run(["validate", "--channel", path], capsys)
    report = json.loads(out)
    assert code == 0
    assert report["tp_defect"] < 1e-12 and report["cp_defect"] < 1e-12


def test_validate_scaled(write_json, capsys):
    path = write_json("bad.json", chn.channel_to_json(chn.KrausChannel.from_kraus([0.9 * np.eye(2)])))
    code, out, _ = run(["validate", "--channel", path], capsys)
    assert code == 2
    assert json.loads(out)["tp_defect"] == pytest.approx(0.38)


def test_validate_malformed(write_json, capsys):
    path = write_json("junk.json", "{not json")
    code, _, err = run(["validate", "--channel", path], capsys)
    assert code == 2 and "error" in err
    code, _, _ = run(["validate", "--channel", write_json("x.json", {"dim_in": 2})], capsys)
    assert code == 2


def test_check_product(write_json, capsys):
    prod = states.product_state(states.random_density(2, 2, 0), states.random_density(3, 2, 1))
    code, out, _ = run(["check-product", "--state", write_json("p.json", states.state_to_json(prod)), "--json"], capsys)
    assert code == 0 and json.loads(out)["product"] is True

    bell = write_json("bell.json", states.state_to_json(states.bell_state()))
    code, out, _ = run(["check-product", "--state", bell, "--tol", "1e-8", "--json"], capsys)
    report = json.loads(out)
    assert code == 1
    assert report["product_distance"] == pytest.approx(1.5, abs=1e-11)
    assert report["mutual_information"] == pytest.approx(2 * np.log(2), abs=1e-11)

    code, out, _ = run(["check-product", "--state", bell], capsys)
    assert code == 1 and "product_distance" in out


def test_check_product_missing_split(write_json, capsys):
    obj = states.state_to_json(states.maximally_mixed(4))
    code, _, _ = run(["check-product", "--state", write_json("s.json", obj)], capsys)
    assert code == 2
    del obj["split"]
    code, _, _ = run(["check-product", "--state", write_json("s2.json", obj)], capsys)
    assert code == 2


def test_classify_cnot(write_json, capsys):
    path = write_json("cnot.json", chn.channel_to_json(corpus.cnot_channel()))
    code, out, _ = run(["classify", "--channel", path, "--seed", "0", "--json"], capsys)
    result = json.loads(out)
    assert code == 1
    assert result["verdict"] == "not_preserving" and result["witness"] is not None
    assert result["witness_violation"] == pytest.approx(1.5, abs=1e-6)


def test_classify_invalid(write_json, capsys):
    bad = chn.KrausChannel((0.9 * np.eye(4),), 4, 4, (2, 2), (2, 2))
    code, _, _ = run(["classify", "--channel", write_json("b.json", chn.channel_to_json(bad)), "--seed", "0"], capsys)
    assert code == 2


def test_classify_seed_is_mandatory(write_json):
    path = write_json("id.json", chn.channel_to_json(chn.identity_channel(4, (2, 2))))
    with pytest.raises(SystemExit) as exc:
        cli.main(["classify", "--channel", path])
    assert exc.value.code == 2


def test_generate_then_classify(tmp_path, capsys):
    out = tmp_path / "entry.json"
    code, _, _ = run(["generate", "--form", "i", "--da", "2", "--db", "3", "--seed", "4", "--out", str(out)], capsys)
    assert code == 0
    assert json.loads(out.read_text())["label"] == "i"
    code, text, _ = run(["classify", "--channel", str(out), "--seed", "4", "--json"], capsys)
    result = json.loads(text)
    assert code == 0 and "i" in [f["form"] for f in result["forms"]]
    code, text, _ = run(["classify", "--channel", str(out), "--seed", "4"], capsys)
    assert code == 0 and text.startswith("verdict: preserving")


def test_output_rounded_to_twelve_digits():
    rounded = cli._round12({"x": 1 / 3, "nested": [2 / 3, {"y": 1e-17 / 3}], "flag": True, "n": 4})
    assert rounded == {"x": 0.333333333333, "nested": [0.666666666667, {"y": 3.33333333333e-18}], "flag": True, "n": 4}


def _acceptance_corpus(tmp_path, entries):
    path = tmp_path / "corpus.json"
    corpus.save_corpus(entries, path)
    return str(path)


def test_acceptance_small_corpus(tmp_path, capsys):
    entries = [corpus.generate("iii", 2, 2, 0), corpus.generate("unitary_entangling", 2, 2, 0)]
    report_path = tmp_path / "report.json"
    code, out, _ = run(["acceptance", "--corpus", _acceptance_corpus(tmp_path, entries), "--report", str(report_path)], capsys)
    report = json.loads(report_path.read_text())
    assert code == 0 and report["pass"] is True
    assert [e["label"] for e in report["entries"]] == ["iii", "not_preserving"]
    assert set(report["entries"][0]) >= {"label", "verdict", "residual", "pass"}


def test_acceptance_mislabeled(tmp_path, capsys):
    good = corpus.generate("i", 2, 2, 0)
    entries = [good, corpus.CorpusEntry("iv", good.channel, 0, "deliberately wrong")]
    report_path = tmp_path / "report.json"
    code, out, _ = run(["acceptance", "--corpus", _acceptance_corpus(tmp_path, entries), "--report", str(report_path)], capsys)
    report = json.loads(report_path.read_text())
    assert code == 1 and report["pass"] is False
    assert [e["pass"] for e in report["entries"]] == [True, False]
    assert "FAIL entry 1" in out


def test_acceptance_committed_corpus(tmp_path):
    report_path = tmp_path / "report.json"
    proc = subprocess.run(
        [sys.executable, "-m", "prodchan.cli", "acceptance",
         "--corpus", str(corpus.default_corpus_path()), "--report", str(report_path)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stdout + proc.stderr
    assert json.loads(report_path.read_text())["pass"] is True
