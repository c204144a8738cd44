import json
import math
import os
import subprocess
import time
from pathlib import Path

import pytest

import ipelicit
from ipelicit import synth

DATA = Path(os.environ.get("IPELICIT_TEST_DATA", Path(__file__).resolve().parents[1] / "data"))
CLI = os.environ.get("IPELICIT_CLI")


def test_candidate_set_and_pmf():
    cands = ipelicit.CandidateSet(["Paris", " paris", "Lyon"])
    assert len(cands) == 2
    assert cands.index_of("LYON") == 1
    pmf = ipelicit.build_pmf(cands, [3.0, 1.0], True)
    assert pmf.probs == pytest.approx([0.75, 0.25])
    assert ipelicit.entropy(pmf) == pytest.approx(-(0.75 * math.log(0.75) + 0.25 * math.log(0.25)))


def test_mmi_and_decisions():
    assert ipelicit.interval_width_mmi(0.2, 0.5).value == pytest.approx(0.3)
    assert ipelicit.mmi_upper_bound([0.1, 0.3]).value == pytest.approx(0.6)
    iv = ipelicit.ProbabilityIntervalSet(ipelicit.CandidateSet(["A", "B"]), [0.3, 0.4], [0.6, 0.5])
    assert ipelicit.maximin(iv).chosen_answer == "B"
    assert ipelicit.maximax(iv).chosen_answer == "A"


def test_verifier_and_errors():
    report = ipelicit.verify_axioms([0.6, 0.6])
    assert not report.passed
    assert report.violations[0].code == ipelicit.ViolationCode.SUM
    with pytest.raises(ipelicit.IpelicitError) as err:
        ipelicit.mmi_upper_bound([0.7, 0.6])
    assert err.value.code == "LowerSumExceedsOne"


def test_synth():
    assert synth.apply_rotation("APPLE", 1) == "BQQMF"
    variants = synth.ground_truth_variants("ABCD", 0.25)
    assert sum(p for _, _, p in variants) == pytest.approx(1.0)
    question, clean = synth.icl_question("rotation:13,cyclic_shift:1", 0.25, 3, 5, 0)
    assert question.count("Input:") == 4
    assert clean.isupper()


def test_scripted_elicitation():
    script = json.loads((DATA / "definetti_script.json").read_text())
    result = ipelicit.elicit_scripted(script, "definetti", "Q?", ipelicit.CandidateSet(["A", "B"]), 5)
    assert result["success"]
    assert len(result["attempts"]) == 2
    assert result["entropy"] == pytest.approx(math.log(2))


def test_metrics():
    assert ipelicit.auroc([0.9, 0.1, 0.5, 0.5], [1, 0, 1, 0]) == pytest.approx(0.875)
    assert ipelicit.concordance_index([1.0, 2.0, 3.0], [1.0, 2.0, 3.0]) == 1.0


@pytest.fixture
def mock_server(tmp_path):
    if not CLI:
        pytest.skip("IPELICIT_CLI not set")
    port_file = tmp_path / "port"
    proc = subprocess.Popen(
        [CLI, "mock", "serve", "--script", str(DATA / "campaign_script.json"), "--port-file", str(port_file)],
        stdout=subprocess.DEVNULL,
        stderr=subprocess.DEVNULL,
    )
    try:
        for _ in range(200):
            if port_file.exists():
                break
            time.sleep(0.025)
        yield int(port_file.read_text())
    finally:
        proc.terminate()
        proc.wait(timeout=10)


def test_cli_campaign_resume(tmp_path, mock_server):
    config = json.loads((DATA / "campaign.json").read_text())
    config["dataset"]["path"] = str(DATA / "qa_small.jsonl")
    config["endpoints"][0]["base_url"] = f"http://127.0.0.1:{mock_server}/v1"
    config["output_dir"] = str(tmp_path / "run")
    cfg = tmp_path / "campaign.json"
    cfg.write_text(json.dumps(config))

    subprocess.run([CLI, "campaign", "run", "--config", str(cfg)], check=True, capture_output=True)
    records = tmp_path / "run" / "records.jsonl"
    lines = records.read_text().splitlines()
    assert len(lines) == 16

    kept = [l for l in lines if '"question_id":"q3","method":"vanilla"' not in l]
    assert len(kept) == 15
    records.write_text("\n".join(kept) + "\n")
    subprocess.run([CLI, "campaign", "resume", "--config", str(cfg)], check=True, capture_output=True)
    resumed = records.read_text().splitlines()
    assert len(resumed) == 16
    assert '"question_id":"q3","method":"vanilla"' in resumed[-1]

    summary = ipelicit.run_campaign(str(cfg))
    assert summary["written"] == 0
    assert summary["skipped"] == 15

    rows = ipelicit.auroc_table(str(records), "ambiguous", "first_order")
    assert rows
