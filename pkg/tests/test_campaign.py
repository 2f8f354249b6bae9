import json

import pytest

from detconj import campaign
from detconj import engines as eng
from detconj.campaign import (
    CampaignConfig,
    conjectured_value,
    export_bfile,
    read_bfile,
    run_campaign,
    verify_one,
)
from detconj.engines import CrtMode, DetResult, Engine
from detconj.errors import CheckpointCorruption, EngineDisagreement


def test_conjectured_value():
    assert conjectured_value(1) == -1
    assert conjectured_value(2) == 1
    assert conjectured_value(200) == 1
    with pytest.raises(ValueError):
        conjectured_value(0)


def test_verify_one_examples():
    r = verify_one(1, [Engine.BAREISS])
    assert r.value == -1 and r.passed and r.certified
    r = verify_one(2, [Engine.BAREISS, Engine.STRUCTURAL])
    assert r.value == 1 and r.passed and r.engines == ["bareiss", "structural"]
    r = verify_one(200, [Engine.MODULAR_CRT])
    assert r.passed and r.certified and r.prime_trace


def test_verify_one_disagreement(monkeypatch):
    monkeypatch.setattr(eng, "det_structural", lambda m: DetResult(7, Engine.STRUCTURAL))
    with pytest.raises(EngineDisagreement, match="d=3"):
        verify_one(3, [Engine.BAREISS, Engine.STRUCTURAL])


def test_structural_mismatch_is_a_skip(monkeypatch):
    def refuse(m):
        raise eng.StructuralMismatch("nope")

    monkeypatch.setattr(eng, "det_structural", refuse)
    r = verify_one(4, [Engine.BAREISS, Engine.STRUCTURAL])
    assert r.passed and r.skipped == ["structural"] and r.engines == ["bareiss"]


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(d_min=0, d_max=3),
        dict(d_min=5, d_max=3),
        dict(engines=()),
        dict(engines=(Engine.STRUCTURAL,)),  # certified needs a certifying engine
        dict(engines=(Engine.LAPLACE,)),
        dict(parallelism=0),
        dict(seed=-1),
    ],
)
def test_config_invariants(kwargs):
    with pytest.raises(ValueError):
        CampaignConfig(**kwargs)


def test_structural_only_needs_probabilistic():
    cfg = CampaignConfig(1, 10, (Engine.STRUCTURAL,), CrtMode.probabilistic())
    report = run_campaign(cfg)
    assert report.all_pass and [r.d for r in report.records] == list(range(1, 11))


def test_structural_fast_path_matches_general_path():
    fast = run_campaign(CampaignConfig(1, 300, (Engine.STRUCTURAL,), CrtMode.probabilistic()))
    slow = [verify_one(d, [Engine.STRUCTURAL]) for d in range(1, 301)]
    assert [r.to_dict() for r in fast.records] == [r.to_dict() for r in slow]


def test_single_d_campaign():
    report = run_campaign(CampaignConfig(1, 1, (Engine.BAREISS,)))
    assert len(report.records) == 1 and report.records[0].value == -1
    assert report.all_pass


def test_report_schema():
    report = run_campaign(CampaignConfig(1, 4))
    obj = json.loads(report.to_json(timings=True))
    assert set(obj) == {"config", "records", "all_pass", "total_seconds"}
    assert obj["all_pass"] is True
    assert [r["d"] for r in obj["records"]] == [1, 2, 3, 4]
    assert "total_seconds" not in json.loads(report.to_json())


def test_probabilistic_determinism():
    cfg = CampaignConfig(1, 30, (Engine.MODULAR_CRT, Engine.STRUCTURAL), CrtMode.probabilistic(3), seed=99)
    a, b = run_campaign(cfg).to_json(), run_campaign(cfg).to_json()
    assert a == b
    other = CampaignConfig(1, 30, (Engine.MODULAR_CRT,), CrtMode.probabilistic(3), seed=100)
    assert json.loads(a)["records"][0]["prime_trace"] != json.loads(run_campaign(other).to_json())["records"][0]["prime_trace"]


def test_parallel_matches_serial():
    serial = run_campaign(CampaignConfig(1, 40, parallelism=1))
    parallel = run_campaign(CampaignConfig(1, 40, parallelism=3))
    assert serial.to_json() == parallel.to_json()


class Interrupt(Exception):
    pass


def test_checkpoint_resume(tmp_path, monkeypatch):
    ckpt = tmp_path / "ckpt.jsonl"
    cfg = CampaignConfig(1, 100, checkpoint_path=str(ckpt))

    def stop_at_50(rec):
        if rec.d == 50:
            raise Interrupt

    with pytest.raises(Interrupt):
        run_campaign(cfg, stop_at_50)
    lines = ckpt.read_text().splitlines()
    assert [json.loads(ln)["d"] for ln in lines] == list(range(1, 51))

    computed = []
    real = campaign.verify_one

    def counting(d, *a, **k):
        computed.append(d)
        return real(d, *a, **k)

    monkeypatch.setattr(campaign, "verify_one", counting)
    resumed = run_campaign(cfg)
    assert computed == list(range(51, 101))
    assert ckpt.read_text().splitlines()[:50] == lines
    monkeypatch.undo()
    fresh = run_campaign(CampaignConfig(1, 100))
    assert resumed.to_json() == fresh.to_json()


@pytest.mark.parametrize(
    "content",
    [
        "not json\n",
        '{"d": 1}\n',
        '{"certified":true,"d":1,"engines":["bareiss"],"expected":-1,"passed":true,"prime_trace":null,"skipped":[],"value":-1}',
        '{"certified":true,"d":1,"engines":["bareiss"],"expected":-1,"passed":false,"prime_trace":null,"skipped":[],"value":-1}\n',
        '{"certified":true,"d":99,"engines":["bareiss"],"expected":-1,"passed":true,"prime_trace":null,"skipped":[],"value":-1}\n',
    ],
)
def test_corrupt_checkpoint_halts(tmp_path, content):
    ckpt = tmp_path / "ckpt.jsonl"
    ckpt.write_text(content)
    with pytest.raises(CheckpointCorruption):
        run_campaign(CampaignConfig(1, 10, checkpoint_path=str(ckpt)))


def test_duplicate_checkpoint_record(tmp_path):
    ckpt = tmp_path / "ckpt.jsonl"
    run_campaign(CampaignConfig(1, 2, checkpoint_path=str(ckpt)))
    ckpt.write_text(ckpt.read_text() + ckpt.read_text().splitlines()[0] + "\n")
    with pytest.raises(CheckpointCorruption, match="duplicate"):
        run_campaign(CampaignConfig(1, 5, checkpoint_path=str(ckpt)))


def test_bfile(tmp_path):
    report = run_campaign(CampaignConfig(1, 3, (Engine.BAREISS,)))
    path = tmp_path / "b.txt"
    export_bfile(report, path)
    assert path.read_bytes() == b"1 -1\n2 1\n3 -1\n"
    assert read_bfile(path) == [(1, -1), (2, 1), (3, -1)]


def test_bfile_rejects_bad_ranges(tmp_path):
    with pytest.raises(ValueError, match="empty"):
        export_bfile([], tmp_path / "b.txt")
    with pytest.raises(ValueError, match="non-contiguous"):
        export_bfile([(1, -1), (3, -1)], tmp_path / "b.txt")
