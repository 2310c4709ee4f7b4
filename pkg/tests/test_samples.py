"""Bundled sample inputs — every one runs cleanly through its command."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from symnf.commands import run_command
from symnf.models import RunOptions

SAMPLES = sorted((Path(__file__).resolve().parents[1] / "data" / "samples").glob("*.json"))


@pytest.mark.parametrize("path", SAMPLES, ids=[p.stem for p in SAMPLES])
def test_sample_runs(path: Path):
    sample = json.loads(path.read_text(encoding="utf-8"))
    report = run_command(
        sample["command"], sample["input"], RunOptions.model_validate(sample["options"])
    )
    assert report["header"]["command"] == sample["command"]
    residuals = report["result"].get("residuals", {})
    assert all(v < 1e-8 for v in residuals.values() if isinstance(v, float))


def test_samples_present():
    assert {p.stem.split("_")[0] for p in SAMPLES} == {
        "symlog",
        "resonance",
        "maplog",
        "bnf",
        "oplog",
        "qbnf",
        "pipeline",
    }
