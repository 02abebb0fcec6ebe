import csv
import io
from pathlib import Path

import pytest

import cognitive_hierarchy as ch

ROOT = Path(__file__).resolve().parents[2]
CANONICAL = str(ROOT / "scenarios" / "canonical.chs")
MALFORMED = ROOT / "tests" / "data" / "malformed"


def test_validate_canonical():
    info = ch.validate(CANONICAL)
    assert info["rooms"] == 5
    assert info["doorways"] == 5
    assert info["p_intended"] == pytest.approx(0.8)


def test_missing_file_is_os_error():
    with pytest.raises(OSError):
        ch.validate("/nonexistent/x.chs")


def test_malformed_files_raise():
    files = sorted(MALFORMED.glob("*.chs"))
    assert files
    for f in files:
        with pytest.raises(ValueError):
            ch.validate(str(f))


def test_text_round_trip():
    text = ch.canonical_scenario_text()
    assert ch.check_text(text) == text
    with pytest.raises(ValueError):
        ch.check_text("[params]\n")


def test_plan_untrained():
    p = ch.plan(CANONICAL, episodes=0, exact=True)
    assert p["rooms"][0] == "r4" and p["rooms"][-1] == "r3"
    assert p["cost"] == sum(c for _, c in p["steps"])
    assert p["text"].endswith("cost:%d\n" % p["cost"])


def test_learn_csv_shape():
    text = ch.learn_csv(CANONICAL, agent="flat", runs=2, episodes=2, seed=4)
    rows = list(csv.DictReader(io.StringIO(text)))
    assert len(rows) == 4
    assert set(rows[0]) == {"agent", "run", "episode", "steps", "cumulative_steps"}
    assert ch.learn_csv(CANONICAL, agent="flat", runs=2, episodes=2, seed=4) == text
    with pytest.raises(ValueError):
        ch.learn_csv(CANONICAL, agent="nobody")


def test_heatmap_and_sweep():
    text = ch.heatmap_csv(CANONICAL, episodes=5, trials=3)
    assert text.startswith("room,x,y,count\n")
    rows = ch.sweep(CANONICAL, ps=[1.0, 1.0], episodes=5)
    assert [r["p_intended"] for r in rows] == [1.0, 1.0]
    assert rows[0]["rooms"] == rows[1]["rooms"]
