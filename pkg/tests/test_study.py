from __future__ import annotations

import json

import pytest
import yaml

from conftest import TABLE3, TOY_ENGINE
from openingbench.hypothesis import Decision
from openingbench.study import (
    COMPARISONS_HEADER,
    COUNTS_HEADER,
    Mode,
    StudyConfigError,
    builtin_study,
    emit_figures,
    load_state,
    load_study,
    parse_study,
    report_comparisons,
    report_counts,
    run_study,
)
from openingbench.montecarlo import read_scatter_csv


def doc(**overrides):
    base = {
        "format_version": 1,
        "seed": 1,
        "repetitions": 200,
        "experiments": [
            {"id": "1", "opening": "C68", "mode": "counts", "counts": [16, 3, 281]},
            {"id": "2", "opening": "C61", "mode": "counts", "counts": [56, 2, 242]},
            {"id": "9", "opening": "B22", "mode": "counts", "counts": [17, 3, 280]},
            {"id": "7", "opening": "B53", "mode": "counts", "counts": [21, 2, 277]},
        ],
        "comparisons": [{"test": "2", "baseline": "1"}, {"test": "9", "baseline": "7"}],
    }
    base.update(overrides)
    return base


def rows(tsv: str) -> list[list[str]]:
    return [line.split("\t") for line in tsv.rstrip("\n").split("\n")]


def test_load_from_yaml(tmp_path):
    path = tmp_path / "study.yaml"
    path.write_text(yaml.safe_dump(doc()))
    config = load_study(path)
    assert [e.id for e in config.experiments] == ["1", "2", "9", "7"]
    assert config.experiment("2").opening.eco == "C61"
    assert config.comparisons == (("2", "1"), ("9", "7"))


@pytest.mark.parametrize(
    "override, message",
    [
        (dict(comparisons=[{"test": "2", "baseline": "99"}]), "unknown experiment"),
        (dict(format_version=2), "format_version"),
        (dict(experiments=[{"id": "1", "opening": "C68", "counts": [1, 2, 3]}] * 2), "duplicate"),
        (dict(experiments=[{"id": "1", "opening": "C68", "mode": "magic"}]), "unknown mode"),
        (dict(experiments=[{"id": "1", "opening": "Z99", "counts": [1, 2, 3]}]), "Z99"),
        (dict(experiments=[{"id": "1", "opening": "C68", "mode": "synthetic", "vector": [0.9, 0.3]}]), "experiment 1"),
        (dict(family_alpha=2.0), "family_alpha"),
    ],
)
def test_invalid_studies_fail_before_running(override, message):
    with pytest.raises(StudyConfigError, match=message):
        parse_study(doc(**override))


def test_engine_experiment_needs_an_engine(monkeypatch):
    monkeypatch.delenv("OPENINGBENCH_ENGINE", raising=False)
    with pytest.raises(StudyConfigError, match="engine"):
        parse_study(doc(experiments=[{"id": "1", "opening": "C68", "mode": "engine"}], comparisons=[]))


def test_inline_opening_spec():
    config = parse_study(
        doc(
            experiments=[
                {
                    "id": "x",
                    "opening": {"eco": "C65", "name": "Berlin", "prefix": "e4 e5 Nf3 Nc6 Bb5 Nf6", "innovation_ply": 6},
                    "mode": "synthetic",
                    "vector": [0.05, 0.01],
                }
            ],
            comparisons=[],
        )
    )
    spec = config.experiments[0].opening
    assert spec.prefix[-1] == "Nf6" and spec.innovation_ply == 6


def test_budget_warning():
    extra = [{"id": str(i), "opening": "C44", "counts": [12, 7, 281]} for i in range(20, 26)]
    data = doc()
    data["experiments"] += extra
    data["comparisons"] = [{"test": e["id"], "baseline": "1"} for e in extra]
    with pytest.warns(UserWarning, match="budget"):
        parse_study(data)


def test_counts_report_rows():
    report = run_study(parse_study(doc(comparisons=[])))
    table = rows(report_counts(report.experiments))
    assert tuple(table[0]) == COUNTS_HEADER
    assert table[1] == ["1", "1", "C68 Ruy Lopez", "16", "3", "281", "300"]


def test_counts_report_empty():
    assert rows(report_counts([])) == [list(COUNTS_HEADER)]


def test_all_draw_synthetic_row():
    data = doc(experiments=[{"id": "1", "opening": "C68", "mode": "synthetic", "vector": [0, 0], "games": 40}], comparisons=[])
    report = run_study(parse_study(data))
    assert rows(report_counts(report.experiments))[1][3:] == ["0", "0", "40", "40"]


def test_empty_plan_gives_counts_only(tmp_path):
    report = run_study(parse_study(doc(comparisons=[])), tmp_path)
    assert report.comparisons == ()
    assert rows(report_comparisons(report.comparisons)) == [list(COMPARISONS_HEADER)]
    assert not list(tmp_path.glob("*.scatter.csv"))


def test_comparison_rows():
    report = run_study(parse_study(doc(repetitions=1000)))
    table = {r[1]: r for r in rows(report_comparisons(report.comparisons))[1:]}
    bird = table["C61 Bird Defense"]
    assert bird[0] == "2" and bird[2] == "C68 Ruy Lopez"
    assert bird[3] == "40.012" and bird[8] == "Reject H0" and bird[9] == "F"
    alapin = table["B22 Sicilian Alapin"]
    assert alapin[3] == "4.123" and alapin[8] == "Fail to reject" and alapin[9] == "C"
    assert float(alapin[7]) == pytest.approx(0.005)


def test_self_comparison_row():
    data = doc(experiments=doc()["experiments"] + [{"id": "1b", "opening": "C61", "counts": [16, 3, 281]}],
               comparisons=[{"test": "1b", "baseline": "1"}])
    report = run_study(parse_study(data))
    row = rows(report_comparisons(report.comparisons))[1]
    assert row[3] == "0.000" and row[8] == "Fail to reject" and row[9] == "C"


def test_baseline_comparison_figure(tmp_path):
    data = doc(comparisons=[{"test": "7", "baseline": "1"}], repetitions=1000)
    report = run_study(parse_study(data))
    [path] = emit_figures(report, tmp_path)
    assert path.name == "C68-vs-B53.scatter.csv"
    points = read_scatter_csv(path.read_text())
    assert len(points) == 2000
    assert {p.cluster for p in points} == {"baseline", "test"}


def test_ten_comparisons_ten_figures(tmp_path):
    report = run_study(builtin_study("reference"), tmp_path)
    assert len(list(tmp_path.glob("*.scatter.csv"))) == 10
    assert (tmp_path / "C68-vs-C61.scatter.csv").exists()
    assert len(report.comparisons) == 10


def test_no_comparisons_no_figures(tmp_path):
    assert emit_figures(run_study(parse_study(doc(comparisons=[]))), tmp_path) == []


def test_reference_study_decisions_match_published():
    report = run_study(builtin_study("reference"))
    got = {r.test.name.split()[0]: r.result.decision is Decision.REJECT for r in report.comparisons}
    expected = {eco: row[5] for eco, row in TABLE3.items()}
    assert got == expected


def test_persisted_state_reproduces_reports(tmp_path):
    data = doc(experiments=[
        {"id": "1", "opening": "C68", "mode": "synthetic", "vector": [0.0533, 0.01]},
        {"id": "2", "opening": "C61", "mode": "synthetic", "vector": [0.1867, 0.0067]},
    ], comparisons=[{"test": "2", "baseline": "1"}])
    first = tmp_path / "first"
    run_study(parse_study(data), first)
    state = json.loads((first / "study-state.json").read_text())
    assert all(e["mode"] == "counts" and e["source_mode"] == "synthetic" for e in state["experiments"])
    again = tmp_path / "again"
    run_study(load_state(first), again)
    for name in ("counts.tsv", "comparisons.tsv", "C68-vs-C61.scatter.csv"):
        assert (first / name).read_bytes() == (again / name).read_bytes()
    assert (first / "experiment-1.pgn").exists() and not (again / "experiment-1.pgn").exists()


def test_failed_experiment_is_isolated(tmp_path):
    data = doc(
        engine={"command": ["/nonexistent/engine"], "depth": 1},
        experiments=doc()["experiments"] + [{"id": "e", "opening": "C50", "mode": "engine", "games": 2}],
        comparisons=[{"test": "2", "baseline": "1"}, {"test": "e", "baseline": "1"}],
    )
    report = run_study(parse_study(data), tmp_path)
    failed = [o for o in report.experiments if o.error]
    assert [o.config.id for o in failed] == ["e"]
    assert len(report.comparisons) == 1 and report.skipped
    assert rows((tmp_path / "counts.tsv").read_text())[-1][3:] == ["", "", "", ""]


def test_engine_experiment_with_toy_engine(tmp_path):
    data = doc(
        engine={"command": list(TOY_ENGINE), "depth": 1, "options": {"MaxDepth": 1}},
        max_fullmoves=25,
        experiments=[{"id": "1", "opening": "C68", "mode": "engine", "games": 2}],
        comparisons=[],
    )
    config = parse_study(data)
    assert config.experiments[0].mode is Mode.ENGINE
    report = run_study(config, tmp_path)
    [outcome] = report.experiments
    assert outcome.counts.total == 2 and outcome.error is None
    assert (tmp_path / "experiment-1.pgn").read_text().count("[ECO \"C68\"]") == 2
