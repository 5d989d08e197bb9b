"""Study configuration, orchestration and report files.

A study is a YAML document::

    format_version: 1
    name: my-study
    seed: 2014            # master seed; every other seed derives from it
    repetitions: 1000     # simulated matches per cluster
    family_alpha: 0.005   # split over the comparisons against each baseline
    games: 300
    max_fullmoves: 250    # draw adjudication cap for engine games
    engine:               # needed only by engine experiments
      command: [stockfish]
      options: {Threads: 4, Contempt: 1}
      depth: 22
    experiments:
      - id: "1"
        opening: C68                 # built-in ECO code or an inline spec
        mode: counts                 # counts | synthetic | engine
        counts: [16, 3, 281]         # white, black, draws
      - id: "2"
        opening: {eco: C61, name: Bird Defense, prefix: [e4, e5, Nf3, Nc6, Bb5, Nd4],
                  role: test, innovation_ply: 6, group: "1"}
        mode: synthetic
        vector: [0.1867, 0.0067]     # p_w, p_b
    comparisons:
      - {test: "2", baseline: "1"}

All outputs land in one directory under fixed names: ``counts.tsv``,
``comparisons.tsv``, ``<base>-vs-<test>.scatter.csv``,
``experiment-<id>.pgn`` and ``study-state.json``.  The state file holds
the configuration with every count filled in, so ``report`` can redo the
statistics without replaying games.
"""

from __future__ import annotations

import enum
import json
import logging
import shlex
import warnings
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Any, Mapping, Optional, Sequence

import yaml

from .hypothesis import (
    COMPARISON_BUDGET,
    ComparisonRow,
    LabeledCounts,
    run_comparison_table,
)
from .model import OutcomeCounts, make_vector
from .montecarlo import derive_seed, export_scatter, render_scatter_svg, scatter_csv
from .openings import OpeningSpec, Role, builtin_opening, validate_spec
from .pgn import write_pgn
from .uci import ENGINE_ENV_VAR, EngineConfig, EngineError, MatchConfig, SearchLimit, launch, run_match
from .uci.match import DEFAULT_MAX_FULLMOVES, DEFAULT_RESTART_EVERY

log = logging.getLogger(__name__)

FORMAT_VERSION = 1
COUNTS_FILE = "counts.tsv"
COMPARISONS_FILE = "comparisons.tsv"
STATE_FILE = "study-state.json"


class StudyConfigError(ValueError):
    pass


class Mode(enum.Enum):
    COUNTS = "counts"
    SYNTHETIC = "synthetic"
    ENGINE = "engine"


@dataclass(frozen=True)
class ExperimentConfig:
    id: str
    opening: OpeningSpec
    mode: Mode
    games: int = 300
    counts: Optional[OutcomeCounts] = None
    vector: Optional[tuple[float, float]] = None


@dataclass(frozen=True)
class StudyConfig:
    experiments: tuple[ExperimentConfig, ...]
    comparisons: tuple[tuple[str, str], ...] = ()
    family_alpha: float = 0.005
    repetitions: int = 1000
    seed: int = 0
    name: str = "study"
    engine: Optional[EngineConfig] = None
    max_fullmoves: int = DEFAULT_MAX_FULLMOVES
    restart_every: int = DEFAULT_RESTART_EVERY
    format_version: int = FORMAT_VERSION

    def experiment(self, exp_id: str) -> ExperimentConfig:
        for exp in self.experiments:
            if exp.id == exp_id:
                return exp
        raise KeyError(exp_id)


# --- loading -----------------------------------------------------------------


def _opening(raw: Any) -> OpeningSpec:
    if isinstance(raw, str):
        try:
            return builtin_opening(raw)
        except KeyError as exc:
            raise StudyConfigError(str(exc.args[0])) from None
    if not isinstance(raw, Mapping):
        raise StudyConfigError(f"opening must be an ECO code or a mapping, got {raw!r}")
    try:
        prefix = raw["prefix"]
        if isinstance(prefix, str):
            prefix = prefix.split()
        ply = raw.get("innovation_ply")
        role = Role(raw.get("role", "baseline" if ply is None else "test"))
        return OpeningSpec(
            eco=str(raw["eco"]),
            name=str(raw.get("name", raw["eco"])),
            prefix=tuple(str(m) for m in prefix),
            role=role,
            innovation_ply=None if ply is None else int(ply),
            group=str(raw.get("group", "")),
        )
    except (KeyError, ValueError) as exc:
        raise StudyConfigError(f"bad opening spec {raw!r}: {exc}") from None


def _engine(raw: Optional[Mapping[str, Any]]) -> Optional[EngineConfig]:
    if raw is None:
        return None
    movetime = raw.get("movetime_ms")
    settings = dict(
        options=raw.get("options") or {},
        limit=SearchLimit(None if movetime else int(raw.get("depth", 22)), movetime),
        handshake_timeout=float(raw.get("handshake_timeout", 10.0)),
        move_timeout=float(raw.get("move_timeout", 300.0)),
    )
    command = raw.get("command")
    if not command:
        return EngineConfig.from_env(**settings)
    if isinstance(command, str):
        command = shlex.split(command)
    return EngineConfig(tuple(command), **settings)


def parse_study(data: Mapping[str, Any]) -> StudyConfig:
    """Validate a decoded study document and build its configuration."""
    if not isinstance(data, Mapping):
        raise StudyConfigError("a study document must be a mapping")
    version = data.get("format_version")
    if version != FORMAT_VERSION:
        raise StudyConfigError(f"unsupported format_version {version!r} (expected {FORMAT_VERSION})")
    games = int(data.get("games", 300))
    experiments = []
    seen: set[str] = set()
    for raw in data.get("experiments") or []:
        exp_id = str(raw.get("id", ""))
        if not exp_id:
            raise StudyConfigError(f"experiment without an id: {raw!r}")
        if exp_id in seen:
            raise StudyConfigError(f"duplicate experiment id {exp_id!r}")
        seen.add(exp_id)
        try:
            mode = Mode(raw.get("mode", "counts"))
        except ValueError:
            raise StudyConfigError(f"experiment {exp_id}: unknown mode {raw.get('mode')!r}") from None
        spec = _opening(raw.get("opening"))
        exp_games = int(raw.get("games", games))
        counts = vector = None
        if mode is Mode.COUNTS:
            c = raw.get("counts")
            if not c or len(c) not in (3, 4):
                raise StudyConfigError(f"experiment {exp_id}: counts needs [white, black, draws]")
            try:
                counts = OutcomeCounts(*map(int, c)) if len(c) == 4 else OutcomeCounts.of(*map(int, c))
            except ValueError as exc:
                raise StudyConfigError(f"experiment {exp_id}: {exc}") from None
            exp_games = counts.total
        elif mode is Mode.SYNTHETIC:
            v = raw.get("vector")
            if not v or len(v) != 2:
                raise StudyConfigError(f"experiment {exp_id}: vector needs [p_w, p_b]")
            try:
                make_vector(float(v[0]), float(v[1]))
            except ValueError as exc:
                raise StudyConfigError(f"experiment {exp_id}: {exc}") from None
            vector = (float(v[0]), float(v[1]))
        report = validate_spec(spec)
        if not report.ok:
            raise StudyConfigError(f"experiment {exp_id}: {'; '.join(report.violations)}")
        experiments.append(ExperimentConfig(exp_id, spec, mode, exp_games, counts, vector))

    comparisons = []
    per_baseline: dict[str, int] = {}
    for raw in data.get("comparisons") or []:
        test, base = str(raw.get("test", "")), str(raw.get("baseline", ""))
        for ref in (test, base):
            if ref not in seen:
                raise StudyConfigError(f"comparison references unknown experiment {ref!r}")
        comparisons.append((test, base))
        per_baseline[base] = per_baseline.get(base, 0) + 1
    for base, n in per_baseline.items():
        if n > COMPARISON_BUDGET:
            warnings.warn(
                f"{n} comparisons against experiment {base} exceed the budget of {COMPARISON_BUDGET}",
                stacklevel=2,
            )

    try:
        engine = _engine(data.get("engine"))
    except (EngineError, ValueError) as exc:
        if any(e.mode is Mode.ENGINE for e in experiments):
            raise StudyConfigError(f"engine: {exc}") from None
        engine = None
    if engine is None and any(e.mode is Mode.ENGINE for e in experiments):
        try:
            engine = EngineConfig.from_env()
        except EngineError:
            raise StudyConfigError(
                f"engine experiments need an engine section or {ENGINE_ENV_VAR}"
            ) from None

    alpha = float(data.get("family_alpha", 0.005))
    reps = int(data.get("repetitions", 1000))
    if not 0 < alpha < 1:
        raise StudyConfigError(f"family_alpha {alpha} outside (0, 1)")
    if reps < 2:
        raise StudyConfigError("repetitions must be at least 2")
    return StudyConfig(
        experiments=tuple(experiments),
        comparisons=tuple(comparisons),
        family_alpha=alpha,
        repetitions=reps,
        seed=int(data.get("seed", 0)),
        name=str(data.get("name", "study")),
        engine=engine,
        max_fullmoves=int(data.get("max_fullmoves", DEFAULT_MAX_FULLMOVES)),
        restart_every=int(data.get("restart_every", DEFAULT_RESTART_EVERY)),
    )


def load_study(path: str | Path) -> StudyConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_study(yaml.safe_load(fh))


def builtin_study(name: str) -> StudyConfig:
    """Packaged studies: ``reference`` (observed counts) or ``synthetic``."""
    try:
        text = resources.files("openingbench").joinpath("data", f"{name}_study.yaml").read_text("utf-8")
    except FileNotFoundError:
        raise StudyConfigError(f"no built-in study {name!r}") from None
    return parse_study(yaml.safe_load(text))


# --- execution -----------------------------------------------------------------


@dataclass(frozen=True)
class ExperimentOutcome:
    config: ExperimentConfig
    counts: Optional[OutcomeCounts]
    records: tuple = field(default=(), repr=False)
    error: Optional[str] = None
    aborted: int = 0


@dataclass(frozen=True)
class StudyReport:
    config: StudyConfig
    experiments: tuple[ExperimentOutcome, ...]
    comparisons: tuple[ComparisonRow, ...]
    skipped: tuple[str, ...] = ()
    files: tuple[Path, ...] = ()


def _run_experiment(config: StudyConfig, exp: ExperimentConfig, workers: int, launcher) -> ExperimentOutcome:
    if exp.mode is Mode.COUNTS:
        return ExperimentOutcome(exp, exp.counts)
    match = MatchConfig(
        opening=exp.opening,
        games=exp.games,
        engine=config.engine if exp.mode is Mode.ENGINE else None,
        max_fullmoves=config.max_fullmoves,
        seed=derive_seed(config.seed, "experiment", exp.id),
        synthetic=make_vector(*exp.vector) if exp.mode is Mode.SYNTHETIC else None,
        restart_every=config.restart_every,
        workers=workers,
    )
    result = run_match(match, launcher)
    if result.counts.total == 0:
        first = result.aborted[0].error if result.aborted else "no games"
        return ExperimentOutcome(exp, None, error=f"no game completed: {first}", aborted=len(result.aborted))
    return ExperimentOutcome(exp, result.counts, result.records, aborted=len(result.aborted))


def _labeled(outcome: ExperimentOutcome) -> LabeledCounts:
    spec = outcome.config.opening
    assert outcome.counts is not None
    return LabeledCounts(outcome.config.id, outcome.counts, spec.innovator, spec.label)


def run_comparisons(config: StudyConfig, outcomes: Sequence[ExperimentOutcome]):
    """Run the comparison plan, one table per baseline, rows in plan order."""
    by_id = {o.config.id: o for o in outcomes}
    skipped = []
    groups: dict[str, list[str]] = {}
    for test, base in config.comparisons:
        bad = [i for i in (test, base) if by_id[i].counts is None]
        if bad:
            note = f"comparison {test} vs {base} skipped: experiment {', '.join(bad)} failed"
            log.warning(note)
            skipped.append(note)
            continue
        groups.setdefault(base, []).append(test)
    results: dict[tuple[str, str], ComparisonRow] = {}
    for base, tests in groups.items():
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            rows = run_comparison_table(
                _labeled(by_id[base]),
                [_labeled(by_id[t]) for t in tests],
                config.family_alpha,
                config.repetitions,
                derive_seed(config.seed, "baseline", base),
            )
        for t, row in zip(tests, rows):
            results[(t, base)] = row
    ordered = tuple(results[pair] for pair in config.comparisons if pair in results)
    return ordered, tuple(skipped)


def run_study(
    config: StudyConfig,
    out_dir: str | Path | None = None,
    workers: int = 1,
    launcher=launch,
    svg: bool = False,
) -> StudyReport:
    """Execute (or load) every experiment, run the comparison plan and persist it all."""
    outcomes = []
    for exp in config.experiments:
        try:
            outcomes.append(_run_experiment(config, exp, workers, launcher))
        except (EngineError, ValueError) as exc:
            log.error("experiment %s failed: %s", exp.id, exc)
            outcomes.append(ExperimentOutcome(exp, None, error=str(exc)))
    comparisons, skipped = run_comparisons(config, outcomes)
    report = StudyReport(config, tuple(outcomes), comparisons, skipped)
    if out_dir is not None:
        files = write_outputs(report, Path(out_dir), svg=svg)
        report = replace(report, files=tuple(files))
    return report


# --- reports -----------------------------------------------------------------


COUNTS_HEADER = ("Expt#", "Group", "Description", "White", "Black", "Draw", "Total")
COMPARISONS_HEADER = (
    "Expt#",
    "Test Opening",
    "Compare with",
    "Distance",
    "Stdev",
    "t-value",
    "p-value",
    "α",
    "Decision",
    "Category",
)


def _tsv(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    lines = ["\t".join(header)]
    lines += ["\t".join(str(c) for c in row) for row in rows]
    return "\n".join(lines) + "\n"


def counts_rows(outcomes: Sequence[ExperimentOutcome]) -> list[tuple]:
    rows = []
    for o in outcomes:
        spec = o.config.opening
        if o.counts is None:
            rows.append((o.config.id, spec.group, spec.label, "", "", "", ""))
        else:
            c = o.counts
            rows.append((o.config.id, spec.group, spec.label, c.white, c.black, c.draws, c.total))
    return rows


def report_counts(outcomes: Sequence[ExperimentOutcome]) -> str:
    """Raw tallies, one row per experiment in configuration order."""
    return _tsv(COUNTS_HEADER, counts_rows(outcomes))


def _fmt_p(p: float) -> str:
    return f"{p:.3G}"


def comparison_rows(rows: Sequence[ComparisonRow]) -> list[tuple]:
    out = []
    for row in rows:
        r = row.result
        if r is None:
            out.append((row.test.label, row.test.name, row.baseline.name, "", "", "", "", "", f"error: {row.error}", ""))
            continue
        out.append(
            (
                row.test.label,
                row.test.name,
                row.baseline.name,
                f"{r.distance:.3f}",
                f"{r.pooled_stdev:.3f}",
                "inf" if r.degenerate else f"{r.t_value:.3f}",
                _fmt_p(r.p_value),
                f"{r.alpha:g}",
                r.decision.label,
                r.category.value if r.category else "",
            )
        )
    return out


def report_comparisons(rows: Sequence[ComparisonRow]) -> str:
    """Hypothesis-test table; distances, stdevs and t-values to three decimals."""
    return _tsv(COMPARISONS_HEADER, comparison_rows(rows))


def format_table(tsv: str) -> str:
    """Align a TSV report into columns for the terminal."""
    rows = [line.split("\t") for line in tsv.rstrip("\n").split("\n")]
    widths = [max(len(r[i]) for r in rows if i < len(r)) for i in range(len(rows[0]))]
    return "\n".join("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows)


def _figure_stem(row: ComparisonRow, eco: Mapping[str, str], used: set[str]) -> str:
    stem = f"{eco[row.baseline.label]}-vs-{eco[row.test.label]}"
    if stem in used:
        stem = f"{stem}-{row.baseline.label}-{row.test.label}"
    used.add(stem)
    return stem


def emit_figures(
    report: StudyReport, out_dir: str | Path, svg: bool = False
) -> list[Path]:
    """One scatter file (and optionally an SVG plot) per comparison."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    eco = {o.config.id: o.config.opening.eco for o in report.experiments}
    used: set[str] = set()
    paths = []
    for row in report.comparisons:
        r = row.result
        if r is None or r.base_cluster is None or r.test_cluster is None:
            continue
        stem = _figure_stem(row, eco, used)
        rows = export_scatter(r.base_cluster, r.test_cluster)
        path = out_dir / f"{stem}.scatter.csv"
        path.write_text(scatter_csv(rows), encoding="utf-8")
        paths.append(path)
        if svg:
            paths.append(
                render_scatter_svg(rows, out_dir / f"{stem}.svg", f"{row.test.name} vs {row.baseline.name}")
            )
    return paths


def state_document(report: StudyReport) -> dict[str, Any]:
    """The study with every experiment's counts filled in, for offline re-analysis."""
    cfg = report.config
    experiments = []
    for o in report.experiments:
        spec = o.config.opening
        entry: dict[str, Any] = {
            "id": o.config.id,
            "opening": {
                "eco": spec.eco,
                "name": spec.name,
                "prefix": list(spec.prefix),
                "role": spec.role.value,
                "innovation_ply": spec.innovation_ply,
                "group": spec.group,
            },
            "source_mode": o.config.mode.value,
        }
        if o.counts is not None:
            entry.update(mode="counts", counts=[o.counts.white, o.counts.black, o.counts.draws])
        else:
            entry.update(mode=o.config.mode.value, error=o.error)
            if o.config.vector:
                entry["vector"] = list(o.config.vector)
        experiments.append(entry)
    return {
        "format_version": FORMAT_VERSION,
        "name": cfg.name,
        "seed": cfg.seed,
        "repetitions": cfg.repetitions,
        "family_alpha": cfg.family_alpha,
        "max_fullmoves": cfg.max_fullmoves,
        "experiments": experiments,
        "comparisons": [{"test": t, "baseline": b} for t, b in cfg.comparisons],
    }


def write_outputs(report: StudyReport, out_dir: Path, svg: bool = False) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    files = []
    path = out_dir / COUNTS_FILE
    path.write_text(report_counts(report.experiments), encoding="utf-8")
    files.append(path)
    path = out_dir / COMPARISONS_FILE
    path.write_text(report_comparisons(report.comparisons), encoding="utf-8")
    files.append(path)
    for o in report.experiments:
        if o.records:
            path = out_dir / f"experiment-{o.config.id}.pgn"
            path.write_text(
                write_pgn(o.records, {"Event": f"{report.config.name} experiment {o.config.id}"}),
                encoding="utf-8",
            )
            files.append(path)
    files += emit_figures(report, out_dir, svg=svg)
    path = out_dir / STATE_FILE
    path.write_text(json.dumps(state_document(report), indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    files.append(path)
    return files


def load_state(out_dir: str | Path) -> StudyConfig:
    """Reload the persisted study (all experiments as counts) from an output directory."""
    with open(Path(out_dir) / STATE_FILE, encoding="utf-8") as fh:
        data = json.load(fh)
    for exp in data["experiments"]:
        if exp.get("mode") != "counts":
            exp["mode"] = "counts"
            exp["counts"] = None
    data["experiments"] = [e for e in data["experiments"] if e.get("counts")]
    known = {e["id"] for e in data["experiments"]}
    data["comparisons"] = [
        c for c in data["comparisons"] if c["test"] in known and c["baseline"] in known
    ]
    return parse_study(data)
