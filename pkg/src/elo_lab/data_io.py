"""Season result files, season summaries, synthetic seasons and curve output.

Season CSV layout (UTF-8, one file may hold several seasons)::

    season,round,home,away,outcome
    2009,1,Modena,Trento,1

``outcome`` is 1 when the home team wins and 0 when the away team wins. Rows
are in chronological order within a season. Teams are indexed by order of
first appearance within their season.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .core_model import MatchRecord, ScenarioParams, logistic
from .elo_engine import FitConfig, fit_batch_ml
from .montecarlo import draw_true_skills
from .scheduling import Schedule, as_rng, build_double_round_robin

HEADER = ["season", "round", "home", "away", "outcome"]


class ParseError(ValueError):
    def __init__(self, message, line=None, source=None):
        where = ""
        if source:
            where += f"{source}:"
        if line is not None:
            where += f"line {line}: "
        elif where:
            where += " "
        super().__init__(where + message)
        self.line = line
        self.source = source


@dataclass
class SeasonDataset:
    season_id: str
    team_names: list
    schedule: Schedule
    rounds: Optional[np.ndarray] = None
    true_skills: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def M(self) -> int:
        return len(self.team_names)

    @property
    def K(self) -> int:
        return len(self.schedule)

    @property
    def matches(self) -> list:
        return list(self.schedule)

    @property
    def complete_round_robin(self) -> bool:
        return self.schedule.is_complete_double_round_robin()


@dataclass(frozen=True)
class SeasonSummary:
    season_id: str
    M: int
    K: int
    eta_hat: float
    v_hat: float
    converged: bool = True


def parse_season_csv(text, source: Optional[str] = None) -> list:
    """Parse season results from a string or text stream into datasets, in order of appearance."""
    stream = io.StringIO(text) if isinstance(text, str) else text
    reader = csv.reader(stream)
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("file is empty", source=source) from None
    if [h.strip() for h in header] != HEADER:
        raise ParseError(f"expected header {','.join(HEADER)!r}, got {','.join(header)!r}", 1, source)

    seasons: dict = {}
    for row in reader:
        line = reader.line_num
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(HEADER):
            raise ParseError(f"expected {len(HEADER)} fields, got {len(row)}", line, source)
        season, rnd, home, away, outcome = (c.strip() for c in row)
        if home == away:
            raise ParseError(f"team {home!r} plays itself", line, source)
        if outcome not in ("0", "1"):
            raise ParseError(f"outcome must be 0 or 1, got {outcome!r}", line, source)
        try:
            rnd = int(rnd)
        except ValueError:
            raise ParseError(f"round must be an integer, got {rnd!r}", line, source) from None
        s = seasons.setdefault(season, {"teams": {}, "rows": []})
        teams = s["teams"]
        for t in (home, away):
            if t not in teams:
                teams[t] = len(teams)
        s["rows"].append((rnd, teams[home], teams[away], int(outcome)))

    out = []
    for season, s in seasons.items():
        M = len(s["teams"])
        if M < 2:
            raise ParseError(f"season {season!r} has fewer than two teams", source=source)
        rows = np.array(s["rows"], dtype=np.int64).reshape(-1, 4)
        out.append(SeasonDataset(
            season_id=season,
            team_names=list(s["teams"]),
            schedule=Schedule(M, rows[:, 1], rows[:, 2], rows[:, 3]),
            rounds=rows[:, 0],
        ))
    return out


def read_season_csv(path) -> list:
    path = Path(path)
    with path.open(encoding="utf-8", newline="") as fh:
        return parse_season_csv(fh, source=str(path))


def _default_rounds(M, K):
    per_round = max(1, M // 2)
    return np.arange(K) // per_round + 1


def serialize_season_csv(datasets: Sequence[SeasonDataset]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(HEADER)
    for ds in datasets:
        sched = ds.schedule
        rounds = ds.rounds if ds.rounds is not None else _default_rounds(ds.M, ds.K)
        for k in range(ds.K):
            w.writerow([ds.season_id, int(rounds[k]), ds.team_names[sched.home[k]],
                        ds.team_names[sched.away[k]], int(sched.outcome[k])])
    return buf.getvalue()


def summarize_season(dataset: SeasonDataset, fit_config: FitConfig = FitConfig()) -> SeasonSummary:
    """Fit skills and home advantage by batch ML and report (M, K, eta_hat, v_hat)."""
    res = fit_batch_ml(dataset.schedule, dataset.M, fit_config)
    return SeasonSummary(dataset.season_id, dataset.M, dataset.K, res.eta_hat, res.v_hat, res.converged)


def format_summary_table(summaries: Iterable[SeasonSummary]) -> str:
    """Fixed-width table with one row per season, sorted by season id."""
    rows = sorted(summaries, key=lambda s: s.season_id)
    lines = [f"{'Season':<10}{'M':>4}{'K':>6}{'eta_hat':>10}{'v_hat':>9}  converged"]
    for s in rows:
        lines.append(f"{s.season_id:<10}{s.M:>4d}{s.K:>6d}{s.eta_hat:>10.2f}{s.v_hat:>9.2f}  "
                     f"{'yes' if s.converged else 'no'}")
    return "\n".join(lines) + "\n"


def generate_synthetic_season(scenario: ScenarioParams, season_id: str = "synthetic",
                              seed=None) -> SeasonDataset:
    """Full double round-robin with outcomes drawn from fresh N(0, v) true skills."""
    rng = as_rng(seed)
    theta_star = draw_true_skills(scenario, rng)
    sched = build_double_round_robin(scenario.M, rng)
    p = logistic(theta_star[sched.home] - theta_star[sched.away] + scenario.eta)
    y = (rng.random(len(sched)) < p).astype(np.int64)
    width = len(str(scenario.M))
    names = [f"Team{m + 1:0{width}d}" for m in range(scenario.M)]
    return SeasonDataset(season_id, names, sched.with_outcomes(y),
                         _default_rounds(scenario.M, len(sched)), theta_star)


@dataclass(frozen=True)
class Table1Row:
    season: str
    M: int
    K: int
    eta_hat: float
    v_hat: float

    def scenario(self) -> ScenarioParams:
        return ScenarioParams(self.M, self.v_hat, self.eta_hat)


def load_table1() -> list:
    """Published per-season summary of ten volleyball league seasons (2009/10 to 2018/19)."""
    text = resources.files("elo_lab.data").joinpath("table1.csv").read_text(encoding="utf-8")
    rows = csv.DictReader(io.StringIO(text))
    return [Table1Row(r["season"], int(r["M"]), int(r["K"]), float(r["eta_hat"]), float(r["v_hat"]))
            for r in rows]


def cross_season_average(trajectories: Sequence) -> np.ndarray:
    """Truncate every curve to the shortest one and average pointwise."""
    if len(trajectories) == 0:
        raise ValueError("no trajectories to average")
    n = min(len(t) for t in trajectories)
    return np.mean([np.asarray(t, dtype=float)[:n] for t in trajectories], axis=0)


def tail_mean(curve, n: int = 10) -> float:
    """Mean of the last ``n`` points of a curve (steady-state summary)."""
    curve = np.asarray(curve, dtype=float)
    if curve.size == 0:
        raise ValueError("empty curve")
    return float(curve[-n:].mean())


def cross_season_tail_mean(trajectories: Sequence, n: int = 10) -> float:
    return tail_mean(cross_season_average(trajectories), n)


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".9g")


def curves_to_csv(columns: dict) -> str:
    names = list(columns)
    n = len(next(iter(columns.values())))
    if any(len(columns[c]) != n for c in names):
        raise ValueError("all curves must have the same length")
    lines = [",".join(names)]
    for r in range(n):
        lines.append(",".join(_fmt(columns[c][r]) for c in names))
    return "\n".join(lines) + "\n"


def _json_value(x):
    if isinstance(x, (int, np.integer)):
        return int(x)
    x = float(x)
    if not math.isfinite(x):
        return None
    return float(format(x, ".9g"))


def curves_to_json(columns: dict) -> str:
    obj = {name: [_json_value(x) for x in np.asarray(vals).tolist()] for name, vals in columns.items()}
    return json.dumps(obj, indent=None, separators=(",", ":")) + "\n"


def write_curves(path, columns: dict) -> Path:
    """Write curves as CSV or JSON depending on the file suffix."""
    path = Path(path)
    text = curves_to_json(columns) if path.suffix == ".json" else curves_to_csv(columns)
    path.write_text(text, encoding="utf-8")
    return path
