"""Monte Carlo repetitions of an n-game match.

Each simulated match tosses ``n`` three-sided loaded coins with the
loadings of an estimated probability vector and records the
``(white wins, black wins)`` point.  A cluster of such points measures how
far repeated matches scatter around their centroid.

Every match draws from its own counter-based Philox stream keyed by the
cluster seed, so a cluster is a pure function of
``(vector, games, repetitions, seed)`` no matter how the matches are
scheduled across workers.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .model import ProbabilityVector

_MASK64 = (1 << 64) - 1


def derive_seed(seed: int, *keys: int | str) -> int:
    """Mix ``seed`` with labels into an independent 64-bit seed."""
    # tag and length-prefix every key so distinct key lists never share entropy
    entropy = [seed & _MASK64]
    for key in keys:
        if isinstance(key, str):
            raw = key.encode("utf-8")
            entropy += [1, len(raw), *raw]
        else:
            entropy += [2, key & _MASK64]
    entropy.append(len(keys) + 1)
    state = np.random.SeedSequence(entropy).generate_state(1, np.uint64)
    return int(state[0])


def match_stream(seed: int, index: int) -> np.random.Generator:
    """Random stream of match ``index`` within a cluster seeded by ``seed``."""
    # the index lives in the most significant counter word so streams never overlap
    return np.random.Generator(np.random.Philox(key=seed & _MASK64, counter=index << 192))


@dataclass(frozen=True)
class SimulatedCluster:
    points: np.ndarray = field(repr=False)
    source_vector: ProbabilityVector
    games_per_match: int
    seed: int

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=np.int64)
        if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) == 0:
            raise ValueError("a cluster needs a non-empty (k, 2) array of points")
        if (pts < 0).any() or (pts.sum(axis=1) > self.games_per_match).any():
            raise ValueError("cluster point outside 0 <= w + b <= games_per_match")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return len(self.points)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SimulatedCluster):
            return NotImplemented
        return (
            self.source_vector == other.source_vector
            and self.games_per_match == other.games_per_match
            and self.seed == other.seed
            and np.array_equal(self.points, other.points)
        )

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True)
class Centroid:
    mean_white: float
    mean_black: float


def simulate_match(
    pi: ProbabilityVector, n_games: int, rng_stream: np.random.Generator
) -> tuple[int, int]:
    """Play ``n_games`` simulated games and return ``(white_wins, black_wins)``.

    A uniform variate ``u`` scores a white win when ``u < p_w``, a black win
    when ``p_w <= u < p_w + p_b`` and a draw otherwise.
    """
    if n_games <= 0:
        raise ValueError(f"n_games must be positive, got {n_games}")
    u = rng_stream.random(n_games)
    white = int(np.count_nonzero(u < pi.p_w))
    decisive = int(np.count_nonzero(u < pi.p_w + pi.p_b))
    return white, decisive - white


def simulate_experiment(
    pi: ProbabilityVector,
    n_games: int,
    repetitions: int,
    seed: int,
    workers: int = 1,
) -> SimulatedCluster:
    """Simulate ``repetitions`` independent matches of ``n_games`` games."""
    if repetitions <= 0:
        raise ValueError(f"repetitions must be positive, got {repetitions}")
    if n_games <= 0:
        raise ValueError(f"n_games must be positive, got {n_games}")
    seed &= _MASK64

    def one(index: int) -> tuple[int, int]:
        return simulate_match(pi, n_games, match_stream(seed, index))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            points = list(pool.map(one, range(repetitions)))
    else:
        points = [one(i) for i in range(repetitions)]
    return SimulatedCluster(np.array(points, dtype=np.int64), pi, n_games, seed)


def centroid(cluster: SimulatedCluster) -> Centroid:
    mean = cluster.points.mean(axis=0)
    return Centroid(float(mean[0]), float(mean[1]))


def euclidean_distance(a: Centroid, b: Centroid) -> float:
    return math.hypot(a.mean_white - b.mean_white, a.mean_black - b.mean_black)


def radial_distances(cluster: SimulatedCluster) -> np.ndarray:
    """Distance of every simulated point from its own cluster's centroid."""
    pts = cluster.points.astype(float)
    return np.hypot(*(pts - pts.mean(axis=0)).T)


def pooled_radial_stdev(a: SimulatedCluster, b: SimulatedCluster) -> float:
    """Pooled standard deviation of the points of two clusters about their centroids.

    Each point's distance from its own centroid is its deviation, so the
    statistic is ``sqrt(sum(r**2) / (N - 1))`` over all ``N`` points of both
    clusters.
    """
    r = np.concatenate([radial_distances(a), radial_distances(b)])
    if len(r) < 2:
        return 0.0
    return float(math.sqrt(float(np.dot(r, r)) / (len(r) - 1)))


@dataclass(frozen=True)
class ScatterRow:
    cluster: str
    white_wins: int
    black_wins: int


SCATTER_HEADER = ("cluster", "white_wins", "black_wins")


def export_scatter(
    a: SimulatedCluster,
    b: SimulatedCluster,
    labels: tuple[str, str] = ("baseline", "test"),
) -> list[ScatterRow]:
    """Label every point of ``a`` (baseline) and ``b`` (test) for plotting."""
    rows = [ScatterRow(labels[0], int(w), int(bl)) for w, bl in a.points]
    rows += [ScatterRow(labels[1], int(w), int(bl)) for w, bl in b.points]
    return rows


def scatter_csv(rows: Iterable[ScatterRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SCATTER_HEADER)
    for row in rows:
        writer.writerow((row.cluster, row.white_wins, row.black_wins))
    return buf.getvalue()


def read_scatter_csv(text: str) -> list[ScatterRow]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or tuple(header) != SCATTER_HEADER:
        raise ValueError(f"unexpected scatter header {header!r}")
    return [ScatterRow(c, int(w), int(b)) for c, w, b in reader]


def render_scatter_svg(
    rows: Sequence[ScatterRow],
    path: str | Path,
    title: str = "",
    labels: tuple[str, str] = ("baseline", "test"),
) -> Path:
    """Plot a scatter export: baseline as diamonds, test as squares.

    Needs matplotlib (the ``plot`` extra).
    """
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    path = Path(path)
    with matplotlib.rc_context({"svg.hashsalt": "openingbench", "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(6, 5))
        for label, marker in zip(labels, ("D", "s")):
            xs = [r.white_wins for r in rows if r.cluster == label]
            ys = [r.black_wins for r in rows if r.cluster == label]
            ax.scatter(xs, ys, marker=marker, s=12, alpha=0.6, label=label)
        ax.set_xlabel("white wins")
        ax.set_ylabel("black wins")
        if title:
            ax.set_title(title)
        ax.legend()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
    return path
