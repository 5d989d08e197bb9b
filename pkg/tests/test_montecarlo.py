from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from openingbench.model import make_vector
from openingbench.montecarlo import (
    SCATTER_HEADER,
    Centroid,
    SimulatedCluster,
    centroid,
    derive_seed,
    euclidean_distance,
    export_scatter,
    pooled_radial_stdev,
    radial_distances,
    read_scatter_csv,
    scatter_csv,
    simulate_experiment,
    simulate_match,
    match_stream,
)

RUY = make_vector(16 / 300, 3 / 300)
SICILIAN = make_vector(21 / 300, 2 / 300)


def cluster_of(points, games: int = 300) -> SimulatedCluster:
    return SimulatedCluster(np.array(points, dtype=np.int64).reshape(-1, 2), make_vector(0, 0), games, 0)


@pytest.mark.parametrize("pi, expected", [(make_vector(1, 0), (300, 0)), (make_vector(0, 0), (0, 0))])
def test_certain_outcomes(pi, expected):
    assert simulate_match(pi, 300, match_stream(1, 0)) == expected


def test_all_draw_cluster():
    cluster = simulate_experiment(make_vector(0, 0), 300, 1000, seed=5)
    assert cluster.points.shape == (1000, 2)
    assert not cluster.points.any()


def test_calls_are_deterministic():
    a = simulate_experiment(RUY, 300, 1000, seed=11)
    b = simulate_experiment(RUY, 300, 1000, seed=11)
    assert np.array_equal(a.points, b.points)
    assert not np.array_equal(a.points, simulate_experiment(RUY, 300, 1000, seed=12).points)


@pytest.mark.parametrize("workers", [2, 4, 7])
def test_worker_count_does_not_change_clusters(workers):
    serial = simulate_experiment(SICILIAN, 300, 500, seed=3)
    parallel = simulate_experiment(SICILIAN, 300, 500, seed=3, workers=workers)
    assert np.array_equal(serial.points, parallel.points)


def test_points_are_read_only():
    cluster = simulate_experiment(RUY, 300, 10, seed=0)
    with pytest.raises(ValueError):
        cluster.points[0, 0] = 7


def test_derive_seed_separates_streams():
    seeds = {derive_seed(1, "a"), derive_seed(1, "b"), derive_seed(2, "a"), derive_seed(1, "a", 0)}
    assert len(seeds) == 4
    assert derive_seed(1, "a") == derive_seed(1, "a")


def _multinomial_se(pi, n, reps):
    sd_w = math.sqrt(n * pi.p_w * (1 - pi.p_w))
    sd_b = math.sqrt(n * pi.p_b * (1 - pi.p_b))
    return sd_w / math.sqrt(reps), sd_b / math.sqrt(reps)


def test_means_match_multinomial_over_ten_thousand_matches():
    cluster = simulate_experiment(RUY, 300, 10_000, seed=2014)
    c = centroid(cluster)
    assert abs(c.mean_white - 16) < 0.4
    assert abs(c.mean_black - 3) < 0.2
    se_w, se_b = _multinomial_se(RUY, 300, 10_000)
    assert abs(c.mean_white - 16) < 3 * se_w
    assert abs(c.mean_black - 3) < 3 * se_b


def test_agrees_with_direct_multinomial_draws():
    # an independent sampler from numpy should give statistically matching moments
    oracle = np.random.default_rng(99).multinomial(300, RUY.as_tuple(), size=10_000)[:, :2]
    ours = simulate_experiment(RUY, 300, 10_000, seed=99).points
    se_w, se_b = _multinomial_se(RUY, 300, 10_000)
    diff = ours.mean(axis=0) - oracle.mean(axis=0)
    assert abs(diff[0]) < 3 * math.sqrt(2) * se_w
    assert abs(diff[1]) < 3 * math.sqrt(2) * se_b


@pytest.mark.parametrize("pi, target, band", [(RUY, (16, 3), (0.5, 0.3)), (SICILIAN, (21, 2), (0.6, 0.25))])
def test_centroid_bands(pi, target, band):
    c = centroid(simulate_experiment(pi, 300, 1000, seed=7))
    assert abs(c.mean_white - target[0]) < band[0]
    assert abs(c.mean_black - target[1]) < band[1]


def test_covariance_matches_multinomial():
    reps, n = 50_000, 300
    pts = simulate_experiment(SICILIAN, n, reps, seed=77).points.astype(float)
    cov = np.cov(pts.T)
    pw, pb = SICILIAN.p_w, SICILIAN.p_b
    var_w, var_b, cov_wb = n * pw * (1 - pw), n * pb * (1 - pb), -n * pw * pb
    # standard errors of sample (co)variances under approximate normality
    se_var_w = var_w * math.sqrt(2 / (reps - 1))
    se_var_b = var_b * math.sqrt(2 / (reps - 1))
    se_cov = math.sqrt((var_w * var_b + cov_wb**2) / (reps - 1))
    assert abs(cov[0, 0] - var_w) < 3 * se_var_w
    assert abs(cov[1, 1] - var_b) < 3 * se_var_b
    assert abs(cov[0, 1] - cov_wb) < 3 * se_cov


def test_centroid_by_hand():
    c = centroid(cluster_of([(1, 0), (3, 2)]))
    assert (c.mean_white, c.mean_black) == (2, 1)
    assert centroid(cluster_of([(0, 0)] * 5)) == Centroid(0, 0)


@pytest.mark.parametrize(
    "a, b, expected",
    [((16, 3), (56, 2), 40.012), ((16, 3), (12, 7), 5.657), ((5, 5), (5, 5), 0.0)],
)
def test_distances(a, b, expected):
    assert euclidean_distance(Centroid(*a), Centroid(*b)) == pytest.approx(expected, abs=5e-4)


coords = st.tuples(st.floats(-1e3, 1e3), st.floats(-1e3, 1e3)).map(lambda t: Centroid(*t))


@given(coords, coords, coords)
def test_distance_is_a_metric(a, b, c):
    assert euclidean_distance(a, b) == euclidean_distance(b, a)
    assert euclidean_distance(a, c) <= euclidean_distance(a, b) + euclidean_distance(b, c) + 1e-9


def test_degenerate_clusters_have_zero_stdev():
    assert pooled_radial_stdev(cluster_of([(4, 1)] * 10), cluster_of([(9, 0)] * 10)) == 0.0


def test_pooled_stdev_formula():
    a = cluster_of([(0, 0), (2, 0)])
    b = cluster_of([(0, 0), (0, 4)])
    # radial distances 1, 1, 2, 2 about each cluster's own centroid
    assert list(radial_distances(a)) == [1, 1]
    assert pooled_radial_stdev(a, b) == pytest.approx(math.sqrt(10 / 3))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 500), st.integers(0, 500), st.integers(0, 2**32))
def test_pooled_stdev_translation_invariant(dx, dy, seed):
    a = simulate_experiment(RUY, 300, 50, seed=seed % 1000)
    b = simulate_experiment(SICILIAN, 300, 50, seed=seed % 997)
    shifted = cluster_of(a.points + np.array([dx, dy]), games=1300)
    assert pooled_radial_stdev(shifted, b) == pytest.approx(pooled_radial_stdev(a, b), rel=1e-12)


@pytest.mark.parametrize("test_vector, expected, band", [((56, 2), 5.861, 0.6), ((12, 7), 4.266, 0.5)])
def test_pooled_stdev_near_published(test_vector, expected, band):
    base = simulate_experiment(RUY, 300, 1000, seed=1)
    other = simulate_experiment(make_vector(test_vector[0] / 300, test_vector[1] / 300), 300, 1000, seed=2)
    assert abs(pooled_radial_stdev(base, other) - expected) < band


def test_export_one_point_clusters():
    rows = export_scatter(cluster_of([(1, 2)]), cluster_of([(3, 4)]))
    assert [(r.cluster, r.white_wins, r.black_wins) for r in rows] == [("baseline", 1, 2), ("test", 3, 4)]


def test_export_separated_clusters():
    base = simulate_experiment(RUY, 300, 1000, seed=1)
    bird = simulate_experiment(make_vector(56 / 300, 2 / 300), 300, 1000, seed=2)
    rows = export_scatter(base, bird)
    assert len(rows) == 2000
    base_max = max(r.white_wins for r in rows if r.cluster == "baseline")
    bird_min = min(r.white_wins for r in rows if r.cluster == "test")
    # the two clouds barely touch along the white-wins axis
    assert sum(r.white_wins >= bird_min for r in rows if r.cluster == "baseline") < 20
    assert base_max < 56


def test_export_identical_clusters_overlap():
    a = simulate_experiment(RUY, 300, 200, seed=4)
    rows = export_scatter(a, a)
    assert len(rows) == 400
    first = [(r.white_wins, r.black_wins) for r in rows[:200]]
    second = [(r.white_wins, r.black_wins) for r in rows[200:]]
    assert first == second


def test_scatter_csv_round_trip():
    rows = export_scatter(simulate_experiment(RUY, 300, 30, seed=4), simulate_experiment(SICILIAN, 300, 30, seed=5))
    text = scatter_csv(rows)
    assert text.splitlines()[0] == ",".join(SCATTER_HEADER)
    assert read_scatter_csv(text) == rows


def test_svg_rendering(tmp_path):
    pytest.importorskip("matplotlib")
    from openingbench.montecarlo import render_scatter_svg

    rows = export_scatter(cluster_of([(1, 2), (2, 2)]), cluster_of([(3, 4)]))
    first = render_scatter_svg(rows, tmp_path / "a.svg", "demo").read_bytes()
    second = render_scatter_svg(rows, tmp_path / "b.svg", "demo").read_bytes()
    assert first.startswith(b"<?xml") and first == second
