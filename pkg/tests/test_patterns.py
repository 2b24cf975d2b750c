import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from divnet import oracles
from divnet.errors import CapacityError, UsageError
from divnet.graph import NetworkSpec
from divnet.metrics import local_clustering
from divnet.patterns import (
    ClusteringProfile,
    band_check,
    clustering_profile,
    density_grid,
    exponent_shapes,
    prime_power_base,
    stretch_overlay,
    successive_differences,
    symmetry_quantifier,
)
from divnet.sieve import factorize, get_tables


def test_profile_small():
    prof = clustering_profile(NetworkSpec(4))
    assert prof.values[1:].tolist() == pytest.approx([1 / 3, 1, 0, 1])
    assert prof[2] == 1.0


def test_profile_cap():
    with pytest.raises(CapacityError):
        clustering_profile(NetworkSpec(1 << 10), cap=1 << 9)


def test_profile_bands_2_13():
    n = 1 << 13
    t = get_tables(n)
    c = clustering_profile(NetworkSpec(n), t).values
    base = prime_power_base(t, n)
    lab = np.arange(n + 1)
    upper_primes = (base == lab) & (lab > 1) & (2 * lab > n)
    middle_pp = (base > 0) & (3 * lab > n) & (2 * lab <= n)
    assert upper_primes.sum() > 0 and middle_pp.sum() > 0
    assert np.all(c[upper_primes] == 0)
    assert np.all(c[middle_pp] == 1)


def test_profile_matches_metrics_on_random_nodes():
    n = 1 << 14
    t = get_tables(n)
    s = NetworkSpec(n)
    c = clustering_profile(s, t).values
    rng = np.random.default_rng(0)
    for i in rng.integers(1, n + 1, 1000).tolist():
        assert c[i] == pytest.approx(local_clustering(i, s, "arithmetic", t), abs=1e-12)
    small = NetworkSpec(300)
    cs = clustering_profile(small).values
    for i, v in oracles.local_clustering(small).items():
        assert cs[i] == pytest.approx(v, abs=1e-12)


def test_successive_differences_examples():
    d = successive_differences(clustering_profile(NetworkSpec(4)))
    assert d.tolist() == pytest.approx([-2 / 3, 1, -1])
    assert successive_differences(np.full(10, 0.3)).tolist() == [0.0] * 9
    assert successive_differences(clustering_profile(NetworkSpec(100))).size == 99
    with pytest.raises(UsageError):
        successive_differences(np.array([0.5]))


def test_grid_all_zero():
    g = density_grid(np.zeros(1280))
    assert np.all(g.axis_mass == 10)
    assert g.rho[:, :100].sum() == 0 and g.rho[:, 101:].sum() == 0
    assert symmetry_quantifier(g).max == 0.0


def test_grid_alternating_half():
    d = np.tile([0.5, -0.5], 640)
    g = density_grid(d)
    for x in range(1, 129):
        assert g.rho_at(x, 50) == 0.5
        assert g.rho_at(x, -50) == 0.5
    assert symmetry_quantifier(g).max == 0.0


def test_grid_one_sided():
    g = density_grid(np.full(256, 0.01))
    phi = symmetry_quantifier(g).phi
    assert g.rho_at(1, 1) == 1.0
    assert np.allclose(phi, g.rho[:, 101] / 100)


def test_grid_partial_last_column():
    g = density_grid(np.full(130, 0.2))
    assert g.column_width == 2
    assert g.counts.shape[0] == 65
    assert g.rho_at(65, 20) == 1.0


def test_grid_rejects_empty():
    with pytest.raises(UsageError):
        density_grid([])


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-1, 1), min_size=1, max_size=2000))
def test_grid_mass_and_phi_bounds(diffs):
    g = density_grid(diffs)
    assert np.array_equal(g.counts.sum(axis=1), g.column_points)
    assert g.column_points.sum() == len(diffs)
    assert np.all((g.rho >= 0) & (g.rho <= 1))
    phi = symmetry_quantifier(g).phi
    assert np.all((phi >= 0) & (phi <= 1))


def test_mirrored_grid_has_zero_phi():
    rng = np.random.default_rng(3)
    d = rng.uniform(-1, 1, 640)
    d = np.ravel(np.column_stack((d, -d)))
    assert symmetry_quantifier(density_grid(d)).max == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("p", [13, 14, 15])
def test_network_phi_small(p):
    n = 1 << p
    diffs = successive_differences(clustering_profile(NetworkSpec(n)))
    assert symmetry_quantifier(density_grid(diffs)).max < 0.05


def test_band_check_examples():
    assert band_check(NetworkSpec(1 << 10)).ok
    assert band_check(NetworkSpec(7)).ok
    assert oracles.local_clustering(NetworkSpec(7))[5] == 0.0


def test_band_check_counts_n7():
    r = band_check(NetworkSpec(7))
    assert r.zeros_checked == 2
    assert r.ones_checked == 1  # 3 lies in (7/3, 7/2]


def test_band_check_exhaustive_up_to_2_12():
    t = get_tables(1 << 12)
    for n in range(6, (1 << 12) + 1, 7):
        assert band_check(NetworkSpec(n), t).ok, n
    assert band_check(NetworkSpec(1 << 12), t).ok


def test_band_check_reports_violation():
    s = NetworkSpec(100)
    prof = clustering_profile(s)
    vals = prof.values.copy()
    vals[97] = 0.5
    r = band_check(s, profile=ClusteringProfile(s, vals))
    assert r.violations == [(97, 0.0, 0.5)]
    with pytest.raises(UsageError):
        band_check(NetworkSpec(100, frozenset({1})))


def test_exponent_shapes():
    t = get_tables(1000)
    shapes = exponent_shapes([1, 12, 77, 360, 512], t)
    assert shapes[0].sum() == 0
    assert tuple(v for v in shapes[1] if v) == (2, 1)
    assert tuple(v for v in shapes[2] if v) == (1, 1)
    assert tuple(v for v in shapes[3] if v) == (3, 2, 1)
    assert tuple(v for v in shapes[4] if v) == (9,)
    for i in range(2, 1000, 13):
        row = tuple(v for v in exponent_shapes([i], t)[0] if v)
        assert row == factorize(i, t).shape


def test_shape_invariance_exhaustive():
    for n in (1 << 10, 1 << 11, 1 << 12, 3000):
        t = get_tables(n)
        c = clustering_profile(NetworkSpec(n), t).values
        labels = np.arange(n // 2 + 1, n + 1)
        by_shape = {}
        for i, row in zip(labels.tolist(), exponent_shapes(labels, t).tolist()):
            by_shape.setdefault(tuple(v for v in row if v), set()).add(round(c[i], 12))
        assert all(len(v) == 1 for v in by_shape.values())


def test_overlay_semiprime_value_shared():
    res = stretch_overlay(NetworkSpec(1 << 13), NetworkSpec(1 << 14))
    top = res["regions"][0]
    assert top["region"] == [0.5, 1.0]
    assert [1, 1] in top["common_shapes"]
    assert round(2 / 3, 12) in top["intersection"]
    assert all(r["intersection_size"] > 0 for r in res["regions"])


def test_overlay_identical_specs():
    s = NetworkSpec(500)
    res = stretch_overlay(s, s)
    assert np.array_equal(res["points_a"], res["points_b"], equal_nan=True)
    assert res["regions"][0]["values_a"] == res["regions"][0]["values_b"]


def test_overlay_steps_align():
    res = stretch_overlay(NetworkSpec(1 << 12), NetworkSpec(1 << 13))
    assert res["steps"]["a"] == res["steps"]["b"]
    assert res["steps"]["a"] == pytest.approx([1 / 2, 1 / 3, 1 / 4], abs=1e-3)
