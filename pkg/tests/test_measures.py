import json
import math

import numpy as np
import pytest

from inclab.geometry import PLANE
from inclab.measures import (LineParamMeasure, PlanarAtomMeasure, PointSet,
                             covering_number, frostman_constant,
                             generate_cantor_measure, generate_line_measure,
                             measure_from_record, measure_to_record,
                             radial_projection_covering, riesz_energy_direct)


def unit_square_grid(k):
    """All delta-cells of [0,1)^2 at delta = 2^-k, equal weights, total 1."""
    delta = 2.0 ** -k
    ix0 = round(2.0 / delta)
    n = 2 ** k
    ii, jj = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    return PlanarAtomMeasure(delta, ix0 + ii.ravel(), ix0 + jj.ravel(),
                             np.full(n * n, 1.0 / (n * n)))


def test_frostman_single_atom():
    m = PlanarAtomMeasure(2.0 ** -6, [100], [100], [1.0])
    assert frostman_constant(m, 1.0) == pytest.approx(2.0 ** 6)


def test_frostman_uniform_s2():
    m = unit_square_grid(4)
    assert frostman_constant(m, 2.0) == pytest.approx(1.0)


def test_frostman_four_corner():
    m = generate_cantor_measure(1.0, 4.0 ** -5, seed=0, style="four_corner")
    assert len(m) == 4 ** 5
    c = frostman_constant(m, 1.0)
    assert 1.0 <= c <= 8.0


def test_frostman_empty_raises():
    m = PlanarAtomMeasure(2.0 ** -4, [], [], [])
    with pytest.raises(ValueError, match="empty measure"):
        frostman_constant(m, 1.0)


def test_frostman_root_lower_bound():
    rng = np.random.default_rng(0)
    for _ in range(20):
        n = int(rng.integers(1, 50))
        m = PlanarAtomMeasure(2.0 ** -6,
                              rng.integers(0, 256, n), rng.integers(0, 256, n),
                              rng.uniform(0.1, 2.0, n))
        for s in (0.5, 1.0, 1.7):
            assert frostman_constant(m, s) >= m.total * 4.0 ** (-s) - 1e-12


def test_energy_single_atom():
    m = PlanarAtomMeasure(2.0 ** -6, [5], [5], [1.0])
    assert riesz_energy_direct(m, 1.0) == pytest.approx(64.0)


def test_energy_two_atoms():
    # distance 1 apart, weight 1/2 each: 2*(1/4)*64 + 2*(1/4)*1
    delta = 2.0 ** -6
    m = PlanarAtomMeasure(delta, [0, 64], [0, 0], [0.5, 0.5])
    assert riesz_energy_direct(m, 1.0) == pytest.approx(32.5)


def test_energy_uniform_matches_monte_carlo():
    m = unit_square_grid(7)
    val = riesz_energy_direct(m, 1.0)
    rng = np.random.default_rng(42)
    n = 10 ** 7
    x = rng.uniform(0, 1, (n, 2))
    y = rng.uniform(0, 1, (n, 2))
    d = np.hypot(x[:, 0] - y[:, 0], x[:, 1] - y[:, 1])
    mc = float(np.mean(np.maximum(d, 2.0 ** -7) ** -1.0))
    assert abs(val - mc) / mc < 0.05


def test_energy_fft_matches_blocked_sum():
    for seed, root in ((1, "plane"), (2, "line")):
        rng = np.random.default_rng(seed)
        n = 2500
        if root == "plane":
            m = PlanarAtomMeasure(2.0 ** -7, rng.integers(100, 400, n),
                                  rng.integers(100, 400, n),
                                  rng.uniform(0.1, 1.0, n))
        else:
            m = LineParamMeasure(2.0 ** -7, rng.integers(0, 128, n),
                                 rng.integers(100, 400, n),
                                 rng.uniform(0.1, 1.0, n))
        for s in (0.5, 1.3):
            a = riesz_energy_direct(m, s, force="direct")
            b = riesz_energy_direct(m, s, force="fft")
            assert abs(a - b) / a < 1e-10


def test_energy_monotone_in_s_small_diameter():
    # all pairwise distances at most 1: kernel grows with s
    m = generate_cantor_measure(1.0, 2.0 ** -7, seed=3,
                                window=(0.0, 0.5, 0.0, 0.5))
    vals = [riesz_energy_direct(m, s) for s in (0.3, 0.8, 1.4, 1.9)]
    assert all(a <= b + 1e-12 for a, b in zip(vals, vals[1:]))


def test_energy_weight_scaling():
    rng = np.random.default_rng(4)
    m = generate_cantor_measure(1.3, 2.0 ** -6, seed=5)
    for _ in range(5):
        c = float(rng.uniform(0.1, 10.0))
        a = riesz_energy_direct(m.scaled(c), 1.0)
        b = riesz_energy_direct(m, 1.0)
        assert abs(a - c * c * b) <= 1e-10 * a


def test_covering_number_grid():
    P = unit_square_grid(5).support()
    for k in (0, 1, 2, 3):
        assert covering_number(P, 2.0 ** -k) == 4 ** k
    single = PointSet(PLANE, 2.0 ** -5, [7], [9])
    for k in (0, 2, 5):
        assert covering_number(single, 2.0 ** -k) == 1


def test_covering_number_cantor():
    k = 5
    m = generate_cantor_measure(1.0, 4.0 ** -k, seed=0, style="four_corner")
    P = m.support()
    for j in range(k + 1):
        assert covering_number(P, 4.0 ** -j) == 4 ** j


def test_radial_projection_single_ray():
    # a horizontal row aligned with q's own y-coordinate: one direction
    delta = 2.0 ** -6
    q = (-1.5, 0.5)
    row = PointSet(PLANE, delta, np.arange(100, 140),
                   np.full(40, round((q[1] + 2.0) / delta - 0.5)))
    assert radial_projection_covering(q, row) == 1


def test_radial_projection_separated_directions():
    # k cells at well-separated directions around q
    delta = 2.0 ** -6
    q = (0.0, 0.0)
    k = 12
    ang = (np.arange(k) + 0.5) / k
    px = q[0] + 1.2 * np.cos(2 * math.pi * ang)
    py = q[1] + 1.2 * np.sin(2 * math.pi * ang)
    P = PointSet(PLANE, delta, np.floor((px + 2) / delta).astype(int),
                 np.floor((py + 2) / delta).astype(int))
    assert radial_projection_covering(q, P) == k


def test_radial_projection_grid_against_recount():
    delta = 2.0 ** -7
    P = unit_square_grid(7).support()
    q = (-1.5, 0.5)
    val = radial_projection_covering(q, P)
    # independent recount with sorted angles
    c = P.centers()
    ang = np.mod(np.arctan2(q[1] - c[:, 1], q[0] - c[:, 0]) / (2 * math.pi), 1.0)
    occupied = len(set(int(a / delta) for a in np.sort(ang)))
    assert val == occupied
    assert 0.05 * 2 ** 7 <= val <= 2 ** 7


def test_radial_projection_separation_error():
    P = PointSet(PLANE, 2.0 ** -5, [64], [64])  # cell near (0, 0)
    with pytest.raises(ValueError, match="separation violated"):
        radial_projection_covering((0.1, 0.1), P)


def test_generate_s2_full_grid():
    m = generate_cantor_measure(2.0, 2.0 ** -5, seed=0,
                                window=(0.0, 1.0, 0.0, 1.0))
    assert len(m) == 4 ** 5
    np.testing.assert_allclose(m.weights, 4.0 ** -5)


def test_generate_atom_counts():
    m = generate_cantor_measure(0.5, 2.0 ** -10, seed=1,
                                window=(0.0, 1.0, 0.0, 1.0))
    assert 2 ** 5 <= len(m) <= 2 ** 6
    assert frostman_constant(m, 0.5) <= 16.0


def test_generate_line_measure_counts():
    m = generate_line_measure(1.5, 2.0 ** -8, seed=2)
    assert 2 ** 12 / 4 <= len(m) <= 2 ** 12 * 4
    assert frostman_constant(m, 1.5) <= 16.0


def test_generate_line_row_frostman():
    # dimension-1 measure concentrated on one angle column
    delta = 2.0 ** -6
    iy = np.arange(64, 128)
    m = LineParamMeasure(delta, np.full(64, 20), iy, np.full(64, 1.0 / 64))
    assert frostman_constant(m, 1.0) <= 4.0


def test_generate_deterministic():
    a = generate_cantor_measure(1.3, 2.0 ** -8, seed=7)
    b = generate_cantor_measure(1.3, 2.0 ** -8, seed=7)
    assert np.array_equal(a.ix, b.ix) and np.array_equal(a.iy, b.iy)
    assert np.array_equal(a.weights, b.weights)
    c = generate_cantor_measure(1.3, 2.0 ** -8, seed=8)
    assert not (np.array_equal(a.ix, c.ix) and np.array_equal(a.iy, c.iy))


def test_generate_infeasible():
    with pytest.raises(ValueError):
        generate_cantor_measure(2.5, 2.0 ** -5, seed=0)


def test_serialization_round_trip():
    m = generate_line_measure(1.2, 2.0 ** -7, seed=9)
    blob = json.dumps(measure_to_record(m))
    back = measure_from_record(json.loads(blob))
    assert back.root == m.root and back.resolution == m.resolution
    assert np.array_equal(back.ix, m.ix)
    assert np.array_equal(back.iy, m.iy)
    assert np.array_equal(back.weights, m.weights)  # bit-exact


def test_measure_merges_duplicates():
    m = PlanarAtomMeasure(2.0 ** -4, [3, 3, 5], [4, 4, 6], [0.25, 0.25, 0.5])
    assert len(m) == 2
    assert m.total == pytest.approx(1.0)


def test_measure_rejects_bad_atoms():
    with pytest.raises(ValueError):
        PlanarAtomMeasure(2.0 ** -4, [0], [0], [0.0])
    with pytest.raises(ValueError):
        PlanarAtomMeasure(2.0 ** -4, [9999], [0], [1.0])
