import math
import pathlib

import pytest

import cagecap

SCENARIOS = pathlib.Path(__file__).resolve().parents[2] / "scenarios"


def test_generated_map_is_deterministic():
    a = cagecap.generate_depth_map(7, 32, 32, 10.0, 1.0, 15.0)
    b = cagecap.generate_depth_map(7, 32, 32, 10.0, 1.0, 15.0)
    assert a == b
    assert a.width == 32
    assert all(d >= 0 for d in a.depths)


def test_map_round_trip(tmp_path):
    m = cagecap.generate_depth_map(3, 16, 16, 5.0)
    path = tmp_path / "m.txt"
    m.save(str(path))
    assert cagecap.DepthMap.load(str(path)) == m


def test_min_cut_single_cell():
    m = cagecap.DepthMap(5, 5, 10.0, [5.0] * 25)
    cut = cagecap.min_cut(m, [12])
    assert cut["total_cost"] == pytest.approx(200.0)
    assert len(cut["segments"]) == 4
    assert sum(s[4] * 10.0 for s in cut["segments"]) == pytest.approx(cut["total_cost"])


def test_contaminated_cells_edge():
    m = cagecap.DepthMap(10, 10, 1.0, [3.0] * 100)
    assert cagecap.contaminated_cells(m, (5.5, 5.5, -1.0), 0.0, 1.0, 0.0) == [55]
    with pytest.raises(cagecap.ContainmentImpossible):
        cagecap.contaminated_cells(m, (5.5, 5.5, -1.0), 0.0, 1.0, 10.0)
    with pytest.raises(cagecap.TemporalOrderError):
        cagecap.contaminated_cells(m, (5.5, 5.5, -1.0), 5.0, 1.0, 0.0)


def test_lbap():
    slots, bottleneck = cagecap.solve_lbap([[1, 2], [2, 10]])
    assert bottleneck == 2
    assert slots == [1, 0]
    with pytest.raises(cagecap.InsufficientAgents):
        cagecap.solve_lbap([[1, 2]])


def test_cover_barrier_covers():
    centres = cagecap.cover_barrier([(0, 0, 10, 0, 5)], 2.0)
    for x in range(11):
        for z in range(6):
            assert min(math.dist((x, 0, -z), c) for c in centres) <= 2.0 + 1e-9


def test_capture_cage():
    rs = 0.5 / math.sqrt(3)
    cage = cagecap.build_capture_cage(12, rs, seed=3)
    assert len(cage["edges"]) == 30
    assert cage["verified"]
    assert cage["max_edge"] <= math.sqrt(3) * rs + 1e-9
    with pytest.raises(cagecap.ParameterError):
        cagecap.build_capture_cage(3, rs)


def test_tetrahedron_stats():
    s = cagecap.capture_radius_stats(4, 0.5 / math.sqrt(3), trials=5, seed=1)
    assert s["max_edge"]["mean"] == pytest.approx(1.633, abs=1e-3)
    assert len(s["radii"]) == 5


def test_relaxed_points_are_unit():
    for p in cagecap.relax_sphere_points(9, seed=2):
        assert math.hypot(*p) == pytest.approx(1.0, abs=1e-9)


def test_smoke_scenario_captures():
    outcome, events = cagecap.simulate(str(SCENARIOS / "smoke.scn"))
    assert outcome == "captured"
    assert [e[1] for e in events[-2:]] == ["shrink_start", "captured"]


def test_bad_scenario(tmp_path):
    bad = tmp_path / "bad.scn"
    bad.write_text("[map]\nuniform = 1 2\n")
    with pytest.raises(cagecap.ValidationError, match="line 2"):
        cagecap.simulate(str(bad))
