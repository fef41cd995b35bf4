"""Smoke tests for the python bindings."""

import pytest

import dashsim


def test_default_catalog_ladder():
    catalog = dashsim.build_default_catalog()
    bitrates = [r.bitrate_kbps for r in catalog.representations]
    assert bitrates == [100, 200, 350, 500, 700, 900, 1100, 1300,
                        1600, 1900, 2300, 2800, 3400, 4500]
    assert catalog.segment_duration_s == 2.0
    assert catalog.segment_bytes(13, 0) == 1_125_000
    assert catalog.segment_bytes(0, 0) == 25_000
    with pytest.raises(IndexError):
        catalog.segment_bytes(14, 0)


def test_analytic_overheads():
    tcp = dashsim.stack_config("h2-tcp")
    quic = dashsim.stack_config("spdy-quic")
    assert tcp.mtu_bytes == 1514
    assert quic.mtu_bytes == 1242
    assert abs(tcp.analytic_overhead() - 66 / 1514) < 1e-12
    assert abs(quic.analytic_overhead() - 42 / 1242) < 1e-12
    assert round(tcp.analytic_overhead() * 100, 2) == 4.36
    assert round(quic.analytic_overhead() * 100, 2) == 3.38


def test_quic_header_lengths():
    assert dashsim.quic_header_len("minimal") == 2
    assert dashsim.quic_header_len("maximal") == 19
    assert dashsim.quic_header_len("default") == 14
    assert dashsim.quic_header_len("default", first_packet=True) == 18


def test_estimator_matches_formula():
    state = dashsim.EstimatorState(b_prev_kbps=1000.0)
    assert dashsim.estimate_bandwidth(state, 2000.0) == pytest.approx(1650.0)
    assert state.b_prev_kbps == pytest.approx(1650.0)


def test_selection():
    catalog = dashsim.build_default_catalog()
    assert dashsim.select_representation(catalog, 1650).bitrate_kbps == 1600
    assert dashsim.select_representation(catalog, 50).bitrate_kbps == 100
    assert dashsim.select_representation(catalog, 1e6).bitrate_kbps == 4500


def test_default_trajectory_properties():
    traj = dashsim.default_trajectory()
    assert len(traj.steps) >= 8
    assert traj.min_rate_kbps == 1000
    assert traj.max_rate_kbps == 5000
    mean = traj.time_weighted_mean_kbps(600_000_000)
    assert mean == pytest.approx(2700, rel=0.01)


def test_fixed_level_session_and_metrics():
    catalog = dashsim.build_default_catalog()
    session = dashsim.run_session(catalog, "h2-tcp", rtt_ms=50,
                                  link_rate_kbps=1600, segment_count=10,
                                  fixed_level=8)
    assert len(session.records) == 10
    assert session.connection_count == 1
    assert session.total_media_bytes == 10 * catalog.segment_bytes(8, 0)
    overhead = dashsim.protocol_overhead(session)
    assert 0.0 < overhead < 0.10
    utilization = dashsim.link_utilization(session, 1600)
    assert 0.5 < utilization <= 1.02  # full-bucket sessions carry burst credit
    throughput = dashsim.avg_media_throughput_kbps(session)
    assert 1000 < throughput <= 1600


def test_adaptive_session_is_deterministic():
    catalog = dashsim.build_default_catalog()
    traj = dashsim.default_trajectory()
    runs = [
        dashsim.run_session(catalog, "spdy-quic", rtt_ms=50, trajectory=traj,
                            seed=3, segment_count=25)
        for _ in range(2)
    ]
    a, b = runs
    assert [r.level for r in a.records] == [r.level for r in b.records]
    assert [r.completion_time_us for r in a.records] == \
           [r.completion_time_us for r in b.records]
    assert a.records[0].level == 0  # lowest-first bootstrap
    levels = {r.level for r in a.records}
    assert len(levels) > 1  # adaptation actually moved
