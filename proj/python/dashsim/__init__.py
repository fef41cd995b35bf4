"""DASH adaptive streaming simulator over modeled TCP/SSL/QUIC stacks."""

from ._core import (
    BandwidthTrajectory,
    ClientSession,
    EstimatorState,
    MediaCatalog,
    Representation,
    SegmentDownloadRecord,
    StackConfig,
    TrajectoryStep,
    WireStats,
    avg_media_throughput_kbps,
    build_default_catalog,
    default_trajectory,
    estimate_bandwidth,
    link_utilization,
    load_catalog,
    load_trajectory,
    protocol_overhead,
    quic_header_len,
    run_session,
    save_catalog,
    select_representation,
    stack_config,
)

STACKS = ("h2-tcp", "h2-ssl", "h1-quic", "spdy-quic")

__all__ = [
    "BandwidthTrajectory",
    "ClientSession",
    "EstimatorState",
    "MediaCatalog",
    "Representation",
    "SegmentDownloadRecord",
    "StackConfig",
    "TrajectoryStep",
    "WireStats",
    "STACKS",
    "avg_media_throughput_kbps",
    "build_default_catalog",
    "default_trajectory",
    "estimate_bandwidth",
    "link_utilization",
    "load_catalog",
    "load_trajectory",
    "protocol_overhead",
    "quic_header_len",
    "run_session",
    "save_catalog",
    "select_representation",
    "stack_config",
]
