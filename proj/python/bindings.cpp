#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "dashsim/dash_client.hpp"
#include "dashsim/media_catalog.hpp"
#include "dashsim/metrics.hpp"
#include "dashsim/netem.hpp"
#include "dashsim/scenario.hpp"
#include "dashsim/stack.hpp"

namespace py = pybind11;
using namespace dashsim;

namespace {

ClientSession run_session_py(const MediaCatalog& catalog,
                             const std::string& stack, int rtt_ms,
                             double link_rate_kbps,
                             const BandwidthTrajectory* trajectory,
                             std::uint64_t seed, int segment_count,
                             int fixed_level, double safety_factor) {
  SessionConfig config;
  config.catalog = &catalog;
  config.stack = stack_from_string(stack);
  config.rtt_ms = rtt_ms;
  config.link_rate_kbps = link_rate_kbps;
  config.trajectory = trajectory;
  config.seed = seed;
  config.segment_count = segment_count;
  config.fixed_level = fixed_level;
  config.safety_factor = safety_factor;
  return run_session(config);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "DASH adaptive streaming simulator over TCP/SSL/QUIC stack models";

  py::class_<Representation>(m, "Representation")
      .def_readonly("level", &Representation::level)
      .def_readonly("bitrate_kbps", &Representation::bitrate_kbps)
      .def_readonly("width", &Representation::width)
      .def_readonly("height", &Representation::height)
      .def_readonly("frame_rate", &Representation::frame_rate)
      .def("__repr__", [](const Representation& r) {
        return "<Representation level=" + std::to_string(r.level) +
               " bitrate_kbps=" + std::to_string(r.bitrate_kbps) + ">";
      });

  py::class_<MediaCatalog>(m, "MediaCatalog")
      .def_property_readonly("title", &MediaCatalog::title)
      .def_property_readonly("segment_duration_s",
                             &MediaCatalog::segment_duration_s)
      .def_property_readonly("segment_count", &MediaCatalog::segment_count)
      .def_property_readonly("representations",
                             &MediaCatalog::representations)
      .def_property_readonly("level_count", &MediaCatalog::level_count)
      .def("segment_bytes", &MediaCatalog::segment_bytes, py::arg("level"),
           py::arg("segment"))
      .def("url_path", &MediaCatalog::url_path, py::arg("level"),
           py::arg("segment"));

  m.def("build_default_catalog", &build_default_catalog);
  m.def("load_catalog", &load_catalog, py::arg("path"));
  m.def("save_catalog", &save_catalog, py::arg("catalog"), py::arg("path"));

  py::class_<TrajectoryStep>(m, "TrajectoryStep")
      .def_readonly("start_us", &TrajectoryStep::start)
      .def_readonly("rate_kbps", &TrajectoryStep::rate_kbps);

  py::class_<BandwidthTrajectory>(m, "BandwidthTrajectory")
      .def_property_readonly("steps", &BandwidthTrajectory::steps)
      .def("rate_at", &BandwidthTrajectory::rate_at, py::arg("t_us"))
      .def("time_weighted_mean_kbps",
           &BandwidthTrajectory::time_weighted_mean_kbps, py::arg("horizon_us"))
      .def_property_readonly("min_rate_kbps",
                             &BandwidthTrajectory::min_rate_kbps)
      .def_property_readonly("max_rate_kbps",
                             &BandwidthTrajectory::max_rate_kbps);

  m.def("default_trajectory", &default_trajectory);
  m.def("load_trajectory", &load_trajectory, py::arg("path"));

  py::class_<StackConfig>(m, "StackConfig")
      .def_property_readonly(
          "kind", [](const StackConfig& c) { return to_string(c.kind); })
      .def_readonly("ethernet_header_bytes", &StackConfig::ethernet_header_bytes)
      .def_readonly("ip_header_bytes", &StackConfig::ip_header_bytes)
      .def_readonly("transport_header_bytes",
                    &StackConfig::transport_header_bytes)
      .def_readonly("mtu_bytes", &StackConfig::mtu_bytes)
      .def_readonly("handshake_rtts", &StackConfig::handshake_rtts)
      .def_readonly("quic", &StackConfig::quic)
      .def("analytic_overhead", &StackConfig::analytic_overhead);

  m.def("stack_config", [](const std::string& name) {
    return StackConfig::make(stack_from_string(name));
  });
  m.def(
      "quic_header_len",
      [](const std::string& mode, bool first_packet) {
        QuicHeaderMode m_;
        if (mode == "minimal") {
          m_ = QuicHeaderMode::kMinimal;
        } else if (mode == "default") {
          m_ = QuicHeaderMode::kDefault;
        } else if (mode == "maximal") {
          m_ = QuicHeaderMode::kMaximal;
        } else {
          throw std::invalid_argument("mode must be minimal|default|maximal");
        }
        return quic_header_len(m_, {first_packet});
      },
      py::arg("mode") = "default", py::arg("first_packet") = false);

  py::class_<EstimatorState>(m, "EstimatorState")
      .def(py::init([](double w1, double w2, double b_prev) {
             return EstimatorState{w1, w2, b_prev};
           }),
           py::arg("w1") = 0.7, py::arg("w2") = 1.3,
           py::arg("b_prev_kbps") = 0.0)
      .def_readwrite("w1", &EstimatorState::w1)
      .def_readwrite("w2", &EstimatorState::w2)
      .def_readwrite("b_prev_kbps", &EstimatorState::b_prev_kbps);

  m.def("estimate_bandwidth", &estimate_bandwidth, py::arg("state"),
        py::arg("b_m_kbps"));
  m.def(
      "select_representation",
      [](const MediaCatalog& catalog, double b_n_kbps, double safety) {
        return select_representation(catalog, b_n_kbps, safety);
      },
      py::arg("catalog"), py::arg("b_n_kbps"), py::arg("safety_factor") = 1.0,
      py::return_value_policy::copy);

  py::class_<SegmentDownloadRecord>(m, "SegmentDownloadRecord")
      .def_readonly("segment_index", &SegmentDownloadRecord::segment_index)
      .def_readonly("level", &SegmentDownloadRecord::level)
      .def_readonly("bitrate_kbps", &SegmentDownloadRecord::bitrate_kbps)
      .def_readonly("request_time_us", &SegmentDownloadRecord::request_time)
      .def_readonly("first_byte_time_us",
                    &SegmentDownloadRecord::first_byte_time)
      .def_readonly("completion_time_us",
                    &SegmentDownloadRecord::completion_time)
      .def_readonly("media_bytes", &SegmentDownloadRecord::media_bytes)
      .def_readonly("wire_bytes", &SegmentDownloadRecord::wire_bytes)
      .def_readonly("measured_kbps", &SegmentDownloadRecord::measured_kbps)
      .def_readonly("estimate_kbps", &SegmentDownloadRecord::estimate_kbps)
      .def_readonly("available_kbps", &SegmentDownloadRecord::available_kbps);

  py::class_<WireStats>(m, "WireStats")
      .def_readonly("packets", &WireStats::packets)
      .def_readonly("total_bytes", &WireStats::total_bytes)
      .def_readonly("header_bytes", &WireStats::header_bytes)
      .def_readonly("payload_framing_bytes", &WireStats::payload_framing_bytes)
      .def_readonly("stream_bytes", &WireStats::stream_bytes)
      .def_readonly("ack_bytes", &WireStats::ack_bytes)
      .def_readonly("handshake_bytes", &WireStats::handshake_bytes)
      .def_readonly("retransmit_bytes", &WireStats::retransmit_bytes);

  py::class_<ClientSession>(m, "ClientSession")
      .def_property_readonly(
          "stack", [](const ClientSession& s) { return to_string(s.stack); })
      .def_readonly("rtt_ms", &ClientSession::rtt_ms)
      .def_readonly("seed", &ClientSession::seed)
      .def_readonly("records", &ClientSession::records)
      .def_readonly("client_received", &ClientSession::client_received)
      .def_readonly("client_sent", &ClientSession::client_sent)
      .def_readonly("total_media_bytes", &ClientSession::total_media_bytes)
      .def_readonly("connection_count", &ClientSession::connection_count)
      .def_property_readonly("duration_us", &ClientSession::active_duration);

  m.def("run_session", &run_session_py, py::arg("catalog"), py::arg("stack"),
        py::arg("rtt_ms") = 0, py::arg("link_rate_kbps") = 0.0,
        py::arg("trajectory") = nullptr, py::arg("seed") = 1,
        py::arg("segment_count") = -1, py::arg("fixed_level") = -1,
        py::arg("safety_factor") = 1.0,
        py::call_guard<py::gil_scoped_release>());

  m.def("protocol_overhead", &protocol_overhead, py::arg("session"));
  m.def("link_utilization", &link_utilization, py::arg("session"),
        py::arg("available_kbps"), py::arg("include_handshake") = true);
  m.def("avg_media_throughput_kbps", &avg_media_throughput_kbps,
        py::arg("session"));
}
