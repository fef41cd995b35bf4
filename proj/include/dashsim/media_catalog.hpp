#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace dashsim {

class CatalogError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Representation {
  int level = 0;
  int bitrate_kbps = 0;
  int width = 0;
  int height = 0;
  double frame_rate = 0.0;

  bool operator==(const Representation&) const = default;
};

// The manifest analogue: an ordered bitrate ladder with time-aligned,
// constant-bitrate segments. Immutable after construction and safe to share
// across concurrent runs.
class MediaCatalog {
 public:
  MediaCatalog(std::string title, double segment_duration_s, int segment_count,
               std::vector<Representation> representations);

  const std::string& title() const { return title_; }
  double segment_duration_s() const { return segment_duration_s_; }
  int segment_count() const { return segment_count_; }
  const std::vector<Representation>& representations() const {
    return representations_;
  }
  int level_count() const { return static_cast<int>(representations_.size()); }

  const Representation& representation(int level) const;

  // Segment payload size: round(bitrate_kbps * 1000 * duration / 8).
  // Constant across segment indices of one level (CBR model).
  std::int64_t segment_bytes(int level, int segment) const;

  std::string url_path(int level, int segment) const;

  bool operator==(const MediaCatalog&) const = default;

 private:
  std::string title_;
  double segment_duration_s_ = 0.0;
  int segment_count_ = 0;
  std::vector<Representation> representations_;
};

// The 14-level ladder from 100 to 4500 kbps, 640x360 @ 30 fps, 2 s segments,
// 300 segments (600 s of content).
MediaCatalog build_default_catalog();

// Flat text format (see data/default_catalog.txt): `key value` lines for
// title / segment_duration_s / segment_count, then one
// `level bitrate_kbps width height fps` row per representation. Comments
// start with '#'. Round-trips bit-exactly.
MediaCatalog parse_catalog(std::istream& in);
void write_catalog(const MediaCatalog& catalog, std::ostream& out);
MediaCatalog load_catalog(const std::filesystem::path& path);
void save_catalog(const MediaCatalog& catalog,
                  const std::filesystem::path& path);

}  // namespace dashsim
