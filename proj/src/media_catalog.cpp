#include "dashsim/media_catalog.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <utility>

namespace dashsim {

namespace {

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

[[noreturn]] void fail(int line, const std::string& what) {
  throw CatalogError("catalog line " + std::to_string(line) + ": " + what);
}

}  // namespace

MediaCatalog::MediaCatalog(std::string title, double segment_duration_s,
                           int segment_count,
                           std::vector<Representation> representations)
    : title_(std::move(title)),
      segment_duration_s_(segment_duration_s),
      segment_count_(segment_count),
      representations_(std::move(representations)) {
  if (!(segment_duration_s_ > 0.0)) {
    throw CatalogError("segment_duration_s must be > 0");
  }
  if (segment_count_ < 1) throw CatalogError("segment_count must be >= 1");
  if (representations_.empty()) {
    throw CatalogError("catalog needs at least one representation");
  }
  for (std::size_t i = 0; i < representations_.size(); ++i) {
    const Representation& r = representations_[i];
    if (r.level != static_cast<int>(i)) {
      throw CatalogError("representation levels must be consecutive from 0");
    }
    if (r.bitrate_kbps <= 0) throw CatalogError("bitrate must be positive");
    if (i > 0 &&
        r.bitrate_kbps <= representations_[i - 1].bitrate_kbps) {
      throw CatalogError("ladder must be strictly increasing in bitrate");
    }
  }
}

const Representation& MediaCatalog::representation(int level) const {
  if (level < 0 || level >= level_count()) {
    throw std::out_of_range("representation level " + std::to_string(level) +
                            " out of range [0, " +
                            std::to_string(level_count()) + ")");
  }
  return representations_[static_cast<std::size_t>(level)];
}

std::int64_t MediaCatalog::segment_bytes(int level, int segment) const {
  const Representation& r = representation(level);
  if (segment < 0 || segment >= segment_count_) {
    throw std::out_of_range("segment index " + std::to_string(segment) +
                            " out of range [0, " +
                            std::to_string(segment_count_) + ")");
  }
  return static_cast<std::int64_t>(
      std::llround(r.bitrate_kbps * 1000.0 * segment_duration_s_ / 8.0));
}

std::string MediaCatalog::url_path(int level, int segment) const {
  representation(level);  // range check
  if (segment < 0 || segment >= segment_count_) {
    throw std::out_of_range("segment index out of range");
  }
  char buf[48];
  std::snprintf(buf, sizeof(buf), "/bbb/seg-l%02d-%05d.m4s", level, segment);
  return buf;
}

MediaCatalog build_default_catalog() {
  static constexpr int kLadderKbps[] = {100,  200,  350,  500,  700,
                                        900,  1100, 1300, 1600, 1900,
                                        2300, 2800, 3400, 4500};
  std::vector<Representation> reps;
  int level = 0;
  for (int kbps : kLadderKbps) {
    reps.push_back(Representation{level++, kbps, 640, 360, 30.0});
  }
  return MediaCatalog("Big Buck Bunny", 2.0, 300, std::move(reps));
}

MediaCatalog parse_catalog(std::istream& in) {
  std::string title;
  double segment_duration_s = 0.0;
  int segment_count = 0;
  bool saw_title = false, saw_duration = false, saw_count = false;
  std::vector<Representation> reps;

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string first;
    fields >> first;
    if (first == "title") {
      auto pos = line.find("title");
      title = line.substr(pos + 6);
      saw_title = true;
    } else if (first == "segment_duration_s") {
      if (!(fields >> segment_duration_s)) fail(line_no, "bad duration value");
      saw_duration = true;
    } else if (first == "segment_count") {
      if (!(fields >> segment_count)) fail(line_no, "bad segment_count value");
      saw_count = true;
    } else {
      Representation r;
      std::istringstream row(line);
      if (!(row >> r.level >> r.bitrate_kbps >> r.width >> r.height >>
            r.frame_rate)) {
        fail(line_no, "expected `level bitrate_kbps width height fps`");
      }
      reps.push_back(r);
    }
  }
  if (!saw_title) throw CatalogError("catalog: missing title");
  if (!saw_duration) throw CatalogError("catalog: missing segment_duration_s");
  if (!saw_count) throw CatalogError("catalog: missing segment_count");
  try {
    return MediaCatalog(title, segment_duration_s, segment_count,
                        std::move(reps));
  } catch (const CatalogError& e) {
    throw CatalogError(std::string("catalog validation: ") + e.what());
  }
}

void write_catalog(const MediaCatalog& catalog, std::ostream& out) {
  out << "# media catalog\n";
  out << "title " << catalog.title() << "\n";
  out << "segment_duration_s " << format_double(catalog.segment_duration_s())
      << "\n";
  out << "segment_count " << catalog.segment_count() << "\n";
  out << "# level bitrate_kbps width height fps\n";
  for (const Representation& r : catalog.representations()) {
    out << r.level << ' ' << r.bitrate_kbps << ' ' << r.width << ' '
        << r.height << ' ' << format_double(r.frame_rate) << "\n";
  }
}

MediaCatalog load_catalog(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CatalogError("cannot open catalog file: " + path.string());
  return parse_catalog(in);
}

void save_catalog(const MediaCatalog& catalog,
                  const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CatalogError("cannot write catalog file: " + path.string());
  write_catalog(catalog, out);
}

}  // namespace dashsim
