#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "dashsim/media_catalog.hpp"

using namespace dashsim;

TEST_CASE("default ladder matches the 14-level encoding") {
  const MediaCatalog c = build_default_catalog();
  REQUIRE(c.level_count() == 14);
  CHECK(c.representation(0).bitrate_kbps == 100);
  CHECK(c.representation(8).bitrate_kbps == 1600);
  CHECK(c.representation(13).bitrate_kbps == 4500);
  CHECK(c.segment_duration_s() == 2.0);
  CHECK(c.segment_count() == 300);
  for (const Representation& r : c.representations()) {
    CHECK(r.width == 640);
    CHECK(r.height == 360);
    CHECK(r.frame_rate == 30.0);
  }
}

TEST_CASE("segment bytes follow bitrate x duration") {
  const MediaCatalog c = build_default_catalog();
  CHECK(c.segment_bytes(13, 0) == 1'125'000);  // 4500 kbps * 2 s / 8
  CHECK(c.segment_bytes(0, 0) == 25'000);      // 100 kbps * 2 s / 8
  CHECK_THROWS_AS(c.segment_bytes(14, 0), std::out_of_range);
  CHECK_THROWS_AS(c.segment_bytes(0, 300), std::out_of_range);
  CHECK_THROWS_AS(c.segment_bytes(-1, 0), std::out_of_range);
}

TEST_CASE("segment bytes constant per level, increasing across levels") {
  const MediaCatalog c = build_default_catalog();
  for (int level = 0; level < c.level_count(); ++level) {
    const std::int64_t first = c.segment_bytes(level, 0);
    for (int seg : {1, 17, 299}) {
      CHECK(c.segment_bytes(level, seg) == first);
    }
    if (level > 0) CHECK(first > c.segment_bytes(level - 1, 0));
  }
}

TEST_CASE("full-session media sum is segment_count x segment_bytes") {
  const MediaCatalog c = build_default_catalog();
  std::int64_t sum = 0;
  for (int seg = 0; seg < c.segment_count(); ++seg) {
    sum += c.segment_bytes(5, seg);
  }
  CHECK(sum == c.segment_count() * c.segment_bytes(5, 0));
}

TEST_CASE("url paths are unique and fixed-width") {
  const MediaCatalog c = build_default_catalog();
  CHECK(c.url_path(4, 42) == "/bbb/seg-l04-00042.m4s");
  CHECK(c.url_path(13, 299) == "/bbb/seg-l13-00299.m4s");
  CHECK(c.url_path(0, 0).size() == c.url_path(13, 299).size());
}

TEST_CASE("save/load round-trip is lossless") {
  const MediaCatalog c = build_default_catalog();
  std::stringstream buf;
  write_catalog(c, buf);
  const MediaCatalog back = parse_catalog(buf);
  CHECK(back == c);

  // Byte-exact re-serialization.
  std::stringstream again;
  write_catalog(back, again);
  std::stringstream reference;
  write_catalog(c, reference);
  CHECK(again.str() == reference.str());
}

TEST_CASE("the shipped default catalog file equals the built-in") {
  const auto path =
      std::filesystem::path(DASHSIM_DATA_DIR) / "default_catalog.txt";
  CHECK(load_catalog(path) == build_default_catalog());
}

TEST_CASE("descending ladder is rejected") {
  std::stringstream in(
      "title x\nsegment_duration_s 2\nsegment_count 10\n"
      "0 200 640 360 30\n1 100 640 360 30\n");
  CHECK_THROWS_AS(parse_catalog(in), CatalogError);
}

TEST_CASE("zero segment duration is rejected") {
  std::stringstream in(
      "title x\nsegment_duration_s 0\nsegment_count 10\n0 100 640 360 30\n");
  CHECK_THROWS_AS(parse_catalog(in), CatalogError);
}

TEST_CASE("parse errors carry the line number") {
  std::stringstream in(
      "title x\nsegment_duration_s 2\nsegment_count 10\nnot a row\n");
  try {
    parse_catalog(in);
    FAIL("expected CatalogError");
  } catch (const CatalogError& e) {
    CHECK(std::string(e.what()).find("line 4") != std::string::npos);
  }
}

TEST_CASE("missing header fields are rejected") {
  std::stringstream in("title x\nsegment_count 10\n0 100 640 360 30\n");
  CHECK_THROWS_AS(parse_catalog(in), CatalogError);
}

TEST_CASE("titles keep embedded spaces through a round-trip") {
  const MediaCatalog c("Big Buck Bunny trailer", 2.0, 5,
                       {Representation{0, 100, 640, 360, 29.97}});
  std::stringstream buf;
  write_catalog(c, buf);
  const MediaCatalog back = parse_catalog(buf);
  CHECK(back.title() == "Big Buck Bunny trailer");
  CHECK(back.representation(0).frame_rate == 29.97);
}
