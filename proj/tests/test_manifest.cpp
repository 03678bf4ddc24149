#include <doctest.h>

#include "framepick/error.hpp"
#include "framepick/manifest.hpp"
#include "framepick/std_sampler.hpp"
#include "support.hpp"

using namespace framepick;

namespace {

const VideoMeta kMeta("clip-1", 300, {30, 1}, 10.0, "/videos/clip-1.mp4");

std::string golden_single() {
  return R"({"format":"framepick/selection-manifest","version":1,)"
         R"("video":{"video_id":"clip-1","frame_count":300,"native_fps":"30","duration_s":10.0,)"
         R"("path":"/videos/clip-1.mp4"},"strategy":"center",)"
         R"("params":{"rate_r":2.0,"n_min":4,"n_max":96,"pool_n":1000,"svd_energy":0.9,)"
         R"("maxvol_delta":0.01,"rect_growth_delta":0.05,"rect_cap_factor":2,"score_fraction":0.15},)"
         R"("fallback":false,"frame_indices":[150],"timestamps_ms":[5000]})";
}

}  // namespace

TEST_CASE("canonical serialization matches the documented layout") {
  const SelectionManifest m = sample_single(kMeta, SingleFrame::Center);
  CHECK(serialize_manifest(m) == golden_single());
}

TEST_CASE("round trip is the identity") {
  SUBCASE("single index [0]") {
    const SelectionManifest m = sample_single(kMeta, SingleFrame::First);
    REQUIRE(m.frame_indices() == std::vector<FrameIndex>{0});
    const auto text = serialize_manifest(m);
    const SelectionManifest back = parse_manifest(text);
    CHECK(back == m);
    CHECK(serialize_manifest(back) == text);
  }
  SUBCASE("96 indices") {
    const VideoMeta meta("long", 3600, {30, 1}, 120.0);
    const SelectionManifest m = sample_uniform_fps(meta, {});
    REQUIRE(m.frame_indices().size() == 96);
    const auto text = serialize_manifest(m);
    const SelectionManifest back = parse_manifest(text);
    CHECK(back == m);
    CHECK(serialize_manifest(back) == text);
  }
  SUBCASE("NTSC rate and non-default parameters") {
    const VideoMeta meta("ntsc", 480, {30000, 1001}, 16.016);
    SamplingConfig cfg;
    cfg.rate_r = 1.5;
    cfg.n_min = 2;
    cfg.n_max = 7;
    cfg.svd_energy = 0.95;
    cfg.score_fraction = 0.2;
    const SelectionManifest m = sample_uniform_fps(meta, cfg);
    const SelectionManifest back = parse_manifest(serialize_manifest(m));
    CHECK(back == m);
    CHECK(back.meta().native_fps() == Rational{30000, 1001});
  }
  SUBCASE("fallback flag survives") {
    SamplingConfig cfg;
    cfg.strategy = Strategy::MaxInfo;
    const SelectionManifest m(kMeta, cfg, {1, 2, 3}, true);
    const SelectionManifest back = parse_manifest(serialize_manifest(m));
    CHECK(back.fallback());
    CHECK(back == m);
  }
}

TEST_CASE("structurally equal manifests serialize identically") {
  const SelectionManifest a = sample_uniform_fps(kMeta, {});
  const SelectionManifest b = sample_uniform_fps(VideoMeta(kMeta), SamplingConfig{});
  CHECK(serialize_manifest(a) == serialize_manifest(b));
}

TEST_CASE("malformed manifests are rejected with diagnostics") {
  const std::string good = golden_single();
  SUBCASE("truncated file") {
    const std::string cut = good.substr(0, good.size() / 2);
    try {
      parse_manifest(cut);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("line") != std::string::npos);
    }
  }
  SUBCASE("empty") { CHECK_THROWS_AS(parse_manifest(""), ParseError); }
  SUBCASE("wrong format tag") {
    std::string s = good;
    s.replace(s.find("selection-manifest"), 18, "something-else-xx");
    CHECK_THROWS_AS(parse_manifest(s), ParseError);
  }
  SUBCASE("unknown key names its path") {
    std::string s = good;
    s.replace(s.find("\"pool_n\""), 8, "\"pool_m\"");
    try {
      parse_manifest(s);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("params") != std::string::npos);
    }
  }
  SUBCASE("wrong type names its path") {
    std::string s = good;
    s.replace(s.find("\"frame_count\":300"), 17, "\"frame_count\":\"x\"");
    try {
      parse_manifest(s);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("frame_count") != std::string::npos);
    }
  }
  SUBCASE("timestamps must match the indices") {
    std::string s = good;
    s.replace(s.find("[5000]"), 6, "[5001]");
    CHECK_THROWS(parse_manifest(s));
  }
  SUBCASE("indices out of range") {
    std::string s = good;
    s.replace(s.find("[150]"), 5, "[300]");
    CHECK_THROWS_AS(parse_manifest(s), Error);
  }
}

TEST_CASE("manifest files and directories") {
  testing::TempDir dir;
  const VideoMeta a("b-video", 300, {30, 1}, 10.0);
  const VideoMeta b("a-video", 300, {30, 1}, 10.0);
  write_manifest_file(manifest_path(dir.path(), a.video_id()), sample_uniform_fps(a, {}));
  write_manifest_file(manifest_path(dir.path(), b.video_id()), sample_uniform_fps(b, {}));
  testing::write_file(dir / "notes.txt", "ignored");
  CHECK(manifest_path(dir.path(), "x").filename() == "x.manifest.json");
  const std::string text = testing::read_file(manifest_path(dir.path(), "a-video"));
  CHECK(text.back() == '\n');
  const auto all = read_manifest_dir(dir.path());
  REQUIRE(all.size() == 2);
  CHECK(all[0].video_id() == "a-video");
  CHECK(all[1].video_id() == "b-video");
  CHECK_THROWS_AS(read_manifest_file(dir / "missing.manifest.json"), IoError);
  CHECK_THROWS_AS(read_manifest_dir(dir / "missing"), IoError);
}

TEST_CASE("video list parsing") {
  const std::string text =
      "{\"video_id\":\"a\",\"frame_count\":300,\"native_fps\":\"30\",\"duration_s\":10}\n"
      "\n"
      "{\"video_id\":\"b\",\"native_fps\":29.97,\"duration_s\":16,\"path\":\"/v/b.mp4\"}\n"
      "{\"video_id\":\"c\",\"frame_count\":100,\"native_fps\":\"30000/1001\"}\n";
  const auto videos = parse_video_list(text);
  REQUIRE(videos.size() == 3);
  CHECK(videos[0].frame_count() == 300);
  CHECK(videos[1].frame_count() == 480);
  CHECK(videos[1].path() == "/v/b.mp4");
  CHECK(videos[2].native_fps() == Rational{30000, 1001});

  SUBCASE("errors carry line numbers") {
    try {
      parse_video_list("{\"video_id\":\"a\",\"frame_count\":300,\"duration_s\":10}\n{\"video_id\":\"b\"}\n");
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
  }
  SUBCASE("duplicate ids") {
    CHECK_THROWS_AS(parse_video_list("{\"video_id\":\"a\",\"frame_count\":3,\"duration_s\":1}\n"
                                     "{\"video_id\":\"a\",\"frame_count\":3,\"duration_s\":1}\n"),
                    ValidationError);
  }
  SUBCASE("malformed JSON") { CHECK_THROWS_AS(parse_video_list("{nope}\n"), ParseError); }
  SUBCASE("inconsistent triple") {
    CHECK_THROWS_AS(
        parse_video_list("{\"video_id\":\"a\",\"frame_count\":350,\"native_fps\":30,\"duration_s\":10}\n"),
        ValidationError);
  }
}
