#include <cmath>
#include <limits>

#include <doctest.h>

#include "framepick/error.hpp"
#include "framepick/types.hpp"

using namespace framepick;

TEST_CASE("rational parsing and printing") {
  CHECK(Rational::parse("30") == Rational{30, 1});
  CHECK(Rational::parse("30000/1001") == Rational{30000, 1001});
  CHECK(Rational::parse("60/2") == Rational{30, 1});
  CHECK(Rational::parse("29.97") == Rational{2997, 100});
  CHECK(Rational::parse("29.97").to_string() == "2997/100");
  CHECK(Rational{30000, 1001}.to_string() == "30000/1001");
  CHECK(Rational{30, 1}.to_string() == "30");
  CHECK_THROWS_AS(Rational::parse(""), ParseError);
  CHECK_THROWS_AS(Rational::parse("abc"), ParseError);
  CHECK_THROWS_AS(Rational::parse("30/0"), ParseError);
  CHECK(Rational::from_double(25.0) == Rational{25, 1});
  CHECK(Rational::from_double(29.97) == Rational{2997, 100});
}

TEST_CASE("round half up") {
  CHECK(round_half_up(2.5) == 3);
  CHECK(round_half_up(2.4999) == 2);
  CHECK(round_half_up(0.0) == 0);
  CHECK(round_half_up(479.52) == 480);
}

TEST_CASE("strategy names") {
  for (Strategy s : {Strategy::UniformFps, Strategy::SingleFirst, Strategy::SingleCenter,
                     Strategy::MaxInfo, Strategy::Scored}) {
    CHECK(parse_strategy(strategy_name(s)) == s);
  }
  CHECK(strategy_label(Strategy::Scored) == "CSTA");
  CHECK(strategy_label(Strategy::UniformFps) == "FPS");
  CHECK_THROWS_AS(parse_strategy("random"), ValidationError);
}

TEST_CASE("derive_frame_count examples") {
  SUBCASE("fps and duration") {
    const VideoMeta m = derive_frame_count({"v", std::nullopt, Rational{30, 1}, 10.0, ""});
    CHECK(m.frame_count() == 300);
  }
  SUBCASE("NTSC-like decimal rate") {
    const VideoMeta m = derive_frame_count({"v", std::nullopt, Rational::parse("29.97"), 16.0, ""});
    CHECK(m.frame_count() == 480);
  }
  SUBCASE("inconsistent triple") {
    CHECK_THROWS_AS(derive_frame_count({"v", 350, Rational{30, 1}, 10.0, ""}), ValidationError);
  }
  SUBCASE("one frame of slack is accepted") {
    CHECK(derive_frame_count({"v", 301, Rational{30, 1}, 10.0, ""}).frame_count() == 301);
    CHECK(derive_frame_count({"v", 299, Rational{30, 1}, 10.0, ""}).frame_count() == 299);
    CHECK_THROWS_AS(derive_frame_count({"v", 302, Rational{30, 1}, 10.0, ""}), ValidationError);
  }
  SUBCASE("count and fps give the duration") {
    const VideoMeta m = derive_frame_count({"v", 300, Rational{30, 1}, std::nullopt, ""});
    CHECK(m.duration_s() == doctest::Approx(10.0));
  }
  SUBCASE("count and duration give the rate") {
    const VideoMeta m = derive_frame_count({"v", 300, std::nullopt, 10.0, ""});
    CHECK(m.native_fps().to_double() == doctest::Approx(30.0));
  }
  SUBCASE("fewer than two fields") {
    CHECK_THROWS_AS(derive_frame_count({"v", 300, std::nullopt, std::nullopt, ""}), ValidationError);
  }
}

TEST_CASE("VideoMeta validation") {
  CHECK_THROWS_AS(VideoMeta("v", 0, {30, 1}, 1.0), ValidationError);
  CHECK_THROWS_AS(VideoMeta("v", 30, {0, 1}, 1.0), ValidationError);
  CHECK_THROWS_AS(VideoMeta("v", 30, {30, 1}, 0.0), ValidationError);
  CHECK_THROWS_AS(VideoMeta("v", 30, {30, 1}, std::nan("")), ValidationError);
  CHECK_THROWS_AS(VideoMeta("", 30, {30, 1}, 1.0), ValidationError);
  CHECK_NOTHROW(VideoMeta("v", 1, {30, 1}, 1.0 / 30.0));
}

TEST_CASE("SamplingConfig defaults and validation") {
  const SamplingConfig c;
  CHECK(c.rate_r == 2.0);
  CHECK(c.n_min == 4);
  CHECK(c.n_max == 96);
  CHECK(c.pool_n == 1000);
  CHECK(c.svd_energy == 0.90);
  CHECK(c.maxvol_delta == 0.01);
  CHECK(c.rect_growth_delta == 0.05);
  CHECK(c.rect_cap_factor == 2);
  CHECK(c.score_fraction == 0.15);
  CHECK_NOTHROW(c.validate());

  auto bad = [](auto mutate) {
    SamplingConfig x;
    mutate(x);
    return x;
  };
  CHECK_THROWS_AS(bad([](auto& x) { x.n_min = 100; }).validate(), ValidationError);
  CHECK_THROWS_AS(bad([](auto& x) { x.rate_r = 0; }).validate(), ValidationError);
  CHECK_THROWS_AS(bad([](auto& x) { x.n_min = 0; }).validate(), ValidationError);
  CHECK_THROWS_AS(bad([](auto& x) { x.pool_n = 0; }).validate(), ValidationError);
  CHECK_THROWS_AS(bad([](auto& x) { x.svd_energy = 0; }).validate(), ValidationError);
  CHECK_THROWS_AS(bad([](auto& x) { x.svd_energy = 1.5; }).validate(), ValidationError);
  CHECK_THROWS_AS(bad([](auto& x) { x.maxvol_delta = 0; }).validate(), ValidationError);
  CHECK_THROWS_AS(bad([](auto& x) { x.rect_growth_delta = -0.1; }).validate(), ValidationError);
  CHECK_THROWS_AS(bad([](auto& x) { x.rect_cap_factor = 0; }).validate(), ValidationError);
  CHECK_THROWS_AS(bad([](auto& x) { x.score_fraction = 0; }).validate(), ValidationError);
  CHECK_THROWS_AS(bad([](auto& x) { x.score_fraction = 1.01; }).validate(), ValidationError);
  CHECK_NOTHROW(bad([](auto& x) { x.svd_energy = 1.0; }).validate());
  CHECK_NOTHROW(bad([](auto& x) { x.rect_growth_delta = 0.0; }).validate());
}

TEST_CASE("timestamps use exact rational arithmetic") {
  CHECK(timestamp_ms(0, {30, 1}) == 0);
  CHECK(timestamp_ms(7, {30, 1}) == 233);  // 233.33
  CHECK(timestamp_ms(1, {2, 1}) == 500);
  CHECK(timestamp_ms(1, {3, 1}) == 333);
  CHECK(timestamp_ms(2, {3, 1}) == 667);  // 666.67
  CHECK(timestamp_ms(1, {2000, 1}) == 1);  // 0.5 rounds up
  // 1001 * 1000 / 30000 = 33.3667
  CHECK(timestamp_ms(1, {30000, 1001}) == 33);
  CHECK(timestamp_ms(30000, {30000, 1001}) == 1001000);
  // Large indices do not overflow.
  CHECK(timestamp_ms(std::int64_t{1} << 40, {30000, 1001}) > 0);
}

TEST_CASE("SelectionManifest invariants") {
  const VideoMeta meta("v", 300, {30, 1}, 10.0);
  SamplingConfig cfg;
  CHECK_NOTHROW(SelectionManifest(meta, cfg, {0}));
  CHECK_THROWS_AS(SelectionManifest(meta, cfg, {}), ValidationError);
  CHECK_THROWS_AS(SelectionManifest(meta, cfg, {5, 5}), ValidationError);
  CHECK_THROWS_AS(SelectionManifest(meta, cfg, {6, 5}), ValidationError);
  CHECK_THROWS_AS(SelectionManifest(meta, cfg, {-1}), ValidationError);
  CHECK_THROWS_AS(SelectionManifest(meta, cfg, {300}), ValidationError);
  cfg.n_max = 2;
  cfg.n_min = 1;
  CHECK_THROWS_AS(SelectionManifest(meta, cfg, {1, 2, 3}), ValidationError);
  const SelectionManifest m(meta, cfg, {7, 22});
  CHECK(m.timestamps_ms() == std::vector<std::int64_t>{233, 733});
}

TEST_CASE("EmbeddingMatrix and ScoreVector invariants") {
  CHECK_NOTHROW(EmbeddingMatrix({0, 1}, 2, {1, 2, 3, 4}));
  CHECK_THROWS_AS(EmbeddingMatrix({}, 2, {}), ValidationError);
  CHECK_THROWS_AS(EmbeddingMatrix({0, 1}, 0, {}), ValidationError);
  CHECK_THROWS_AS(EmbeddingMatrix({0, 1}, 2, {1, 2, 3}), ValidationError);
  CHECK_THROWS_AS(EmbeddingMatrix({1, 0}, 1, {1, 2}), ValidationError);
  CHECK_THROWS_AS(EmbeddingMatrix({0, 1}, 1, {1, std::numeric_limits<float>::infinity()}),
                  ValidationError);
  CHECK_THROWS_AS(EmbeddingMatrix({0, 1}, 1, {1, std::nanf("")}), ValidationError);
  CHECK_THROWS_AS(EmbeddingMatrix({-1, 1}, 1, {1, 2}), ValidationError);
  const EmbeddingMatrix e({3, 9}, 2, {1, 2, 3, 4});
  CHECK(e.row(1)[0] == 3.0f);

  CHECK_NOTHROW(ScoreVector({0, 4}, {-1.0f, 2.0f}));
  CHECK_THROWS_AS(ScoreVector({0, 4}, {1.0f}), ValidationError);
  CHECK_THROWS_AS(ScoreVector({}, {}), ValidationError);
  CHECK_THROWS_AS(ScoreVector({0, 4}, {1.0f, std::nanf("")}), ValidationError);
}

TEST_CASE("exit codes") {
  CHECK(exit_code_for(ErrorKind::Validation) == 1);
  CHECK(exit_code_for(ErrorKind::Parse) == 1);
  CHECK(exit_code_for(ErrorKind::Config) == 1);
  CHECK(exit_code_for(ErrorKind::Degenerate) == 1);
  CHECK(exit_code_for(ErrorKind::Adapter) == 2);
  CHECK(exit_code_for(ErrorKind::Protocol) == 2);
  CHECK(exit_code_for(ErrorKind::Io) == 3);
}
