#include "framepick/types.hpp"

#include <charconv>
#include <cmath>
#include <numeric>

#include "framepick/error.hpp"

namespace framepick {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Degenerate: return "degenerate";
    case ErrorKind::Config: return "config";
    case ErrorKind::Adapter: return "adapter";
    case ErrorKind::Protocol: return "protocol";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

int exit_code_for(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Adapter:
    case ErrorKind::Protocol: return kExitAdapter;
    case ErrorKind::Io: return kExitIo;
    default: return kExitValidation;
  }
}

Rational reduced(Rational r) {
  if (r.den < 0) {
    r.num = -r.num;
    r.den = -r.den;
  }
  const std::int64_t g = std::gcd(r.num, r.den);
  if (g > 1) {
    r.num /= g;
    r.den /= g;
  }
  return r;
}

std::string Rational::to_string() const {
  const Rational r = reduced(*this);
  if (r.den == 1) return std::to_string(r.num);
  return std::to_string(r.num) + "/" + std::to_string(r.den);
}

namespace {

std::int64_t parse_int(std::string_view text, std::string_view what) {
  std::int64_t value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw ParseError("invalid " + std::string(what) + ": '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

Rational Rational::parse(std::string_view text) {
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    Rational r{parse_int(text.substr(0, slash), "rational numerator"),
               parse_int(text.substr(slash + 1), "rational denominator")};
    if (r.den == 0) throw ParseError("rational with zero denominator: '" + std::string(text) + "'");
    return reduced(r);
  }
  if (const auto dot = text.find('.'); dot != std::string_view::npos) {
    const std::string_view whole = text.substr(0, dot);
    const std::string_view frac = text.substr(dot + 1);
    if (frac.size() > 9 || frac.empty()) {
      throw ParseError("unsupported decimal precision: '" + std::string(text) + "'");
    }
    std::int64_t den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    const bool negative = !whole.empty() && whole.front() == '-';
    const std::int64_t w = whole.empty() || whole == "-" ? 0 : parse_int(whole, "decimal");
    const std::int64_t f = parse_int(frac, "decimal");
    const std::int64_t mag = std::llabs(w) * den + f;
    return reduced({negative ? -mag : mag, den});
  }
  return {parse_int(text, "rational"), 1};
}

Rational Rational::from_double(double value) {
  if (!std::isfinite(value)) throw ValidationError("non-finite frame rate");
  std::int64_t den = 1;
  for (int k = 0; k <= 9; ++k, den *= 10) {
    const double scaled = value * static_cast<double>(den);
    const auto num = static_cast<std::int64_t>(std::llround(scaled));
    if (std::abs(static_cast<double>(num) / static_cast<double>(den) - value) <=
        1e-12 * std::max(1.0, std::abs(value))) {
      return reduced({num, den});
    }
  }
  return reduced({static_cast<std::int64_t>(std::llround(value * 1e9)), 1000000000});
}

std::int64_t round_half_up(double value) noexcept {
  return static_cast<std::int64_t>(std::floor(value + 0.5));
}

std::string_view strategy_name(Strategy s) noexcept {
  switch (s) {
    case Strategy::UniformFps: return "fps";
    case Strategy::SingleFirst: return "first";
    case Strategy::SingleCenter: return "center";
    case Strategy::MaxInfo: return "maxinfo";
    case Strategy::Scored: return "scored";
  }
  return "?";
}

std::string_view strategy_label(Strategy s) noexcept {
  switch (s) {
    case Strategy::UniformFps: return "FPS";
    case Strategy::SingleFirst: return "First";
    case Strategy::SingleCenter: return "Center";
    case Strategy::MaxInfo: return "MaxInfo";
    case Strategy::Scored: return "CSTA";
  }
  return "?";
}

Strategy parse_strategy(std::string_view name) {
  for (Strategy s : {Strategy::UniformFps, Strategy::SingleFirst, Strategy::SingleCenter,
                     Strategy::MaxInfo, Strategy::Scored}) {
    if (name == strategy_name(s)) return s;
  }
  throw ValidationError("unknown strategy '" + std::string(name) +
                        "' (expected fps, first, center, maxinfo or scored)");
}

namespace {

std::int64_t expected_frames(const Rational& fps, double duration_s) {
  return round_half_up(fps.to_double() * duration_s);
}

}  // namespace

VideoMeta::VideoMeta(std::string video_id, std::int64_t frame_count, Rational native_fps,
                     double duration_s, std::string path)
    : video_id_(std::move(video_id)),
      frame_count_(frame_count),
      native_fps_(reduced(native_fps)),
      duration_s_(duration_s),
      path_(std::move(path)) {
  const std::string where = "video '" + video_id_ + "': ";
  if (video_id_.empty()) throw ValidationError("video_id must not be empty");
  if (frame_count_ < 1) throw ValidationError(where + "frame_count must be >= 1");
  if (native_fps_.num <= 0 || native_fps_.den <= 0) {
    throw ValidationError(where + "native_fps must be > 0");
  }
  if (!(duration_s_ > 0.0) || !std::isfinite(duration_s_)) {
    throw ValidationError(where + "duration_s must be a finite value > 0");
  }
  const std::int64_t expected = expected_frames(native_fps_, duration_s_);
  if (std::llabs(frame_count_ - expected) > 1) {
    throw ValidationError(where + "frame_count " + std::to_string(frame_count_) +
                          " inconsistent with fps*duration = " + std::to_string(expected));
  }
}

VideoMeta derive_frame_count(const PartialVideoMeta& p) {
  const int present = int(p.frame_count.has_value()) + int(p.native_fps.has_value()) +
                      int(p.duration_s.has_value());
  if (present < 2) {
    throw ValidationError("video '" + p.video_id +
                          "': need at least two of frame_count, native_fps, duration_s");
  }
  if (p.native_fps && p.duration_s) {
    const std::int64_t frames =
        p.frame_count ? *p.frame_count : expected_frames(*p.native_fps, *p.duration_s);
    return VideoMeta(p.video_id, frames, *p.native_fps, *p.duration_s, p.path);
  }
  if (p.native_fps) {
    const double duration = static_cast<double>(*p.frame_count) / p.native_fps->to_double();
    return VideoMeta(p.video_id, *p.frame_count, *p.native_fps, duration, p.path);
  }
  if (!(*p.duration_s > 0.0)) {
    throw ValidationError("video '" + p.video_id + "': duration_s must be > 0");
  }
  const Rational fps =
      Rational::from_double(static_cast<double>(*p.frame_count) / *p.duration_s);
  return VideoMeta(p.video_id, *p.frame_count, fps, *p.duration_s, p.path);
}

void SamplingConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ValidationError("sampling config: " + msg); };
  if (!(rate_r > 0.0) || !std::isfinite(rate_r)) fail("rate must be > 0");
  if (n_min < 1) fail("n_min must be >= 1");
  if (n_max < 1) fail("n_max must be >= 1");
  if (n_min > n_max) fail("n_min must not exceed n_max");
  if (pool_n < 1) fail("pool size must be >= 1");
  if (!(svd_energy > 0.0 && svd_energy <= 1.0)) fail("svd_energy must be in (0, 1]");
  if (!(maxvol_delta > 0.0) || !std::isfinite(maxvol_delta)) fail("maxvol_delta must be > 0");
  if (!(rect_growth_delta >= 0.0) || !std::isfinite(rect_growth_delta)) {
    fail("rect_growth_delta must be >= 0");
  }
  if (rect_cap_factor < 1) fail("rect_cap_factor must be >= 1");
  if (!(score_fraction > 0.0 && score_fraction <= 1.0)) fail("score_fraction must be in (0, 1]");
}

std::int64_t timestamp_ms(FrameIndex index, const Rational& fps) {
  // 1000 * index * den / num, rounded half up: floor((2000*index*den + num) / (2*num)).
  const Rational r = reduced(fps);
  const __int128 numerator = static_cast<__int128>(2000) * index * r.den + r.num;
  const __int128 denominator = static_cast<__int128>(2) * r.num;
  __int128 q = numerator / denominator;
  if ((numerator % denominator != 0) && ((numerator < 0) != (denominator < 0))) --q;
  return static_cast<std::int64_t>(q);
}

SelectionManifest::SelectionManifest(VideoMeta meta, SamplingConfig config,
                                     std::vector<FrameIndex> frame_indices, bool fallback)
    : meta_(std::move(meta)),
      config_(config),
      fallback_(fallback),
      frame_indices_(std::move(frame_indices)) {
  config_.validate();
  const std::string where = "manifest for '" + meta_.video_id() + "': ";
  if (frame_indices_.empty()) throw ValidationError(where + "no frames selected");
  if (static_cast<std::int64_t>(frame_indices_.size()) > config_.n_max) {
    throw ValidationError(where + "selection size exceeds n_max");
  }
  for (std::size_t i = 0; i < frame_indices_.size(); ++i) {
    const FrameIndex idx = frame_indices_[i];
    if (idx < 0 || idx >= meta_.frame_count()) {
      throw ValidationError(where + "frame index " + std::to_string(idx) + " out of range");
    }
    if (i > 0 && idx <= frame_indices_[i - 1]) {
      throw ValidationError(where + "frame indices must be strictly increasing");
    }
  }
  timestamps_ms_.reserve(frame_indices_.size());
  for (const FrameIndex idx : frame_indices_) {
    timestamps_ms_.push_back(timestamp_ms(idx, meta_.native_fps()));
  }
}

namespace {

void check_indices(const std::vector<FrameIndex>& indices, const char* what) {
  if (indices.empty()) throw ValidationError(std::string(what) + ": must have at least one row");
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] < 0) throw ValidationError(std::string(what) + ": negative frame index");
    if (i > 0 && indices[i] <= indices[i - 1]) {
      throw ValidationError(std::string(what) + ": source indices must be strictly increasing");
    }
  }
}

}  // namespace

EmbeddingMatrix::EmbeddingMatrix(std::vector<FrameIndex> source_indices, std::size_t dim,
                                 std::vector<float> data)
    : source_indices_(std::move(source_indices)), dim_(dim), data_(std::move(data)) {
  check_indices(source_indices_, "embedding matrix");
  if (dim_ < 1) throw ValidationError("embedding matrix: dimension must be >= 1");
  if (data_.size() != source_indices_.size() * dim_) {
    throw ValidationError("embedding matrix: data size does not match n x d");
  }
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (!std::isfinite(data_[i])) {
      throw ValidationError("embedding matrix: non-finite value in row " +
                            std::to_string(i / dim_));
    }
  }
}

ScoreVector::ScoreVector(std::vector<FrameIndex> source_indices, std::vector<float> scores)
    : source_indices_(std::move(source_indices)), scores_(std::move(scores)) {
  check_indices(source_indices_, "score vector");
  if (scores_.size() != source_indices_.size()) {
    throw ValidationError("score vector: score count does not match index count");
  }
  for (std::size_t i = 0; i < scores_.size(); ++i) {
    if (!std::isfinite(scores_[i])) {
      throw ValidationError("score vector: non-finite score at position " + std::to_string(i));
    }
  }
}

}  // namespace framepick
