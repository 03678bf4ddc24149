#pragma once

#include <memory>
#include <string_view>
#include <vector>

#include "framepick/eval/adapter.hpp"
#include "framepick/eval/dataset.hpp"

namespace framepick::eval {

inline constexpr std::string_view kRefusal = "I cannot tell.";

/// Built-in deterministic adapters selected by --mock:
///   constant:X     always answers the letter X
///   hash           a letter chosen by hashing the prompt and image list
///   oracle         the item's correct letter
///   oracle-min:K   the correct letter when at least K images are supplied,
///                  otherwise a refusal
/// The oracles identify items by prompt and video id (parsed from the image
/// file names), so the dataset must not repeat a question on one video with
/// different answers. Throws ConfigError on an unknown spec.
std::unique_ptr<MockAdapter> make_builtin_mock(std::string_view spec,
                                               const std::vector<QaItem>& items);

/// Video id encoded in a frame image name `<video_id>_<index>.png`.
std::string video_id_from_image(std::string_view path);

}  // namespace framepick::eval
