#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "lcfg/stats.hpp"

namespace lcfg {

struct ImageShape {
  int height = 0;
  int width = 0;
  int channels = 0;  // 1 (PGM) or 3 (PPM)

  Eigen::Index size() const { return static_cast<Eigen::Index>(height) * width * channels; }
};

/// Parses "HxWxC" (C defaults to 1 for "HxW").
ImageShape parse_image_shape(const std::string& text);

struct PixelRange {
  double lo;
  double hi;
};

/// Netpbm bytes for a vector laid out height x width x channels (channel fastest).
/// Without a fixed range the vector is mapped affinely min -> 0, max -> 255 (constant -> 128);
/// with one, values are clamped to [lo, hi] first. Channels 3 -> P6, 1 -> P5.
std::string encode_netpbm(const Vector& v, const ImageShape& shape, std::optional<PixelRange> range = std::nullopt);

void write_netpbm(const std::filesystem::path& path, const Vector& v, const ImageShape& shape,
                  std::optional<PixelRange> range = std::nullopt);

}  // namespace lcfg
