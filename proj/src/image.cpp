#include "lcfg/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "file_util.hpp"
#include "lcfg/error.hpp"

namespace lcfg {

ImageShape parse_image_shape(const std::string& text) {
  ImageShape s;
  int consumed = 0;
  if (std::sscanf(text.c_str(), "%dx%dx%d%n", &s.height, &s.width, &s.channels, &consumed) == 3 &&
      consumed == static_cast<int>(text.size())) {
  } else if (std::sscanf(text.c_str(), "%dx%d%n", &s.height, &s.width, &consumed) == 2 &&
             consumed == static_cast<int>(text.size())) {
    s.channels = 1;
  } else {
    throw DomainError("image shape must look like HxWxC, got \"" + text + "\"");
  }
  if (s.height <= 0 || s.width <= 0 || (s.channels != 1 && s.channels != 3))
    throw DomainError("image shape needs positive H, W and C in {1, 3}");
  return s;
}

std::string encode_netpbm(const Vector& v, const ImageShape& shape, std::optional<PixelRange> range) {
  if (v.size() != shape.size())
    throw ShapeError("cannot reshape vector of length " + std::to_string(v.size()) + " to " +
                     std::to_string(shape.height) + "x" + std::to_string(shape.width) + "x" +
                     std::to_string(shape.channels));
  double lo, hi;
  if (range) {
    lo = range->lo;
    hi = range->hi;
  } else {
    lo = v.minCoeff();
    hi = v.maxCoeff();
  }
  std::string out = (shape.channels == 3 ? "P6\n" : "P5\n") + std::to_string(shape.width) + " " +
                    std::to_string(shape.height) + "\n255\n";
  const std::size_t header = out.size();
  out.resize(header + static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    double t = 0.5;
    if (hi > lo) t = (std::clamp(v(i), lo, hi) - lo) / (hi - lo);
    const long px = std::lround(t * 255.0);
    out[header + static_cast<std::size_t>(i)] = static_cast<char>(static_cast<unsigned char>(std::clamp(px, 0L, 255L)));
  }
  return out;
}

void write_netpbm(const std::filesystem::path& path, const Vector& v, const ImageShape& shape,
                  std::optional<PixelRange> range) {
  detail::write_file_atomic(path, encode_netpbm(v, shape, range));
}

}  // namespace lcfg
