#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "lcfg/error.hpp"

namespace lcfg::detail {

static_assert(std::endian::native == std::endian::little,
              "binary formats are written in host order and require a little-endian host");

std::vector<char> read_file(const std::filesystem::path& path);

/// Writes to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

class ByteWriter {
 public:
  void raw(const void* p, std::size_t n) {
    const auto* c = static_cast<const char*>(p);
    buf_.append(c, n);
  }
  template <class T>
  void put(T v) {
    raw(&v, sizeof(T));
  }
  const std::string& bytes() const { return buf_; }

 private:
  std::string buf_;
};

class ByteReader {
 public:
  explicit ByteReader(const std::vector<char>& data) : data_(data) {}

  std::size_t offset() const { return pos_; }
  std::size_t remaining() const { return data_.size() - pos_; }

  void expect_magic(std::string_view magic) {
    if (remaining() < magic.size() || std::memcmp(data_.data() + pos_, magic.data(), magic.size()) != 0)
      throw FormatError("bad magic, expected \"" + std::string(magic) + "\"", pos_);
    pos_ += magic.size();
  }

  template <class T>
  T get(const char* what) {
    if (remaining() < sizeof(T)) throw FormatError(std::string("truncated file while reading ") + what, pos_);
    T v;
    std::memcpy(&v, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }

  void get_doubles(double* out, std::size_t count, const char* what) {
    if (remaining() / sizeof(double) < count)
      throw FormatError(std::string("truncated file while reading ") + what, pos_);
    std::memcpy(out, data_.data() + pos_, count * sizeof(double));
    pos_ += count * sizeof(double);
  }

 private:
  const std::vector<char>& data_;
  std::size_t pos_ = 0;
};

}  // namespace lcfg::detail
