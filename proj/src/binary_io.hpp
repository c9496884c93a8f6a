#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "speedlearn/error.hpp"

namespace speedlearn::detail {

static_assert(std::endian::native == std::endian::little,
              "binary formats are written little-endian; add byte swapping for this target");

class ByteWriter {
 public:
  void raw(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    bytes_.insert(bytes_.end(), p, p + n);
  }
  template <typename T>
  void put(T v) {
    raw(&v, sizeof(T));
  }
  void str(std::string_view s) {
    put<std::uint16_t>(static_cast<std::uint16_t>(s.size()));
    raw(s.data(), s.size());
  }
  const std::vector<unsigned char>& bytes() const { return bytes_; }

 private:
  std::vector<unsigned char> bytes_;
};

// Reads past the end throw `short_code`.
class ByteReader {
 public:
  ByteReader(const unsigned char* data, std::size_t size, ErrorCode short_code)
      : data_(data), size_(size), code_(short_code) {}

  void raw(void* out, std::size_t n) {
    if (n > size_ - pos_) throw Error(code_, "unexpected end of file");
    std::memcpy(out, data_ + pos_, n);
    pos_ += n;
  }
  template <typename T>
  T get() {
    T v;
    raw(&v, sizeof(T));
    return v;
  }
  std::string str() {
    const auto n = get<std::uint16_t>();
    std::string s(n, '\0');
    raw(s.data(), n);
    return s;
  }
  std::size_t position() const { return pos_; }
  std::size_t remaining() const { return size_ - pos_; }

 private:
  const unsigned char* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
  ErrorCode code_;
};

std::uint32_t crc32(const unsigned char* data, std::size_t n);
std::vector<unsigned char> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::vector<unsigned char>& bytes);

}  // namespace speedlearn::detail
