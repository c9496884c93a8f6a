#include "binary_io.hpp"

#include <fstream>
#include <iterator>

#include <zlib.h>

namespace speedlearn::detail {

std::uint32_t crc32(const unsigned char* data, std::size_t n) {
  return static_cast<std::uint32_t>(::crc32_z(::crc32(0L, Z_NULL, 0), data, n));
}

std::vector<unsigned char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, const std::vector<unsigned char>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIoFailure, "write failed for " + path.string());
}

}  // namespace speedlearn::detail
