#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "knnmt/common.hpp"

namespace knnmt::io {

static_assert(std::endian::native == std::endian::little,
              "serialization code assumes a little-endian host");

inline void write_bytes(std::ostream& out, const void* data, std::size_t n) {
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
  if (!out) throw IoError(IoError::Kind::WriteFailed, "write failed");
}

inline void write_u32(std::ostream& out, std::uint32_t v) { write_bytes(out, &v, 4); }
inline void write_u64(std::ostream& out, std::uint64_t v) { write_bytes(out, &v, 8); }

inline void write_f32_array(std::ostream& out, const float* data, std::size_t n) {
  write_bytes(out, data, n * sizeof(float));
}

inline void write_u32_array(std::ostream& out, const std::uint32_t* data, std::size_t n) {
  write_bytes(out, data, n * sizeof(std::uint32_t));
}

inline void read_bytes(std::istream& in, void* data, std::size_t n, const char* what) {
  in.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n) {
    throw IoError(IoError::Kind::Truncated,
                  std::string("truncated file while reading ") + what + ": expected " +
                      std::to_string(n) + " bytes, got " + std::to_string(in.gcount()));
  }
}

inline std::uint32_t read_u32(std::istream& in, const char* what) {
  std::uint32_t v = 0;
  read_bytes(in, &v, 4, what);
  return v;
}

inline std::uint64_t read_u64(std::istream& in, const char* what) {
  std::uint64_t v = 0;
  read_bytes(in, &v, 8, what);
  return v;
}

/// Verifies a fixed magic string at the current stream position.
inline void expect_magic(std::istream& in, const char* magic, const char* format_name) {
  const std::size_t n = std::strlen(magic);
  char buf[16] = {};
  in.read(buf, static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n || std::memcmp(buf, magic, n) != 0) {
    throw IoError(IoError::Kind::BadMagic,
                  std::string("bad magic: not a ") + format_name + " file (expected '" +
                      magic + "')");
  }
}

/// Remaining bytes between the current position and end of file.
inline std::uint64_t remaining_bytes(std::istream& in) {
  const auto pos = in.tellg();
  in.seekg(0, std::ios::end);
  const auto end = in.tellg();
  in.seekg(pos);
  return static_cast<std::uint64_t>(end - pos);
}

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(IoError::Kind::OpenFailed, "cannot open file: " + path.string());
  return in;
}

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(IoError::Kind::OpenFailed, "cannot open file for writing: " + path.string());
  return out;
}

}  // namespace knnmt::io
