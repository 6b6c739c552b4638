#pragma once

#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace msp {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sequential binary writer with a private buffer. Failures (including a
/// full disk) surface as IoError carrying the path and `context`.
class BinaryWriter {
 public:
  BinaryWriter() = default;
  explicit BinaryWriter(const std::filesystem::path& path, std::string context = {},
                        std::size_t buffer_bytes = 1 << 16);
  ~BinaryWriter();
  BinaryWriter(BinaryWriter&& other) noexcept;
  BinaryWriter& operator=(BinaryWriter&& other) noexcept;
  BinaryWriter(const BinaryWriter&) = delete;
  BinaryWriter& operator=(const BinaryWriter&) = delete;

  void write(const void* data, std::size_t bytes);
  void put_u32(std::uint32_t v);
  void put_u64(std::uint64_t v);
  void flush();
  void close();

  bool is_open() const noexcept { return file_ != nullptr; }
  std::uint64_t bytes_written() const noexcept { return written_; }
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  [[noreturn]] void fail(const char* op) const;

  std::FILE* file_ = nullptr;
  std::filesystem::path path_;
  std::string context_;
  std::vector<std::uint8_t> buffer_;
  std::size_t used_ = 0;
  std::uint64_t written_ = 0;
};

class BinaryReader {
 public:
  BinaryReader() = default;
  explicit BinaryReader(const std::filesystem::path& path, std::size_t buffer_bytes = 1 << 16);
  ~BinaryReader();
  BinaryReader(BinaryReader&& other) noexcept;
  BinaryReader& operator=(BinaryReader&& other) noexcept;
  BinaryReader(const BinaryReader&) = delete;
  BinaryReader& operator=(const BinaryReader&) = delete;

  /// Reads exactly `bytes` or returns false at a clean end of file.
  /// A partial read throws IoError (truncated file).
  bool read(void* data, std::size_t bytes);
  bool get_u32(std::uint32_t& v);
  bool get_u64(std::uint64_t& v);

  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::size_t refill();

  std::FILE* file_ = nullptr;
  std::filesystem::path path_;
  std::vector<std::uint8_t> buffer_;
  std::size_t pos_ = 0;
  std::size_t end_ = 0;
};

inline void store_le64(std::uint8_t* p, std::uint64_t v) noexcept {
  for (int i = 0; i < 8; ++i) p[i] = static_cast<std::uint8_t>(v >> (8 * i));
}
inline void store_le32(std::uint8_t* p, std::uint32_t v) noexcept {
  for (int i = 0; i < 4; ++i) p[i] = static_cast<std::uint8_t>(v >> (8 * i));
}
inline std::uint64_t load_le64(const std::uint8_t* p) noexcept {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}
inline std::uint32_t load_le32(const std::uint8_t* p) noexcept {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

/// Creates `dir` if needed and checks that it accepts new files.
void ensure_writable_directory(const std::filesystem::path& dir);

/// Raises the soft open-file limit towards `wanted` (best effort).
void raise_open_file_limit(std::size_t wanted);

/// Peak resident set size of this process in bytes (0 when unavailable).
std::uint64_t peak_rss_bytes();

}  // namespace msp
