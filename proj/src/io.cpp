#include "msp/io.hpp"

#include <sys/resource.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <utility>

namespace msp {

BinaryWriter::BinaryWriter(const std::filesystem::path& path, std::string context, std::size_t buffer_bytes)
    : path_(path), context_(std::move(context)), buffer_(buffer_bytes) {
  file_ = std::fopen(path.c_str(), "wb");
  if (file_ == nullptr) fail("open");
}

BinaryWriter::~BinaryWriter() {
  if (file_ != nullptr) {
    try {
      close();
    } catch (...) {
    }
  }
}

BinaryWriter::BinaryWriter(BinaryWriter&& other) noexcept { *this = std::move(other); }

BinaryWriter& BinaryWriter::operator=(BinaryWriter&& other) noexcept {
  if (this != &other) {
    if (file_ != nullptr) {
      try {
        close();
      } catch (...) {
      }
    }
    file_ = std::exchange(other.file_, nullptr);
    path_ = std::move(other.path_);
    context_ = std::move(other.context_);
    buffer_ = std::move(other.buffer_);
    used_ = std::exchange(other.used_, 0);
    written_ = std::exchange(other.written_, 0);
  }
  return *this;
}

void BinaryWriter::fail(const char* op) const {
  std::string msg = std::string("cannot ") + op + " " + path_.string();
  if (!context_.empty()) msg += " (" + context_ + ")";
  if (errno != 0) msg += ": " + std::string(std::strerror(errno));
  throw IoError(msg);
}

void BinaryWriter::write(const void* data, std::size_t bytes) {
  const auto* p = static_cast<const std::uint8_t*>(data);
  written_ += bytes;
  if (used_ + bytes > buffer_.size()) {
    flush();
    if (bytes >= buffer_.size()) {
      errno = 0;
      if (std::fwrite(p, 1, bytes, file_) != bytes) fail("write");
      return;
    }
  }
  std::memcpy(buffer_.data() + used_, p, bytes);
  used_ += bytes;
}

void BinaryWriter::put_u32(std::uint32_t v) {
  std::uint8_t b[4];
  store_le32(b, v);
  write(b, 4);
}

void BinaryWriter::put_u64(std::uint64_t v) {
  std::uint8_t b[8];
  store_le64(b, v);
  write(b, 8);
}

void BinaryWriter::flush() {
  if (file_ == nullptr) return;
  errno = 0;
  if (used_ > 0 && std::fwrite(buffer_.data(), 1, used_, file_) != used_) fail("write");
  used_ = 0;
  if (std::fflush(file_) != 0) fail("flush");
}

void BinaryWriter::close() {
  if (file_ == nullptr) return;
  flush();
  std::FILE* f = std::exchange(file_, nullptr);
  errno = 0;
  if (std::fclose(f) != 0) fail("close");
}

BinaryReader::BinaryReader(const std::filesystem::path& path, std::size_t buffer_bytes)
    : path_(path), buffer_(buffer_bytes) {
  file_ = std::fopen(path.c_str(), "rb");
  if (file_ == nullptr) throw IoError("cannot open " + path.string() + ": " + std::strerror(errno));
}

BinaryReader::~BinaryReader() {
  if (file_ != nullptr) std::fclose(file_);
}

BinaryReader::BinaryReader(BinaryReader&& other) noexcept { *this = std::move(other); }

BinaryReader& BinaryReader::operator=(BinaryReader&& other) noexcept {
  if (this != &other) {
    if (file_ != nullptr) std::fclose(file_);
    file_ = std::exchange(other.file_, nullptr);
    path_ = std::move(other.path_);
    buffer_ = std::move(other.buffer_);
    pos_ = std::exchange(other.pos_, 0);
    end_ = std::exchange(other.end_, 0);
  }
  return *this;
}

std::size_t BinaryReader::refill() {
  if (pos_ < end_) std::memmove(buffer_.data(), buffer_.data() + pos_, end_ - pos_);
  end_ -= pos_;
  pos_ = 0;
  const std::size_t got = std::fread(buffer_.data() + end_, 1, buffer_.size() - end_, file_);
  if (got == 0 && std::ferror(file_)) throw IoError("read error on " + path_.string());
  end_ += got;
  return got;
}

bool BinaryReader::read(void* data, std::size_t bytes) {
  auto* out = static_cast<std::uint8_t*>(data);
  std::size_t copied = 0;
  while (copied < bytes) {
    if (pos_ == end_ && refill() == 0) {
      if (copied == 0) return false;
      throw IoError("truncated record in " + path_.string());
    }
    const std::size_t n = std::min(bytes - copied, end_ - pos_);
    std::memcpy(out + copied, buffer_.data() + pos_, n);
    pos_ += n;
    copied += n;
  }
  return true;
}

bool BinaryReader::get_u32(std::uint32_t& v) {
  std::uint8_t b[4];
  if (!read(b, 4)) return false;
  v = load_le32(b);
  return true;
}

bool BinaryReader::get_u64(std::uint64_t& v) {
  std::uint8_t b[8];
  if (!read(b, 8)) return false;
  v = load_le64(b);
  return true;
}

void ensure_writable_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
  const auto probe = dir / ".write-probe";
  std::FILE* f = std::fopen(probe.c_str(), "wb");
  if (f == nullptr) throw IoError("directory not writable: " + dir.string() + ": " + std::strerror(errno));
  std::fclose(f);
  std::filesystem::remove(probe, ec);
}

void raise_open_file_limit(std::size_t wanted) {
  rlimit lim{};
  if (getrlimit(RLIMIT_NOFILE, &lim) != 0 || lim.rlim_cur >= wanted) return;
  lim.rlim_cur = std::min<rlim_t>(lim.rlim_max, static_cast<rlim_t>(wanted));
  setrlimit(RLIMIT_NOFILE, &lim);
}

std::uint64_t peak_rss_bytes() {
  rusage usage{};
  if (getrusage(RUSAGE_SELF, &usage) != 0) return 0;
  return static_cast<std::uint64_t>(usage.ru_maxrss) * 1024;
}

}  // namespace msp
