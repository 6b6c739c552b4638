#include "msp/fastx.hpp"

#include <zlib.h>

#include <cstdio>

#include "msp/io.hpp"

namespace msp {

FastxReadStream::FastxReadStream(std::vector<std::filesystem::path> paths, std::size_t min_length, bool split_on_n)
    : paths_(std::move(paths)), min_length_(std::max<std::size_t>(1, min_length)), split_on_n_(split_on_n) {
  for (const auto& p : paths_) {
    if (!std::filesystem::exists(p)) throw IoError("input file not found: " + p.string());
  }
}

FastxReadStream::~FastxReadStream() {
  if (gz_) gzclose(static_cast<gzFile>(gz_));
}

void FastxReadStream::rewind() {
  if (gz_) gzclose(static_cast<gzFile>(gz_));
  gz_ = nullptr;
  file_index_ = 0;
  line_no_ = 0;
  has_pending_ = false;
  format_ = 0;
  queue_.clear();
  stats_ = {};
}

void FastxReadStream::fail(const std::string& message) const {
  const auto& path = paths_[file_index_ == 0 ? 0 : file_index_ - 1];
  throw IoError(path.string() + ":" + std::to_string(line_no_) + ": " + message);
}

bool FastxReadStream::open_next_file() {
  if (gz_) gzclose(static_cast<gzFile>(gz_));
  gz_ = nullptr;
  if (file_index_ == paths_.size()) return false;
  const auto& path = paths_[file_index_++];
  gzFile f = gzopen(path.c_str(), "rb");  // reads plain files transparently
  if (!f) throw IoError("cannot open " + path.string());
  gzbuffer(f, 1 << 17);
  gz_ = f;
  line_no_ = 0;
  has_pending_ = false;
  format_ = 0;
  return true;
}

bool FastxReadStream::read_line(std::string& line) {
  if (has_pending_) {
    has_pending_ = false;
    line.swap(pending_line_);
    return true;
  }
  line.clear();
  char buf[4096];
  auto* f = static_cast<gzFile>(gz_);
  bool any = false;
  while (gzgets(f, buf, sizeof buf) != nullptr) {
    any = true;
    line.append(buf);
    if (!line.empty() && line.back() == '\n') break;
  }
  if (!any) {
    int err = 0;
    const char* msg = gzerror(f, &err);
    if (err != Z_OK && err != Z_STREAM_END) fail(std::string("read error: ") + msg);
    return false;
  }
  ++line_no_;
  while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) line.pop_back();
  return true;
}

// Leaves the next record's concatenated sequence in `sequence`; false at the
// end of the current file.
bool FastxReadStream::next_record(std::string& sequence) {
  std::string line;
  do {
    if (!read_line(line)) return false;
  } while (line.empty());
  if (format_ == 0) {
    if (line[0] != '>' && line[0] != '@') fail("expected a FASTA '>' or FASTQ '@' header");
    format_ = line[0];
  }
  if (line[0] != format_) fail(std::string("expected a record header starting with '") + format_ + "'");
  sequence.clear();
  if (format_ == '>') {
    while (read_line(line)) {
      if (!line.empty() && line[0] == '>') {
        pending_line_.swap(line);
        has_pending_ = true;
        break;
      }
      sequence += line;
    }
    return true;
  }
  if (!read_line(sequence)) fail("truncated FASTQ record: missing sequence line");
  if (!read_line(line) || line.empty() || line[0] != '+') fail("malformed FASTQ record: missing '+' separator");
  if (!read_line(line)) fail("truncated FASTQ record: missing quality line");
  if (line.size() != sequence.size()) fail("FASTQ quality length differs from sequence length");
  return true;
}

bool FastxReadStream::next(PackedSequence& read) {
  std::string sequence;
  while (queue_.empty()) {
    if (!gz_ && !open_next_file()) return false;
    if (!next_record(sequence)) {
      if (!open_next_file()) return false;
      continue;
    }
    ++stats_.records;
    if (!split_on_n_) {
      try {
        PackedSequence packed = pack(sequence);
        if (packed.size() >= min_length_) {
          queue_.push_back(std::move(packed));
        } else {
          ++stats_.short_dropped;
        }
      } catch (const SequenceError& e) {
        fail(e.what());
      }
      continue;
    }
    const auto runs = split_acgt_runs(sequence);
    std::size_t kept = 0;
    for (auto run : runs) {
      kept += run.size();
      if (run.size() >= min_length_) {
        queue_.push_back(pack(run));
      } else {
        ++stats_.short_dropped;
      }
    }
    if (kept != sequence.size()) {
      ++stats_.split_records;
      stats_.ambiguous_bases += sequence.size() - kept;
    }
  }
  read = std::move(queue_.front());
  queue_.pop_front();
  ++stats_.reads;
  return true;
}

void write_fasta(const std::filesystem::path& path, const std::vector<std::string>& reads) {
  BinaryWriter out(path, "FASTA output");
  for (std::size_t i = 0; i < reads.size(); ++i) {
    const std::string header = ">read" + std::to_string(i + 1) + "\n";
    out.write(header.data(), header.size());
    out.write(reads[i].data(), reads[i].size());
    out.write("\n", 1);
  }
  out.close();
}

void write_fastq(const std::filesystem::path& path, const std::vector<std::string>& reads) {
  BinaryWriter out(path, "FASTQ output");
  for (std::size_t i = 0; i < reads.size(); ++i) {
    const std::string header = "@read" + std::to_string(i + 1) + "\n";
    out.write(header.data(), header.size());
    out.write(reads[i].data(), reads[i].size());
    out.write("\n+\n", 3);
    const std::string quality(reads[i].size(), 'I');
    out.write(quality.data(), quality.size());
    out.write("\n", 1);
  }
  out.close();
}

}  // namespace msp
