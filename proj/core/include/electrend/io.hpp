#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace electrend::io {

/// Reads newline-delimited text; files ending in ".gz" are decompressed.
/// Trailing '\r' is stripped. Throws InputError if the file cannot be opened.
class LineReader {
 public:
  explicit LineReader(const std::filesystem::path& path);
  ~LineReader();
  LineReader(const LineReader&) = delete;
  LineReader& operator=(const LineReader&) = delete;

  /// False at end of input.
  bool next(std::string& line);
  /// 1-based number of the line most recently returned.
  std::size_t line_number() const noexcept { return line_no_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::size_t line_no_ = 0;
};

void for_each_line(const std::filesystem::path& path,
                   const std::function<void(std::string_view line, std::size_t line_no)>& fn);

/// Writes to `<path>.tmp-<pid>` and renames over `path` on commit(). An uncommitted
/// file is removed on destruction, so failures never leave partial outputs.
class AtomicFile {
 public:
  explicit AtomicFile(std::filesystem::path path);
  ~AtomicFile();
  AtomicFile(const AtomicFile&) = delete;
  AtomicFile& operator=(const AtomicFile&) = delete;

  std::ostream& stream() { return out_; }
  const std::filesystem::path& path() const { return path_; }
  void commit();

 private:
  std::filesystem::path path_;
  std::filesystem::path tmp_;
  std::ofstream out_;
  bool committed_ = false;
};

/// Incremental SHA-256.
class Sha256 {
 public:
  Sha256();
  ~Sha256();
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  void update(std::string_view bytes);
  /// Lowercase hex digest; the hasher cannot be reused afterwards.
  std::string hex_digest();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

std::string sha256_file(const std::filesystem::path& path);

/// RFC 4180 quoting when the field contains a comma, quote or newline.
std::string csv_field(std::string_view field);
/// Splits one CSV line, honoring double-quoted fields.
std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace electrend::io
