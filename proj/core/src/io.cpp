#include "electrend/io.hpp"

#include <unistd.h>
#include <zlib.h>

#include <openssl/evp.h>

#include <array>
#include <system_error>

#include <fmt/format.h>

#include "electrend/errors.hpp"

namespace electrend::io {

struct LineReader::Impl {
  gzFile file = nullptr;
  std::array<char, 1 << 16> chunk{};
};

LineReader::LineReader(const std::filesystem::path& path) : impl_(std::make_unique<Impl>()) {
  // gzopen reads uncompressed files transparently, so one code path serves both
  impl_->file = gzopen(path.c_str(), "rb");
  if (impl_->file == nullptr) throw InputError("cannot open input '" + path.string() + "'");
  gzbuffer(impl_->file, 1 << 18);
}

LineReader::~LineReader() {
  if (impl_ && impl_->file != nullptr) gzclose(impl_->file);
}

bool LineReader::next(std::string& line) {
  line.clear();
  bool got_any = false;
  while (gzgets(impl_->file, impl_->chunk.data(), static_cast<int>(impl_->chunk.size())) !=
         nullptr) {
    got_any = true;
    std::string_view piece(impl_->chunk.data());
    const bool complete = !piece.empty() && piece.back() == '\n';
    if (complete) piece.remove_suffix(1);
    line.append(piece);
    if (complete) break;
  }
  if (!got_any) {
    int err = Z_OK;
    const char* msg = gzerror(impl_->file, &err);
    if (err != Z_OK && err != Z_STREAM_END) throw InputError(std::string("read error: ") + msg);
    return false;
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  ++line_no_;
  return true;
}

void for_each_line(const std::filesystem::path& path,
                   const std::function<void(std::string_view, std::size_t)>& fn) {
  LineReader reader(path);
  std::string line;
  while (reader.next(line)) fn(line, reader.line_number());
}

AtomicFile::AtomicFile(std::filesystem::path path)
    : path_(std::move(path)),
      tmp_(path_.string() + fmt::format(".tmp-{}", static_cast<long>(::getpid()))) {
  if (path_.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path_.parent_path(), ec);
  }
  out_.open(tmp_, std::ios::binary | std::ios::trunc);
  if (!out_) throw InputError("cannot write output '" + path_.string() + "'");
}

AtomicFile::~AtomicFile() {
  if (!committed_) {
    out_.close();
    std::error_code ec;
    std::filesystem::remove(tmp_, ec);
  }
}

void AtomicFile::commit() {
  out_.flush();
  if (!out_) throw InputError("write failed for '" + path_.string() + "'");
  out_.close();
  std::error_code ec;
  std::filesystem::rename(tmp_, path_, ec);
  if (ec) throw InputError("cannot rename output into place: " + path_.string());
  committed_ = true;
}

struct Sha256::Impl {
  EVP_MD_CTX* ctx = nullptr;
};

Sha256::Sha256() : impl_(std::make_unique<Impl>()) {
  impl_->ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(impl_->ctx, EVP_sha256(), nullptr);
}

Sha256::~Sha256() { EVP_MD_CTX_free(impl_->ctx); }

void Sha256::update(std::string_view bytes) {
  EVP_DigestUpdate(impl_->ctx, bytes.data(), bytes.size());
}

std::string Sha256::hex_digest() {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(impl_->ctx, md.data(), &len);
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", md[i]);
  return hex;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "' for hashing");
  Sha256 hasher;
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    hasher.update(std::string_view(buf.data(), static_cast<std::size_t>(in.gcount())));
  }
  return hasher.hex_digest();
}

std::string csv_field(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (const char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        current.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        current.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  fields.push_back(std::move(current));
  return fields;
}

}  // namespace electrend::io
