#include "electrend/manifest.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include <fmt/format.h>

#include "electrend/errors.hpp"
#include "electrend/io.hpp"

namespace electrend {

namespace {

constexpr std::string_view kHeader = "# electrend run manifest";

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

// Values are single-line; embedded newlines would corrupt the format.
std::string one_line(std::string value) {
  for (auto& c : value) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return value;
}

}  // namespace

std::string_view version() { return ELECTREND_VERSION; }

RunManifest::RunManifest(std::string subcommand)
    : subcommand_(std::move(subcommand)), tool_version_(ELECTREND_VERSION) {}

void RunManifest::add_input(std::string_view name, const std::filesystem::path& path) {
  inputs_.emplace_back(name, one_line(path.string()));
}

void RunManifest::add_param(std::string_view name, std::string value) {
  params_.emplace_back(name, one_line(std::move(value)));
}

void RunManifest::add_output(std::string_view name, const std::filesystem::path& path) {
  outputs_.emplace_back(name, one_line(path.string()));
}

std::optional<std::string> RunManifest::param(std::string_view name) const {
  for (const auto& [k, v] : params_) {
    if (k == name) return v;
  }
  return std::nullopt;
}

void RunManifest::write(std::ostream& out) const {
  out << kHeader << '\n';
  out << fmt::format("manifest_version = {}\n", kVersion);
  out << fmt::format("tool_version = {}\n", tool_version_);
  out << fmt::format("subcommand = {}\n", subcommand_);
  for (const auto& [k, v] : inputs_) out << fmt::format("input.{} = {}\n", k, v);
  for (const auto& [k, v] : params_) out << fmt::format("param.{} = {}\n", k, v);
  if (origin_) out << fmt::format("origin_date = {}\n", *origin_);
  if (digest_) out << fmt::format("corpus_digest = sha256:{}\n", *digest_);
  for (const auto& [k, v] : outputs_) out << fmt::format("output.{} = {}\n", k, v);
}

void RunManifest::save(const std::filesystem::path& path) const {
  io::AtomicFile file(path);
  write(file.stream());
  file.commit();
}

RunManifest RunManifest::parse(std::istream& in) {
  RunManifest m;
  std::string line;
  if (!std::getline(in, line) || trim(line) != kHeader) {
    throw DataError("not an electrend run manifest");
  }
  bool versioned = false;
  while (std::getline(in, line)) {
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find(" = ");
    if (eq == std::string_view::npos) throw DataError(fmt::format("bad manifest line '{}'", t));
    const std::string key(t.substr(0, eq));
    std::string value(t.substr(eq + 3));
    auto suffix = [&](std::string_view prefix) -> std::optional<std::string> {
      if (key.starts_with(prefix)) return key.substr(prefix.size());
      return std::nullopt;
    };
    if (key == "manifest_version") {
      if (value != std::to_string(kVersion)) {
        throw DataError(fmt::format("unsupported manifest version {}", value));
      }
      versioned = true;
    } else if (key == "tool_version") {
      m.tool_version_ = value;
    } else if (key == "subcommand") {
      m.subcommand_ = value;
    } else if (key == "origin_date") {
      m.origin_ = value;
    } else if (key == "corpus_digest") {
      if (!value.starts_with("sha256:")) throw DataError("corpus_digest must be sha256:<hex>");
      m.digest_ = value.substr(7);
    } else if (auto n = suffix("input.")) {
      m.inputs_.emplace_back(*n, value);
    } else if (auto n = suffix("param.")) {
      m.params_.emplace_back(*n, value);
    } else if (auto n = suffix("output.")) {
      m.outputs_.emplace_back(*n, value);
    } else {
      throw DataError(fmt::format("unknown manifest key '{}'", key));
    }
  }
  if (!versioned) throw DataError("manifest has no manifest_version");
  return m;
}

RunManifest RunManifest::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open manifest '" + path.string() + "'");
  return parse(in);
}

}  // namespace electrend
