#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace electrend {

std::string_view version();

/// Provenance record written beside every run's outputs. Holds no wall-clock time,
/// so identical runs produce identical manifests.
///
///   # electrend run manifest
///   manifest_version = 1
///   tool_version = 0.1.0
///   subcommand = trend
///   input.corpus = data.jsonl
///   param.window = 14
///   ...
class RunManifest {
 public:
  static constexpr int kVersion = 1;

  explicit RunManifest(std::string subcommand = {});

  const std::string& subcommand() const noexcept { return subcommand_; }
  void add_input(std::string_view name, const std::filesystem::path& path);
  void add_param(std::string_view name, std::string value);
  void add_output(std::string_view name, const std::filesystem::path& path);
  void set_origin(std::string date) { origin_ = std::move(date); }
  void set_corpus_digest(std::string sha256_hex) { digest_ = std::move(sha256_hex); }

  const std::vector<std::pair<std::string, std::string>>& inputs() const { return inputs_; }
  const std::vector<std::pair<std::string, std::string>>& params() const { return params_; }
  const std::vector<std::pair<std::string, std::string>>& outputs() const { return outputs_; }
  std::optional<std::string> param(std::string_view name) const;
  const std::optional<std::string>& origin() const { return origin_; }
  const std::optional<std::string>& corpus_digest() const { return digest_; }

  void write(std::ostream& out) const;
  /// Atomic write.
  void save(const std::filesystem::path& path) const;
  /// Throws DataError on an unknown format or version.
  static RunManifest parse(std::istream& in);
  static RunManifest load(const std::filesystem::path& path);

 private:
  std::string subcommand_;
  std::string tool_version_;
  std::vector<std::pair<std::string, std::string>> inputs_;
  std::vector<std::pair<std::string, std::string>> params_;
  std::vector<std::pair<std::string, std::string>> outputs_;
  std::optional<std::string> origin_;
  std::optional<std::string> digest_;
};

}  // namespace electrend
