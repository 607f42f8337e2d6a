#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gwshm/spectral.hpp"

namespace gwshm {

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double value);
/// Parses a full string as a double; throws ValidationError otherwise.
double parse_double(std::string_view text, std::string_view what);
std::size_t parse_size(std::string_view text, std::string_view what);
bool parse_bool(std::string_view text, std::string_view what);

std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

/// Line-oriented `key = value` file with `[section]` headers. `#` and `;`
/// start comments. Lines without `=` are kept verbatim as section rows, which
/// is how the manifest carries its CSV entry table.
class KeyValueFile {
 public:
  struct Section {
    std::string name;
    std::vector<std::pair<std::string, std::string>> values;
    std::vector<std::string> rows;
  };

  static KeyValueFile parse(std::string_view text, std::string_view origin = "<memory>");
  static KeyValueFile load(const std::filesystem::path& file);

  const Section* section(std::string_view name) const;
  std::optional<std::string> get(std::string_view section, std::string_view key) const;
  const std::vector<Section>& sections() const { return sections_; }

 private:
  std::vector<Section> sections_;
};

/// Named analysis range inside every signal of a dataset. With `automatic`
/// set, the start is found per signal from its energy envelope.
struct PacketWindow {
  std::string name;
  std::size_t start = 0;
  std::size_t length = 0;
  bool automatic = false;
  double threshold = 0.1;
};

struct ManifestEntry {
  std::string file;
  std::string label;
  std::string path_id;  // "actuator-sensor"
  std::string set_id;
};

struct DatasetManifest {
  std::filesystem::path base_dir;  // relative entry files resolve against this
  double sample_rate = 0.0;
  std::string baseline_label = "healthy";
  /// Actuation centre frequency and cycle count, used for the default band.
  std::optional<double> center_frequency;
  std::optional<double> n_cycles;
  std::vector<PacketWindow> windows;
  std::vector<ManifestEntry> entries;

  const PacketWindow& window(std::string_view name) const;
  std::filesystem::path resolve(const ManifestEntry& entry) const;
  /// Path ids in first-appearance order.
  std::vector<std::string> path_ids() const;
  /// Set ids used by a path, in first-appearance order.
  std::vector<std::string> set_ids(std::string_view path_id) const;
  bool is_baseline(const ManifestEntry& entry) const { return entry.label == baseline_label; }

  /// Structural checks that do not need the signal files.
  void validate() const;
};

DatasetManifest read_manifest(const std::filesystem::path& file);
DatasetManifest parse_manifest(std::string_view text, const std::filesystem::path& base_dir);
void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& file);
std::string format_manifest(const DatasetManifest& manifest);

/// One value per line after a two-line `sample_rate,<hz>` / `label,<text>` header.
Signal read_signal_csv(const std::filesystem::path& file);
void write_signal_csv(const Signal& signal, const std::filesystem::path& file);
std::string format_signal_csv(const Signal& signal);

/// Writes text with LF line endings, creating parent directories.
void write_text_file(const std::filesystem::path& file, std::string_view text);

}  // namespace gwshm
