#include "gwshm/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "gwshm/errors.hpp"

namespace gwshm {
namespace fs = std::filesystem;

namespace {

constexpr std::string_view kEntriesHeader = "file,label,path_id,set_id";

std::string read_file(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot open '" + file.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read error on '" + file.string() + "'");
  return ss.str();
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    parts.emplace_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

double parse_double(std::string_view text, std::string_view what) {
  const std::string_view t = trim(text);
  double value = 0.0;
  const char* first = t.data();
  if (!t.empty() && t.front() == '+') ++first;
  const auto res = std::from_chars(first, t.data() + t.size(), value);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    throw ValidationError(std::string(what) + ": '" + std::string(text) + "' is not a number");
  }
  return value;
}

std::size_t parse_size(std::string_view text, std::string_view what) {
  const std::string_view t = trim(text);
  std::size_t value = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    throw ValidationError(std::string(what) + ": '" + std::string(text) +
                          "' is not a non-negative integer");
  }
  return value;
}

bool parse_bool(std::string_view text, std::string_view what) {
  const std::string t = lowercase(trim(text));
  if (t == "true" || t == "yes" || t == "on" || t == "1") return true;
  if (t == "false" || t == "no" || t == "off" || t == "0") return false;
  throw ValidationError(std::string(what) + ": '" + std::string(text) + "' is not a boolean");
}

KeyValueFile KeyValueFile::parse(std::string_view text, std::string_view origin) {
  KeyValueFile kv;
  kv.sections_.push_back(Section{});  // unnamed leading section
  std::size_t line_no = 0;
  bool raw_rows = false;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = text.find('\n', pos);
    std::string_view line = text.substr(pos, end == std::string_view::npos ? text.size() - pos : end - pos);
    pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;

    line = trim(line);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ValidationError(std::string(origin) + ":" + std::to_string(line_no) +
                              ": unterminated section header");
      }
      Section s;
      s.name = lowercase(trim(line.substr(1, line.size() - 2)));
      raw_rows = s.name == "entries";
      kv.sections_.push_back(std::move(s));
      continue;
    }
    Section& current = kv.sections_.back();
    if (line == kEntriesHeader) raw_rows = true;
    const std::size_t eq = line.find('=');
    if (raw_rows || eq == std::string_view::npos) {
      current.rows.emplace_back(line);
    } else {
      current.values.emplace_back(lowercase(trim(line.substr(0, eq))),
                                  std::string(trim(line.substr(eq + 1))));
    }
  }
  return kv;
}

KeyValueFile KeyValueFile::load(const fs::path& file) {
  return parse(read_file(file), file.string());
}

const KeyValueFile::Section* KeyValueFile::section(std::string_view name) const {
  const std::string n = lowercase(name);
  for (const auto& s : sections_) {
    if (s.name == n) return &s;
  }
  return nullptr;
}

std::optional<std::string> KeyValueFile::get(std::string_view section_name,
                                              std::string_view key) const {
  const Section* s = section(section_name);
  if (s == nullptr) return std::nullopt;
  const std::string k = lowercase(key);
  std::optional<std::string> found;
  for (const auto& [name, value] : s->values) {
    if (name == k) found = value;  // last assignment wins
  }
  return found;
}

const PacketWindow& DatasetManifest::window(std::string_view name) const {
  for (const auto& w : windows) {
    if (w.name == name) return w;
  }
  throw ValidationError("manifest defines no packet window named '" + std::string(name) + "'");
}

fs::path DatasetManifest::resolve(const ManifestEntry& entry) const {
  const fs::path p(entry.file);
  return p.is_absolute() ? p : base_dir / p;
}

std::vector<std::string> DatasetManifest::path_ids() const {
  std::vector<std::string> ids;
  for (const auto& e : entries) {
    if (std::find(ids.begin(), ids.end(), e.path_id) == ids.end()) ids.push_back(e.path_id);
  }
  return ids;
}

std::vector<std::string> DatasetManifest::set_ids(std::string_view path_id) const {
  std::vector<std::string> ids;
  for (const auto& e : entries) {
    if (e.path_id == path_id && std::find(ids.begin(), ids.end(), e.set_id) == ids.end()) {
      ids.push_back(e.set_id);
    }
  }
  return ids;
}

void DatasetManifest::validate() const {
  if (!(sample_rate > 0.0)) throw ValidationError("manifest: sample_rate must be positive");
  if (entries.empty()) throw ValidationError("manifest: no entries");
  for (const auto& path : path_ids()) {
    const bool has_baseline = std::any_of(entries.begin(), entries.end(), [&](const auto& e) {
      return e.path_id == path && is_baseline(e);
    });
    if (!has_baseline) {
      throw ValidationError("manifest: path '" + path + "' has no '" + baseline_label +
                            "' baseline entry");
    }
  }
  for (const auto& w : windows) {
    if (w.length == 0) throw ValidationError("manifest: window '" + w.name + "' has zero length");
  }
}

DatasetManifest parse_manifest(std::string_view text, const fs::path& base_dir) {
  const KeyValueFile kv = KeyValueFile::parse(text, "manifest");
  DatasetManifest m;
  m.base_dir = base_dir;

  if (auto v = kv.get("dataset", "sample_rate")) m.sample_rate = parse_double(*v, "sample_rate");
  if (auto v = kv.get("dataset", "baseline_label")) m.baseline_label = *v;
  if (auto v = kv.get("dataset", "center_frequency")) {
    m.center_frequency = parse_double(*v, "center_frequency");
  }
  if (auto v = kv.get("dataset", "n_cycles")) m.n_cycles = parse_double(*v, "n_cycles");

  if (const auto* windows = kv.section("windows")) {
    for (const auto& [name, value] : windows->values) {
      const auto parts = split(value, ',');
      PacketWindow w;
      w.name = name;
      if (!parts.empty() && lowercase(parts[0]) == "auto") {
        if (parts.size() < 2 || parts.size() > 3) {
          throw ValidationError("manifest: window '" + name + "' expects 'auto, length[, threshold]'");
        }
        w.automatic = true;
        w.length = parse_size(parts[1], "window length");
        if (parts.size() == 3) w.threshold = parse_double(parts[2], "window threshold");
      } else {
        if (parts.size() != 2) {
          throw ValidationError("manifest: window '" + name + "' expects 'start, length'");
        }
        w.start = parse_size(parts[0], "window start");
        w.length = parse_size(parts[1], "window length");
      }
      m.windows.push_back(std::move(w));
    }
  }

  bool header_seen = false;
  for (const auto& section : kv.sections()) {
    for (const auto& row : section.rows) {
      if (row == kEntriesHeader) {
        header_seen = true;
        continue;
      }
      if (!header_seen) {
        throw ValidationError("manifest: entry rows must follow the header '" +
                              std::string(kEntriesHeader) + "'");
      }
      const auto cols = split(row, ',');
      if (cols.size() != 4) {
        throw ValidationError("manifest: entry '" + row + "' must have 4 columns");
      }
      m.entries.push_back({cols[0], cols[1], cols[2], cols[3]});
    }
  }
  if (!header_seen) {
    throw ValidationError("manifest: missing entry table header '" + std::string(kEntriesHeader) +
                          "'");
  }
  m.validate();
  return m;
}

DatasetManifest read_manifest(const fs::path& file) {
  return parse_manifest(read_file(file), file.parent_path());
}

std::string format_manifest(const DatasetManifest& m) {
  std::ostringstream os;
  os << "[dataset]\n";
  os << "sample_rate = " << format_double(m.sample_rate) << "\n";
  os << "baseline_label = " << m.baseline_label << "\n";
  if (m.center_frequency) os << "center_frequency = " << format_double(*m.center_frequency) << "\n";
  if (m.n_cycles) os << "n_cycles = " << format_double(*m.n_cycles) << "\n";
  os << "\n[windows]\n";
  for (const auto& w : m.windows) {
    if (w.automatic) {
      os << w.name << " = auto, " << w.length << ", " << format_double(w.threshold) << "\n";
    } else {
      os << w.name << " = " << w.start << ", " << w.length << "\n";
    }
  }
  os << "\n[entries]\n" << kEntriesHeader << "\n";
  for (const auto& e : m.entries) {
    os << e.file << "," << e.label << "," << e.path_id << "," << e.set_id << "\n";
  }
  return os.str();
}

void write_manifest(const DatasetManifest& manifest, const fs::path& file) {
  write_text_file(file, format_manifest(manifest));
}

Signal read_signal_csv(const fs::path& file) {
  const std::string text = read_file(file);
  Signal s;
  bool have_rate = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t end = text.find('\n', pos);
    std::string_view line(text.data() + pos, (end == std::string::npos ? text.size() : end) - pos);
    pos = end == std::string::npos ? text.size() : end + 1;
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    if (line_no <= 2) {
      const auto comma = line.find(',');
      const std::string key = lowercase(trim(line.substr(0, comma)));
      const std::string_view value =
          comma == std::string_view::npos ? std::string_view{} : trim(line.substr(comma + 1));
      if (key == "sample_rate") {
        s.sample_rate = parse_double(value, file.string() + ": sample_rate");
        have_rate = true;
        continue;
      }
      if (key == "label") {
        s.label = std::string(value);
        continue;
      }
    }
    s.samples.push_back(parse_double(line, file.string() + ":" + std::to_string(line_no)));
  }
  if (!have_rate) throw ValidationError(file.string() + ": missing 'sample_rate,<hz>' header");
  s.validate();
  return s;
}

void write_signal_csv(const Signal& signal, const fs::path& file) {
  write_text_file(file, format_signal_csv(signal));
}

std::string format_signal_csv(const Signal& signal) {
  std::string out;
  out.reserve(signal.samples.size() * 24 + 64);
  out += "sample_rate," + format_double(signal.sample_rate) + "\n";
  out += "label," + signal.label + "\n";
  for (double v : signal.samples) {
    out += format_double(v);
    out += '\n';
  }
  return out;
}

void write_text_file(const fs::path& file, std::string_view text) {
  std::error_code ec;
  if (file.has_parent_path()) {
    fs::create_directories(file.parent_path(), ec);
    if (ec) {
      throw IoError("cannot create directory '" + file.parent_path().string() + "': " + ec.message());
    }
  }
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + file.string() + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write error on '" + file.string() + "'");
}

}  // namespace gwshm
