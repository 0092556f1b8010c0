#include "emberline/snapshot.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "emberline/errors.hpp"
#include "emberline/geodata.hpp"

namespace emberline {

namespace {

char state_char(FireState s) {
  switch (s) {
    case FireState::Unburned: return 'U';
    case FireState::Burning: return 'B';
    case FireState::Burned: return 'X';
  }
  return '?';
}

FireState state_of_char(char c) {
  switch (c) {
    case 'U': return FireState::Unburned;
    case 'B': return FireState::Burning;
    case 'X': return FireState::Burned;
    default:
      throw FileError(std::string("snapshot: invalid fire-state character '") + c + "'");
  }
}

template <class T>
T parse_integer(const std::string& tok, const char* what) {
  T v{};
  const char* b = tok.data();
  const char* e = b + tok.size();
  const auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || p != e) {
    throw FileError(std::string("snapshot: invalid ") + what + " '" + tok + "'");
  }
  return v;
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream iss(line);
  std::string tok;
  while (iss >> tok) out.push_back(tok);
  return out;
}

}  // namespace

std::string serialize_snapshot(const Snapshot& snap) {
  const int h = snap.fire.height();
  const int w = snap.fire.width();
  std::string out = "emberline-snapshot v1 " + std::to_string(h) + " " + std::to_string(w) + " " +
                    std::to_string(snap.step) + "\n";
  out.reserve(out.size() + static_cast<std::size_t>(h) * (w + 1) + 32);
  for (int row = h - 1; row >= 0; --row) {
    for (int col = 0; col < w; ++col) out += state_char(snap.fire(row, col));
    out += '\n';
  }
  if (snap.agent.has_value()) {
    out += "agent " + std::to_string(snap.agent->cell.row) + " " +
           std::to_string(snap.agent->cell.col) + " " + std::to_string(snap.agent->water) + "\n";
  }
  return out;
}

Snapshot parse_snapshot(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FileError("snapshot: empty input");
  const auto header = split_ws(line);
  if (header.size() != 5 || header[0] != "emberline-snapshot" || header[1] != "v1") {
    throw FileError("snapshot: bad header '" + line + "'");
  }
  const int h = parse_integer<int>(header[2], "height");
  const int w = parse_integer<int>(header[3], "width");
  if (h < 1 || w < 1) throw FileError("snapshot: dimensions must be positive");
  Snapshot snap;
  snap.step = parse_integer<std::uint64_t>(header[4], "step");
  snap.fire = FireLayer(h, w);
  for (int row = h - 1; row >= 0; --row) {
    if (!std::getline(in, line)) {
      throw FileError("snapshot: expected " + std::to_string(h) + " rows, input ended early");
    }
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (static_cast<int>(line.size()) != w) {
      throw FileError("snapshot: row has " + std::to_string(line.size()) +
                      " cells, expected " + std::to_string(w));
    }
    for (int col = 0; col < w; ++col) snap.fire(row, col) = state_of_char(line[col]);
  }
  while (std::getline(in, line)) {
    const auto toks = split_ws(line);
    if (toks.empty()) continue;
    if (toks[0] == "agent" && toks.size() == 4 && !snap.agent.has_value()) {
      AgentMark mark;
      mark.cell.row = parse_integer<int>(toks[1], "agent row");
      mark.cell.col = parse_integer<int>(toks[2], "agent col");
      mark.water = parse_integer<int>(toks[3], "agent water");
      if (!snap.fire.in_bounds(mark.cell.row, mark.cell.col)) {
        throw FileError("snapshot: agent position out of bounds");
      }
      if (mark.water < 0) throw FileError("snapshot: negative agent water");
      snap.agent = mark;
      continue;
    }
    throw FileError("snapshot: unexpected trailing line '" + line + "'");
  }
  return snap;
}

Snapshot parse_snapshot(const std::string& text) {
  std::istringstream in(text);
  return parse_snapshot(in);
}

void write_snapshot_file(const Snapshot& snap, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FileError("cannot open file for writing: " + path);
  out << serialize_snapshot(snap);
  out.flush();
  if (!out) throw FileError("failed writing snapshot file: " + path);
}

Snapshot read_snapshot_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileError("cannot open snapshot file: " + path);
  try {
    return parse_snapshot(in);
  } catch (const FileError& e) {
    throw FileError(path + ": " + e.what());
  }
}

void Manifest::set(const std::string& key, std::string value) {
  if (key.empty() || key.find_first_of(" \t\r\n") != std::string::npos) {
    throw std::invalid_argument("Manifest: keys must be non-empty and whitespace-free");
  }
  if (value.find_first_of("\r\n") != std::string::npos) {
    throw std::invalid_argument("Manifest: values must be single-line");
  }
  for (auto& [k, v] : entries_) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  entries_.emplace_back(key, std::move(value));
}

void Manifest::set_int(const std::string& key, long long value) { set(key, std::to_string(value)); }
void Manifest::set_uint(const std::string& key, std::uint64_t value) { set(key, std::to_string(value)); }
void Manifest::set_double(const std::string& key, double value) { set(key, format_double_exact(value)); }

bool Manifest::contains(const std::string& key) const {
  for (const auto& [k, v] : entries_) {
    if (k == key) return true;
  }
  return false;
}

const std::string& Manifest::get(const std::string& key) const {
  for (const auto& [k, v] : entries_) {
    if (k == key) return v;
  }
  throw FileError("manifest: missing key '" + key + "'");
}

long long Manifest::get_int(const std::string& key) const {
  const std::string& v = get(key);
  long long out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw FileError("manifest: key '" + key + "' holds non-integer value '" + v + "'");
  }
  return out;
}

std::uint64_t Manifest::get_uint(const std::string& key) const {
  const std::string& v = get(key);
  std::uint64_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw FileError("manifest: key '" + key + "' holds non-integer value '" + v + "'");
  }
  return out;
}

double Manifest::get_double(const std::string& key) const {
  const std::string& v = get(key);
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw FileError("manifest: key '" + key + "' holds non-numeric value '" + v + "'");
  }
  return out;
}

std::string Manifest::get_or(const std::string& key, const std::string& fallback) const {
  return contains(key) ? get(key) : fallback;
}

std::string Manifest::serialize() const {
  std::string out = "emberline-manifest v1\n";
  for (const auto& [k, v] : entries_) {
    out += k;
    if (!v.empty()) {
      out += ' ';
      out += v;
    }
    out += '\n';
  }
  return out;
}

Manifest Manifest::parse(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FileError("manifest: empty input");
  {
    const auto toks = split_ws(line);
    if (toks.size() != 2 || toks[0] != "emberline-manifest" || toks[1] != "v1") {
      throw FileError("manifest: bad header '" + line + "'");
    }
  }
  Manifest m;
  while (std::getline(in, line)) {
    while (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t key_end = line.find_first_of(" \t");
    std::size_t key_start = line.find_first_not_of(" \t");
    if (key_start == std::string::npos) continue;  // blank line
    if (key_start != 0) throw FileError("manifest: indented line '" + line + "'");
    std::string key = line.substr(0, key_end);
    std::string value;
    if (key_end != std::string::npos) {
      const std::size_t value_start = line.find_first_not_of(" \t", key_end);
      if (value_start != std::string::npos) value = line.substr(value_start);
    }
    if (m.contains(key)) throw FileError("manifest: duplicate key '" + key + "'");
    m.set(key, std::move(value));
  }
  return m;
}

Manifest Manifest::parse(const std::string& text) {
  std::istringstream in(text);
  return parse(in);
}

void write_manifest_file(const Manifest& manifest, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FileError("cannot open file for writing: " + path);
  out << manifest.serialize();
  out.flush();
  if (!out) throw FileError("failed writing manifest file: " + path);
}

Manifest read_manifest_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileError("cannot open manifest file: " + path);
  try {
    return Manifest::parse(in);
  } catch (const FileError& e) {
    throw FileError(path + ": " + e.what());
  }
}

}  // namespace emberline
