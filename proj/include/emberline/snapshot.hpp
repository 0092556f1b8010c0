// Text serialization of fire layers (snapshots) and run configuration
// (manifests).
//
// Snapshot: `emberline-snapshot v1 H W step`, then H lines of W characters
// from {U, B, X}; the first line is the northmost row (model row H-1). An
// optional trailing line `agent row col water` marks the suppression agent.
//
// Manifest: `emberline-manifest v1`, then one `key value` line per entry in
// insertion order; values run to the end of the line.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "emberline/grid.hpp"

namespace emberline {

struct AgentMark {
  CellIndex cell;
  int water = 0;
  bool operator==(const AgentMark&) const = default;
};

struct Snapshot {
  FireLayer fire;
  std::uint64_t step = 0;
  std::optional<AgentMark> agent;
  bool operator==(const Snapshot&) const = default;
};

std::string serialize_snapshot(const Snapshot& snap);
Snapshot parse_snapshot(std::istream& in);
Snapshot parse_snapshot(const std::string& text);

void write_snapshot_file(const Snapshot& snap, const std::string& path);
Snapshot read_snapshot_file(const std::string& path);

// Ordered key-value run description; keys are unique and whitespace-free,
// values may contain interior spaces.
class Manifest {
 public:
  void set(const std::string& key, std::string value);
  void set_int(const std::string& key, long long value);
  void set_uint(const std::string& key, std::uint64_t value);
  void set_double(const std::string& key, double value);  // shortest exact form

  bool contains(const std::string& key) const;
  const std::string& get(const std::string& key) const;
  long long get_int(const std::string& key) const;
  std::uint64_t get_uint(const std::string& key) const;
  double get_double(const std::string& key) const;
  // Fallback-returning variants for optional keys.
  std::string get_or(const std::string& key, const std::string& fallback) const;

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

  std::string serialize() const;
  static Manifest parse(std::istream& in);
  static Manifest parse(const std::string& text);

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

void write_manifest_file(const Manifest& manifest, const std::string& path);
Manifest read_manifest_file(const std::string& path);

}  // namespace emberline
