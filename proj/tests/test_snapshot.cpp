#include <cstdint>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "emberline/errors.hpp"
#include "emberline/snapshot.hpp"

using namespace emberline;

namespace {

FireLayer patterned(int h, int w, unsigned salt) {
  FireLayer fire(h, w);
  for (int i = 0; i < h * w; ++i) {
    fire[i] = static_cast<FireState>((static_cast<unsigned>(i) * 31u + salt) % 3u);
  }
  return fire;
}

}  // namespace

TEST_CASE("snapshot text is north-up") {
  FireLayer fire(2, 2, FireState::Unburned);
  fire(1, 0) = FireState::Burning;  // model row 1 = north row
  fire(0, 1) = FireState::Burned;
  const Snapshot snap{fire, 0, std::nullopt};
  CHECK(serialize_snapshot(snap) == "emberline-snapshot v1 2 2 0\nBU\nUX\n");
}

TEST_CASE("snapshot round-trips") {
  for (unsigned salt : {0u, 5u, 11u}) {
    Snapshot snap;
    snap.fire = patterned(4, 7, salt);
    snap.step = 1234567890123ull + salt;
    CHECK(parse_snapshot(serialize_snapshot(snap)) == snap);

    snap.agent = AgentMark{CellIndex{3, 6}, 17};
    CHECK(parse_snapshot(serialize_snapshot(snap)) == snap);
  }
  // 1x1 edge case
  Snapshot tiny{FireLayer(1, 1, FireState::Burning), 0, AgentMark{CellIndex{0, 0}, 0}};
  CHECK(parse_snapshot(serialize_snapshot(tiny)) == tiny);
}

TEST_CASE("snapshot parse tolerates CRLF and trailing blank lines") {
  const Snapshot snap = parse_snapshot("emberline-snapshot v1 2 3 9\r\nBUX\r\nUUU\r\n\r\n\n");
  CHECK(snap.step == 9);
  CHECK(snap.fire(1, 0) == FireState::Burning);
  CHECK(snap.fire(1, 2) == FireState::Burned);
  CHECK(snap.fire(0, 0) == FireState::Unburned);
  CHECK_FALSE(snap.agent.has_value());
}

TEST_CASE("snapshot parse errors") {
  CHECK_THROWS_AS(parse_snapshot(std::string("")), FileError);
  CHECK_THROWS_AS(parse_snapshot("fire-snapshot v1 2 2 0\nUU\nUU\n"), FileError);
  CHECK_THROWS_AS(parse_snapshot("emberline-snapshot v2 2 2 0\nUU\nUU\n"), FileError);
  CHECK_THROWS_AS(parse_snapshot("emberline-snapshot v1 2 2\nUU\nUU\n"), FileError);
  CHECK_THROWS_AS(parse_snapshot("emberline-snapshot v1 0 2 0\n"), FileError);
  CHECK_THROWS_AS(parse_snapshot("emberline-snapshot v1 -1 2 0\n"), FileError);
  CHECK_THROWS_AS(parse_snapshot("emberline-snapshot v1 two 2 0\nUU\nUU\n"), FileError);
  CHECK_THROWS_AS(parse_snapshot("emberline-snapshot v1 2 2 0\nUQ\nUU\n"), FileError);
  CHECK_THROWS_AS(parse_snapshot("emberline-snapshot v1 2 2 0\nU\nUU\n"), FileError);
  CHECK_THROWS_AS(parse_snapshot("emberline-snapshot v1 2 2 0\nUUU\nUU\n"), FileError);
  CHECK_THROWS_AS(parse_snapshot("emberline-snapshot v1 2 2 0\nUU\n"), FileError);
  CHECK_THROWS_AS(parse_snapshot("emberline-snapshot v1 2 2 0\nUU\nUU\nstuff\n"), FileError);
  // agent line issues: out of bounds, negative water, malformed, duplicated
  CHECK_THROWS_AS(parse_snapshot("emberline-snapshot v1 2 2 0\nUU\nUU\nagent 2 0 5\n"), FileError);
  CHECK_THROWS_AS(parse_snapshot("emberline-snapshot v1 2 2 0\nUU\nUU\nagent 0 0 -1\n"), FileError);
  CHECK_THROWS_AS(parse_snapshot("emberline-snapshot v1 2 2 0\nUU\nUU\nagent 0 0\n"), FileError);
  CHECK_THROWS_AS(
      parse_snapshot("emberline-snapshot v1 2 2 0\nUU\nUU\nagent 0 0 5\nagent 1 1 4\n"),
      FileError);
}

TEST_CASE("snapshot file io") {
  const auto dir = std::filesystem::temp_directory_path() / "emberline_snap_test";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "one.snap").string();

  Snapshot snap;
  snap.fire = patterned(3, 3, 2);
  snap.step = 42;
  snap.agent = AgentMark{CellIndex{1, 2}, 9};
  write_snapshot_file(snap, path);
  CHECK(read_snapshot_file(path) == snap);

  CHECK_THROWS_AS(read_snapshot_file((dir / "missing.snap").string()), FileError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("manifest set/get and ordering") {
  Manifest m;
  m.set("alpha", "1");
  m.set("beta", "two words here");
  m.set_int("gamma", -7);
  m.set_uint("delta", 18446744073709551615ull);
  m.set_double("epsilon", 0.1);
  m.set("alpha", "overwritten");  // updates in place, keeps position

  CHECK(m.serialize() ==
        "emberline-manifest v1\n"
        "alpha overwritten\n"
        "beta two words here\n"
        "gamma -7\n"
        "delta 18446744073709551615\n"
        "epsilon 0.1\n");

  CHECK(m.contains("beta"));
  CHECK_FALSE(m.contains("zeta"));
  CHECK(m.get("beta") == "two words here");
  CHECK(m.get_int("gamma") == -7);
  CHECK(m.get_uint("delta") == 18446744073709551615ull);
  CHECK(m.get_double("epsilon") == 0.1);
  CHECK(m.get_or("zeta", "fallback") == "fallback");
  CHECK(m.get_or("alpha", "fallback") == "overwritten");

  CHECK_THROWS_AS(m.get("zeta"), FileError);
  CHECK_THROWS_AS(m.get_int("beta"), FileError);
  CHECK_THROWS_AS(m.get_uint("gamma"), FileError);  // negative
  m.set("partial", "1.5x");
  CHECK_THROWS_AS(m.get_double("partial"), FileError);  // must consume the whole value
  CHECK_THROWS_AS(m.set("bad key", "v"), std::invalid_argument);
  CHECK_THROWS_AS(m.set("", "v"), std::invalid_argument);
  CHECK_THROWS_AS(m.set("key", "line\nbreak"), std::invalid_argument);
}

TEST_CASE("manifest parse") {
  const Manifest m = Manifest::parse(
      "emberline-manifest v1\n"
      "mode stochastic\n"
      "note a value with spaces\n"
      "\n"
      "empty\n"
      "steps 200\n");
  REQUIRE(m.entries().size() == 4);
  CHECK(m.entries()[0].first == "mode");
  CHECK(m.get("note") == "a value with spaces");
  CHECK(m.get("empty") == "");
  CHECK(m.get_int("steps") == 200);

  // serialize/parse is the identity on entries
  const Manifest again = Manifest::parse(m.serialize());
  CHECK(again.entries() == m.entries());

  CHECK_THROWS_AS(Manifest::parse(std::string("")), FileError);
  CHECK_THROWS_AS(Manifest::parse("manifest v1\n"), FileError);
  CHECK_THROWS_AS(Manifest::parse("emberline-manifest v2\n"), FileError);
  CHECK_THROWS_AS(Manifest::parse("emberline-manifest v1\nkey a\nkey b\n"), FileError);
  CHECK_THROWS_AS(Manifest::parse("emberline-manifest v1\n  indented x\n"), FileError);
}

TEST_CASE("manifest file io") {
  const auto dir = std::filesystem::temp_directory_path() / "emberline_manifest_test";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "run.txt").string();

  Manifest m;
  m.set("command", "run");
  m.set_double("p_base", 0.12);
  write_manifest_file(m, path);
  const Manifest back = read_manifest_file(path);
  CHECK(back.entries() == m.entries());

  CHECK_THROWS_AS(read_manifest_file((dir / "missing.txt").string()), FileError);
  std::filesystem::remove_all(dir);
}
