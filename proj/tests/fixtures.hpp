#ifndef AVGUARD_TESTS_FIXTURES_HPP
#define AVGUARD_TESTS_FIXTURES_HPP

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "avguard/ir.hpp"

namespace fixtures {

inline std::string source_dir() { return AVGUARD_SOURCE_DIR; }

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

// Path-following app modeled on the paper's running example. The scan looks
// for the first waypoint (from startNum) within distance/heading tolerance;
// a match steers proportionally, no match triggers the "stop" branch, which
// in the faithful variant floors the throttle and in the corrected variant
// applies full brake.
inline std::string path_follower_ir(bool corrected,
                                    const std::vector<avguard::Waypoint>& inline_map,
                                    const std::string& asset_name = "") {
  std::ostringstream out;
  out << "app " << (corrected ? "path_follower_fixed" : "path_follower") << "\n";
  out << "global startNum 0\n";
  if (asset_name.empty()) {
    out << "table map\n";
    for (const auto& w : inline_map)
      out << "waypoint map " << w.x << " " << w.y << " " << w.heading << "\n";
  } else {
    out << "table map asset " << asset_name << "\n";
  }
  out << R"(
handler vehicle_report:
block entry:
  getg i startNum
  getg n map.length
  jmp scan

block scan:
  lt in_range i n
  br in_range check stop

block check:
  read px position.x
  read py position.y
  read ph position.heading
  lookup wx map i x
  lookup wy map i y
  lookup wh map i heading
  sub dx px wx
  sub dy py wy
  mul dx2 dx dx
  mul dy2 dy dy
  add d2 dx2 dy2
  sqrt distErr d2
  sub dh ph wh
  abs headingErr dh
  const maxDist 1.0
  const maxHead 0.5
  lt nearOk distErr maxDist
  lt headOk headingErr maxHead
  and onPath nearOk headOk
  br onPath steer advance

block advance:
  const one 1
  add i i one
  jmp scan

block steer:
  lookup swh map i sin_heading
  lookup cwh map i cos_heading
  mul t1 swh dx
  mul t2 cwh dy
  sub e t2 t1
  const k1 0.5
  const k2 1.0
  mul se k1 e
  mul sh k2 dh
  add s se sh
  const zero 0
  sub angle zero s
  publish steering_cmd angle=angle
  setg startNum i
  halt

block stop:
  const full 100
)";
  if (corrected)
    out << "  publish brake_cmd percent=full\n";
  else
    out << "  publish throttle_cmd percent=full\n";
  out << "  halt\n";
  return out.str();
}

inline std::vector<avguard::Waypoint> straight_path(int n, double spacing) {
  std::vector<avguard::Waypoint> pts;
  for (int i = 0; i < n; ++i)
    pts.push_back(avguard::Waypoint{i * spacing, 0.0, 0.0});
  return pts;
}

}  // namespace fixtures

#endif  // AVGUARD_TESTS_FIXTURES_HPP
