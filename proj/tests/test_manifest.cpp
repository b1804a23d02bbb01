#include "doctest.h"

#include <random>

#include "avguard/manifest.hpp"

using namespace avguard;

namespace {

const char* kMinimalXml = R"(<?xml version="1.0" encoding="UTF-8"?>
<avapp id="monitor_app" category="diagnostics">
  <purpose>monitor</purpose>
  <circumstances><tag>any</tag></circumstances>
  <resource name="vehicle_report" direction="subscribe" exclusive="false">
    <purpose>monitor</purpose>
  </resource>
</avapp>
)";

const char* kPathFollowerXml = R"(<avapp id="path_follower" category="driving">
  <purpose>trajectory following along a preset path</purpose>
  <circumstances><tag>test_facility</tag></circumstances>
  <resource name="vehicle_report" direction="subscribe" exclusive="false">
    <purpose>monitor the vehicle state update</purpose>
  </resource>
  <resource name="steering" direction="control" exclusive="true">
    <purpose>steering wheel angle adjustment</purpose>
  </resource>
  <resource name="throttle" direction="control" exclusive="true">
    <purpose>emergency stop</purpose>
  </resource>
</avapp>
)";

AppManifest path_follower() { return parse_manifest(kPathFollowerXml); }

ResourceRequest control(ResourceId r, bool exclusive) {
  return ResourceRequest{r, Direction::control, "ctl", exclusive};
}

// Independent oracle: pairwise overlap check over all resource pairs.
bool conflict_oracle(const AppManifest& a, const AppManifest& b) {
  for (const auto& ra : a.resources)
    for (const auto& rb : b.resources)
      if (ra.resource == rb.resource && ra.direction == Direction::control &&
          rb.direction == Direction::control && (ra.exclusive || rb.exclusive))
        return true;
  return false;
}

AppManifest random_manifest(std::mt19937_64& rng, const std::string& id) {
  AppManifest m;
  m.app_id = id;
  m.app_purpose = "purpose <" + std::to_string(rng() % 1000) + "> & more";
  m.category = static_cast<AppCategory>(rng() % 3);
  int ntags = 1 + rng() % 2;
  for (int i = 0; i < ntags; ++i)
    m.allowable_circumstances.insert(static_cast<CircumstanceTag>(rng() % 4));
  int nres = rng() % 5;
  for (int i = 0; i < nres; ++i) {
    ResourceRequest r;
    r.resource = static_cast<ResourceId>(rng() % 11);
    r.direction = (rng() % 2) ? Direction::control : Direction::subscribe;
    r.exclusive = rng() % 2;
    r.purpose = "res purpose " + std::to_string(rng() % 100);
    m.resources.push_back(r);
  }
  return m;
}

}  // namespace

TEST_CASE("minimal manifest parses") {
  AppManifest m = parse_manifest(kMinimalXml);
  CHECK(m.app_id == "monitor_app");
  CHECK(m.category == AppCategory::diagnostics);
  CHECK(m.resources.size() == 1);
  CHECK(m.resources[0].resource == ResourceId::vehicle_report);
  CHECK(m.resources[0].direction == Direction::subscribe);
  CHECK(m.resources[0].purpose == "monitor");
  CHECK(m.allowable_circumstances ==
        std::set<CircumstanceTag>{CircumstanceTag::any});
}

TEST_CASE("path follower manifest parses") {
  AppManifest m = path_follower();
  CHECK(m.app_id == "path_follower");
  CHECK(m.category == AppCategory::driving);
  REQUIRE(m.resources.size() == 3);
  CHECK(m.resources[1].resource == ResourceId::steering);
  CHECK(m.resources[1].exclusive);
  CHECK(m.resources[2].resource == ResourceId::throttle);
  CHECK(m.resources[2].exclusive);
  CHECK(m.allowable_circumstances.count(CircumstanceTag::test_facility) == 1);
  CHECK(validate_manifest(m).empty());
}

TEST_CASE("unknown resource name is rejected") {
  std::string bad = kMinimalXml;
  auto pos = bad.find("vehicle_report");
  bad.replace(pos, 14, "lidarX");
  try {
    parse_manifest(bad);
    FAIL("expected UnknownResource");
  } catch (const AvError& e) {
    CHECK(e.code() == ErrorCode::UnknownResource);
    CHECK(std::string(e.what()).find("lidarX") != std::string::npos);
  }
}

TEST_CASE("closed schema rejects unknown elements and attributes") {
  std::string extra_el = kMinimalXml;
  extra_el.insert(extra_el.find("</avapp>"), "<telemetry>on</telemetry>\n");
  CHECK_THROWS_WITH_AS(parse_manifest(extra_el), doctest::Contains("telemetry"),
                       AvError);

  std::string extra_attr = kMinimalXml;
  extra_attr.replace(extra_attr.find("category"), 8, "flavor");
  CHECK_THROWS_AS(parse_manifest(extra_attr), AvError);
}

TEST_CASE("missing fields are reported with the element") {
  const char* no_purpose = R"(<avapp id="x" category="diagnostics">
  <circumstances><tag>any</tag></circumstances>
</avapp>)";
  try {
    parse_manifest(no_purpose);
    FAIL("expected MissingField");
  } catch (const AvError& e) {
    CHECK(e.code() == ErrorCode::MissingField);
  }
}

TEST_CASE("malformed xml carries a line number") {
  try {
    parse_manifest("<avapp id=\"x\" category=\"driving\">\n  <purpose>p</purpose\n");
    FAIL("expected MalformedXml");
  } catch (const AvError& e) {
    CHECK(e.code() == ErrorCode::MalformedXml);
    CHECK(std::string(e.what()).find("line") != std::string::npos);
  }
}

TEST_CASE("validate: driving app with no circumstances") {
  AppManifest m = path_follower();
  m.allowable_circumstances.clear();
  auto findings = validate_manifest(m);
  REQUIRE(findings.size() == 1);
  CHECK(findings[0].rule == "circumstances_required");
}

TEST_CASE("validate: duplicate (steering, control)") {
  AppManifest m = path_follower();
  m.resources.push_back(control(ResourceId::steering, false));
  auto findings = validate_manifest(m);
  REQUIRE(findings.size() == 1);
  CHECK(findings[0].rule == "duplicate_resource");
}

TEST_CASE("validate: direction restrictions") {
  AppManifest m = path_follower();
  m.resources.push_back(control(ResourceId::traffic_signal, false));
  m.resources.push_back(
      ResourceRequest{ResourceId::network, Direction::subscribe, "p", false});
  auto findings = validate_manifest(m);
  REQUIRE(findings.size() == 2);
  CHECK(findings[0].rule == "invalid_direction");
  CHECK(findings[1].rule == "invalid_direction");
}

TEST_CASE("validate: 'any' must stand alone") {
  AppManifest m = path_follower();
  m.allowable_circumstances.insert(CircumstanceTag::any);
  auto findings = validate_manifest(m);
  REQUIRE(findings.size() == 1);
  CHECK(findings[0].rule == "circumstance_any_alone");
}

TEST_CASE("validate is pure and order-stable") {
  AppManifest m = path_follower();
  m.app_id.clear();
  m.resources[0].purpose.clear();
  auto a = validate_manifest(m);
  auto b = validate_manifest(m);
  CHECK(a == b);
  for (size_t i = 1; i < a.size(); ++i) CHECK(a[i - 1].path <= a[i].path);
}

TEST_CASE("conflicts: two exclusive steering apps") {
  AppManifest cruise;
  cruise.app_id = "cruise";
  cruise.category = AppCategory::driving;
  cruise.allowable_circumstances = {CircumstanceTag::highway};
  cruise.resources = {control(ResourceId::steering, true)};

  auto conflicts = detect_conflicts({path_follower()}, cruise);
  REQUIRE(conflicts.size() == 1);
  CHECK(conflicts[0].resource == ResourceId::steering);
  CHECK(conflicts[0].kind == ConflictKind::exclusive_vs_exclusive);
  CHECK(conflicts[0].apps.first != conflicts[0].apps.second);
}

TEST_CASE("conflicts: exclusive vs plain control") {
  AppManifest a;
  a.app_id = "a";
  a.resources = {control(ResourceId::throttle, true)};
  AppManifest b;
  b.app_id = "b";
  b.resources = {control(ResourceId::throttle, false)};
  auto conflicts = detect_conflicts({a}, b);
  REQUIRE(conflicts.size() == 1);
  CHECK(conflicts[0].kind == ConflictKind::exclusive_vs_any);
}

TEST_CASE("conflicts: empty installed set") {
  CHECK(detect_conflicts({}, path_follower()).empty());
}

TEST_CASE("conflicts: subscribers never conflict") {
  AppManifest a;
  a.app_id = "a";
  a.resources = {ResourceRequest{ResourceId::steering, Direction::subscribe, "p", true}};
  AppManifest b;
  b.app_id = "b";
  b.resources = {control(ResourceId::steering, true)};
  CHECK(detect_conflicts({a}, b).empty());
}

TEST_CASE("conflicts: duplicate app id") {
  CHECK_THROWS_AS(detect_conflicts({path_follower()}, path_follower()), AvError);
}

TEST_CASE("conflict detection agrees with brute-force overlap oracle and is symmetric") {
  std::mt19937_64 rng(20260810);
  for (int round = 0; round < 300; ++round) {
    AppManifest a = random_manifest(rng, "a");
    AppManifest b = random_manifest(rng, "b");
    auto ab = detect_conflicts({a}, b);
    auto ba = detect_conflicts({b}, a);
    CHECK(ab.empty() == ba.empty());
    CHECK(!ab.empty() == conflict_oracle(a, b));
    for (size_t i = 0; i < ab.size() && i < ba.size(); ++i) {
      CHECK(ab[i].apps.first == ba[i].apps.second);
      CHECK(ab[i].apps.second == ba[i].apps.first);
    }
  }
}

TEST_CASE("serialize/parse round trip over generated manifests") {
  std::mt19937_64 rng(42);
  for (int round = 0; round < 200; ++round) {
    AppManifest m = random_manifest(rng, "app_" + std::to_string(round));
    AppManifest back = parse_manifest(serialize_manifest(m));
    CHECK(back == m);
  }
}
