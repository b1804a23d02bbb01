#ifndef AVGUARD_MANIFEST_HPP
#define AVGUARD_MANIFEST_HPP

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "avguard/errors.hpp"

namespace avguard {

// Closed vocabulary of bus/platform resources an app may request.
enum class ResourceId {
  vehicle_report,
  steering,
  throttle,
  brake,
  gear,
  engine,
  traffic_signal,
  lead_vehicle_report,
  location,
  network,
  storage,
};

enum class Direction { subscribe, control };

enum class CircumstanceTag { highway, urban, test_facility, clear_weather, any };

enum class AppCategory { driving, infotainment, diagnostics };

const char* resource_name(ResourceId r);
std::optional<ResourceId> resource_from_name(const std::string& name);
const char* direction_name(Direction d);
const char* circumstance_name(CircumstanceTag t);
std::optional<CircumstanceTag> circumstance_from_name(const std::string& name);
const char* category_name(AppCategory c);

// Actuators are the only resources a control request is meaningful for;
// network and storage are control-only platform resources.
bool is_actuator(ResourceId r);

struct ResourceRequest {
  ResourceId resource = ResourceId::vehicle_report;
  Direction direction = Direction::subscribe;
  std::string purpose;       // resource-level purpose statement
  bool exclusive = false;    // usage constraint

  bool operator==(const ResourceRequest&) const = default;
};

struct AppManifest {
  std::string app_id;
  std::string app_purpose;   // app-level purpose statement
  AppCategory category = AppCategory::driving;
  std::vector<ResourceRequest> resources;            // declaration order kept
  std::set<CircumstanceTag> allowable_circumstances;

  bool operator==(const AppManifest&) const = default;
};

enum class ConflictKind { exclusive_vs_any, exclusive_vs_exclusive };

struct ConflictFinding {
  ResourceId resource = ResourceId::steering;
  std::pair<std::string, std::string> apps;  // distinct app ids
  ConflictKind kind = ConflictKind::exclusive_vs_any;

  bool operator==(const ConflictFinding&) const = default;
};

// Parses the manifest XML document. The schema is closed: unknown elements,
// attributes, resource names, tags or categories are rejected.
// Throws AvError with code MalformedXml, UnknownResource or MissingField.
AppManifest parse_manifest(const std::string& xml_text);

// Canonical serialization; parse_manifest(serialize_manifest(m)) == m.
std::string serialize_manifest(const AppManifest& m);

// Checks manifest invariants. Returns a complete finding list sorted by
// field path (empty means valid). Never throws.
std::vector<Finding> validate_manifest(const AppManifest& m);

// Resource conflicts between a candidate and the installed set: one finding
// per resource where both sides request control and at least one side is
// exclusive. Subscribers never conflict. Throws DuplicateAppId.
std::vector<ConflictFinding> detect_conflicts(
    const std::vector<AppManifest>& installed, const AppManifest& candidate);

}  // namespace avguard

#endif  // AVGUARD_MANIFEST_HPP
