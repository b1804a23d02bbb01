#include "avguard/manifest.hpp"

#include <algorithm>
#include <array>
#include <sstream>

#include "xml_lite.hpp"

namespace avguard {

namespace {

struct ResourceName {
  ResourceId id;
  const char* name;
};

constexpr std::array<ResourceName, 11> kResourceNames{{
    {ResourceId::vehicle_report, "vehicle_report"},
    {ResourceId::steering, "steering"},
    {ResourceId::throttle, "throttle"},
    {ResourceId::brake, "brake"},
    {ResourceId::gear, "gear"},
    {ResourceId::engine, "engine"},
    {ResourceId::traffic_signal, "traffic_signal"},
    {ResourceId::lead_vehicle_report, "lead_vehicle_report"},
    {ResourceId::location, "location"},
    {ResourceId::network, "network"},
    {ResourceId::storage, "storage"},
}};

constexpr std::array<std::pair<CircumstanceTag, const char*>, 5> kTagNames{{
    {CircumstanceTag::highway, "highway"},
    {CircumstanceTag::urban, "urban"},
    {CircumstanceTag::test_facility, "test_facility"},
    {CircumstanceTag::clear_weather, "clear_weather"},
    {CircumstanceTag::any, "any"},
}};

[[noreturn]] void malformed(const std::string& what, int line) {
  throw AvError(ErrorCode::MalformedXml,
                what + " at line " + std::to_string(line));
}

}  // namespace

const char* resource_name(ResourceId r) {
  for (const auto& rn : kResourceNames)
    if (rn.id == r) return rn.name;
  return "unknown";
}

std::optional<ResourceId> resource_from_name(const std::string& name) {
  for (const auto& rn : kResourceNames)
    if (name == rn.name) return rn.id;
  return std::nullopt;
}

const char* direction_name(Direction d) {
  return d == Direction::subscribe ? "subscribe" : "control";
}

const char* circumstance_name(CircumstanceTag t) {
  for (const auto& [tag, name] : kTagNames)
    if (tag == t) return name;
  return "unknown";
}

std::optional<CircumstanceTag> circumstance_from_name(const std::string& name) {
  for (const auto& [tag, tag_name] : kTagNames)
    if (name == tag_name) return tag;
  return std::nullopt;
}

const char* category_name(AppCategory c) {
  switch (c) {
    case AppCategory::driving: return "driving";
    case AppCategory::infotainment: return "infotainment";
    case AppCategory::diagnostics: return "diagnostics";
  }
  return "unknown";
}

bool is_actuator(ResourceId r) {
  switch (r) {
    case ResourceId::steering:
    case ResourceId::throttle:
    case ResourceId::brake:
    case ResourceId::gear:
    case ResourceId::engine:
      return true;
    default:
      return false;
  }
}

namespace {

ResourceRequest parse_resource_element(const xml::Element& el) {
  ResourceRequest req;
  for (const auto& [key, value] : el.attributes) {
    if (key == "name") {
      auto id = resource_from_name(value);
      if (!id)
        throw AvError(ErrorCode::UnknownResource,
                      value + " at line " + std::to_string(el.line));
      req.resource = *id;
    } else if (key == "direction") {
      if (value == "subscribe")
        req.direction = Direction::subscribe;
      else if (value == "control")
        req.direction = Direction::control;
      else
        malformed("invalid direction '" + value + "'", el.line);
    } else if (key == "exclusive") {
      if (value == "true")
        req.exclusive = true;
      else if (value == "false")
        req.exclusive = false;
      else
        malformed("invalid exclusive flag '" + value + "'", el.line);
    } else {
      malformed("unknown attribute '" + key + "' on <resource>", el.line);
    }
  }
  if (!el.attribute("name"))
    throw AvError(ErrorCode::MissingField,
                  "resource name at line " + std::to_string(el.line));
  if (!el.attribute("direction"))
    throw AvError(ErrorCode::MissingField,
                  "resource direction at line " + std::to_string(el.line));
  const xml::Element* purpose = nullptr;
  for (const auto& child : el.children) {
    if (child.name != "purpose")
      malformed("unknown element <" + child.name + "> under <resource>", child.line);
    if (purpose) malformed("duplicate <purpose> under <resource>", child.line);
    purpose = &child;
  }
  if (!purpose)
    throw AvError(ErrorCode::MissingField,
                  "resource purpose at line " + std::to_string(el.line));
  req.purpose = purpose->text;
  return req;
}

std::string trimmed(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

AppManifest parse_manifest(const std::string& xml_text) {
  xml::Element root = xml::parse_document(xml_text);
  if (root.name != "avapp")
    malformed("expected root element <avapp>, got <" + root.name + ">", root.line);

  AppManifest m;
  for (const auto& [key, value] : root.attributes) {
    if (key == "id") {
      m.app_id = value;
    } else if (key == "category") {
      if (value == "driving")
        m.category = AppCategory::driving;
      else if (value == "infotainment")
        m.category = AppCategory::infotainment;
      else if (value == "diagnostics")
        m.category = AppCategory::diagnostics;
      else
        malformed("invalid category '" + value + "'", root.line);
    } else {
      malformed("unknown attribute '" + key + "' on <avapp>", root.line);
    }
  }
  if (!root.attribute("id"))
    throw AvError(ErrorCode::MissingField, "avapp id at line " + std::to_string(root.line));
  if (!root.attribute("category"))
    throw AvError(ErrorCode::MissingField,
                  "avapp category at line " + std::to_string(root.line));

  bool saw_purpose = false;
  bool saw_circumstances = false;
  for (const auto& child : root.children) {
    if (child.name == "purpose") {
      if (saw_purpose) malformed("duplicate <purpose>", child.line);
      saw_purpose = true;
      m.app_purpose = child.text;
    } else if (child.name == "circumstances") {
      if (saw_circumstances) malformed("duplicate <circumstances>", child.line);
      saw_circumstances = true;
      for (const auto& tag_el : child.children) {
        if (tag_el.name != "tag")
          malformed("unknown element <" + tag_el.name + "> under <circumstances>",
                    tag_el.line);
        std::string tag_text = trimmed(tag_el.text);
        auto tag = circumstance_from_name(tag_text);
        if (!tag) malformed("unknown circumstance tag '" + tag_text + "'", tag_el.line);
        m.allowable_circumstances.insert(*tag);
      }
    } else if (child.name == "resource") {
      m.resources.push_back(parse_resource_element(child));
    } else {
      malformed("unknown element <" + child.name + "> under <avapp>", child.line);
    }
  }
  if (!saw_purpose)
    throw AvError(ErrorCode::MissingField,
                  "app purpose at line " + std::to_string(root.line));
  if (!saw_circumstances)
    throw AvError(ErrorCode::MissingField,
                  "circumstances at line " + std::to_string(root.line));
  return m;
}

std::string serialize_manifest(const AppManifest& m) {
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<avapp id=\"" << xml::escape_attribute(m.app_id) << "\" category=\""
      << category_name(m.category) << "\">\n";
  out << "  <purpose>" << xml::escape_text(m.app_purpose) << "</purpose>\n";
  out << "  <circumstances>\n";
  for (CircumstanceTag tag : m.allowable_circumstances)
    out << "    <tag>" << circumstance_name(tag) << "</tag>\n";
  out << "  </circumstances>\n";
  for (const auto& r : m.resources) {
    out << "  <resource name=\"" << resource_name(r.resource) << "\" direction=\""
        << direction_name(r.direction) << "\" exclusive=\""
        << (r.exclusive ? "true" : "false") << "\">\n";
    out << "    <purpose>" << xml::escape_text(r.purpose) << "</purpose>\n";
    out << "  </resource>\n";
  }
  out << "</avapp>\n";
  return out.str();
}

std::vector<Finding> validate_manifest(const AppManifest& m) {
  std::vector<Finding> findings;
  auto add = [&](std::string rule, std::string path, std::string evidence) {
    findings.push_back(Finding{std::move(rule), Severity::reject, std::move(path),
                               std::move(evidence), {}});
  };

  if (m.app_id.empty()) add("app_id_required", "app_id", "app_id must be nonempty");

  if (m.category == AppCategory::driving && m.allowable_circumstances.empty())
    add("circumstances_required", "circumstances",
        "driving apps must declare allowable circumstances");

  if (m.allowable_circumstances.count(CircumstanceTag::any) &&
      m.allowable_circumstances.size() > 1)
    add("circumstance_any_alone", "circumstances",
        "'any' may not co-occur with other tags");

  for (size_t i = 0; i < m.resources.size(); ++i) {
    const auto& r = m.resources[i];
    std::string path = "resources[" + std::to_string(i) + "]";
    if (r.purpose.empty())
      add("purpose_required", path + ".purpose",
          std::string(resource_name(r.resource)) + " request lacks a purpose");
    if (r.direction == Direction::control && !is_actuator(r.resource) &&
        r.resource != ResourceId::network && r.resource != ResourceId::storage)
      add("invalid_direction", path,
          std::string(resource_name(r.resource)) + " cannot be controlled");
    if (r.direction == Direction::subscribe &&
        (r.resource == ResourceId::network || r.resource == ResourceId::storage))
      add("invalid_direction", path,
          std::string(resource_name(r.resource)) + " is control-only");
    for (size_t j = 0; j < i; ++j) {
      if (m.resources[j].resource == r.resource &&
          m.resources[j].direction == r.direction) {
        add("duplicate_resource", path,
            std::string("duplicate (") + resource_name(r.resource) + ", " +
                direction_name(r.direction) + ") request");
        break;
      }
    }
  }

  std::stable_sort(findings.begin(), findings.end(),
                   [](const Finding& a, const Finding& b) { return a.path < b.path; });
  return findings;
}

std::vector<ConflictFinding> detect_conflicts(
    const std::vector<AppManifest>& installed, const AppManifest& candidate) {
  for (const auto& app : installed)
    if (app.app_id == candidate.app_id)
      throw AvError(ErrorCode::DuplicateAppId, candidate.app_id);

  std::vector<ConflictFinding> conflicts;
  for (const auto& app : installed) {
    for (const auto& ours : candidate.resources) {
      if (ours.direction != Direction::control) continue;
      for (const auto& theirs : app.resources) {
        if (theirs.direction != Direction::control) continue;
        if (theirs.resource != ours.resource) continue;
        if (!ours.exclusive && !theirs.exclusive) continue;
        ConflictKind kind = (ours.exclusive && theirs.exclusive)
                                ? ConflictKind::exclusive_vs_exclusive
                                : ConflictKind::exclusive_vs_any;
        conflicts.push_back(
            ConflictFinding{ours.resource, {candidate.app_id, app.app_id}, kind});
      }
    }
  }
  return conflicts;
}

}  // namespace avguard
