#include "avguard/bus.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "avguard/errors.hpp"

namespace avguard {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedXml: return "MalformedXml";
    case ErrorCode::UnknownResource: return "UnknownResource";
    case ErrorCode::MissingField: return "MissingField";
    case ErrorCode::DuplicateAppId: return "DuplicateAppId";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnknownMessageKind: return "UnknownMessageKind";
    case ErrorCode::UnknownField: return "UnknownField";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::DegenerateVariance: return "DegenerateVariance";
    case ErrorCode::NonFiniteWeight: return "NonFiniteWeight";
    case ErrorCode::ZeroHits: return "ZeroHits";
    case ErrorCode::NoMatchingTraces: return "NoMatchingTraces";
    case ErrorCode::PackageUnreadable: return "PackageUnreadable";
    case ErrorCode::NotApproved: return "NotApproved";
    case ErrorCode::BadSignature: return "BadSignature";
    case ErrorCode::Tampered: return "Tampered";
    case ErrorCode::Conflict: return "Conflict";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

const char* severity_name(Severity s) {
  return s == Severity::reject ? "reject" : "warn";
}

std::string format_finding(const Finding& f) {
  std::string out = f.rule;
  out += " severity=";
  out += severity_name(f.severity);
  if (!f.path.empty()) out += " path=" + f.path;
  if (!f.evidence.empty()) out += " evidence=" + f.evidence;
  if (!f.witness.empty()) {
    out += " witness=[";
    for (size_t i = 0; i < f.witness.size(); ++i) {
      if (i) out += ", ";
      out += f.witness[i];
    }
    out += "]";
  }
  return out;
}

namespace {

struct KindName {
  MessageKind kind;
  const char* name;
};

constexpr std::array<KindName, 9> kKindNames{{
    {MessageKind::vehicle_report, "vehicle_report"},
    {MessageKind::steering_cmd, "steering_cmd"},
    {MessageKind::throttle_cmd, "throttle_cmd"},
    {MessageKind::brake_cmd, "brake_cmd"},
    {MessageKind::gear_cmd, "gear_cmd"},
    {MessageKind::engine_cmd, "engine_cmd"},
    {MessageKind::traffic_signal, "traffic_signal"},
    {MessageKind::lead_vehicle_report, "lead_vehicle_report"},
    {MessageKind::net_send_record, "net_send_record"},
}};

double clamp_percent(double p) { return std::clamp(p, 0.0, 100.0); }

double clamp_angle(double a) {
  return std::clamp(a, -kMaxSteeringAngle, kMaxSteeringAngle);
}

}  // namespace

const char* message_kind_name(MessageKind k) {
  for (const auto& kn : kKindNames)
    if (kn.kind == k) return kn.name;
  return "unknown";
}

std::optional<MessageKind> message_kind_from_name(const std::string& name) {
  for (const auto& kn : kKindNames)
    if (name == kn.name) return kn.kind;
  return std::nullopt;
}

const char* gear_name(Gear g) {
  switch (g) {
    case Gear::park: return "park";
    case Gear::drive: return "drive";
    case Gear::reverse: return "reverse";
    case Gear::neutral: return "neutral";
  }
  return "unknown";
}

const char* signal_state_name(SignalState s) {
  switch (s) {
    case SignalState::red: return "red";
    case SignalState::yellow: return "yellow";
    case SignalState::green: return "green";
  }
  return "unknown";
}

bool is_command_kind(MessageKind k) {
  switch (k) {
    case MessageKind::steering_cmd:
    case MessageKind::throttle_cmd:
    case MessageKind::brake_cmd:
    case MessageKind::gear_cmd:
    case MessageKind::engine_cmd:
      return true;
    default:
      return false;
  }
}

bool is_sensor_kind(MessageKind k) {
  switch (k) {
    case MessageKind::vehicle_report:
    case MessageKind::traffic_signal:
    case MessageKind::lead_vehicle_report:
      return true;
    default:
      return false;
  }
}

BusMessage make_vehicle_report(const VehicleReport& r) {
  return BusMessage{MessageKind::vehicle_report, r};
}
BusMessage make_steering_cmd(double angle) {
  return BusMessage{MessageKind::steering_cmd, SteeringCmd{clamp_angle(angle)}};
}
BusMessage make_throttle_cmd(double percent) {
  return BusMessage{MessageKind::throttle_cmd, ThrottleCmd{clamp_percent(percent)}};
}
BusMessage make_brake_cmd(double percent) {
  return BusMessage{MessageKind::brake_cmd, BrakeCmd{clamp_percent(percent)}};
}
BusMessage make_gear_cmd(Gear g) {
  return BusMessage{MessageKind::gear_cmd, GearCmd{g}};
}
BusMessage make_engine_cmd(bool on) {
  return BusMessage{MessageKind::engine_cmd, EngineCmd{on}};
}
BusMessage make_traffic_signal(SignalState s) {
  return BusMessage{MessageKind::traffic_signal, TrafficSignal{s}};
}
BusMessage make_lead_vehicle_report(double gap, double lead_speed) {
  return BusMessage{MessageKind::lead_vehicle_report, LeadVehicleReport{gap, lead_speed}};
}

const std::vector<FieldInfo>& fields_of(MessageKind k) {
  static const std::vector<FieldInfo> vehicle_report_fields = {
      {"position.x", false, false},    {"position.y", false, false},
      {"position.heading", false, false}, {"speed", false, false},
      {"yaw_rate", false, false},      {"gear", false, false},
      {"engine_on", true, false},
  };
  static const std::vector<FieldInfo> steering_fields = {{"angle", false, true}};
  static const std::vector<FieldInfo> throttle_fields = {{"percent", false, true}};
  static const std::vector<FieldInfo> brake_fields = {{"percent", false, true}};
  static const std::vector<FieldInfo> gear_fields = {{"gear", false, true}};
  static const std::vector<FieldInfo> engine_fields = {{"on", true, true}};
  static const std::vector<FieldInfo> signal_fields = {{"state", false, false}};
  static const std::vector<FieldInfo> lead_fields = {
      {"gap", false, false}, {"lead_speed", false, false}};
  static const std::vector<FieldInfo> none = {};

  switch (k) {
    case MessageKind::vehicle_report: return vehicle_report_fields;
    case MessageKind::steering_cmd: return steering_fields;
    case MessageKind::throttle_cmd: return throttle_fields;
    case MessageKind::brake_cmd: return brake_fields;
    case MessageKind::gear_cmd: return gear_fields;
    case MessageKind::engine_cmd: return engine_fields;
    case MessageKind::traffic_signal: return signal_fields;
    case MessageKind::lead_vehicle_report: return lead_fields;
    case MessageKind::net_send_record: return none;
  }
  return none;
}

const FieldInfo* find_field(MessageKind k, const std::string& path) {
  for (const auto& f : fields_of(k))
    if (f.path == path) return &f;
  return nullptr;
}

double gear_code(Gear g) { return static_cast<double>(static_cast<int>(g)); }
double signal_code(SignalState s) { return static_cast<double>(static_cast<int>(s)); }

double read_message_field(const BusMessage& msg, const std::string& path) {
  switch (msg.kind) {
    case MessageKind::vehicle_report: {
      const auto& r = std::get<VehicleReport>(msg.payload);
      if (path == "position.x") return r.x;
      if (path == "position.y") return r.y;
      if (path == "position.heading") return r.heading;
      if (path == "speed") return r.speed;
      if (path == "yaw_rate") return r.yaw_rate;
      if (path == "gear") return gear_code(r.gear);
      if (path == "engine_on") return r.engine_on ? 1.0 : 0.0;
      break;
    }
    case MessageKind::steering_cmd:
      if (path == "angle") return std::get<SteeringCmd>(msg.payload).angle;
      break;
    case MessageKind::throttle_cmd:
      if (path == "percent") return std::get<ThrottleCmd>(msg.payload).percent;
      break;
    case MessageKind::brake_cmd:
      if (path == "percent") return std::get<BrakeCmd>(msg.payload).percent;
      break;
    case MessageKind::gear_cmd:
      if (path == "gear") return gear_code(std::get<GearCmd>(msg.payload).gear);
      break;
    case MessageKind::engine_cmd:
      if (path == "on") return std::get<EngineCmd>(msg.payload).on ? 1.0 : 0.0;
      break;
    case MessageKind::traffic_signal:
      if (path == "state") return signal_code(std::get<TrafficSignal>(msg.payload).state);
      break;
    case MessageKind::lead_vehicle_report: {
      const auto& r = std::get<LeadVehicleReport>(msg.payload);
      if (path == "gap") return r.gap;
      if (path == "lead_speed") return r.lead_speed;
      break;
    }
    case MessageKind::net_send_record:
      break;
  }
  throw AvError(ErrorCode::UnknownField,
                std::string(message_kind_name(msg.kind)) + "." + path);
}

}  // namespace avguard
