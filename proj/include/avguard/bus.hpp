#ifndef AVGUARD_BUS_HPP
#define AVGUARD_BUS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace avguard {

// Message vocabulary of the virtual CAN bus. Sensor kinds are emitted by the
// environment, command kinds by apps (and by the watchdog failsafe).
enum class MessageKind {
  vehicle_report,
  steering_cmd,
  throttle_cmd,
  brake_cmd,
  gear_cmd,
  engine_cmd,
  traffic_signal,
  lead_vehicle_report,
  net_send_record,
};

enum class Gear { park, drive, reverse, neutral };
enum class SignalState { red, yellow, green };

constexpr double kMaxSteeringAngle = 0.6;  // |angle| bound, radians

const char* message_kind_name(MessageKind k);
std::optional<MessageKind> message_kind_from_name(const std::string& name);
const char* gear_name(Gear g);
const char* signal_state_name(SignalState s);

bool is_command_kind(MessageKind k);
bool is_sensor_kind(MessageKind k);

struct VehicleReport {
  double x = 0, y = 0;
  double heading = 0;    // rad, (-pi, pi]
  double speed = 0;      // m/s, >= 0
  double yaw_rate = 0;   // rad/s
  Gear gear = Gear::drive;
  bool engine_on = true;

  bool operator==(const VehicleReport&) const = default;
};

struct SteeringCmd {
  double angle = 0;  // rad, clamped to +-kMaxSteeringAngle
  bool operator==(const SteeringCmd&) const = default;
};
struct ThrottleCmd {
  double percent = 0;  // clamped to [0, 100]
  bool operator==(const ThrottleCmd&) const = default;
};
struct BrakeCmd {
  double percent = 0;  // clamped to [0, 100]
  bool operator==(const BrakeCmd&) const = default;
};
struct GearCmd {
  Gear gear = Gear::drive;
  bool operator==(const GearCmd&) const = default;
};
struct EngineCmd {
  bool on = true;
  bool operator==(const EngineCmd&) const = default;
};
struct TrafficSignal {
  SignalState state = SignalState::green;
  bool operator==(const TrafficSignal&) const = default;
};
struct LeadVehicleReport {
  double gap = 0;
  double lead_speed = 0;
  bool operator==(const LeadVehicleReport&) const = default;
};
struct NetSendRecord {
  std::string host;
  std::vector<double> values;
  bool operator==(const NetSendRecord&) const = default;
};

struct BusMessage {
  using Payload = std::variant<VehicleReport, SteeringCmd, ThrottleCmd, BrakeCmd,
                               GearCmd, EngineCmd, TrafficSignal, LeadVehicleReport,
                               NetSendRecord>;

  MessageKind kind = MessageKind::vehicle_report;
  Payload payload = VehicleReport{};

  bool operator==(const BusMessage&) const = default;
};

// Factories clamp payload fields into their declared ranges.
BusMessage make_vehicle_report(const VehicleReport& r);
BusMessage make_steering_cmd(double angle);
BusMessage make_throttle_cmd(double percent);
BusMessage make_brake_cmd(double percent);
BusMessage make_gear_cmd(Gear g);
BusMessage make_engine_cmd(bool on);
BusMessage make_traffic_signal(SignalState s);
BusMessage make_lead_vehicle_report(double gap, double lead_speed);

// Field vocabulary used by the IR (ReadField paths and publish assignments).
// Scalar fields are numbers; engine_on / on are booleans; gear and state are
// numeric enum codes matching the IR literal names.
struct FieldInfo {
  std::string path;   // e.g. "position.x"
  bool is_bool = false;
  bool required_on_publish = false;
};

const std::vector<FieldInfo>& fields_of(MessageKind k);
const FieldInfo* find_field(MessageKind k, const std::string& path);

// Numeric value of a message field (booleans map to 0/1).
double read_message_field(const BusMessage& msg, const std::string& path);

double gear_code(Gear g);
double signal_code(SignalState s);

}  // namespace avguard

#endif  // AVGUARD_BUS_HPP
