#ifndef AVGUARD_IR_HPP
#define AVGUARD_IR_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "avguard/bus.hpp"
#include "avguard/errors.hpp"

namespace avguard {

// Control-flow-graph IR for AV apps. Memory-safe by construction: scalars
// (64-bit float or bool), immutable waypoint tables, and per-handler CFGs
// with explicit terminators. No recursion, no dynamic dispatch, no heap.

struct Value {
  double num = 0.0;
  bool is_bool = false;  // when set, num is 0.0 or 1.0

  static Value number(double v) { return Value{v, false}; }
  static Value boolean(bool b) { return Value{b ? 1.0 : 0.0, true}; }
  bool truthy() const { return num != 0.0; }

  bool operator==(const Value&) const = default;
};

struct Waypoint {
  double x = 0, y = 0;
  double heading = 0;  // rad, normalized to (-pi, pi]

  bool operator==(const Waypoint&) const = default;
};

double normalize_angle(double rad);  // wraps into (-pi, pi]

enum class Opcode {
  konst,     // const dst literal
  read,      // read dst field.path        (from the triggering message)
  getg,      // getg dst global
  setg,      // setg global src
  add, sub, mul, div, pow_, min_, max_,   // binary arithmetic
  lt, le, eq,                             // numeric comparisons -> bool
  and_, or_,                              // boolean ops
  sqrt_, abs_,                            // unary arithmetic
  lookup,    // lookup dst table idx field
  publish,   // publish kind field=operand ...
  netsend,   // netsend host operand ...
  br,        // br cond then else
  jmp,       // jmp block
  halt,
};

bool is_terminator(Opcode op);
int operand_arity(Opcode op);  // for the arithmetic/comparison group

enum class WaypointField { x, y, heading, sin_heading, cos_heading };

struct Operand {
  bool is_literal = false;
  int slot = -1;    // local slot when !is_literal
  Value literal;    // when is_literal

  bool operator==(const Operand&) const = default;
};

struct PublishArg {
  std::string field;
  Operand value;

  bool operator==(const PublishArg&) const = default;
};

struct Instruction {
  Opcode op = Opcode::halt;
  int dst = -1;                    // local slot
  int a = -1, b = -1;              // local slots
  int global = -1;                 // global slot (getg/setg)
  int table = -1;                  // table index (lookup)
  WaypointField wp_field = WaypointField::x;
  Value literal;                   // konst
  MessageKind kind = MessageKind::vehicle_report;  // read/publish
  std::string field_path;          // read
  bool field_is_bool = false;      // read, resolved at parse
  std::vector<PublishArg> publish_args;
  std::string host;                // netsend
  std::vector<Operand> send_args;  // netsend
  int then_block = -1, else_block = -1, target = -1;
  int line = 0;                    // source line for diagnostics

  // structural equality; diagnostic line numbers are irrelevant
  bool operator==(const Instruction& o) const {
    return op == o.op && dst == o.dst && a == o.a && b == o.b &&
           global == o.global && table == o.table && wp_field == o.wp_field &&
           literal == o.literal && kind == o.kind && field_path == o.field_path &&
           field_is_bool == o.field_is_bool && publish_args == o.publish_args &&
           host == o.host && send_args == o.send_args &&
           then_block == o.then_block && else_block == o.else_block &&
           target == o.target;
  }
};

struct BasicBlock {
  std::string name;
  std::vector<Instruction> instructions;

  bool operator==(const BasicBlock&) const = default;
};

struct Handler {
  MessageKind trigger = MessageKind::vehicle_report;
  std::vector<BasicBlock> blocks;  // entry is blocks[0]
  std::vector<std::string> local_names;  // slot -> name

  int block_index(const std::string& name) const;
  bool operator==(const Handler&) const = default;
};

struct GlobalVar {
  std::string name;
  Value initial;
  bool is_table_length = false;  // auto-defined, immutable

  bool operator==(const GlobalVar&) const = default;
};

struct WaypointTable {
  std::string name;
  std::string asset;  // nonempty when contents come from a package asset
  std::vector<Waypoint> points;

  bool operator==(const WaypointTable&) const = default;
};

struct AppProgram {
  std::string app_id;
  std::vector<GlobalVar> globals;       // declaration order
  std::vector<WaypointTable> tables;    // declaration order
  std::vector<Handler> handlers;        // declaration order, unique triggers

  int global_index(const std::string& name) const;
  int table_index(const std::string& name) const;
  const Handler* handler_for(MessageKind k) const;

  bool operator==(const AppProgram&) const = default;
};

// Mutable scalar state of one app instance (globals by slot).
struct AppState {
  std::vector<Value> globals;

  bool operator==(const AppState&) const = default;
};

struct AppFault {
  enum class Kind { division_by_zero, table_index_out_of_range, fuel_exhausted };
  Kind kind = Kind::division_by_zero;
  std::string where;  // "handler/block:instr"

  bool operator==(const AppFault&) const = default;
};

const char* fault_kind_name(AppFault::Kind k);

// Result of running one handler on one message. On a fault (including fuel
// exhaustion) all effects are discarded: state equals the input state and
// the output lists are empty; only the fault record and flag remain.
struct HandlerOutcome {
  AppState state;
  std::vector<BusMessage> publishes;     // instruction execution order
  std::vector<NetSendRecord> net_sends;  // instruction execution order
  bool fuel_exhausted = false;
  std::optional<AppFault> fault;

  bool operator==(const HandlerOutcome&) const = default;
};

constexpr int kDefaultHandlerFuel = 10000;

// Parses the line-oriented IR text. Throws AvError with code SyntaxError,
// UnknownMessageKind or UnknownField; messages carry the source line.
AppProgram parse_program(const std::string& text);

// Canonical text form; parse_program(print_program(p)) == p.
std::string print_program(const AppProgram& p);

// Structural and dataflow validation: CFG shape, reachability, definite
// assignment of locals, type consistency, publish field coverage, writes to
// immutable globals. Empty result means the program is well-formed.
std::vector<Finding> validate_program(const AppProgram& p);

AppState initial_state(const AppProgram& p);

// Deterministic interpretation of the handler matching msg.kind (an empty
// outcome when none). At most `fuel` instructions execute.
HandlerOutcome execute_handler(const AppProgram& p, const AppState& state,
                               const BusMessage& msg, int fuel = kDefaultHandlerFuel);

// Loads `table <name> asset <file>` contents from package assets
// (CSV lines "x,y,heading") and refreshes the table length globals.
void bind_assets(AppProgram& p, const std::map<std::string, std::string>& assets);

std::vector<Waypoint> parse_waypoint_csv(const std::string& text);
std::string waypoint_csv(const std::vector<Waypoint>& points);

// IR literal syntax: numbers, true/false, and the enum code names
// (park/drive/reverse/neutral, red/yellow/green). Also used by rule files.
std::optional<Value> parse_ir_literal(const std::string& token);

}  // namespace avguard

#endif  // AVGUARD_IR_HPP
