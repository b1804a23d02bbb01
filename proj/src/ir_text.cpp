#include <cassert>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <sstream>
#include <unordered_map>

#include "avguard/ir.hpp"

namespace avguard {

double normalize_angle(double rad) {
  const double two_pi = 2.0 * std::numbers::pi;
  double a = std::fmod(rad, two_pi);
  if (a <= -std::numbers::pi) a += two_pi;
  if (a > std::numbers::pi) a -= two_pi;
  return a;
}

bool is_terminator(Opcode op) {
  return op == Opcode::br || op == Opcode::jmp || op == Opcode::halt;
}

int operand_arity(Opcode op) {
  switch (op) {
    case Opcode::add: case Opcode::sub: case Opcode::mul: case Opcode::div:
    case Opcode::pow_: case Opcode::min_: case Opcode::max_:
    case Opcode::lt: case Opcode::le: case Opcode::eq:
    case Opcode::and_: case Opcode::or_:
      return 2;
    case Opcode::sqrt_: case Opcode::abs_:
      return 1;
    default:
      return 0;
  }
}

const char* fault_kind_name(AppFault::Kind k) {
  switch (k) {
    case AppFault::Kind::division_by_zero: return "division_by_zero";
    case AppFault::Kind::table_index_out_of_range: return "table_index_out_of_range";
    case AppFault::Kind::fuel_exhausted: return "fuel_exhausted";
  }
  return "unknown";
}

int Handler::block_index(const std::string& name) const {
  for (size_t i = 0; i < blocks.size(); ++i)
    if (blocks[i].name == name) return static_cast<int>(i);
  return -1;
}

int AppProgram::global_index(const std::string& name) const {
  for (size_t i = 0; i < globals.size(); ++i)
    if (globals[i].name == name) return static_cast<int>(i);
  return -1;
}

int AppProgram::table_index(const std::string& name) const {
  for (size_t i = 0; i < tables.size(); ++i)
    if (tables[i].name == name) return static_cast<int>(i);
  return -1;
}

const Handler* AppProgram::handler_for(MessageKind k) const {
  for (const auto& h : handlers)
    if (h.trigger == k) return &h;
  return nullptr;
}

namespace {

const std::unordered_map<std::string, Opcode>& opcode_table() {
  static const std::unordered_map<std::string, Opcode> table = {
      {"const", Opcode::konst}, {"read", Opcode::read},   {"getg", Opcode::getg},
      {"setg", Opcode::setg},   {"add", Opcode::add},     {"sub", Opcode::sub},
      {"mul", Opcode::mul},     {"div", Opcode::div},     {"pow", Opcode::pow_},
      {"min", Opcode::min_},    {"max", Opcode::max_},    {"lt", Opcode::lt},
      {"le", Opcode::le},       {"eq", Opcode::eq},       {"and", Opcode::and_},
      {"or", Opcode::or_},      {"sqrt", Opcode::sqrt_},  {"abs", Opcode::abs_},
      {"lookup", Opcode::lookup}, {"publish", Opcode::publish},
      {"netsend", Opcode::netsend}, {"br", Opcode::br},   {"jmp", Opcode::jmp},
      {"halt", Opcode::halt},
  };
  return table;
}

const char* opcode_name(Opcode op) {
  for (const auto& [name, code] : opcode_table())
    if (code == op) return name.c_str();
  return "?";
}

// Literal keywords double as enum codes; they are reserved words.
std::optional<Value> literal_from_token(const std::string& tok) {
  if (tok == "true") return Value::boolean(true);
  if (tok == "false") return Value::boolean(false);
  if (tok == "park") return Value::number(gear_code(Gear::park));
  if (tok == "drive") return Value::number(gear_code(Gear::drive));
  if (tok == "reverse") return Value::number(gear_code(Gear::reverse));
  if (tok == "neutral") return Value::number(gear_code(Gear::neutral));
  if (tok == "red") return Value::number(signal_code(SignalState::red));
  if (tok == "yellow") return Value::number(signal_code(SignalState::yellow));
  if (tok == "green") return Value::number(signal_code(SignalState::green));
  const char* begin = tok.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end == begin + tok.size() && !tok.empty()) return Value::number(v);
  return std::nullopt;
}

bool is_reserved_word(const std::string& tok) {
  auto lit = literal_from_token(tok);
  return lit.has_value();
}

std::optional<WaypointField> waypoint_field_from_name(const std::string& name) {
  if (name == "x") return WaypointField::x;
  if (name == "y") return WaypointField::y;
  if (name == "heading") return WaypointField::heading;
  if (name == "sin_heading") return WaypointField::sin_heading;
  if (name == "cos_heading") return WaypointField::cos_heading;
  return std::nullopt;
}

const char* waypoint_field_name(WaypointField f) {
  switch (f) {
    case WaypointField::x: return "x";
    case WaypointField::y: return "y";
    case WaypointField::heading: return "heading";
    case WaypointField::sin_heading: return "sin_heading";
    case WaypointField::cos_heading: return "cos_heading";
  }
  return "?";
}

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.15g", v);
  if (std::strtod(buf, nullptr) != v)
    std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_literal(const Value& v) {
  if (v.is_bool) return v.truthy() ? "true" : "false";
  return fmt_double(v.num);
}

struct PendingTargets {
  std::string then_name, else_name, target_name;
};

struct Parser {
  AppProgram program;
  bool saw_app_line = false;

  Handler* handler = nullptr;
  BasicBlock* block = nullptr;
  std::unordered_map<std::string, int> local_slots;
  std::vector<PendingTargets> pending;  // parallel to current handler's instrs

  int line_no = 0;

  [[noreturn]] void fail(ErrorCode code, const std::string& what) const {
    throw AvError(code, what + " at line " + std::to_string(line_no));
  }

  [[noreturn]] void syntax(const std::string& what) const {
    fail(ErrorCode::SyntaxError, what);
  }

  bool valid_identifier(const std::string& tok, bool allow_dots) const {
    if (tok.empty()) return false;
    if (is_reserved_word(tok)) return false;
    if (!std::isalpha(static_cast<unsigned char>(tok[0])) && tok[0] != '_') return false;
    for (char c : tok) {
      bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
                (allow_dots && c == '.');
      if (!ok) return false;
    }
    return true;
  }

  int local_slot(const std::string& name) {
    if (!valid_identifier(name, false)) syntax("invalid local name '" + name + "'");
    auto it = local_slots.find(name);
    if (it != local_slots.end()) return it->second;
    int slot = static_cast<int>(handler->local_names.size());
    handler->local_names.push_back(name);
    local_slots.emplace(name, slot);
    return slot;
  }

  Operand parse_operand(const std::string& tok) {
    if (auto lit = literal_from_token(tok)) return Operand{true, -1, *lit};
    Operand op;
    op.slot = local_slot(tok);
    return op;
  }

  Value parse_literal(const std::string& tok) {
    auto lit = literal_from_token(tok);
    if (!lit) syntax("expected literal, got '" + tok + "'");
    return *lit;
  }

  void refresh_length_global(int table_idx) {
    const auto& t = program.tables[table_idx];
    int g = program.global_index(t.name + ".length");
    assert(g >= 0);
    program.globals[g].initial = Value::number(static_cast<double>(t.points.size()));
  }

  void declare_table(const std::string& name, const std::string& asset) {
    if (!valid_identifier(name, false)) syntax("invalid table name '" + name + "'");
    if (program.table_index(name) >= 0) syntax("duplicate table '" + name + "'");
    if (program.global_index(name + ".length") >= 0)
      syntax("global '" + name + ".length' already defined");
    program.tables.push_back(WaypointTable{name, asset, {}});
    program.globals.push_back(
        GlobalVar{name + ".length", Value::number(0.0), true});
  }

  void finish_handler() {
    if (!handler) return;
    if (handler->blocks.empty()) syntax("handler has no blocks");
    // resolve symbolic branch targets
    size_t flat = 0;
    for (auto& blk : handler->blocks) {
      for (auto& ins : blk.instructions) {
        const PendingTargets& pt = pending[flat++];
        auto resolve = [&](const std::string& name) {
          int idx = handler->block_index(name);
          if (idx < 0)
            throw AvError(ErrorCode::SyntaxError,
                          "reference to undefined block '" + name + "' at line " +
                              std::to_string(ins.line));
          return idx;
        };
        if (ins.op == Opcode::br) {
          ins.then_block = resolve(pt.then_name);
          ins.else_block = resolve(pt.else_name);
        } else if (ins.op == Opcode::jmp) {
          ins.target = resolve(pt.target_name);
        }
      }
    }
    handler = nullptr;
    block = nullptr;
    local_slots.clear();
    pending.clear();
  }

  void parse_instruction(const std::vector<std::string>& tok);
  void parse_line(const std::vector<std::string>& tok);
};

void Parser::parse_instruction(const std::vector<std::string>& tok) {
  if (!block) syntax("instruction outside a block");
  auto it = opcode_table().find(tok[0]);
  if (it == opcode_table().end()) syntax("unknown instruction '" + tok[0] + "'");

  Instruction ins;
  ins.op = it->second;
  ins.line = line_no;
  auto need = [&](size_t n) {
    if (tok.size() != n + 1)
      syntax("'" + tok[0] + "' expects " + std::to_string(n) + " operands");
  };

  switch (ins.op) {
    case Opcode::konst:
      need(2);
      ins.dst = local_slot(tok[1]);
      ins.literal = parse_literal(tok[2]);
      break;
    case Opcode::read: {
      need(2);
      ins.dst = local_slot(tok[1]);
      ins.kind = handler->trigger;
      const FieldInfo* f = find_field(handler->trigger, tok[2]);
      if (!f)
        fail(ErrorCode::UnknownField,
             std::string(message_kind_name(handler->trigger)) + "." + tok[2]);
      ins.field_path = tok[2];
      ins.field_is_bool = f->is_bool;
      break;
    }
    case Opcode::getg: {
      need(2);
      ins.dst = local_slot(tok[1]);
      int g = program.global_index(tok[2]);
      if (g < 0) syntax("unknown global '" + tok[2] + "'");
      ins.global = g;
      break;
    }
    case Opcode::setg: {
      need(2);
      int g = program.global_index(tok[1]);
      if (g < 0) syntax("unknown global '" + tok[1] + "'");
      ins.global = g;
      ins.a = local_slot(tok[2]);
      break;
    }
    case Opcode::add: case Opcode::sub: case Opcode::mul: case Opcode::div:
    case Opcode::pow_: case Opcode::min_: case Opcode::max_:
    case Opcode::lt: case Opcode::le: case Opcode::eq:
    case Opcode::and_: case Opcode::or_:
      need(3);
      ins.dst = local_slot(tok[1]);
      ins.a = local_slot(tok[2]);
      ins.b = local_slot(tok[3]);
      break;
    case Opcode::sqrt_: case Opcode::abs_:
      need(2);
      ins.dst = local_slot(tok[1]);
      ins.a = local_slot(tok[2]);
      break;
    case Opcode::lookup: {
      need(4);
      ins.dst = local_slot(tok[1]);
      int t = program.table_index(tok[2]);
      if (t < 0) syntax("unknown table '" + tok[2] + "'");
      ins.table = t;
      ins.a = local_slot(tok[3]);
      auto f = waypoint_field_from_name(tok[4]);
      if (!f) fail(ErrorCode::UnknownField, "waypoint field '" + tok[4] + "'");
      ins.wp_field = *f;
      break;
    }
    case Opcode::publish: {
      if (tok.size() < 2) syntax("'publish' expects a message kind");
      auto kind = message_kind_from_name(tok[1]);
      if (!kind) fail(ErrorCode::UnknownMessageKind, "'" + tok[1] + "'");
      if (!is_command_kind(*kind))
        syntax(std::string("apps may only publish command kinds, not ") + tok[1]);
      ins.kind = *kind;
      for (size_t i = 2; i < tok.size(); ++i) {
        size_t eq_pos = tok[i].find('=');
        if (eq_pos == std::string::npos)
          syntax("publish argument '" + tok[i] + "' must be field=value");
        std::string field = tok[i].substr(0, eq_pos);
        std::string value = tok[i].substr(eq_pos + 1);
        if (!find_field(*kind, field))
          fail(ErrorCode::UnknownField,
               std::string(message_kind_name(*kind)) + "." + field);
        ins.publish_args.push_back(PublishArg{field, parse_operand(value)});
      }
      break;
    }
    case Opcode::netsend: {
      if (tok.size() < 2) syntax("'netsend' expects a host");
      ins.host = tok[1];
      for (size_t i = 2; i < tok.size(); ++i)
        ins.send_args.push_back(parse_operand(tok[i]));
      break;
    }
    case Opcode::br:
      need(3);
      ins.a = local_slot(tok[1]);
      break;
    case Opcode::jmp:
      need(1);
      break;
    case Opcode::halt:
      need(0);
      break;
  }

  PendingTargets pt;
  if (ins.op == Opcode::br) {
    pt.then_name = tok[2];
    pt.else_name = tok[3];
  } else if (ins.op == Opcode::jmp) {
    pt.target_name = tok[1];
  }
  pending.push_back(pt);
  block->instructions.push_back(std::move(ins));
}

void Parser::parse_line(const std::vector<std::string>& tok) {
  const std::string& head = tok[0];

  if (head == "app") {
    if (tok.size() != 2) syntax("'app' expects one identifier");
    if (saw_app_line) syntax("duplicate 'app' line");
    saw_app_line = true;
    program.app_id = tok[1];
    return;
  }
  if (head == "global") {
    if (handler) syntax("'global' must precede handlers");
    if (tok.size() != 3) syntax("'global' expects name and initial value");
    if (!valid_identifier(tok[1], true)) syntax("invalid global name '" + tok[1] + "'");
    if (program.global_index(tok[1]) >= 0) syntax("duplicate global '" + tok[1] + "'");
    program.globals.push_back(GlobalVar{tok[1], parse_literal(tok[2]), false});
    return;
  }
  if (head == "table") {
    if (handler) syntax("'table' must precede handlers");
    if (tok.size() == 2) {
      declare_table(tok[1], "");
    } else if (tok.size() == 4 && tok[2] == "asset") {
      declare_table(tok[1], tok[3]);
    } else {
      syntax("'table' expects a name or 'table <name> asset <file>'");
    }
    return;
  }
  if (head == "waypoint") {
    if (handler) syntax("'waypoint' must precede handlers");
    if (tok.size() != 5) syntax("'waypoint' expects table, x, y, heading");
    int t = program.table_index(tok[1]);
    if (t < 0) syntax("unknown table '" + tok[1] + "'");
    if (!program.tables[t].asset.empty())
      syntax("table '" + tok[1] + "' is asset-backed");
    Value x = parse_literal(tok[2]), y = parse_literal(tok[3]), h = parse_literal(tok[4]);
    if (x.is_bool || y.is_bool || h.is_bool) syntax("waypoint fields must be numbers");
    program.tables[t].points.push_back(
        Waypoint{x.num, y.num, normalize_angle(h.num)});
    refresh_length_global(t);
    return;
  }
  if (head == "handler") {
    if (tok.size() != 2) syntax("'handler' expects a message kind followed by ':'");
    std::string kind_name = tok[1];
    if (!kind_name.empty() && kind_name.back() == ':') kind_name.pop_back();
    auto kind = message_kind_from_name(kind_name);
    if (!kind) fail(ErrorCode::UnknownMessageKind, "'" + kind_name + "'");
    if (!is_sensor_kind(*kind) && !is_command_kind(*kind))
      fail(ErrorCode::UnknownMessageKind, "'" + kind_name + "' is not subscribable");
    finish_handler();
    if (program.handler_for(*kind)) syntax("duplicate handler for " + kind_name);
    program.handlers.push_back(Handler{*kind, {}, {}});
    handler = &program.handlers.back();
    return;
  }
  if (head == "block") {
    if (!handler) syntax("'block' outside a handler");
    if (tok.size() != 2) syntax("'block' expects a name followed by ':'");
    std::string name = tok[1];
    if (!name.empty() && name.back() == ':') name.pop_back();
    if (!valid_identifier(name, false)) syntax("invalid block name '" + name + "'");
    if (handler->block_index(name) >= 0) syntax("duplicate block '" + name + "'");
    handler->blocks.push_back(BasicBlock{name, {}});
    block = &handler->blocks.back();
    return;
  }
  parse_instruction(tok);
}

}  // namespace

AppProgram parse_program(const std::string& text) {
  Parser parser;
  std::istringstream in(text);
  std::string raw;
  while (std::getline(in, raw)) {
    ++parser.line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    std::istringstream line(raw);
    std::vector<std::string> tok;
    std::string t;
    while (line >> t) tok.push_back(t);
    if (tok.empty()) continue;
    parser.parse_line(tok);
  }
  ++parser.line_no;
  parser.finish_handler();
  if (!parser.saw_app_line)
    throw AvError(ErrorCode::SyntaxError, "missing 'app' line");
  return std::move(parser.program);
}

std::string print_program(const AppProgram& p) {
  std::ostringstream out;
  out << "app " << p.app_id << "\n";
  for (const auto& g : p.globals) {
    if (g.is_table_length) continue;  // auto-defined on parse
    out << "global " << g.name << " " << fmt_literal(g.initial) << "\n";
  }
  for (const auto& t : p.tables) {
    if (!t.asset.empty()) {
      out << "table " << t.name << " asset " << t.asset << "\n";
      continue;
    }
    out << "table " << t.name << "\n";
    for (const auto& w : t.points)
      out << "waypoint " << t.name << " " << fmt_double(w.x) << " "
          << fmt_double(w.y) << " " << fmt_double(w.heading) << "\n";
  }
  for (const auto& h : p.handlers) {
    out << "\nhandler " << message_kind_name(h.trigger) << ":\n";
    for (const auto& blk : h.blocks) {
      out << "block " << blk.name << ":\n";
      for (const auto& ins : blk.instructions) {
        out << "  " << opcode_name(ins.op);
        auto local = [&](int slot) { return " " + h.local_names[slot]; };
        switch (ins.op) {
          case Opcode::konst:
            out << local(ins.dst) << " " << fmt_literal(ins.literal);
            break;
          case Opcode::read:
            out << local(ins.dst) << " " << ins.field_path;
            break;
          case Opcode::getg:
            out << local(ins.dst) << " " << p.globals[ins.global].name;
            break;
          case Opcode::setg:
            out << " " << p.globals[ins.global].name << local(ins.a);
            break;
          case Opcode::add: case Opcode::sub: case Opcode::mul: case Opcode::div:
          case Opcode::pow_: case Opcode::min_: case Opcode::max_:
          case Opcode::lt: case Opcode::le: case Opcode::eq:
          case Opcode::and_: case Opcode::or_:
            out << local(ins.dst) << local(ins.a) << local(ins.b);
            break;
          case Opcode::sqrt_: case Opcode::abs_:
            out << local(ins.dst) << local(ins.a);
            break;
          case Opcode::lookup:
            out << local(ins.dst) << " " << p.tables[ins.table].name << local(ins.a)
                << " " << waypoint_field_name(ins.wp_field);
            break;
          case Opcode::publish:
            out << " " << message_kind_name(ins.kind);
            for (const auto& arg : ins.publish_args) {
              out << " " << arg.field << "=";
              if (arg.value.is_literal)
                out << fmt_literal(arg.value.literal);
              else
                out << h.local_names[arg.value.slot];
            }
            break;
          case Opcode::netsend:
            out << " " << ins.host;
            for (const auto& arg : ins.send_args) {
              if (arg.is_literal)
                out << " " << fmt_literal(arg.literal);
              else
                out << " " << h.local_names[arg.slot];
            }
            break;
          case Opcode::br:
            out << local(ins.a) << " " << h.blocks[ins.then_block].name << " "
                << h.blocks[ins.else_block].name;
            break;
          case Opcode::jmp:
            out << " " << h.blocks[ins.target].name;
            break;
          case Opcode::halt:
            break;
        }
        out << "\n";
      }
    }
  }
  return out.str();
}

std::vector<Waypoint> parse_waypoint_csv(const std::string& text) {
  std::vector<Waypoint> points;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (line_no == 1 && line.find("x,y,heading") != std::string::npos) continue;
    double x, y, h;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &x, &y, &h) != 3)
      throw AvError(ErrorCode::SyntaxError,
                    "bad waypoint row at line " + std::to_string(line_no));
    points.push_back(Waypoint{x, y, normalize_angle(h)});
  }
  return points;
}

std::string waypoint_csv(const std::vector<Waypoint>& points) {
  std::ostringstream out;
  out << "x,y,heading\n";
  for (const auto& w : points)
    out << fmt_double(w.x) << "," << fmt_double(w.y) << "," << fmt_double(w.heading)
        << "\n";
  return out.str();
}

std::optional<Value> parse_ir_literal(const std::string& token) {
  return literal_from_token(token);
}

void bind_assets(AppProgram& p, const std::map<std::string, std::string>& assets) {
  for (auto& table : p.tables) {
    if (table.asset.empty()) continue;
    auto it = assets.find(table.asset);
    if (it == assets.end())
      throw AvError(ErrorCode::MissingField,
                    "asset '" + table.asset + "' for table '" + table.name + "'");
    table.points = parse_waypoint_csv(it->second);
    int g = p.global_index(table.name + ".length");
    if (g >= 0)
      p.globals[g].initial = Value::number(static_cast<double>(table.points.size()));
  }
}

}  // namespace avguard
