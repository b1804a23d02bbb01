#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

#include "avguard/ir.hpp"

namespace avguard {

namespace {

// Type lattice for the forward dataflow: unknown < {number, boolean} < conflict.
enum class VType : uint8_t { unknown, number, boolean, conflict };

VType join(VType a, VType b) {
  if (a == b) return a;
  if (a == VType::unknown) return b;
  if (b == VType::unknown) return a;
  return VType::conflict;
}

VType literal_type(const Value& v) {
  return v.is_bool ? VType::boolean : VType::number;
}

std::string loc(const AppProgram& p, size_t hi, size_t bi, size_t ii) {
  const Handler& h = p.handlers[hi];
  return std::string(message_kind_name(h.trigger)) + "/" + h.blocks[bi].name + ":" +
         std::to_string(ii);
}

struct HandlerChecker {
  const AppProgram& program;
  size_t handler_idx;
  const Handler& handler;
  std::vector<Finding>& findings;

  void add(const std::string& rule, const std::string& path, std::string evidence) {
    findings.push_back(
        Finding{rule, Severity::reject, path, std::move(evidence), {}});
  }

  bool structure_ok() {
    bool ok = true;
    if (handler.blocks.empty()) {
      add("missing_entry", message_kind_name(handler.trigger), "handler has no blocks");
      return false;
    }
    for (size_t bi = 0; bi < handler.blocks.size(); ++bi) {
      const auto& blk = handler.blocks[bi];
      if (blk.instructions.empty() || !is_terminator(blk.instructions.back().op)) {
        add("missing_terminator", loc(program, handler_idx, bi, blk.instructions.size()),
            "block must end with br/jmp/halt");
        ok = false;
      }
      for (size_t ii = 0; ii + 1 < blk.instructions.size(); ++ii) {
        if (is_terminator(blk.instructions[ii].op)) {
          add("misplaced_terminator", loc(program, handler_idx, bi, ii),
              "terminator before end of block");
          ok = false;
        }
      }
      for (size_t ii = 0; ii < blk.instructions.size(); ++ii) {
        const auto& ins = blk.instructions[ii];
        auto check_block_ref = [&](int idx) {
          if (idx < 0 || idx >= static_cast<int>(handler.blocks.size())) {
            add("bad_block_ref", loc(program, handler_idx, bi, ii),
                "branch target out of range");
            ok = false;
          }
        };
        if (ins.op == Opcode::br) {
          check_block_ref(ins.then_block);
          check_block_ref(ins.else_block);
        } else if (ins.op == Opcode::jmp) {
          check_block_ref(ins.target);
        }
      }
    }
    return ok;
  }

  std::vector<int> successors(const BasicBlock& blk) const {
    const Instruction& last = blk.instructions.back();
    if (last.op == Opcode::br) return {last.then_block, last.else_block};
    if (last.op == Opcode::jmp) return {last.target};
    return {};
  }

  void check_reachability() {
    std::vector<bool> seen(handler.blocks.size(), false);
    std::deque<int> queue{0};
    seen[0] = true;
    while (!queue.empty()) {
      int b = queue.front();
      queue.pop_front();
      for (int s : successors(handler.blocks[b])) {
        if (!seen[s]) {
          seen[s] = true;
          queue.push_back(s);
        }
      }
    }
    for (size_t bi = 0; bi < handler.blocks.size(); ++bi)
      if (!seen[bi])
        add("unreachable_block", loc(program, handler_idx, bi, 0),
            "block not reachable from entry");
  }

  // Must-assigned + type dataflow in one pass over the CFG.
  void check_dataflow() {
    size_t nlocals = handler.local_names.size();
    size_t nblocks = handler.blocks.size();
    std::vector<std::vector<bool>> in_assigned(nblocks,
                                               std::vector<bool>(nlocals, false));
    std::vector<std::vector<VType>> in_type(
        nblocks, std::vector<VType>(nlocals, VType::unknown));
    std::vector<bool> visited(nblocks, false);
    visited[0] = true;

    auto transfer = [&](int bi, std::vector<bool>& assigned, std::vector<VType>& type,
                        bool report) {
      const auto& blk = handler.blocks[bi];
      for (size_t ii = 0; ii < blk.instructions.size(); ++ii) {
        const Instruction& ins = blk.instructions[ii];
        auto use = [&](int slot, VType expect, const char* what) {
          if (slot < 0) return;
          if (!assigned[slot]) {
            if (report)
              add("use_before_def", loc(program, handler_idx, bi, ii),
                  "'" + handler.local_names[slot] + "' may be unassigned");
            return;
          }
          VType t = type[slot];
          if (t == VType::unknown) return;
          if (expect != VType::unknown && t != expect) {
            if (report)
              add("type_mismatch", loc(program, handler_idx, bi, ii),
                  "'" + handler.local_names[slot] + "' is not a " + what);
          }
        };
        auto def = [&](int slot, VType t) {
          if (slot < 0) return;
          assigned[slot] = true;
          type[slot] = t;
        };
        switch (ins.op) {
          case Opcode::konst:
            def(ins.dst, literal_type(ins.literal));
            break;
          case Opcode::read:
            def(ins.dst, ins.field_is_bool ? VType::boolean : VType::number);
            break;
          case Opcode::getg:
            def(ins.dst, literal_type(program.globals[ins.global].initial));
            break;
          case Opcode::setg: {
            use(ins.a, literal_type(program.globals[ins.global].initial),
                program.globals[ins.global].initial.is_bool ? "boolean" : "number");
            if (program.globals[ins.global].is_table_length && report)
              add("immutable_global", loc(program, handler_idx, bi, ii),
                  "'" + program.globals[ins.global].name + "' is immutable");
            break;
          }
          case Opcode::add: case Opcode::sub: case Opcode::mul: case Opcode::div:
          case Opcode::pow_: case Opcode::min_: case Opcode::max_:
            use(ins.a, VType::number, "number");
            use(ins.b, VType::number, "number");
            def(ins.dst, VType::number);
            break;
          case Opcode::lt: case Opcode::le: case Opcode::eq:
            use(ins.a, VType::number, "number");
            use(ins.b, VType::number, "number");
            def(ins.dst, VType::boolean);
            break;
          case Opcode::and_: case Opcode::or_:
            use(ins.a, VType::boolean, "boolean");
            use(ins.b, VType::boolean, "boolean");
            def(ins.dst, VType::boolean);
            break;
          case Opcode::sqrt_: case Opcode::abs_:
            use(ins.a, VType::number, "number");
            def(ins.dst, VType::number);
            break;
          case Opcode::lookup:
            use(ins.a, VType::number, "number");
            def(ins.dst, VType::number);
            break;
          case Opcode::publish: {
            for (const auto& arg : ins.publish_args) {
              const FieldInfo* f = find_field(ins.kind, arg.field);
              if (!f) {
                if (report)
                  add("unknown_field", loc(program, handler_idx, bi, ii),
                      std::string(message_kind_name(ins.kind)) + "." + arg.field);
                continue;
              }
              if (arg.value.is_literal) {
                if (report && literal_type(arg.value.literal) !=
                                  (f->is_bool ? VType::boolean : VType::number))
                  add("type_mismatch", loc(program, handler_idx, bi, ii),
                      "literal for field '" + arg.field + "' has wrong type");
              } else {
                use(arg.value.slot, f->is_bool ? VType::boolean : VType::number,
                    f->is_bool ? "boolean" : "number");
              }
            }
            if (report) {
              for (const auto& f : fields_of(ins.kind)) {
                if (!f.required_on_publish) continue;
                bool covered = std::any_of(
                    ins.publish_args.begin(), ins.publish_args.end(),
                    [&](const PublishArg& a) { return a.field == f.path; });
                if (!covered)
                  add("missing_publish_field", loc(program, handler_idx, bi, ii),
                      std::string(message_kind_name(ins.kind)) + "." + f.path);
              }
            }
            break;
          }
          case Opcode::netsend:
            for (const auto& arg : ins.send_args)
              if (!arg.is_literal) use(arg.slot, VType::unknown, "value");
            break;
          case Opcode::br:
            use(ins.a, VType::boolean, "boolean");
            break;
          case Opcode::jmp:
          case Opcode::halt:
            break;
        }
      }
    };

    // fixpoint without reporting
    bool changed = true;
    while (changed) {
      changed = false;
      for (size_t bi = 0; bi < nblocks; ++bi) {
        if (!visited[bi]) continue;
        auto assigned = in_assigned[bi];
        auto type = in_type[bi];
        transfer(static_cast<int>(bi), assigned, type, false);
        for (int s : successors(handler.blocks[bi])) {
          if (s < 0 || s >= static_cast<int>(nblocks)) continue;
          if (!visited[s]) {
            visited[s] = true;
            in_assigned[s] = assigned;
            in_type[s] = type;
            changed = true;
            continue;
          }
          for (size_t v = 0; v < nlocals; ++v) {
            bool na = in_assigned[s][v] && assigned[v];
            if (na != in_assigned[s][v]) {
              in_assigned[s][v] = na;
              changed = true;
            }
            VType nt = join(in_type[s][v], type[v]);
            if (nt != in_type[s][v]) {
              in_type[s][v] = nt;
              changed = true;
            }
          }
        }
      }
    }
    // reporting pass
    for (size_t bi = 0; bi < nblocks; ++bi) {
      if (!visited[bi]) continue;
      auto assigned = in_assigned[bi];
      auto type = in_type[bi];
      transfer(static_cast<int>(bi), assigned, type, true);
    }
  }
};

}  // namespace

std::vector<Finding> validate_program(const AppProgram& p) {
  std::vector<Finding> findings;
  for (size_t hi = 0; hi < p.handlers.size(); ++hi) {
    HandlerChecker checker{p, hi, p.handlers[hi], findings};
    if (!checker.structure_ok()) continue;
    checker.check_reachability();
    checker.check_dataflow();
  }
  // a variable used twice in one instruction would otherwise report twice
  std::vector<Finding> unique;
  for (auto& f : findings)
    if (std::find(unique.begin(), unique.end(), f) == unique.end())
      unique.push_back(std::move(f));
  return unique;
}

AppState initial_state(const AppProgram& p) {
  AppState s;
  s.globals.reserve(p.globals.size());
  for (const auto& g : p.globals) s.globals.push_back(g.initial);
  return s;
}

namespace {

BusMessage build_publish(const Instruction& ins, const std::vector<Value>& locals) {
  auto value_of = [&](const Operand& op) {
    return op.is_literal ? op.literal : locals[op.slot];
  };
  auto field_value = [&](const char* name, double fallback) {
    for (const auto& arg : ins.publish_args)
      if (arg.field == name) return value_of(arg.value).num;
    return fallback;
  };
  switch (ins.kind) {
    case MessageKind::steering_cmd:
      return make_steering_cmd(field_value("angle", 0.0));
    case MessageKind::throttle_cmd:
      return make_throttle_cmd(field_value("percent", 0.0));
    case MessageKind::brake_cmd:
      return make_brake_cmd(field_value("percent", 0.0));
    case MessageKind::gear_cmd: {
      int code = static_cast<int>(std::llround(field_value("gear", 0.0)));
      code = std::clamp(code, 0, 3);
      return make_gear_cmd(static_cast<Gear>(code));
    }
    case MessageKind::engine_cmd:
      return make_engine_cmd(field_value("on", 1.0) != 0.0);
    default:
      return make_throttle_cmd(0.0);  // unreachable; parser rejects other kinds
  }
}

}  // namespace

HandlerOutcome execute_handler(const AppProgram& p, const AppState& state,
                               const BusMessage& msg, int fuel) {
  HandlerOutcome out;
  out.state = state;
  const Handler* h = p.handler_for(msg.kind);
  if (!h || h->blocks.empty()) return out;

  std::vector<Value> locals(h->local_names.size());
  int block = 0;
  size_t ip = 0;
  int executed = 0;

  auto fault = [&](AppFault::Kind kind, size_t bi, size_t ii) {
    HandlerOutcome failed;
    failed.state = state;  // effects discarded
    failed.fault = AppFault{
        kind, std::string(message_kind_name(h->trigger)) + "/" +
                  h->blocks[bi].name + ":" + std::to_string(ii)};
    failed.fuel_exhausted = (kind == AppFault::Kind::fuel_exhausted);
    return failed;
  };

  while (true) {
    if (executed == fuel) return fault(AppFault::Kind::fuel_exhausted, block, ip);
    const Instruction& ins = h->blocks[block].instructions[ip];
    ++executed;
    switch (ins.op) {
      case Opcode::konst:
        locals[ins.dst] = ins.literal;
        break;
      case Opcode::read: {
        double v = read_message_field(msg, ins.field_path);
        locals[ins.dst] =
            ins.field_is_bool ? Value::boolean(v != 0.0) : Value::number(v);
        break;
      }
      case Opcode::getg:
        locals[ins.dst] = out.state.globals[ins.global];
        break;
      case Opcode::setg:
        out.state.globals[ins.global] = locals[ins.a];
        break;
      case Opcode::add:
        locals[ins.dst] = Value::number(locals[ins.a].num + locals[ins.b].num);
        break;
      case Opcode::sub:
        locals[ins.dst] = Value::number(locals[ins.a].num - locals[ins.b].num);
        break;
      case Opcode::mul:
        locals[ins.dst] = Value::number(locals[ins.a].num * locals[ins.b].num);
        break;
      case Opcode::div:
        if (locals[ins.b].num == 0.0)
          return fault(AppFault::Kind::division_by_zero, block, ip);
        locals[ins.dst] = Value::number(locals[ins.a].num / locals[ins.b].num);
        break;
      case Opcode::pow_:
        locals[ins.dst] = Value::number(std::pow(locals[ins.a].num, locals[ins.b].num));
        break;
      case Opcode::min_:
        locals[ins.dst] = Value::number(std::fmin(locals[ins.a].num, locals[ins.b].num));
        break;
      case Opcode::max_:
        locals[ins.dst] = Value::number(std::fmax(locals[ins.a].num, locals[ins.b].num));
        break;
      case Opcode::lt:
        locals[ins.dst] = Value::boolean(locals[ins.a].num < locals[ins.b].num);
        break;
      case Opcode::le:
        locals[ins.dst] = Value::boolean(locals[ins.a].num <= locals[ins.b].num);
        break;
      case Opcode::eq:
        locals[ins.dst] = Value::boolean(locals[ins.a].num == locals[ins.b].num);
        break;
      case Opcode::and_:
        locals[ins.dst] = Value::boolean(locals[ins.a].truthy() && locals[ins.b].truthy());
        break;
      case Opcode::or_:
        locals[ins.dst] = Value::boolean(locals[ins.a].truthy() || locals[ins.b].truthy());
        break;
      case Opcode::sqrt_:
        locals[ins.dst] = Value::number(std::sqrt(locals[ins.a].num));
        break;
      case Opcode::abs_:
        locals[ins.dst] = Value::number(std::fabs(locals[ins.a].num));
        break;
      case Opcode::lookup: {
        const auto& table = p.tables[ins.table];
        double raw = locals[ins.a].num;
        if (!(raw >= 0.0) || raw >= static_cast<double>(table.points.size()))
          return fault(AppFault::Kind::table_index_out_of_range, block, ip);
        size_t idx = static_cast<size_t>(raw);
        const Waypoint& w = table.points[idx];
        double v = 0;
        switch (ins.wp_field) {
          case WaypointField::x: v = w.x; break;
          case WaypointField::y: v = w.y; break;
          case WaypointField::heading: v = w.heading; break;
          case WaypointField::sin_heading: v = std::sin(w.heading); break;
          case WaypointField::cos_heading: v = std::cos(w.heading); break;
        }
        locals[ins.dst] = Value::number(v);
        break;
      }
      case Opcode::publish:
        out.publishes.push_back(build_publish(ins, locals));
        break;
      case Opcode::netsend: {
        NetSendRecord rec;
        rec.host = ins.host;
        for (const auto& arg : ins.send_args)
          rec.values.push_back(arg.is_literal ? arg.literal.num
                                              : locals[arg.slot].num);
        out.net_sends.push_back(std::move(rec));
        break;
      }
      case Opcode::br:
        block = locals[ins.a].truthy() ? ins.then_block : ins.else_block;
        ip = 0;
        continue;
      case Opcode::jmp:
        block = ins.target;
        ip = 0;
        continue;
      case Opcode::halt:
        return out;
    }
    ++ip;
  }
}

}  // namespace avguard
