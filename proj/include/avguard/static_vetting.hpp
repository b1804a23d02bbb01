#ifndef AVGUARD_STATIC_VETTING_HPP
#define AVGUARD_STATIC_VETTING_HPP

#include <set>
#include <string>
#include <vector>

#include "avguard/errors.hpp"
#include "avguard/ir.hpp"
#include "avguard/manifest.hpp"
#include "avguard/package.hpp"

namespace avguard {

// Syntactic over-approximation of what a program touches: instructions in
// unreachable code still count, since the manifest must cover worst-case
// behavior.
struct ResourceUsage {
  std::set<MessageKind> subscribed;   // handler triggers
  std::set<MessageKind> published;    // command kinds in publish instructions
  std::set<std::string> net_hosts;    // netsend host literals
  bool reads_location = false;        // any read of vehicle_report.position.*

  bool operator==(const ResourceUsage&) const = default;
};

enum class SinkKind { net_send, storage };

struct TaintFlow {
  std::string source;                     // matched source pattern
  SinkKind sink = SinkKind::net_send;
  std::string sink_host;                  // for net_send
  std::vector<std::string> witness_path;  // CFG block names, source read -> sink

  bool operator==(const TaintFlow&) const = default;
};

// Privacy sources default: location-bearing fields of the vehicle report.
std::vector<std::string> default_taint_sources();

// Finite automaton over app-visible events; deterministic, total via
// implicit self-loops on unlisted events. Events:
//   publish:<kind>                   any publish of that kind
//   publish:<kind>.<field>=<const>   field equals the constant
//   publish:<kind>.<field>><const>   field greater than the constant
//   observe:<kind>.<field>=<const>   handler for <kind> sees that field value
struct RuleEvent {
  bool is_observe = false;
  MessageKind kind = MessageKind::vehicle_report;
  enum class Cmp { none, eq, gt };
  Cmp cmp = Cmp::none;
  std::string field;
  double value = 0;

  std::string label() const;
  bool operator==(const RuleEvent&) const = default;
};

struct RuleTransition {
  int from = 0;
  RuleEvent event;
  int to = 0;
};

struct RuleAutomaton {
  std::string rule_id;
  std::vector<std::string> states;
  int start = 0;
  std::vector<RuleTransition> transitions;
  std::set<int> bad;
};

// Parses the rule file format: `state <name> [bad]`, `start <name>`,
// `on <state> <event> -> <state>`. Throws ConfigInvalid on malformed input
// or nondeterministic transition tables.
RuleAutomaton parse_rule_automaton(const std::string& text, const std::string& rule_id);
RuleAutomaton load_rule_file(const std::string& path);
std::vector<RuleAutomaton> load_rule_dir(const std::string& dir);

struct StaticReport {
  std::string app_id;
  std::vector<Finding> findings;
  enum class Verdict { pass, reject };
  Verdict verdict = Verdict::pass;
};

std::string serialize_static_report(const StaticReport& report);

ResourceUsage collect_resource_usage(const AppProgram& p);

// Declared-vs-implemented consistency: rejects undeclared publishes,
// subscriptions and network use, actuator control outside the driving
// category; warns on declared-but-unused requests.
std::vector<Finding> check_manifest_consistency(const AppProgram& p,
                                                const AppManifest& m);

// Forward may-taint dataflow fixed point over each handler CFG, with taint
// carried across invocations through globals. Sound over-approximation;
// each reported flow carries a syntactic CFG witness path.
std::vector<TaintFlow> taint_analysis(const AppProgram& p,
                                      const std::vector<std::string>& sources,
                                      const std::set<SinkKind>& sinks);

// Product reachability of CFG x automaton treating handler invocations as
// unboundedly repeatable. At most one finding per rule, carrying the
// shortest violating event sequence as witness.
std::vector<Finding> check_temporal_rule(const AppProgram& p, const RuleAutomaton& r);

// Aggregates manifest validation, program validation, consistency, taint
// (reject when a flow reaches an undeclared network host) and all rule
// automata. Deterministic finding order.
StaticReport run_static_vetting(const AppPackage& pkg,
                                const std::vector<RuleAutomaton>& rules);

}  // namespace avguard

#endif  // AVGUARD_STATIC_VETTING_HPP
