#ifndef APTC_SOS_HPP
#define APTC_SOS_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "aptc/data_state.hpp"
#include "aptc/model.hpp"
#include "aptc/term.hpp"

namespace aptc {

struct UnguardedRecursion : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StateBoundExceeded : std::runtime_error {
  explicit StateBoundExceeded(size_t bound)
      : std::runtime_error("state bound exceeded: " + std::to_string(bound)) {}
};

// A step label: the multiset of visible actions fired together. An empty
// multiset is the silent step tau (pure-tau steps and fully hidden steps
// both land there).
struct StepLabel {
  std::vector<ActionLabel> actions;  // sorted; empty = tau

  bool silent() const { return actions.empty(); }
  bool operator==(const StepLabel& o) const { return actions == o.actions; }
  bool operator<(const StepLabel& o) const { return actions < o.actions; }
  std::string text() const;  // "{a(v),b}" or "tau"
};

StepLabel make_step(std::vector<ActionLabel> actions);

struct Configuration {
  TermPtr term;  // null = the terminated process
  DataState state;

  bool terminated() const { return term == nullptr; }
  bool operator==(const Configuration& o) const {
    return term_equal(term, o.term) && state == o.state;
  }
  size_t hash() const;
};

struct EnabledStep {
  StepLabel label;
  Configuration to;  // to.term null means the step ends in termination
};

// All steps enabled in c per the transition tables, with shadow pairing
// resolved and silent structural moves (eps, guards, shadows, new) folded
// away. Deterministically ordered.
std::vector<EnabledStep> enabled_steps(const Configuration& c, const Model& m);

// Termination predicate: the configuration can reach successful termination
// without firing any action.
bool terminates(const TermPtr& t, const DataState& s, const Model& m);

struct TransitionSystem {
  struct Transition {
    uint32_t src;
    uint32_t label;  // index into labels
    uint32_t dst;
  };
  std::vector<StepLabel> labels;
  std::vector<Transition> transitions;
  std::vector<std::string> state_desc;  // rendered configurations
  std::vector<uint8_t> terminating;     // per-state termination flag
  size_t num_states = 0;
  uint32_t initial = 0;
  // Index of the materialized termination sink, or UINT32_MAX when no state
  // terminates.
  uint32_t sink = UINT32_MAX;

  std::vector<std::vector<std::pair<uint32_t, uint32_t>>> out;  // (label,dst)
  void build_out();
};

struct LtsOptions {
  size_t max_states = 1000000;
  int jobs = 1;
  bool keep_desc = true;
};

TransitionSystem generate_lts(const Model& m, const TermPtr& root,
                              const LtsOptions& opts = {});

struct GuardednessVerdict {
  bool guarded = true;
  std::vector<std::string> cycle;  // offending variable cycle when unguarded
  std::string text() const;
};

GuardednessVerdict check_guardedness(const RecursiveSpec& spec,
                                     const Model& m);

std::string export_aut(const TransitionSystem& ts);
std::string export_dot(const TransitionSystem& ts);

}  // namespace aptc

#endif
