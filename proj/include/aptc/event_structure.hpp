#ifndef APTC_EVENT_STRUCTURE_HPP
#define APTC_EVENT_STRUCTURE_HPP

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "aptc/model.hpp"
#include "aptc/sos.hpp"
#include "aptc/term.hpp"

namespace aptc {

struct UnsupportedConstruct : std::runtime_error {
  explicit UnsupportedConstruct(const std::string& what)
      : std::runtime_error("no event structure semantics for " + what) {}
};

struct ExplosionGuard : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Finite prime event structure. Causality is stored as the full strict
// predecessor relation (transitively closed); conflict is symmetric and kept
// hereditarily closed.
struct PrimeEventStructure {
  std::vector<ActionLabel> labels;           // per event
  std::vector<std::set<uint32_t>> causes;    // strict predecessors, closed
  std::set<std::pair<uint32_t, uint32_t>> conflict;  // both orientations

  size_t size() const { return labels.size(); }
  bool le(uint32_t a, uint32_t b) const {  // a <= b
    return a == b || causes[b].count(a) > 0;
  }
  bool in_conflict(uint32_t a, uint32_t b) const {
    return conflict.count({a, b}) > 0;
  }
  bool concurrent(uint32_t a, uint32_t b) const {
    return a != b && !le(a, b) && !le(b, a) && !in_conflict(a, b);
  }
  bool fireable(uint32_t e) const {  // delta events never fire
    return labels[e].kind != ActionKind::Delta;
  }

  void close_hereditary();  // e # e' <= e'' implies e # e''
  void check_valid() const;
};

// Compositional construction for the finite pure fragment: atoms, ., +,
// ||| (concurrent events), || and | (with fresh gamma events). Everything
// else throws UnsupportedConstruct.
PrimeEventStructure build_pes(const TermPtr& t, const Model& m);

using EventSet = std::set<uint32_t>;

// All configurations (conflict-free, causally closed sets) including the
// empty one, in a deterministic order. Throws ExplosionGuard past 2^20.
std::vector<EventSet> enumerate_configurations(const PrimeEventStructure& p);

struct PomsetTransition {
  EventSet add;     // the fired events X
  EventSet to;      // C union X
  bool is_step;     // pairwise concurrent
  StepLabel label;  // visible multiset, tau when hidden-only
};

// Every nonempty extension of c that lands on a configuration; delta events
// never fire.
std::vector<PomsetTransition> pomset_transitions(const PrimeEventStructure& p,
                                                 const EventSet& c);

// Successful termination: no event (delta included) can extend c.
bool configuration_terminated(const PrimeEventStructure& p, const EventSet& c);

// Canonical encoding of the labeled poset induced by X with tau events
// removed; equal strings iff isomorphic pomsets.
std::string canonical_pomset(const PrimeEventStructure& p, const EventSet& x);

// The step-transition system over configurations (used by the equivalence
// hierarchy and the SOS agreement check).
TransitionSystem pes_step_lts(const PrimeEventStructure& p);

std::string export_pes_dot(const PrimeEventStructure& p);

}  // namespace aptc

#endif
