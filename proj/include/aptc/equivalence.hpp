#ifndef APTC_EQUIVALENCE_HPP
#define APTC_EQUIVALENCE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "aptc/event_structure.hpp"
#include "aptc/sos.hpp"

namespace aptc {

struct VerdictStats {
  size_t states = 0;
  size_t iterations = 0;
  long long millis = 0;
};

struct EquivalenceVerdict {
  bool related = false;
  // On success: the witnessing relation as (left,right) state pairs (state
  // or configuration indices). On failure: a distinguishing step sequence.
  std::vector<std::pair<uint32_t, uint32_t>> relation;
  std::vector<std::string> distinguishing;
  VerdictStats stats;

  std::string to_json(bool with_millis = false) const;
};

// Strong step bisimilarity with the termination predicate, by partition
// refinement over the disjoint union.
EquivalenceVerdict check_step_bisimulation(const TransitionSystem& t1,
                                           const TransitionSystem& t2);

// Branching step bisimilarity (divergence-blind) with the rooted condition
// applied at the two initial states.
EquivalenceVerdict check_rooted_branching_step_bisimulation(
    const TransitionSystem& t1, const TransitionSystem& t2);

EquivalenceVerdict check_pomset_bisimulation(const PrimeEventStructure& p1,
                                             const PrimeEventStructure& p2);

EquivalenceVerdict check_hp_bisimulation(const PrimeEventStructure& p1,
                                         const PrimeEventStructure& p2);

EquivalenceVerdict check_hhp_bisimulation(const PrimeEventStructure& p1,
                                          const PrimeEventStructure& p2);

// Independent validators re-checking a success witness clause by clause.
bool validate_step_witness(const TransitionSystem& t1,
                           const TransitionSystem& t2,
                           const EquivalenceVerdict& v);
bool validate_branching_witness(const TransitionSystem& t1,
                                const TransitionSystem& t2,
                                const EquivalenceVerdict& v);

}  // namespace aptc

#endif
