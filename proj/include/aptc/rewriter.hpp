#ifndef APTC_REWRITER_HPP
#define APTC_REWRITER_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aptc/model.hpp"
#include "aptc/term.hpp"

namespace aptc {

struct NoMatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SideConditionFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct FuelExhausted : std::runtime_error {
  explicit FuelExhausted(size_t fuel)
      : std::runtime_error("rewriting fuel exhausted: " +
                           std::to_string(fuel)) {}
};
struct NonBasicResidue : std::runtime_error {
  explicit NonBasicResidue(const std::string& node)
      : std::runtime_error("normal form keeps a non-basic node: " + node) {}
};

enum class RewriteDir { LeftToRight, RightToLeft };

// Table tag + row label, e.g. "APTC.C11".
struct AxiomId {
  std::string table;
  std::string row;
  std::string text() const { return table + "." + row; }
};

struct TraceEntry {
  AxiomId axiom;
  std::vector<int> path;  // 0 = left child, 1 = right child
  TermPtr before;         // subterm replaced
  TermPtr after;
  std::string path_text() const;
};

struct ProofTrace {
  std::vector<TraceEntry> entries;
  std::string text() const;
};

// The rows of every in-scope axiom table. Stable order.
std::vector<AxiomId> axiom_catalog();

// Applies one axiom at the position given by path. Throws NoMatch when the
// pattern does not fit and SideConditionFailed when its condition fails.
TermPtr apply_axiom_once(const TermPtr& t, const AxiomId& id,
                         const std::vector<int>& path, RewriteDir dir,
                         const Model& m);

// Leftmost-innermost normalization to a basic term, with +/||| chains kept
// flattened-sorted (A1/A2/P2/P3 are structural). Proof steps recorded.
std::pair<TermPtr, ProofTrace> normalize_to_basic(const TermPtr& t,
                                                  const Model& m,
                                                  size_t fuel = 100000);

// Replays a trace from t; returns the final term.
TermPtr replay_trace(const TermPtr& t, const ProofTrace& trace);

// AC-canonical form (flatten and sort + and ||| chains, drop duplicates and
// delta summands). Used to compare normal forms.
TermPtr ac_canonical(const TermPtr& t);

struct FuzzViolation {
  AxiomId axiom;
  std::string lhs;
  std::string rhs;
  std::string detail;
};

struct FuzzReport {
  size_t instances = 0;
  size_t skipped = 0;  // side condition unsatisfied by the drawn instance
  std::vector<FuzzViolation> violations;
};

// Random axiom instances per table, each checked semantically: step
// bisimilarity for the strong tables, rooted branching step bisimilarity
// for the silent-step rows.
FuzzReport soundness_fuzz(uint64_t seed, size_t count_per_table,
                          size_t size_bound);

}  // namespace aptc

#endif
