#ifndef APTC_MODEL_HPP
#define APTC_MODEL_HPP

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "aptc/term.hpp"

namespace aptc {

struct ModelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ActionSignature {
  std::string name;
  std::vector<std::string> domains;  // parameter domain names
  std::string sends_mailbox;         // empty when not a send
  std::string receives_mailbox;      // empty when not a receive
};

struct RecursiveSpec {
  std::string name;
  // Equation order is declaration order; preserved for determinism.
  std::vector<std::pair<std::string, TermPtr>> equations;

  const TermPtr* find(const std::string& var) const {
    for (const auto& [v, t] : equations)
      if (v == var) return &t;
    return nullptr;
  }
};

// One nondeterministic branch of an action's effect on the store.
struct EffectBranch {
  std::vector<std::pair<std::string, std::string>> assigns;  // var := value
};

struct MailboxDecl {
  std::string name;
  int capacity = 4;
};

struct VarDecl {
  std::string name;
  std::string domain;
  std::string init;
};

struct Model {
  std::string name;
  std::vector<std::string> domain_order;
  std::map<std::string, std::vector<std::string>> domains;
  std::vector<ActionSignature> action_order;
  std::map<std::string, ActionSignature> actions;
  // Communication table over ground action instances; stored with both
  // orientations so lookup is symmetric.
  std::map<std::pair<ActionLabel, ActionLabel>, ActionLabel> gamma;
  std::set<std::pair<ActionLabel, ActionLabel>> conflicts;   // symmetric
  std::set<std::pair<ActionLabel, ActionLabel>> causal_le;   // declared <=
  std::vector<MailboxDecl> mailboxes;
  std::vector<VarDecl> vars;
  std::map<std::string, std::vector<EffectBranch>> effects;  // by action name
  std::vector<RecursiveSpec> specs;
  TermPtr system;
  TermPtr spec_term;
  std::set<std::string> encap_set;  // H of the system term, informational
  std::set<std::string> hide_set;   // I of the system term, informational

  // Messages (arg tuples) that some declared send can place in each box.
  // Receives of other messages act as plain external inputs.
  std::map<std::string, std::set<std::vector<std::string>>> sendable;

  const RecursiveSpec* find_spec(const std::string& name) const {
    for (const auto& s : specs)
      if (s.name == name) return &s;
    return nullptr;
  }
  const MailboxDecl* find_mailbox(const std::string& name) const {
    for (const auto& m : mailboxes)
      if (m.name == name) return &m;
    return nullptr;
  }

  std::optional<ActionLabel> gamma_lookup(const ActionLabel& a,
                                          const ActionLabel& b) const {
    auto it = gamma.find({a, b});
    if (it != gamma.end()) return it->second;
    return std::nullopt;
  }
  bool in_conflict(const ActionLabel& a, const ActionLabel& b) const {
    return conflicts.count({a, b}) > 0 || conflicts.count({b, a}) > 0;
  }

  // Unfolds <var|spec>: the right-hand side with every RecVar replaced by
  // the corresponding RecCall. Cached.
  TermPtr unfold(const std::string& spec, const std::string& var) const;

  void validate() const;  // establishes the Model invariants or throws

 private:
  mutable std::map<std::pair<std::string, std::string>, TermPtr> unfold_cache_;
};

// An empty model carrying only reserved constants; handy for tests.
Model empty_model();

}  // namespace aptc

#endif
