#ifndef APTC_DATA_STATE_HPP
#define APTC_DATA_STATE_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "aptc/model.hpp"
#include "aptc/term.hpp"

namespace aptc {

// Immutable store + mailbox snapshot. Maps keep entries ordered, so equal
// states hash and render identically.
struct DataState {
  std::map<std::string, std::string> store;
  // multiset: message tuple -> multiplicity
  std::map<std::string, std::map<std::vector<std::string>, int>> mailboxes;

  bool operator==(const DataState& o) const {
    return store == o.store && mailboxes == o.mailboxes;
  }
  bool operator<(const DataState& o) const {
    if (store != o.store) return store < o.store;
    return mailboxes < o.mailboxes;
  }
  size_t hash() const;
  std::string text() const;
};

DataState initial_state(const Model& m);

// test(phi, s): eps holds, delta does not, Atom consults the store,
// SeqG/ParG conjoin, AltG disjoins, Not negates.
bool eval_guard(const GuardPtr& g, const DataState& s, const Model& m);

// effect(e, s): declared branches, identity when none declared. tau and
// effect-free actions map s to {s}.
std::vector<DataState> apply_effect(const ActionLabel& e, const DataState& s,
                                    const Model& m);

// wp(e, phi) at s: phi holds in every effect successor.
bool wp_holds(const ActionLabel& e, const GuardPtr& g, const DataState& s,
              const Model& m);

struct MailboxFull : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Adds msg; throws MailboxFull at capacity.
DataState mailbox_send(const std::string& box,
                       const std::vector<std::string>& msg,
                       const DataState& s, const Model& m);

// Removes one occurrence of msg, or nullopt when absent (the receive is
// simply not enabled).
std::optional<DataState> mailbox_receive(const std::string& box,
                                         const std::vector<std::string>& msg,
                                         const DataState& s, const Model& m);

// Enumerates every store assignment over the declared variables (mailboxes
// empty). Used for the G8/G9-style whole-space side conditions.
std::vector<DataState> enumerate_store_states(const Model& m);

}  // namespace aptc

#endif
