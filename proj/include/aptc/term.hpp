#ifndef APTC_TERM_HPP
#define APTC_TERM_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace aptc {

// ---------------------------------------------------------------------------
// Actions
// ---------------------------------------------------------------------------

enum class ActionKind : uint8_t { Visible, Tau, Delta, Eps };

// A ground action instance: name plus data arguments drawn from finite
// domains. tau/delta/eps are reserved and carry no arguments.
struct ActionLabel {
  std::string name;
  std::vector<std::string> args;
  ActionKind kind = ActionKind::Visible;

  bool operator==(const ActionLabel& o) const {
    return kind == o.kind && name == o.name && args == o.args;
  }
  bool operator!=(const ActionLabel& o) const { return !(*this == o); }
  bool operator<(const ActionLabel& o) const;

  std::string text() const;  // canonical "name(a1,a2)" form
  bool is_visible() const { return kind == ActionKind::Visible; }
};

ActionLabel make_action(const std::string& name,
                        std::vector<std::string> args = {});
ActionLabel tau_action();
ActionLabel delta_action();
ActionLabel eps_action();

size_t hash_action(const ActionLabel& a);

// ---------------------------------------------------------------------------
// Guards
// ---------------------------------------------------------------------------

enum class GuardKind : uint8_t { True, False, Atom, Not, Alt, Seq, Par };

struct GuardExpr;
using GuardPtr = std::shared_ptr<const GuardExpr>;

// phi ::= delta | eps | pred | !phi | phi+phi | phi.phi | phi||phi
struct GuardExpr {
  GuardKind kind;
  std::string pred_name;             // Atom
  std::vector<std::string> pred_args;  // Atom
  GuardPtr l, r;                     // Not uses l only
  size_t hash = 0;

  std::string text() const;
};

GuardPtr g_true();
GuardPtr g_false();
GuardPtr g_atom(const std::string& name, std::vector<std::string> args = {});
GuardPtr g_not(GuardPtr g);
GuardPtr g_alt(GuardPtr a, GuardPtr b);
GuardPtr g_seq(GuardPtr a, GuardPtr b);
GuardPtr g_par(GuardPtr a, GuardPtr b);

bool guard_equal(const GuardPtr& a, const GuardPtr& b);

// ---------------------------------------------------------------------------
// Process terms
// ---------------------------------------------------------------------------

enum class TermKind : uint8_t {
  Atom,     // action constant (visible, tau, delta, eps)
  Shadow,   // shadow constant of a base action, indexed
  Guard,    // guard as a process (checks, terminates silently)
  Seq,      // l . r
  Alt,      // l + r
  Par,      // l ||| r   (synchronous step composition)
  Comm,     // l | r     (communication merge)
  Merge,    // l || r    (full merge)
  Theta,    // theta(t)  conflict elimination
  Unless,   // unless(l, r)
  Encap,    // encap(H, t)
  Hide,     // hide(I, t)
  RecVar,   // free specification variable
  RecCall,  // <X|E>
  New,      // new(t) process creation
};

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
  TermKind kind;
  ActionLabel act;        // Atom, Shadow (base action)
  int shadow_index = 0;   // Shadow
  GuardPtr guard;         // Guard
  TermPtr l, r;           // binary nodes; unary nodes use l
  std::set<std::string> names;  // Encap/Hide action-name sets
  std::string var;        // RecVar / RecCall variable
  std::string spec_name;  // RecCall specification
  size_t hash = 0;

  bool is_atom_kind(ActionKind k) const {
    return kind == TermKind::Atom && act.kind == k;
  }
};

TermPtr t_atom(ActionLabel a);
TermPtr t_act(const std::string& name, std::vector<std::string> args = {});
TermPtr t_tau();
TermPtr t_delta();
TermPtr t_eps();
TermPtr t_shadow(ActionLabel base, int index);
TermPtr t_guard(GuardPtr g);
TermPtr t_seq(TermPtr l, TermPtr r);
TermPtr t_alt(TermPtr l, TermPtr r);
TermPtr t_par(TermPtr l, TermPtr r);
TermPtr t_comm(TermPtr l, TermPtr r);
TermPtr t_merge(TermPtr l, TermPtr r);
TermPtr t_theta(TermPtr t);
TermPtr t_unless(TermPtr l, TermPtr r);
TermPtr t_encap(std::set<std::string> names, TermPtr t);
TermPtr t_hide(std::set<std::string> names, TermPtr t);
TermPtr t_recvar(const std::string& var);
TermPtr t_reccall(const std::string& var, const std::string& spec);
TermPtr t_new(TermPtr t);

bool term_equal(const TermPtr& a, const TermPtr& b);
// Total order on terms; drives AC-canonical sorting in the rewriter.
int term_compare(const TermPtr& a, const TermPtr& b);

struct TermHash {
  size_t operator()(const TermPtr& t) const { return t ? t->hash : 0; }
};
struct TermEq {
  bool operator()(const TermPtr& a, const TermPtr& b) const {
    return term_equal(a, b);
  }
};

// ---------------------------------------------------------------------------
// Structural utilities
// ---------------------------------------------------------------------------

// Replaces every occurrence of RecVar(var) by s. RecVar is binder-free, so
// no capture is possible.
TermPtr substitute(const TermPtr& t, const std::string& var, const TermPtr& s);

// Right-nested Alt of body[v/binder] for each v of the domain, in order.
// The binder is substituted inside action and guard arguments.
// Throws std::invalid_argument on an empty domain.
TermPtr expand_finite_sum(const std::string& binder,
                          const std::vector<std::string>& domain,
                          const TermPtr& body);

// Substitutes a data variable inside action/guard argument positions.
TermPtr substitute_data(const TermPtr& t, const std::string& var,
                        const std::string& value);

// Basic terms: atoms/guards, event-pack-headed Seq, Alt and Par of basic
// terms.  Event packs (Par of atoms) may head a Seq; they are the normal
// shape P6 produces.
bool is_basic_term(const TermPtr& t);

struct AlphabetEntry {
  std::string name;
  bool from_shadow = false;
  bool operator<(const AlphabetEntry& o) const {
    return name < o.name || (name == o.name && from_shadow < o.from_shadow);
  }
};

// Visible action names occurring syntactically in t (shadows flagged).
std::set<AlphabetEntry> alphabet(const TermPtr& t);

// Ground action instances occurring syntactically in t, shadows reported by
// their base label. Used by the unless filter.
std::set<ActionLabel> action_instances(const TermPtr& t);

std::set<std::string> free_recvars(const TermPtr& t);

bool is_closed(const TermPtr& t);
bool is_recursion_free(const TermPtr& t);

}  // namespace aptc

#endif
