#include "aptc/term.hpp"

#include <functional>
#include <stdexcept>

namespace aptc {

namespace {

size_t mix(size_t h, size_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

size_t hash_string(const std::string& s) { return std::hash<std::string>{}(s); }

}  // namespace

// ---------------------------------------------------------------------------
// ActionLabel
// ---------------------------------------------------------------------------

bool ActionLabel::operator<(const ActionLabel& o) const {
  if (kind != o.kind) return kind < o.kind;
  if (name != o.name) return name < o.name;
  return args < o.args;
}

std::string ActionLabel::text() const {
  if (args.empty()) return name;
  std::string out = name + "(";
  for (size_t i = 0; i < args.size(); ++i) {
    if (i) out += ",";
    out += args[i];
  }
  out += ")";
  return out;
}

ActionLabel make_action(const std::string& name, std::vector<std::string> args) {
  ActionLabel a;
  a.name = name;
  a.args = std::move(args);
  a.kind = ActionKind::Visible;
  return a;
}

ActionLabel tau_action() {
  ActionLabel a;
  a.name = "tau";
  a.kind = ActionKind::Tau;
  return a;
}

ActionLabel delta_action() {
  ActionLabel a;
  a.name = "delta";
  a.kind = ActionKind::Delta;
  return a;
}

ActionLabel eps_action() {
  ActionLabel a;
  a.name = "eps";
  a.kind = ActionKind::Eps;
  return a;
}

size_t hash_action(const ActionLabel& a) {
  size_t h = static_cast<size_t>(a.kind) * 1315423911ULL;
  h = mix(h, hash_string(a.name));
  for (const auto& x : a.args) h = mix(h, hash_string(x));
  return h;
}

// ---------------------------------------------------------------------------
// Guards
// ---------------------------------------------------------------------------

namespace {

GuardPtr mk_guard(GuardExpr g) {
  size_t h = static_cast<size_t>(g.kind) * 2654435761ULL;
  h = mix(h, hash_string(g.pred_name));
  for (const auto& a : g.pred_args) h = mix(h, hash_string(a));
  if (g.l) h = mix(h, g.l->hash);
  if (g.r) h = mix(h, g.r->hash);
  g.hash = h;
  return std::make_shared<const GuardExpr>(std::move(g));
}

}  // namespace

GuardPtr g_true() {
  GuardExpr g;
  g.kind = GuardKind::True;
  return mk_guard(std::move(g));
}

GuardPtr g_false() {
  GuardExpr g;
  g.kind = GuardKind::False;
  return mk_guard(std::move(g));
}

GuardPtr g_atom(const std::string& name, std::vector<std::string> args) {
  GuardExpr g;
  g.kind = GuardKind::Atom;
  g.pred_name = name;
  g.pred_args = std::move(args);
  return mk_guard(std::move(g));
}

GuardPtr g_not(GuardPtr x) {
  GuardExpr g;
  g.kind = GuardKind::Not;
  g.l = std::move(x);
  return mk_guard(std::move(g));
}

GuardPtr g_alt(GuardPtr a, GuardPtr b) {
  GuardExpr g;
  g.kind = GuardKind::Alt;
  g.l = std::move(a);
  g.r = std::move(b);
  return mk_guard(std::move(g));
}

GuardPtr g_seq(GuardPtr a, GuardPtr b) {
  GuardExpr g;
  g.kind = GuardKind::Seq;
  g.l = std::move(a);
  g.r = std::move(b);
  return mk_guard(std::move(g));
}

GuardPtr g_par(GuardPtr a, GuardPtr b) {
  GuardExpr g;
  g.kind = GuardKind::Par;
  g.l = std::move(a);
  g.r = std::move(b);
  return mk_guard(std::move(g));
}

bool guard_equal(const GuardPtr& a, const GuardPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->hash != b->hash || a->kind != b->kind) return false;
  if (a->pred_name != b->pred_name || a->pred_args != b->pred_args)
    return false;
  return guard_equal(a->l, b->l) && guard_equal(a->r, b->r);
}

std::string GuardExpr::text() const {
  switch (kind) {
    case GuardKind::True:
      return "eps";
    case GuardKind::False:
      return "delta";
    case GuardKind::Atom: {
      std::string s = pred_name;
      if (!pred_args.empty()) {
        s += " = ";
        s += pred_args[0];
        for (size_t i = 1; i < pred_args.size(); ++i) s += "," + pred_args[i];
      }
      return s;
    }
    case GuardKind::Not:
      return "!(" + l->text() + ")";
    case GuardKind::Alt:
      return "(" + l->text() + " + " + r->text() + ")";
    case GuardKind::Seq:
      return "(" + l->text() + " . " + r->text() + ")";
    case GuardKind::Par:
      return "(" + l->text() + " & " + r->text() + ")";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Terms
// ---------------------------------------------------------------------------

namespace {

TermPtr mk_term(Term t) {
  size_t h = (static_cast<size_t>(t.kind) + 1) * 0x100000001b3ULL;
  h = mix(h, hash_action(t.act));
  h = mix(h, static_cast<size_t>(t.shadow_index));
  if (t.guard) h = mix(h, t.guard->hash);
  if (t.l) h = mix(h, t.l->hash);
  if (t.r) h = mix(h, t.r->hash);
  for (const auto& n : t.names) h = mix(h, hash_string(n));
  h = mix(h, hash_string(t.var));
  h = mix(h, hash_string(t.spec_name));
  t.hash = h;
  return std::make_shared<const Term>(std::move(t));
}

}  // namespace

TermPtr t_atom(ActionLabel a) {
  Term t;
  t.kind = TermKind::Atom;
  t.act = std::move(a);
  return mk_term(std::move(t));
}

TermPtr t_act(const std::string& name, std::vector<std::string> args) {
  return t_atom(make_action(name, std::move(args)));
}

TermPtr t_tau() { return t_atom(tau_action()); }
TermPtr t_delta() { return t_atom(delta_action()); }
TermPtr t_eps() { return t_atom(eps_action()); }

TermPtr t_shadow(ActionLabel base, int index) {
  Term t;
  t.kind = TermKind::Shadow;
  t.act = std::move(base);
  t.shadow_index = index;
  return mk_term(std::move(t));
}

TermPtr t_guard(GuardPtr g) {
  Term t;
  t.kind = TermKind::Guard;
  t.guard = std::move(g);
  return mk_term(std::move(t));
}

TermPtr t_seq(TermPtr l, TermPtr r) {
  Term t;
  t.kind = TermKind::Seq;
  t.l = std::move(l);
  t.r = std::move(r);
  return mk_term(std::move(t));
}

TermPtr t_alt(TermPtr l, TermPtr r) {
  Term t;
  t.kind = TermKind::Alt;
  t.l = std::move(l);
  t.r = std::move(r);
  return mk_term(std::move(t));
}

TermPtr t_par(TermPtr l, TermPtr r) {
  Term t;
  t.kind = TermKind::Par;
  t.l = std::move(l);
  t.r = std::move(r);
  return mk_term(std::move(t));
}

TermPtr t_comm(TermPtr l, TermPtr r) {
  Term t;
  t.kind = TermKind::Comm;
  t.l = std::move(l);
  t.r = std::move(r);
  return mk_term(std::move(t));
}

TermPtr t_merge(TermPtr l, TermPtr r) {
  Term t;
  t.kind = TermKind::Merge;
  t.l = std::move(l);
  t.r = std::move(r);
  return mk_term(std::move(t));
}

TermPtr t_theta(TermPtr x) {
  Term t;
  t.kind = TermKind::Theta;
  t.l = std::move(x);
  return mk_term(std::move(t));
}

TermPtr t_unless(TermPtr l, TermPtr r) {
  Term t;
  t.kind = TermKind::Unless;
  t.l = std::move(l);
  t.r = std::move(r);
  return mk_term(std::move(t));
}

TermPtr t_encap(std::set<std::string> names, TermPtr x) {
  Term t;
  t.kind = TermKind::Encap;
  t.names = std::move(names);
  t.l = std::move(x);
  return mk_term(std::move(t));
}

TermPtr t_hide(std::set<std::string> names, TermPtr x) {
  Term t;
  t.kind = TermKind::Hide;
  t.names = std::move(names);
  t.l = std::move(x);
  return mk_term(std::move(t));
}

TermPtr t_recvar(const std::string& var) {
  Term t;
  t.kind = TermKind::RecVar;
  t.var = var;
  return mk_term(std::move(t));
}

TermPtr t_reccall(const std::string& var, const std::string& spec) {
  Term t;
  t.kind = TermKind::RecCall;
  t.var = var;
  t.spec_name = spec;
  return mk_term(std::move(t));
}

TermPtr t_new(TermPtr x) {
  Term t;
  t.kind = TermKind::New;
  t.l = std::move(x);
  return mk_term(std::move(t));
}

bool term_equal(const TermPtr& a, const TermPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->hash != b->hash || a->kind != b->kind) return false;
  if (!(a->act == b->act) || a->shadow_index != b->shadow_index) return false;
  if (!guard_equal(a->guard, b->guard)) return false;
  if (a->names != b->names || a->var != b->var || a->spec_name != b->spec_name)
    return false;
  return term_equal(a->l, b->l) && term_equal(a->r, b->r);
}

namespace {

int guard_compare(const GuardPtr& a, const GuardPtr& b) {
  if (a == b) return 0;
  if (!a) return -1;
  if (!b) return 1;
  if (a->kind != b->kind) return a->kind < b->kind ? -1 : 1;
  if (int c = a->pred_name.compare(b->pred_name)) return c;
  if (a->pred_args != b->pred_args) return a->pred_args < b->pred_args ? -1 : 1;
  if (int c = guard_compare(a->l, b->l)) return c;
  return guard_compare(a->r, b->r);
}

}  // namespace

int term_compare(const TermPtr& a, const TermPtr& b) {
  if (a == b) return 0;
  if (!a) return -1;
  if (!b) return 1;
  if (a->kind != b->kind) return a->kind < b->kind ? -1 : 1;
  if (a->act != b->act) return a->act < b->act ? -1 : 1;
  if (a->shadow_index != b->shadow_index)
    return a->shadow_index < b->shadow_index ? -1 : 1;
  if (int c = guard_compare(a->guard, b->guard)) return c;
  if (a->names != b->names) return a->names < b->names ? -1 : 1;
  if (int c = a->var.compare(b->var)) return c;
  if (int c = a->spec_name.compare(b->spec_name)) return c;
  if (int c = term_compare(a->l, b->l)) return c;
  return term_compare(a->r, b->r);
}

// ---------------------------------------------------------------------------
// Structural utilities
// ---------------------------------------------------------------------------

TermPtr substitute(const TermPtr& t, const std::string& var, const TermPtr& s) {
  if (!t) return t;
  if (t->kind == TermKind::RecVar) return t->var == var ? s : t;
  Term n = *t;
  n.l = substitute(t->l, var, s);
  n.r = substitute(t->r, var, s);
  if (term_equal(n.l, t->l) && term_equal(n.r, t->r)) return t;
  TermPtr nl = n.l, nr = n.r;
  Term rebuilt = *t;
  rebuilt.l = nl;
  rebuilt.r = nr;
  rebuilt.hash = 0;
  size_t h = (static_cast<size_t>(rebuilt.kind) + 1) * 0x100000001b3ULL;
  h = mix(h, hash_action(rebuilt.act));
  h = mix(h, static_cast<size_t>(rebuilt.shadow_index));
  if (rebuilt.guard) h = mix(h, rebuilt.guard->hash);
  if (rebuilt.l) h = mix(h, rebuilt.l->hash);
  if (rebuilt.r) h = mix(h, rebuilt.r->hash);
  for (const auto& nm : rebuilt.names) h = mix(h, hash_string(nm));
  h = mix(h, hash_string(rebuilt.var));
  h = mix(h, hash_string(rebuilt.spec_name));
  rebuilt.hash = h;
  return std::make_shared<const Term>(std::move(rebuilt));
}

namespace {

std::vector<std::string> subst_args(const std::vector<std::string>& args,
                                    const std::string& var,
                                    const std::string& value) {
  std::vector<std::string> out = args;
  for (auto& a : out)
    if (a == var) a = value;
  return out;
}

GuardPtr subst_guard_data(const GuardPtr& g, const std::string& var,
                          const std::string& value) {
  if (!g) return g;
  switch (g->kind) {
    case GuardKind::True:
    case GuardKind::False:
      return g;
    case GuardKind::Atom:
      return g_atom(g->pred_name, subst_args(g->pred_args, var, value));
    case GuardKind::Not:
      return g_not(subst_guard_data(g->l, var, value));
    case GuardKind::Alt:
      return g_alt(subst_guard_data(g->l, var, value),
                   subst_guard_data(g->r, var, value));
    case GuardKind::Seq:
      return g_seq(subst_guard_data(g->l, var, value),
                   subst_guard_data(g->r, var, value));
    case GuardKind::Par:
      return g_par(subst_guard_data(g->l, var, value),
                   subst_guard_data(g->r, var, value));
  }
  return g;
}

}  // namespace

TermPtr substitute_data(const TermPtr& t, const std::string& var,
                        const std::string& value) {
  if (!t) return t;
  switch (t->kind) {
    case TermKind::Atom: {
      if (t->act.args.empty()) return t;
      ActionLabel a = t->act;
      a.args = subst_args(a.args, var, value);
      return t_atom(std::move(a));
    }
    case TermKind::Shadow: {
      ActionLabel a = t->act;
      a.args = subst_args(a.args, var, value);
      return t_shadow(std::move(a), t->shadow_index);
    }
    case TermKind::Guard:
      return t_guard(subst_guard_data(t->guard, var, value));
    case TermKind::RecVar:
    case TermKind::RecCall:
      return t;
    default: {
      Term n = *t;
      TermPtr nl = substitute_data(t->l, var, value);
      TermPtr nr = substitute_data(t->r, var, value);
      if (term_equal(nl, t->l) && term_equal(nr, t->r)) return t;
      switch (t->kind) {
        case TermKind::Seq:
          return t_seq(nl, nr);
        case TermKind::Alt:
          return t_alt(nl, nr);
        case TermKind::Par:
          return t_par(nl, nr);
        case TermKind::Comm:
          return t_comm(nl, nr);
        case TermKind::Merge:
          return t_merge(nl, nr);
        case TermKind::Theta:
          return t_theta(nl);
        case TermKind::Unless:
          return t_unless(nl, nr);
        case TermKind::Encap:
          return t_encap(t->names, nl);
        case TermKind::Hide:
          return t_hide(t->names, nl);
        case TermKind::New:
          return t_new(nl);
        default:
          return t;
      }
    }
  }
}

TermPtr expand_finite_sum(const std::string& binder,
                          const std::vector<std::string>& domain,
                          const TermPtr& body) {
  if (domain.empty())
    throw std::invalid_argument("expand_finite_sum: empty domain");
  TermPtr out;
  for (auto it = domain.rbegin(); it != domain.rend(); ++it) {
    TermPtr inst = substitute_data(body, binder, *it);
    out = out ? t_alt(inst, out) : inst;
  }
  return out;
}

namespace {

// Par built from atoms/shadows only: the event packs that may head a Seq.
bool is_event_pack(const TermPtr& t) {
  if (!t) return false;
  if (t->kind == TermKind::Atom || t->kind == TermKind::Shadow) return true;
  if (t->kind == TermKind::Par)
    return is_event_pack(t->l) && is_event_pack(t->r);
  return false;
}

}  // namespace

bool is_basic_term(const TermPtr& t) {
  if (!t) return false;
  switch (t->kind) {
    case TermKind::Atom:
    case TermKind::Shadow:
    case TermKind::Guard:
      return true;
    case TermKind::Seq:
      return (is_event_pack(t->l) || t->l->kind == TermKind::Guard) &&
             is_basic_term(t->r);
    case TermKind::Alt:
      return is_basic_term(t->l) && is_basic_term(t->r);
    case TermKind::Par:
      return is_basic_term(t->l) && is_basic_term(t->r);
    default:
      return false;
  }
}

namespace {

void collect_alphabet(const TermPtr& t, std::set<AlphabetEntry>& out) {
  if (!t) return;
  if (t->kind == TermKind::Atom) {
    if (t->act.is_visible()) out.insert({t->act.name, false});
    return;
  }
  if (t->kind == TermKind::Shadow) {
    out.insert({t->act.name, true});
    return;
  }
  collect_alphabet(t->l, out);
  collect_alphabet(t->r, out);
}

void collect_instances(const TermPtr& t, std::set<ActionLabel>& out) {
  if (!t) return;
  if (t->kind == TermKind::Atom) {
    if (t->act.is_visible()) out.insert(t->act);
    return;
  }
  if (t->kind == TermKind::Shadow) {
    out.insert(t->act);
    return;
  }
  collect_instances(t->l, out);
  collect_instances(t->r, out);
}

void collect_recvars(const TermPtr& t, std::set<std::string>& out) {
  if (!t) return;
  if (t->kind == TermKind::RecVar) {
    out.insert(t->var);
    return;
  }
  collect_recvars(t->l, out);
  collect_recvars(t->r, out);
}

bool has_reccall(const TermPtr& t) {
  if (!t) return false;
  if (t->kind == TermKind::RecCall) return true;
  return has_reccall(t->l) || has_reccall(t->r);
}

}  // namespace

std::set<AlphabetEntry> alphabet(const TermPtr& t) {
  std::set<AlphabetEntry> out;
  collect_alphabet(t, out);
  return out;
}

std::set<ActionLabel> action_instances(const TermPtr& t) {
  std::set<ActionLabel> out;
  collect_instances(t, out);
  return out;
}

std::set<std::string> free_recvars(const TermPtr& t) {
  std::set<std::string> out;
  collect_recvars(t, out);
  return out;
}

bool is_closed(const TermPtr& t) { return free_recvars(t).empty(); }

bool is_recursion_free(const TermPtr& t) {
  return is_closed(t) && !has_reccall(t);
}

}  // namespace aptc
