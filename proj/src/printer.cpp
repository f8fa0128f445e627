#include "aptc/printer.hpp"

#include <sstream>

namespace aptc {

namespace {

std::string render_guard(const GuardPtr& g) {
  switch (g->kind) {
    case GuardKind::True:
      return "eps";
    case GuardKind::False:
      return "delta";
    case GuardKind::Atom: {
      std::string s = g->pred_name + " = ";
      for (size_t i = 0; i < g->pred_args.size(); ++i) {
        if (i) s += ",";
        s += g->pred_args[i];
      }
      return s;
    }
    case GuardKind::Not:
      return "!(" + render_guard(g->l) + ")";
    case GuardKind::Alt:
      return "(" + render_guard(g->l) + " + " + render_guard(g->r) + ")";
    case GuardKind::Seq:
      return "(" + render_guard(g->l) + " . " + render_guard(g->r) + ")";
    case GuardKind::Par:
      return "(" + render_guard(g->l) + " & " + render_guard(g->r) + ")";
  }
  return "?";
}

std::string render_names(const std::set<std::string>& names) {
  std::string s = "{";
  bool first = true;
  for (const auto& n : names) {
    if (!first) s += ",";
    first = false;
    s += n;
  }
  return s + "}";
}

}  // namespace

std::string render_term(const TermPtr& t) {
  if (!t) return "<null>";
  switch (t->kind) {
    case TermKind::Atom:
      return t->act.text();
    case TermKind::Shadow: {
      std::string s = "@" + t->act.text();
      if (t->shadow_index != 0) s += "#" + std::to_string(t->shadow_index);
      return s;
    }
    case TermKind::Guard:
      return "[" + render_guard(t->guard) + "]";
    case TermKind::Seq:
      return "(" + render_term(t->l) + " . " + render_term(t->r) + ")";
    case TermKind::Alt:
      return "(" + render_term(t->l) + " + " + render_term(t->r) + ")";
    case TermKind::Par:
      return "(" + render_term(t->l) + " ||| " + render_term(t->r) + ")";
    case TermKind::Comm:
      return "(" + render_term(t->l) + " | " + render_term(t->r) + ")";
    case TermKind::Merge:
      return "(" + render_term(t->l) + " || " + render_term(t->r) + ")";
    case TermKind::Theta:
      return "theta(" + render_term(t->l) + ")";
    case TermKind::Unless:
      return "unless(" + render_term(t->l) + ", " + render_term(t->r) + ")";
    case TermKind::Encap:
      return "encap(" + render_names(t->names) + ", " + render_term(t->l) +
             ")";
    case TermKind::Hide:
      return "hide(" + render_names(t->names) + ", " + render_term(t->l) + ")";
    case TermKind::RecVar:
      return t->var;
    case TermKind::RecCall:
      return t->var;
    case TermKind::New:
      return "new(" + render_term(t->l) + ")";
  }
  return "?";
}

std::string render_model(const Model& m) {
  std::ostringstream out;
  out << "model " << m.name << ";\n";
  for (const auto& d : m.domain_order) {
    out << "domain " << d << " = {";
    const auto& vals = m.domains.at(d);
    for (size_t i = 0; i < vals.size(); ++i) {
      if (i) out << ",";
      out << vals[i];
    }
    out << "};\n";
  }
  for (const auto& mb : m.mailboxes)
    out << "mailbox " << mb.name << " cap " << mb.capacity << ";\n";
  for (const auto& sig : m.action_order) {
    out << "act " << sig.name;
    if (!sig.domains.empty()) {
      out << "(";
      for (size_t i = 0; i < sig.domains.size(); ++i) {
        if (i) out << ",";
        out << sig.domains[i];
      }
      out << ")";
    }
    if (!sig.sends_mailbox.empty()) out << " sends " << sig.sends_mailbox;
    if (!sig.receives_mailbox.empty())
      out << " receives " << sig.receives_mailbox;
    out << ";\n";
  }
  for (const auto& v : m.vars)
    out << "var " << v.name << " : " << v.domain << " = " << v.init << ";\n";
  for (const auto& [act, branches] : m.effects) {
    out << "effect " << act << " { ";
    for (size_t b = 0; b < branches.size(); ++b) {
      if (b) out << " | ";
      for (size_t i = 0; i < branches[b].assigns.size(); ++i) {
        if (i) out << ", ";
        out << branches[b].assigns[i].first << " := "
            << branches[b].assigns[i].second;
      }
    }
    out << " };\n";
  }
  // gamma entries appear with both orientations; emit each unordered pair
  // once, picking the lexicographically first orientation.
  for (const auto& [pair, res] : m.gamma) {
    if (pair.second < pair.first) continue;
    out << "comm " << pair.first.text() << " | " << pair.second.text() << " = "
        << res.text() << ";\n";
  }
  for (const auto& c : m.conflicts) {
    if (c.second < c.first) continue;
    out << "conflict " << c.first.text() << " # " << c.second.text() << ";\n";
  }
  for (const auto& o : m.causal_le)
    out << "order " << o.first.text() << " <= " << o.second.text() << ";\n";
  for (const auto& sp : m.specs)
    for (const auto& [var, rhs] : sp.equations)
      out << "proc " << var << " = " << render_term(rhs) << ";\n";
  if (m.system) out << "system = " << render_term(m.system) << ";\n";
  if (m.spec_term) out << "spec = " << render_term(m.spec_term) << ";\n";
  return out.str();
}

}  // namespace aptc
