#include "aptc/data_state.hpp"

#include <functional>

namespace aptc {

namespace {

size_t mix(size_t h, size_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

}  // namespace

size_t DataState::hash() const {
  size_t h = 0xcbf29ce484222325ULL;
  std::hash<std::string> hs;
  for (const auto& [k, v] : store) h = mix(mix(h, hs(k)), hs(v));
  for (const auto& [box, msgs] : mailboxes) {
    h = mix(h, hs(box));
    for (const auto& [msg, n] : msgs) {
      for (const auto& part : msg) h = mix(h, hs(part));
      h = mix(h, static_cast<size_t>(n));
    }
  }
  return h;
}

std::string DataState::text() const {
  std::string out = "{";
  bool first = true;
  for (const auto& [k, v] : store) {
    if (!first) out += ",";
    first = false;
    out += k + "=" + v;
  }
  for (const auto& [box, msgs] : mailboxes) {
    for (const auto& [msg, n] : msgs) {
      if (n == 0) continue;
      if (!first) out += ",";
      first = false;
      out += box + ":[";
      for (size_t i = 0; i < msg.size(); ++i) {
        if (i) out += ",";
        out += msg[i];
      }
      out += "]x" + std::to_string(n);
    }
  }
  out += "}";
  return out;
}

DataState initial_state(const Model& m) {
  DataState s;
  for (const auto& v : m.vars) s.store[v.name] = v.init;
  return s;
}

bool eval_guard(const GuardPtr& g, const DataState& s, const Model& m) {
  if (!g) throw ModelError("null guard");
  switch (g->kind) {
    case GuardKind::True:
      return true;
    case GuardKind::False:
      return false;
    case GuardKind::Atom: {
      auto it = s.store.find(g->pred_name);
      if (it == s.store.end())
        throw ModelError("undeclared predicate variable '" + g->pred_name +
                         "'");
      if (g->pred_args.size() != 1)
        throw ModelError("predicate '" + g->pred_name +
                         "' expects one comparison value");
      return it->second == g->pred_args[0];
    }
    case GuardKind::Not:
      return !eval_guard(g->l, s, m);
    case GuardKind::Alt:
      return eval_guard(g->l, s, m) || eval_guard(g->r, s, m);
    case GuardKind::Seq:
    case GuardKind::Par:
      // phi.psi tests both in the same state; phi||psi likewise (G22 keeps
      // phi || !phi false).
      return eval_guard(g->l, s, m) && eval_guard(g->r, s, m);
  }
  return false;
}

std::vector<DataState> apply_effect(const ActionLabel& e, const DataState& s,
                                    const Model& m) {
  if (!e.is_visible()) return {s};  // tau(s) = s
  auto it = m.effects.find(e.name);
  if (it == m.effects.end()) return {s};
  std::vector<DataState> out;
  for (const auto& br : it->second) {
    DataState n = s;
    for (const auto& [var, raw] : br.assigns) {
      std::string value = raw;
      // an assignment value of the form $k takes the k-th action argument
      if (!raw.empty() && raw[0] == '$') {
        size_t idx = std::stoul(raw.substr(1));
        if (idx >= e.args.size())
          throw ModelError("effect of '" + e.name +
                           "' references missing argument");
        value = e.args[idx];
      }
      n.store[var] = value;
    }
    out.push_back(std::move(n));
  }
  if (out.empty()) out.push_back(s);
  return out;
}

bool wp_holds(const ActionLabel& e, const GuardPtr& g, const DataState& s,
              const Model& m) {
  for (const auto& succ : apply_effect(e, s, m))
    if (!eval_guard(g, succ, m)) return false;
  return true;
}

DataState mailbox_send(const std::string& box,
                       const std::vector<std::string>& msg,
                       const DataState& s, const Model& m) {
  const MailboxDecl* decl = m.find_mailbox(box);
  if (!decl) throw ModelError("undeclared mailbox '" + box + "'");
  int size = 0;
  auto it = s.mailboxes.find(box);
  if (it != s.mailboxes.end())
    for (const auto& [_, n] : it->second) size += n;
  if (size >= decl->capacity)
    throw MailboxFull("mailbox '" + box + "' is full");
  DataState n = s;
  n.mailboxes[box][msg] += 1;
  return n;
}

std::optional<DataState> mailbox_receive(const std::string& box,
                                         const std::vector<std::string>& msg,
                                         const DataState& s, const Model& m) {
  if (!m.find_mailbox(box))
    throw ModelError("undeclared mailbox '" + box + "'");
  auto bit = s.mailboxes.find(box);
  if (bit == s.mailboxes.end()) return std::nullopt;
  auto mit = bit->second.find(msg);
  if (mit == bit->second.end() || mit->second == 0) return std::nullopt;
  DataState n = s;
  auto& entry = n.mailboxes[box][msg];
  entry -= 1;
  if (entry == 0) {
    n.mailboxes[box].erase(msg);
    if (n.mailboxes[box].empty()) n.mailboxes.erase(box);
  }
  return n;
}

std::vector<DataState> enumerate_store_states(const Model& m) {
  std::vector<DataState> out;
  out.push_back(DataState{});
  for (const auto& v : m.vars) {
    auto dit = m.domains.find(v.domain);
    if (dit == m.domains.end())
      throw ModelError("variable '" + v.name + "' has undeclared domain");
    std::vector<DataState> next;
    for (const auto& base : out)
      for (const auto& val : dit->second) {
        DataState s = base;
        s.store[v.name] = val;
        next.push_back(std::move(s));
      }
    out = std::move(next);
  }
  return out;
}

}  // namespace aptc
