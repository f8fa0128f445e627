#include "aptc/sos.hpp"

#include <algorithm>
#include <atomic>
#include <deque>
#include <functional>
#include <sstream>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "aptc/printer.hpp"

namespace aptc {

namespace {

size_t mix(size_t h, size_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

// ---------------------------------------------------------------------------
// Raw steps: the pre-firing shape of a transition. `acts` are the events
// that actually fire (mailbox and store effects), `vis` the part that labels
// the step (hiding strips from vis only), `markers` the shadow obligations
// still waiting for their base action in an enclosing composition.
// ---------------------------------------------------------------------------

struct RawStep {
  std::vector<ActionLabel> acts;
  std::vector<ActionLabel> vis;
  std::vector<ActionLabel> markers;
  TermPtr target;  // null = termination
};

void sort_labels(std::vector<ActionLabel>& v) { std::sort(v.begin(), v.end()); }

TermPtr combine_merge(const TermPtr& a, const TermPtr& b) {
  if (!a) return b;
  if (!b) return a;
  return t_merge(a, b);
}

struct Engine {
  const Model& m;
  explicit Engine(const Model& model) : m(model) {}

  // --- termination predicates ---------------------------------------------

  // full: shadows dissolve (top-level and under +/./||); eps-only: they do
  // not (inside ||| a shadow may only pair).
  bool term_rec(const TermPtr& t, const DataState& s, bool shadows_ok,
                std::unordered_set<size_t>* seen) const {
    if (!t) return true;
    switch (t->kind) {
      case TermKind::Atom:
        return t->act.kind == ActionKind::Eps;
      case TermKind::Shadow:
        return shadows_ok;
      case TermKind::Guard:
        return eval_guard(t->guard, s, m);
      case TermKind::Seq:
        return term_rec(t->l, s, shadows_ok, seen) &&
               term_rec(t->r, s, shadows_ok, seen);
      case TermKind::Alt:
        return term_rec(t->l, s, shadows_ok, seen) ||
               term_rec(t->r, s, shadows_ok, seen);
      case TermKind::Par:
        // eps || x = x: one side eps-dissolves, the other terminates.
        return (term_rec(t->l, s, false, seen) &&
                term_rec(t->r, s, shadows_ok, seen)) ||
               (term_rec(t->l, s, shadows_ok, seen) &&
                term_rec(t->r, s, false, seen));
      case TermKind::Comm:
        return false;  // eps | x = delta
      case TermKind::Merge:
        return term_rec(t->l, s, shadows_ok, seen) &&
               term_rec(t->r, s, shadows_ok, seen);
      case TermKind::Theta:
      case TermKind::New:
        return term_rec(t->l, s, shadows_ok, seen);
      case TermKind::Unless:
        return term_rec(t->l, s, shadows_ok, seen);
      case TermKind::Encap:
      case TermKind::Hide:
        return term_rec(t->l, s, shadows_ok, seen);
      case TermKind::RecVar:
        return false;
      case TermKind::RecCall: {
        std::unordered_set<size_t> local;
        if (!seen) seen = &local;
        if (!seen->insert(t->hash).second) return false;
        bool r = term_rec(m.unfold(t->spec_name, t->var), s, shadows_ok, seen);
        seen->erase(t->hash);
        return r;
      }
    }
    return false;
  }

  bool term_full(const TermPtr& t, const DataState& s) const {
    return term_rec(t, s, true, nullptr);
  }
  bool term_eps(const TermPtr& t, const DataState& s) const {
    return term_rec(t, s, false, nullptr);
  }

  // --- step generation ------------------------------------------------------

  std::vector<RawStep> steps(const TermPtr& t, const DataState& s,
                             int depth = 0) const {
    if (depth > 2000)
      throw UnguardedRecursion(
          "recursion unfolds without guarding actions (depth limit)");
    if (!t) return {};
    switch (t->kind) {
      case TermKind::Atom: {
        switch (t->act.kind) {
          case ActionKind::Visible:
            return {RawStep{{t->act}, {t->act}, {}, nullptr}};
          case ActionKind::Tau:
            return {RawStep{{t->act}, {}, {}, nullptr}};
          default:
            return {};  // delta has no rule; eps terminates silently
        }
      }
      case TermKind::Shadow:
        return {RawStep{{}, {}, {t->act}, nullptr}};
      case TermKind::Guard:
        return {};
      case TermKind::Seq:
        return seq_steps(t, s, depth);
      case TermKind::Alt: {
        std::vector<RawStep> out = steps(t->l, s, depth + 1);
        auto rs = steps(t->r, s, depth + 1);
        out.insert(out.end(), rs.begin(), rs.end());
        return out;
      }
      case TermKind::Par:
        return par_steps(t->l, t->r, s, depth);
      case TermKind::Comm:
        return comm_steps(t->l, t->r, s, depth);
      case TermKind::Merge:
        return merge_steps(t->l, t->r, s, depth);
      case TermKind::Theta:
        return theta_steps(t->l, s, depth);
      case TermKind::Unless:
        return unless_steps(t->l, t->r, s, depth);
      case TermKind::Encap: {
        std::vector<RawStep> out;
        for (auto& st : steps(t->l, s, depth + 1)) {
          bool blocked = false;
          for (const auto& a : st.acts)
            if (a.is_visible() && t->names.count(a.name)) blocked = true;
          if (blocked) continue;
          st.target = st.target ? t_encap(t->names, st.target) : nullptr;
          out.push_back(std::move(st));
        }
        return out;
      }
      case TermKind::Hide: {
        std::vector<RawStep> out;
        for (auto& st : steps(t->l, s, depth + 1)) {
          std::vector<ActionLabel> vis;
          for (const auto& a : st.vis)
            if (!t->names.count(a.name)) vis.push_back(a);
          st.vis = std::move(vis);
          st.target = st.target ? t_hide(t->names, st.target) : nullptr;
          out.push_back(std::move(st));
        }
        return out;
      }
      case TermKind::RecVar:
        throw ModelError("open term: free variable " + t->var);
      case TermKind::RecCall:
        return steps(m.unfold(t->spec_name, t->var), s, depth + 1);
      case TermKind::New:
        return steps(t->l, s, depth + 1);
    }
    return {};
  }

  // Collects the processes under a Seq head built from new() nodes combined
  // with |||/||. new(x).y continues as x || y (PC1); creation combinations
  // spawn every component into the merge.
  static bool collect_spawns(const TermPtr& t, std::vector<TermPtr>& out) {
    if (!t) return false;
    if (t->kind == TermKind::New) {
      out.push_back(t->l);
      return true;
    }
    if (t->kind == TermKind::Par || t->kind == TermKind::Merge)
      return collect_spawns(t->l, out) && collect_spawns(t->r, out);
    return false;
  }

  std::vector<RawStep> seq_steps(const TermPtr& t, const DataState& s,
                                 int depth) const {
    std::vector<TermPtr> spawned;
    if (collect_spawns(t->l, spawned)) {
      TermPtr merged = t->r;
      for (auto it = spawned.rbegin(); it != spawned.rend(); ++it)
        merged = t_merge(*it, merged);
      return steps(merged, s, depth + 1);
    }
    std::vector<RawStep> out;
    for (auto& st : steps(t->l, s, depth + 1)) {
      st.target = st.target ? t_seq(st.target, t->r) : t->r;
      out.push_back(std::move(st));
    }
    if (term_eps(t->l, s)) {
      auto rs = steps(t->r, s, depth + 1);
      out.insert(out.end(), rs.begin(), rs.end());
    }
    return out;
  }

  // Pairs one step from each side. Shadow markers must find a matching
  // visible action contributed by the opposite side; unmatched markers stay
  // pending for an enclosing composition.
  static std::optional<RawStep> pair_steps(const RawStep& a,
                                           const RawStep& b) {
    RawStep c;
    c.acts = a.acts;
    c.acts.insert(c.acts.end(), b.acts.begin(), b.acts.end());
    c.vis = a.vis;
    c.vis.insert(c.vis.end(), b.vis.begin(), b.vis.end());
    c.target = combine_merge(a.target, b.target);
    // Match a's markers against b's visible actions and vice versa.
    auto match = [](const std::vector<ActionLabel>& markers,
                    std::vector<ActionLabel> pool,
                    std::vector<ActionLabel>& pending) {
      for (const auto& mk : markers) {
        auto it = std::find(pool.begin(), pool.end(), mk);
        if (it != pool.end())
          pool.erase(it);
        else
          pending.push_back(mk);
      }
    };
    match(a.markers, b.vis, c.markers);
    match(b.markers, a.vis, c.markers);
    return c;
  }

  std::vector<RawStep> par_steps(const TermPtr& l, const TermPtr& r,
                                 const DataState& s, int depth) const {
    auto ls = steps(l, s, depth + 1);
    auto rs = steps(r, s, depth + 1);
    std::vector<RawStep> out;
    for (const auto& a : ls)
      for (const auto& b : rs) {
        auto c = pair_steps(a, b);
        if (c) out.push_back(std::move(*c));
      }
    // eps || x = x
    if (term_eps(l, s)) out.insert(out.end(), rs.begin(), rs.end());
    if (term_eps(r, s)) out.insert(out.end(), ls.begin(), ls.end());
    return out;
  }

  std::vector<RawStep> comm_steps(const TermPtr& l, const TermPtr& r,
                                  const DataState& s, int depth) const {
    auto ls = steps(l, s, depth + 1);
    auto rs = steps(r, s, depth + 1);
    std::vector<RawStep> out;
    for (const auto& a : ls) {
      if (a.acts.size() != 1 || !a.markers.empty() || !a.acts[0].is_visible())
        continue;
      for (const auto& b : rs) {
        if (b.acts.size() != 1 || !b.markers.empty() ||
            !b.acts[0].is_visible())
          continue;
        auto res = m.gamma_lookup(a.acts[0], b.acts[0]);
        if (!res) continue;
        RawStep c;
        c.acts = {*res};
        c.vis = {*res};
        c.target = combine_merge(a.target, b.target);
        out.push_back(std::move(c));
      }
    }
    return out;
  }

  std::vector<RawStep> merge_steps(const TermPtr& l, const TermPtr& r,
                                   const DataState& s, int depth) const {
    std::vector<RawStep> out = par_steps(l, r, s, depth);
    auto cs = comm_steps(l, r, s, depth);
    out.insert(out.end(), cs.begin(), cs.end());
    for (auto& a : steps(l, s, depth + 1)) {
      a.target = a.target ? t_merge(a.target, r) : r;
      out.push_back(std::move(a));
    }
    for (auto& b : steps(r, s, depth + 1)) {
      b.target = b.target ? t_merge(l, b.target) : l;
      out.push_back(std::move(b));
    }
    return out;
  }

  // Theta follows its axioms: sums resolve the two branches against each
  // other, compositions distribute, atoms pass through.
  std::vector<RawStep> theta_steps(const TermPtr& x, const DataState& s,
                                   int depth) const {
    switch (x->kind) {
      case TermKind::Atom:
      case TermKind::Shadow:
      case TermKind::Guard:
        return steps(x, s, depth + 1);
      case TermKind::Alt:
        return steps(t_alt(t_unless(t_theta(x->l), x->r),
                           t_unless(t_theta(x->r), x->l)),
                     s, depth + 1);
      case TermKind::Seq:
        return steps(t_seq(t_theta(x->l), t_theta(x->r)), s, depth + 1);
      case TermKind::Par:
        return steps(t_alt(t_par(t_unless(t_theta(x->l), x->r), x->r),
                           t_par(t_unless(t_theta(x->r), x->l), x->l)),
                     s, depth + 1);
      case TermKind::Comm:
        return steps(t_alt(t_comm(t_unless(t_theta(x->l), x->r), x->r),
                           t_comm(t_unless(t_theta(x->r), x->l), x->l)),
                     s, depth + 1);
      case TermKind::Merge:
        return steps(t_alt(t_merge(t_unless(t_theta(x->l), x->r), x->r),
                           t_merge(t_unless(t_theta(x->r), x->l), x->l)),
                     s, depth + 1);
      case TermKind::RecCall:
        return theta_steps(m.unfold(x->spec_name, x->var), s, depth + 1);
      default: {
        std::vector<RawStep> out;
        for (auto& st : steps(x, s, depth + 1)) {
          st.target = st.target ? t_theta(st.target) : nullptr;
          out.push_back(std::move(st));
        }
        return out;
      }
    }
  }

  // The unless filter: an event of the left operand turns silent when the
  // declared conflict relation says an event of the right operand wins
  // (U25/U27), survives when a causal successor of its rival is offered
  // (U26), and passes untouched otherwise.
  bool tauify(const ActionLabel& e, const std::set<ActionLabel>& offers) const {
    for (const auto& f : offers) {
      bool keep = false;
      for (const auto& le : m.causal_le)
        if (le.second == f && m.in_conflict(e, le.first)) keep = true;
      if (keep) continue;
      if (m.in_conflict(e, f)) return true;
      for (const auto& le : m.causal_le)
        if (le.second == e && m.in_conflict(le.first, f)) return true;
    }
    return false;
  }

  std::vector<RawStep> unless_steps(const TermPtr& l, const TermPtr& r,
                                    const DataState& s, int depth) const {
    std::set<ActionLabel> offers = action_instances(r);
    std::vector<RawStep> out;
    for (auto& st : steps(l, s, depth + 1)) {
      std::vector<ActionLabel> vis;
      for (const auto& a : st.vis)
        if (!tauify(a, offers)) vis.push_back(a);
      st.vis = std::move(vis);
      st.target = st.target ? t_unless(st.target, r) : nullptr;
      out.push_back(std::move(st));
    }
    return out;
  }

  // --- firing ----------------------------------------------------------------

  // Applies the whole multiset of events to s. Mailbox operations apply in
  // canonical order; store effects of distinct events must touch disjoint
  // variables (the race rule suppresses the step otherwise).
  std::vector<DataState> fire(const std::vector<ActionLabel>& acts,
                              const DataState& s) const {
    std::vector<ActionLabel> ordered = acts;
    sort_labels(ordered);
    // Race rule: two events writing the same store variable never co-fire.
    std::set<std::string> written;
    for (const auto& a : ordered) {
      if (!a.is_visible()) continue;
      auto it = m.effects.find(a.name);
      if (it == m.effects.end()) continue;
      std::set<std::string> mine;
      for (const auto& br : it->second)
        for (const auto& [var, _] : br.assigns) mine.insert(var);
      for (const auto& v : mine)
        if (!written.insert(v).second) return {};
    }
    // Mailbox feasibility and updates, sequentially in canonical order.
    DataState boxes = s;
    for (const auto& a : ordered) {
      if (!a.is_visible()) continue;
      auto sig = m.actions.find(a.name);
      if (sig == m.actions.end()) continue;
      if (!sig->second.sends_mailbox.empty()) {
        try {
          boxes = mailbox_send(sig->second.sends_mailbox, a.args, boxes, m);
        } catch (const MailboxFull&) {
          return {};
        }
      } else if (!sig->second.receives_mailbox.empty()) {
        const auto& box = sig->second.receives_mailbox;
        auto sendable = m.sendable.find(box);
        bool guarded = sendable != m.sendable.end() &&
                       sendable->second.count(a.args) > 0;
        if (guarded) {
          auto next = mailbox_receive(box, a.args, boxes, m);
          if (!next) return {};
          boxes = *next;
        }
        // Messages nothing can send act as external inputs: always enabled.
      }
    }
    // Store effects: product over each event's declared branches.
    std::vector<DataState> out{boxes};
    for (const auto& a : ordered) {
      std::vector<DataState> next;
      for (const auto& base : out)
        for (const auto& succ : apply_effect(a, base, m))
          next.push_back(succ);
      out = std::move(next);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  // Resolves raw steps into labeled transitions: marker-only steps dissolve
  // silently into their successor's behavior, steps still owing a marker are
  // not firable, the rest fire.
  std::vector<EnabledStep> resolve(const TermPtr& t, const DataState& s) const {
    std::vector<EnabledStep> out;
    std::unordered_set<size_t> dissolving;
    std::function<void(const std::vector<RawStep>&)> walk =
        [&](const std::vector<RawStep>& raw) {
          for (const auto& st : raw) {
            if (st.acts.empty() && !st.markers.empty()) {
              // silent shadow dissolution
              if (!st.target) continue;  // termination handled by the flag
              if (!dissolving.insert(st.target->hash).second)
                throw UnguardedRecursion(
                    "shadow constants unfold in a cycle");
              walk(steps(st.target, s));
              dissolving.erase(st.target->hash);
              continue;
            }
            if (!st.markers.empty()) continue;  // unmatched shadow: no step
            for (const auto& ns : fire(st.acts, s)) {
              std::vector<ActionLabel> vis = st.vis;
              sort_labels(vis);
              out.push_back(
                  EnabledStep{StepLabel{std::move(vis)},
                              Configuration{st.target, ns}});
            }
          }
        };
    walk(steps(t, s));
    // Deterministic order and no duplicates.
    std::sort(out.begin(), out.end(), [](const EnabledStep& a,
                                         const EnabledStep& b) {
      if (!(a.label == b.label)) return a.label < b.label;
      int c = term_compare(a.to.term, b.to.term);
      if (c) return c < 0;
      return a.to.state < b.to.state;
    });
    out.erase(std::unique(out.begin(), out.end(),
                          [](const EnabledStep& a, const EnabledStep& b) {
                            return a.label == b.label && a.to == b.to;
                          }),
              out.end());
    return out;
  }
};

}  // namespace

// ---------------------------------------------------------------------------

std::string StepLabel::text() const {
  if (actions.empty()) return "tau";
  std::string s = "{";
  for (size_t i = 0; i < actions.size(); ++i) {
    if (i) s += ",";
    s += actions[i].text();
  }
  return s + "}";
}

StepLabel make_step(std::vector<ActionLabel> actions) {
  sort_labels(actions);
  return StepLabel{std::move(actions)};
}

size_t Configuration::hash() const {
  return mix(term ? term->hash : 0x5eed, state.hash());
}

std::vector<EnabledStep> enabled_steps(const Configuration& c, const Model& m) {
  if (c.terminated()) return {};
  Engine eng(m);
  return eng.resolve(c.term, c.state);
}

bool terminates(const TermPtr& t, const DataState& s, const Model& m) {
  if (!t) return true;
  Engine eng(m);
  return eng.term_full(t, s);
}

void TransitionSystem::build_out() {
  out.assign(num_states, {});
  for (const auto& tr : transitions) out[tr.src].push_back({tr.label, tr.dst});
}

TransitionSystem generate_lts(const Model& m, const TermPtr& root,
                              const LtsOptions& opts) {
  Engine eng(m);
  TransitionSystem ts;

  struct Key {
    size_t hash;
    Configuration cfg;
  };
  std::unordered_map<size_t, std::vector<std::pair<Configuration, uint32_t>>>
      index;
  std::vector<Configuration> configs;

  auto intern = [&](const Configuration& c) -> uint32_t {
    size_t h = c.hash();
    auto& bucket = index[h];
    for (const auto& [cfg, id] : bucket)
      if (cfg == c) return id;
    if (configs.size() >= opts.max_states)
      throw StateBoundExceeded(opts.max_states);
    uint32_t id = static_cast<uint32_t>(configs.size());
    configs.push_back(c);
    bucket.push_back({c, id});
    return id;
  };

  std::map<StepLabel, uint32_t> label_ids;
  auto label_id = [&](const StepLabel& l) -> uint32_t {
    auto it = label_ids.find(l);
    if (it != label_ids.end()) return it->second;
    uint32_t id = static_cast<uint32_t>(ts.labels.size());
    ts.labels.push_back(l);
    label_ids[l] = id;
    return id;
  };

  Configuration init{root, initial_state(m)};
  intern(init);

  bool any_terminating = false;
  std::vector<uint8_t> term_flags;
  size_t frontier_begin = 0;
  while (frontier_begin < configs.size()) {
    size_t frontier_end = configs.size();
    // Successor computation is pure; distribute it when asked to.
    std::vector<std::vector<EnabledStep>> succ(frontier_end - frontier_begin);
    std::vector<uint8_t> flags(frontier_end - frontier_begin);
    int jobs = std::max(1, opts.jobs);
    if (jobs == 1 || frontier_end - frontier_begin < 8) {
      for (size_t i = frontier_begin; i < frontier_end; ++i) {
        const auto& c = configs[i];
        succ[i - frontier_begin] = enabled_steps(c, m);
        flags[i - frontier_begin] =
            c.terminated() || eng.term_full(c.term, c.state);
      }
    } else {
      std::atomic<size_t> next(frontier_begin);
      auto worker = [&]() {
        while (true) {
          size_t i = next.fetch_add(1);
          if (i >= frontier_end) break;
          const auto& c = configs[i];
          succ[i - frontier_begin] = enabled_steps(c, m);
          flags[i - frontier_begin] =
              c.terminated() || eng.term_full(c.term, c.state);
        }
      };
      std::vector<std::thread> pool;
      for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
      for (auto& th : pool) th.join();
    }
    // Merge in deterministic (source index) order.
    for (size_t i = frontier_begin; i < frontier_end; ++i) {
      term_flags.push_back(flags[i - frontier_begin]);
      if (flags[i - frontier_begin]) any_terminating = true;
      for (const auto& st : succ[i - frontier_begin]) {
        uint32_t dst = intern(st.to);
        ts.transitions.push_back(
            {static_cast<uint32_t>(i), label_id(st.label), dst});
      }
    }
    frontier_begin = frontier_end;
  }

  ts.num_states = configs.size();
  ts.terminating = std::move(term_flags);
  ts.initial = 0;
  (void)any_terminating;
  if (opts.keep_desc) {
    ts.state_desc.reserve(configs.size());
    for (const auto& c : configs) {
      std::string d = c.terminated() ? "<done>" : render_term(c.term);
      std::string st = c.state.text();
      if (st != "{}") d += " @ " + st;
      ts.state_desc.push_back(std::move(d));
    }
  }
  ts.build_out();
  return ts;
}

// ---------------------------------------------------------------------------
// Guardedness
// ---------------------------------------------------------------------------

namespace {

struct GuardAnalysis {
  const Model& m;
  const RecursiveSpec& spec;
  std::map<std::string, bool> nullable;  // reaches done via silent/tau only

  GuardAnalysis(const Model& model, const RecursiveSpec& sp)
      : m(model), spec(sp) {
    for (const auto& [v, _] : spec.equations) nullable[v] = false;
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& [v, rhs] : spec.equations) {
        bool n = tau_nullable(rhs, {});
        if (n && !nullable[v]) {
          nullable[v] = true;
          changed = true;
        }
      }
    }
  }

  bool tau_nullable(const TermPtr& t, const std::set<std::string>& hidden) {
    if (!t) return true;
    switch (t->kind) {
      case TermKind::Atom:
        if (t->act.kind == ActionKind::Eps ||
            t->act.kind == ActionKind::Tau)
          return true;
        if (t->act.kind == ActionKind::Delta) return false;
        return hidden.count(t->act.name) > 0;
      case TermKind::Shadow:
      case TermKind::Guard:
        return true;
      case TermKind::Seq:
        return tau_nullable(t->l, hidden) && tau_nullable(t->r, hidden);
      case TermKind::Alt:
        return tau_nullable(t->l, hidden) || tau_nullable(t->r, hidden);
      case TermKind::Par:
      case TermKind::Merge:
        return tau_nullable(t->l, hidden) && tau_nullable(t->r, hidden);
      case TermKind::Comm:
        return false;
      case TermKind::Theta:
      case TermKind::New:
      case TermKind::Encap:
        return tau_nullable(t->l, hidden);
      case TermKind::Unless:
        return tau_nullable(t->l, hidden);
      case TermKind::Hide: {
        auto h = hidden;
        h.insert(t->names.begin(), t->names.end());
        return tau_nullable(t->l, h);
      }
      case TermKind::RecVar: {
        auto it = nullable.find(t->var);
        return it != nullable.end() && it->second;
      }
      case TermKind::RecCall:
        return false;  // calls into other specs treated as guarded
    }
    return false;
  }

  // Variables reachable from t before any visible (unhidden) action fires.
  void silent_vars(const TermPtr& t, const std::set<std::string>& hidden,
                   std::set<std::string>& out) {
    if (!t) return;
    switch (t->kind) {
      case TermKind::RecVar:
        out.insert(t->var);
        return;
      case TermKind::Atom:
      case TermKind::Shadow:
      case TermKind::Guard:
        return;
      case TermKind::Seq:
        silent_vars(t->l, hidden, out);
        if (tau_nullable(t->l, hidden)) silent_vars(t->r, hidden, out);
        return;
      case TermKind::Alt:
      case TermKind::Par:
      case TermKind::Merge:
      case TermKind::Comm:
        silent_vars(t->l, hidden, out);
        silent_vars(t->r, hidden, out);
        return;
      case TermKind::Theta:
      case TermKind::New:
      case TermKind::Encap:
        silent_vars(t->l, hidden, out);
        return;
      case TermKind::Unless:
        silent_vars(t->l, hidden, out);
        return;
      case TermKind::Hide: {
        auto h = hidden;
        h.insert(t->names.begin(), t->names.end());
        silent_vars(t->l, h, out);
        return;
      }
      case TermKind::RecCall:
        return;
    }
  }
};

}  // namespace

std::string GuardednessVerdict::text() const {
  if (guarded) return "guarded";
  std::string s = "unguarded cycle:";
  for (const auto& v : cycle) s += " " + v;
  return s;
}

GuardednessVerdict check_guardedness(const RecursiveSpec& spec,
                                     const Model& m) {
  GuardAnalysis ga(m, spec);
  std::map<std::string, std::set<std::string>> edges;
  for (const auto& [v, rhs] : spec.equations) {
    std::set<std::string> vars;
    ga.silent_vars(rhs, {}, vars);
    edges[v] = std::move(vars);
  }
  // DFS cycle detection, deterministic order.
  std::map<std::string, int> color;  // 0 white, 1 grey, 2 black
  std::vector<std::string> stack;
  GuardednessVerdict verdict;
  std::function<bool(const std::string&)> dfs = [&](const std::string& v) {
    color[v] = 1;
    stack.push_back(v);
    for (const auto& w : edges[v]) {
      if (color[w] == 1) {
        auto it = std::find(stack.begin(), stack.end(), w);
        verdict.guarded = false;
        verdict.cycle.assign(it, stack.end());
        verdict.cycle.push_back(w);
        return true;
      }
      if (color[w] == 0 && dfs(w)) return true;
    }
    stack.pop_back();
    color[v] = 2;
    return false;
  };
  for (const auto& [v, _] : spec.equations)
    if (color[v] == 0 && dfs(v)) break;
  return verdict;
}

// ---------------------------------------------------------------------------
// Exports
// ---------------------------------------------------------------------------

std::string export_aut(const TransitionSystem& ts) {
  // Terminating states get a "tick" transition to a dedicated sink.
  bool need_sink = false;
  for (size_t i = 0; i < ts.num_states; ++i)
    if (ts.terminating[i]) need_sink = true;
  size_t nstates = ts.num_states + (need_sink ? 1 : 0);
  size_t sink = ts.num_states;
  size_t ntrans = ts.transitions.size();
  if (need_sink)
    for (size_t i = 0; i < ts.num_states; ++i)
      if (ts.terminating[i]) ++ntrans;
  std::ostringstream out;
  out << "des (0," << ntrans << "," << nstates << ")\n";
  for (const auto& tr : ts.transitions)
    out << "(" << tr.src << ",\"" << ts.labels[tr.label].text() << "\","
        << tr.dst << ")\n";
  if (need_sink)
    for (size_t i = 0; i < ts.num_states; ++i)
      if (ts.terminating[i])
        out << "(" << i << ",\"tick\"," << sink << ")\n";
  return out.str();
}

std::string export_dot(const TransitionSystem& ts) {
  std::ostringstream out;
  out << "digraph lts {\n  rankdir=LR;\n";
  for (size_t i = 0; i < ts.num_states; ++i) {
    out << "  s" << i << " [shape=" << (ts.terminating[i] ? "doublecircle" : "circle")
        << ",label=\"" << i << "\"];\n";
  }
  for (const auto& tr : ts.transitions)
    out << "  s" << tr.src << " -> s" << tr.dst << " [label=\""
        << ts.labels[tr.label].text() << "\"];\n";
  out << "}\n";
  return out.str();
}

}  // namespace aptc
