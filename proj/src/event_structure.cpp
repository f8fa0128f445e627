#include "aptc/event_structure.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>

#include "aptc/printer.hpp"

namespace aptc {

namespace {

constexpr size_t kMaxEvents = 4096;
constexpr size_t kMaxConfigs = 1u << 20;

void add_conflict(PrimeEventStructure& p, uint32_t a, uint32_t b) {
  if (a == b) return;
  p.conflict.insert({a, b});
  p.conflict.insert({b, a});
}

}  // namespace

void PrimeEventStructure::close_hereditary() {
  // e # e' and e' <= e'' implies e # e''; iterate to a fixpoint.
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<std::pair<uint32_t, uint32_t>> pending;
    for (const auto& [a, b] : conflict)
      for (uint32_t e = 0; e < labels.size(); ++e)
        if (e != b && causes[e].count(b) && !conflict.count({a, e}))
          pending.push_back({a, e});
    for (const auto& [a, e] : pending) {
      add_conflict(*this, a, e);
      changed = true;
    }
  }
}

void PrimeEventStructure::check_valid() const {
  for (uint32_t e = 0; e < labels.size(); ++e) {
    if (causes[e].count(e)) throw ModelError("causality is not irreflexive");
    for (uint32_t c : causes[e])
      for (uint32_t cc : causes[c])
        if (!causes[e].count(cc))
          throw ModelError("causality is not transitively closed");
  }
  for (const auto& [a, b] : conflict) {
    if (a == b) throw ModelError("conflict is not irreflexive");
    if (!conflict.count({b, a})) throw ModelError("conflict is not symmetric");
    for (uint32_t e = 0; e < labels.size(); ++e)
      if (e != b && causes[e].count(b) && !conflict.count({a, e}))
        throw ModelError("conflict is not hereditary");
  }
}

namespace {

struct Builder {
  const Model& m;
  explicit Builder(const Model& model) : m(model) {}

  struct Pes {
    PrimeEventStructure p;
    std::vector<int> side;  // construction-local origin tag
  };

  static uint32_t add_event(Pes& x, const ActionLabel& l,
                            std::set<uint32_t> causes, int side) {
    if (x.p.labels.size() >= kMaxEvents)
      throw ExplosionGuard("event structure grew past the event bound");
    x.p.labels.push_back(l);
    x.p.causes.push_back(std::move(causes));
    x.side.push_back(side);
    return static_cast<uint32_t>(x.p.labels.size() - 1);
  }

  static Pes disjoint_union(const Pes& a, const Pes& b, int side_a,
                            int side_b) {
    Pes out;
    uint32_t off = static_cast<uint32_t>(a.p.labels.size());
    out.p.labels = a.p.labels;
    out.p.causes = a.p.causes;
    out.p.conflict = a.p.conflict;
    out.side.assign(a.side.size(), side_a);
    for (uint32_t e = 0; e < b.p.labels.size(); ++e) {
      std::set<uint32_t> cs;
      for (uint32_t c : b.p.causes[e]) cs.insert(c + off);
      out.p.labels.push_back(b.p.labels[e]);
      out.p.causes.push_back(std::move(cs));
      out.side.push_back(side_b);
    }
    for (const auto& [x, y] : b.p.conflict)
      out.p.conflict.insert({x + off, y + off});
    if (out.p.labels.size() > kMaxEvents)
      throw ExplosionGuard("event structure grew past the event bound");
    return out;
  }

  Pes build(const TermPtr& t) {
    switch (t->kind) {
      case TermKind::Atom: {
        Pes out;
        if (t->act.kind == ActionKind::Eps) return out;
        add_event(out, t->act, {}, 0);
        return out;
      }
      case TermKind::Seq:
        return seq(build(t->l), build(t->r));
      case TermKind::Alt: {
        Pes a = build(t->l), b = build(t->r);
        uint32_t na = static_cast<uint32_t>(a.p.labels.size());
        Pes out = disjoint_union(a, b, 0, 0);
        for (uint32_t i = 0; i < na; ++i)
          for (uint32_t j = na; j < out.p.labels.size(); ++j)
            add_conflict(out.p, i, j);
        out.p.close_hereditary();
        return out;
      }
      case TermKind::Par: {
        Pes out = disjoint_union(build(t->l), build(t->r), 0, 0);
        out.p.close_hereditary();
        return out;
      }
      case TermKind::Merge: {
        Pes out = disjoint_union(build(t->l), build(t->r), 0, 1);
        saturate(out);
        out.p.close_hereditary();
        return out;
      }
      case TermKind::Comm:
        return comm(build(t->l), build(t->r));
      default:
        throw UnsupportedConstruct(render_term(t));
    }
  }

  // Sequential composition: a fresh copy of r is attached below every
  // complete successful run (maximal delta-free configuration) of l.
  Pes seq(const Pes& l, const Pes& r) {
    std::vector<EventSet> configs = enumerate_configurations(l.p);
    std::vector<EventSet> completions;
    for (const auto& c : configs) {
      bool maximal = true;
      for (uint32_t e = 0; e < l.p.labels.size() && maximal; ++e) {
        if (c.count(e)) continue;
        bool ok = true;
        for (uint32_t cause : l.p.causes[e])
          if (!c.count(cause)) ok = false;
        for (uint32_t in : c)
          if (l.p.in_conflict(e, in)) ok = false;
        if (ok) maximal = false;
      }
      if (!maximal) continue;
      bool successful = true;
      for (uint32_t e : c)
        if (!l.p.fireable(e)) successful = false;
      if (successful) completions.push_back(c);
    }
    Pes out;
    out.p = l.p;
    out.side = l.side;
    for (const auto& done : completions) {
      uint32_t off = static_cast<uint32_t>(out.p.labels.size());
      for (uint32_t e = 0; e < r.p.labels.size(); ++e) {
        std::set<uint32_t> cs(done.begin(), done.end());
        for (uint32_t c : r.p.causes[e]) cs.insert(c + off);
        add_event(out, r.p.labels[e], std::move(cs), 0);
      }
      for (const auto& [x, y] : r.p.conflict)
        out.p.conflict.insert({x + off, y + off});
    }
    out.p.close_hereditary();
    return out;
  }

  // Communication closure inside the full merge: every cross-side pair with
  // a declared merge yields a fresh result event in conflict with both
  // constituents; events causally above a constituent get copies re-caused
  // through the fresh event.
  void saturate(Pes& x) {
    std::set<std::pair<uint32_t, uint32_t>> done;
    bool grew = true;
    while (grew) {
      grew = false;
      uint32_t n = static_cast<uint32_t>(x.p.labels.size());
      for (uint32_t e1 = 0; e1 < n && !grew; ++e1) {
        if (x.side[e1] != 0 || !x.p.labels[e1].is_visible()) continue;
        for (uint32_t e2 = 0; e2 < n && !grew; ++e2) {
          if (x.side[e2] != 1 || !x.p.labels[e2].is_visible()) continue;
          if (done.count({e1, e2})) continue;
          if (!x.p.concurrent(e1, e2)) continue;
          auto res = m.gamma_lookup(x.p.labels[e1], x.p.labels[e2]);
          if (!res) {
            done.insert({e1, e2});
            continue;
          }
          done.insert({e1, e2});
          add_merged_pair(x, e1, e2, *res);
          grew = true;
        }
      }
    }
  }

  void add_merged_pair(Pes& x, uint32_t e1, uint32_t e2,
                       const ActionLabel& result) {
    std::set<uint32_t> cs = x.p.causes[e1];
    cs.insert(x.p.causes[e2].begin(), x.p.causes[e2].end());
    uint32_t c = add_event(x, result, std::move(cs), 2);
    add_conflict(x.p, c, e1);
    add_conflict(x.p, c, e2);
    // inherit the constituents' conflicts
    std::vector<std::pair<uint32_t, uint32_t>> inherited;
    for (const auto& [a, b] : x.p.conflict)
      if ((a == e1 || a == e2) && b != c) inherited.push_back({c, b});
    for (const auto& [a, b] : inherited) add_conflict(x.p, a, b);
    // copy events causally above a constituent, re-caused through c
    std::map<uint32_t, uint32_t> copy_of;
    uint32_t n = static_cast<uint32_t>(x.p.labels.size());
    // process in index order: causes point backwards, so parents copy first
    for (uint32_t e = 0; e < n; ++e) {
      if (e == e1 || e == e2) continue;
      if (!x.p.causes[e].count(e1) && !x.p.causes[e].count(e2)) continue;
      std::set<uint32_t> cs2;
      cs2.insert(c);
      for (uint32_t cause : x.p.causes[e]) {
        if (cause == e1 || cause == e2) continue;
        auto it = copy_of.find(cause);
        cs2.insert(it != copy_of.end() ? it->second : cause);
      }
      uint32_t separate = add_event(x, x.p.labels[e], std::move(cs2),
                                    x.side[e]);
      copy_of[e] = separate;
    }
    // copies inherit their originals' conflicts
    std::vector<std::pair<uint32_t, uint32_t>> extra;
    for (const auto& [orig, cp] : copy_of) {
      for (const auto& [a, b] : x.p.conflict)
        if (a == orig && b != cp) {
          auto it = copy_of.find(b);
          extra.push_back({cp, it != copy_of.end() ? it->second : b});
        }
      extra.push_back({cp, orig});
    }
    for (const auto& [a, b] : extra) add_conflict(x.p, a, b);
  }

  // Pure communication merge: only the initial-event pairs merge; the
  // constituents themselves never fire alone. An empty table deadlocks.
  Pes comm(const Pes& l, const Pes& r) {
    Pes u = disjoint_union(l, r, 0, 1);
    uint32_t nl = static_cast<uint32_t>(l.p.labels.size());
    Pes out;
    std::vector<std::pair<uint32_t, std::vector<uint32_t>>> groups;
    for (uint32_t e1 = 0; e1 < nl; ++e1) {
      if (!u.p.causes[e1].empty() || !u.p.labels[e1].is_visible()) continue;
      for (uint32_t e2 = nl; e2 < u.p.labels.size(); ++e2) {
        if (!u.p.causes[e2].empty() || !u.p.labels[e2].is_visible()) continue;
        auto res = m.gamma_lookup(u.p.labels[e1], u.p.labels[e2]);
        if (!res) continue;
        // one group: the merged event plus re-caused copies of everything
        // above either constituent, with the pair's own merge closure
        Pes work = u;
        add_merged_pair(work, e1, e2, *res);
        uint32_t c = static_cast<uint32_t>(u.p.labels.size());
        saturate(work);
        // project onto events reachable only through c
        std::vector<uint32_t> keep;
        for (uint32_t e = c; e < work.p.labels.size(); ++e)
          if (e == c || work.p.causes[e].count(c)) keep.push_back(e);
        std::map<uint32_t, uint32_t> remap;
        uint32_t base = static_cast<uint32_t>(out.p.labels.size());
        std::vector<uint32_t> members;
        for (uint32_t e : keep) {
          std::set<uint32_t> cs;
          for (uint32_t cause : work.p.causes[e]) {
            auto it = remap.find(cause);
            if (it != remap.end()) cs.insert(it->second);
          }
          remap[e] = add_event(out, work.p.labels[e], std::move(cs), 0);
          members.push_back(remap[e]);
        }
        for (const auto& [a, b] : work.p.conflict) {
          auto ia = remap.find(a);
          auto ib = remap.find(b);
          if (ia != remap.end() && ib != remap.end())
            out.p.conflict.insert({ia->second, ib->second});
        }
        groups.push_back({base, members});
      }
    }
    if (groups.empty()) {
      add_event(out, delta_action(), {}, 0);
      return out;
    }
    // alternative communications conflict pairwise
    for (size_t i = 0; i < groups.size(); ++i)
      for (size_t j = i + 1; j < groups.size(); ++j)
        for (uint32_t a : groups[i].second)
          for (uint32_t b : groups[j].second) add_conflict(out.p, a, b);
    out.p.close_hereditary();
    return out;
  }
};

}  // namespace

PrimeEventStructure build_pes(const TermPtr& t, const Model& m) {
  Builder b(m);
  PrimeEventStructure p = b.build(t).p;
  p.close_hereditary();
  p.check_valid();
  return p;
}

std::vector<EventSet> enumerate_configurations(const PrimeEventStructure& p) {
  std::set<EventSet> seen;
  std::deque<EventSet> queue;
  seen.insert({});
  queue.push_back({});
  while (!queue.empty()) {
    EventSet c = queue.front();
    queue.pop_front();
    for (uint32_t e = 0; e < p.labels.size(); ++e) {
      if (c.count(e)) continue;
      bool ok = true;
      for (uint32_t cause : p.causes[e])
        if (!c.count(cause)) ok = false;
      if (!ok) continue;
      for (uint32_t in : c)
        if (p.in_conflict(e, in)) ok = false;
      if (!ok) continue;
      EventSet next = c;
      next.insert(e);
      if (seen.insert(next).second) {
        if (seen.size() > kMaxConfigs)
          throw ExplosionGuard("too many configurations");
        queue.push_back(std::move(next));
      }
    }
  }
  return std::vector<EventSet>(seen.begin(), seen.end());
}

bool configuration_terminated(const PrimeEventStructure& p,
                              const EventSet& c) {
  for (uint32_t e = 0; e < p.labels.size(); ++e) {
    if (c.count(e)) continue;
    bool ok = true;
    for (uint32_t cause : p.causes[e])
      if (!c.count(cause)) ok = false;
    for (uint32_t in : c)
      if (p.in_conflict(e, in)) ok = false;
    if (ok) return false;  // an extension (delta included) exists
  }
  return true;
}

namespace {

StepLabel visible_label(const PrimeEventStructure& p, const EventSet& x) {
  std::vector<ActionLabel> acts;
  for (uint32_t e : x)
    if (p.labels[e].is_visible()) acts.push_back(p.labels[e]);
  return make_step(std::move(acts));
}

void extend(const PrimeEventStructure& p, const EventSet& c, EventSet& x,
            uint32_t from, std::vector<PomsetTransition>& out) {
  for (uint32_t e = from; e < p.labels.size(); ++e) {
    if (c.count(e) || x.count(e) || !p.fireable(e)) continue;
    bool ok = true;
    for (uint32_t cause : p.causes[e])
      if (!c.count(cause) && !x.count(cause)) ok = false;
    if (!ok) continue;
    for (uint32_t in : c)
      if (p.in_conflict(e, in)) ok = false;
    for (uint32_t in : x)
      if (p.in_conflict(e, in)) ok = false;
    if (!ok) continue;
    x.insert(e);
    EventSet to = c;
    to.insert(x.begin(), x.end());
    bool step = true;
    for (uint32_t a : x)
      for (uint32_t b : x)
        if (a != b && (p.le(a, b) || p.le(b, a))) step = false;
    out.push_back({x, to, step, visible_label(p, x)});
    extend(p, c, x, e + 1, out);
    x.erase(e);
  }
}

}  // namespace

std::vector<PomsetTransition> pomset_transitions(const PrimeEventStructure& p,
                                                 const EventSet& c) {
  std::vector<PomsetTransition> out;
  EventSet x;
  extend(p, c, x, 0, out);
  std::sort(out.begin(), out.end(),
            [](const PomsetTransition& a, const PomsetTransition& b) {
              return a.add < b.add;
            });
  return out;
}

std::string canonical_pomset(const PrimeEventStructure& p, const EventSet& x) {
  // hat: drop tau events, keep the induced order on the rest
  std::vector<uint32_t> ev;
  for (uint32_t e : x)
    if (p.labels[e].is_visible()) ev.push_back(e);
  std::sort(ev.begin(), ev.end(), [&](uint32_t a, uint32_t b) {
    return p.labels[a] < p.labels[b];
  });
  std::string best;
  std::vector<uint32_t> perm = ev;
  // permutations only permute equal-label positions, so labels stay sorted
  do {
    bool label_ok = true;
    for (size_t i = 0; i + 1 < perm.size(); ++i)
      if (p.labels[perm[i + 1]] < p.labels[perm[i]]) label_ok = false;
    if (!label_ok) continue;
    std::string enc;
    for (size_t i = 0; i < perm.size(); ++i) {
      enc += p.labels[perm[i]].text();
      enc += "|";
      for (size_t j = 0; j < perm.size(); ++j)
        enc += p.le(perm[j], perm[i]) && j != i ? '1' : '0';
      enc += ";";
    }
    if (best.empty() || enc < best) best = enc;
  } while (std::next_permutation(perm.begin(), perm.end()));
  if (best.empty()) best = "<empty>";
  return best;
}

TransitionSystem pes_step_lts(const PrimeEventStructure& p) {
  TransitionSystem ts;
  std::map<EventSet, uint32_t> index;
  std::vector<EventSet> configs;
  std::deque<uint32_t> queue;
  index[{}] = 0;
  configs.push_back({});
  queue.push_back(0);
  std::map<StepLabel, uint32_t> label_ids;
  auto label_id = [&](const StepLabel& l) {
    auto it = label_ids.find(l);
    if (it != label_ids.end()) return it->second;
    uint32_t id = static_cast<uint32_t>(ts.labels.size());
    ts.labels.push_back(l);
    label_ids[l] = id;
    return id;
  };
  while (!queue.empty()) {
    uint32_t src = queue.front();
    queue.pop_front();
    for (const auto& tr : pomset_transitions(p, configs[src])) {
      if (!tr.is_step) continue;
      auto it = index.find(tr.to);
      uint32_t dst;
      if (it == index.end()) {
        dst = static_cast<uint32_t>(configs.size());
        index[tr.to] = dst;
        configs.push_back(tr.to);
        queue.push_back(dst);
      } else {
        dst = it->second;
      }
      ts.transitions.push_back({src, label_id(tr.label), dst});
    }
  }
  ts.num_states = configs.size();
  ts.initial = 0;
  ts.terminating.resize(configs.size());
  for (size_t i = 0; i < configs.size(); ++i)
    ts.terminating[i] = configuration_terminated(p, configs[i]);
  ts.state_desc.reserve(configs.size());
  for (const auto& c : configs) {
    std::string d = "{";
    bool first = true;
    for (uint32_t e : c) {
      if (!first) d += ",";
      first = false;
      d += p.labels[e].text() + "#" + std::to_string(e);
    }
    ts.state_desc.push_back(d + "}");
  }
  ts.build_out();
  return ts;
}

std::string export_pes_dot(const PrimeEventStructure& p) {
  std::ostringstream out;
  out << "digraph pes {\n";
  for (uint32_t e = 0; e < p.labels.size(); ++e)
    out << "  e" << e << " [label=\"" << p.labels[e].text() << "\"];\n";
  // draw only the covering (non-transitive) causalities
  for (uint32_t e = 0; e < p.labels.size(); ++e)
    for (uint32_t c : p.causes[e]) {
      bool covered = false;
      for (uint32_t d : p.causes[e])
        if (d != c && p.causes[d].count(c)) covered = true;
      if (!covered)
        out << "  e" << c << " -> e" << e << ";\n";
    }
  for (const auto& [a, b] : p.conflict)
    if (a < b)
      out << "  e" << a << " -> e" << b
          << " [style=dashed,dir=none,constraint=false];\n";
  out << "}\n";
  return out.str();
}

}  // namespace aptc
