#include "aptc/equivalence.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

namespace aptc {

namespace {

using Clock = std::chrono::steady_clock;

long long elapsed_ms(Clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() -
                                                               start)
      .count();
}

// Combined view of two transition systems with a shared label table.
struct Combined {
  size_t n1, n;
  std::vector<std::vector<std::pair<uint32_t, uint32_t>>> out;  // label, dst
  std::vector<uint8_t> term;
  std::vector<StepLabel> labels;
  uint32_t init1, init2;
  std::vector<uint32_t> silent_labels;

  Combined(const TransitionSystem& t1, const TransitionSystem& t2) {
    n1 = t1.num_states;
    n = t1.num_states + t2.num_states;
    out.resize(n);
    term.resize(n);
    std::map<StepLabel, uint32_t> ids;
    auto id_of = [&](const StepLabel& l) {
      auto it = ids.find(l);
      if (it != ids.end()) return it->second;
      uint32_t id = static_cast<uint32_t>(labels.size());
      labels.push_back(l);
      ids[l] = id;
      return id;
    };
    for (const auto& tr : t1.transitions)
      out[tr.src].push_back({id_of(t1.labels[tr.label]), tr.dst});
    for (const auto& tr : t2.transitions)
      out[n1 + tr.src].push_back(
          {id_of(t2.labels[tr.label]), static_cast<uint32_t>(n1 + tr.dst)});
    for (size_t i = 0; i < t1.num_states; ++i) term[i] = t1.terminating[i];
    for (size_t i = 0; i < t2.num_states; ++i)
      term[n1 + i] = t2.terminating[i];
    init1 = t1.initial;
    init2 = static_cast<uint32_t>(n1 + t2.initial);
    for (uint32_t l = 0; l < labels.size(); ++l)
      if (labels[l].silent()) silent_labels.push_back(l);
    for (auto& v : out) std::sort(v.begin(), v.end());
  }

  bool silent(uint32_t label) const { return labels[label].silent(); }

  // tau-closure per state (reflexive-transitive over silent labels)
  std::vector<std::vector<uint32_t>> silent_reach() const {
    std::vector<std::vector<uint32_t>> reach(n);
    for (uint32_t s = 0; s < n; ++s) {
      std::set<uint32_t> seen{s};
      std::vector<uint32_t> stack{s};
      while (!stack.empty()) {
        uint32_t v = stack.back();
        stack.pop_back();
        for (const auto& [l, d] : out[v])
          if (silent(l) && seen.insert(d).second) stack.push_back(d);
      }
      reach[s].assign(seen.begin(), seen.end());
    }
    return reach;
  }
};

}  // namespace

// ---------------------------------------------------------------------------
// Strong step bisimulation
// ---------------------------------------------------------------------------

EquivalenceVerdict check_step_bisimulation(const TransitionSystem& t1,
                                           const TransitionSystem& t2) {
  auto start = Clock::now();
  Combined c(t1, t2);
  EquivalenceVerdict v;
  v.stats.states = c.n;

  std::vector<uint32_t> block(c.n);
  for (size_t i = 0; i < c.n; ++i) block[i] = c.term[i] ? 1 : 0;
  // history of block assignments, for the distinguishing sequence
  std::vector<std::vector<uint32_t>> rounds{block};

  bool changed = true;
  while (changed) {
    changed = false;
    ++v.stats.iterations;
    std::map<std::pair<uint32_t, std::vector<std::pair<uint32_t, uint32_t>>>,
             uint32_t>
        sig_ids;
    std::vector<uint32_t> next(c.n);
    for (size_t i = 0; i < c.n; ++i) {
      std::set<std::pair<uint32_t, uint32_t>> sig;
      for (const auto& [l, d] : c.out[i]) sig.insert({l, block[d]});
      std::vector<std::pair<uint32_t, uint32_t>> key(sig.begin(), sig.end());
      auto full = std::make_pair(block[i], std::move(key));
      auto it = sig_ids.find(full);
      if (it == sig_ids.end()) {
        uint32_t id = static_cast<uint32_t>(sig_ids.size());
        sig_ids[std::move(full)] = id;
        next[i] = id;
      } else {
        next[i] = it->second;
      }
    }
    if (next != block) {
      changed = true;
      block = std::move(next);
      rounds.push_back(block);
    }
  }

  v.related = block[c.init1] == block[c.init2];
  if (v.related) {
    for (uint32_t i = 0; i < c.n1; ++i)
      for (uint32_t j = static_cast<uint32_t>(c.n1); j < c.n; ++j)
        if (block[i] == block[j])
          v.relation.push_back({i, static_cast<uint32_t>(j - c.n1)});
  } else {
    // Distinguishing sequence, shortest first: at the earliest round where
    // the pair separates, pick a move one side cannot answer.
    std::function<void(uint32_t, uint32_t)> explain = [&](uint32_t a,
                                                          uint32_t b) {
      size_t round = 0;
      while (round < rounds.size() && rounds[round][a] == rounds[round][b])
        ++round;
      if (round == 0) {
        v.distinguishing.push_back(c.term[a] ? "left terminates, right does not"
                                             : "right terminates, left does not");
        return;
      }
      if (round >= rounds.size()) return;  // equal; nothing to explain
      const auto& prev = rounds[round - 1];
      // find a transition of a (or b) unmatched at the previous round
      for (int side = 0; side < 2; ++side) {
        uint32_t from = side == 0 ? a : b;
        uint32_t other = side == 0 ? b : a;
        for (const auto& [l, d] : c.out[from]) {
          bool matched_now = false;
          uint32_t best_other = 0;
          bool has_prev = false;
          for (const auto& [l2, d2] : c.out[other]) {
            if (l2 != l) continue;
            if (rounds[round][d] == rounds[round][d2]) matched_now = true;
            if (prev[d] == prev[d2]) {
              has_prev = true;
              best_other = d2;
            }
          }
          if (!matched_now) {
            v.distinguishing.push_back(
                std::string(side == 0 ? "left" : "right") + " offers " +
                c.labels[l].text());
            if (has_prev) explain(side == 0 ? d : best_other,
                                  side == 0 ? best_other : d);
            return;
          }
        }
      }
    };
    explain(c.init1, c.init2);
  }
  v.stats.millis = elapsed_ms(start);
  return v;
}

bool validate_step_witness(const TransitionSystem& t1,
                           const TransitionSystem& t2,
                           const EquivalenceVerdict& v) {
  if (!v.related) return false;
  Combined c(t1, t2);
  std::set<std::pair<uint32_t, uint32_t>> rel(v.relation.begin(),
                                              v.relation.end());
  if (!rel.count({t1.initial, t2.initial})) return false;
  for (const auto& [i, j] : rel) {
    uint32_t a = i, b = static_cast<uint32_t>(c.n1 + j);
    if (c.term[a] != c.term[b]) return false;
    for (const auto& [l, d] : c.out[a]) {
      bool ok = false;
      for (const auto& [l2, d2] : c.out[b])
        if (l2 == l && rel.count({d, static_cast<uint32_t>(d2 - c.n1)}))
          ok = true;
      if (!ok) return false;
    }
    for (const auto& [l, d] : c.out[b]) {
      bool ok = false;
      for (const auto& [l2, d2] : c.out[a])
        if (l2 == l && rel.count({d2, static_cast<uint32_t>(d - c.n1)}))
          ok = true;
      if (!ok) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Rooted branching step bisimulation
// ---------------------------------------------------------------------------

namespace {

struct BranchingChecker {
  const Combined& c;
  std::vector<std::vector<uint32_t>> reach;  // silent closure
  std::vector<std::vector<uint8_t>> rel;     // n1 x n2
  size_t iterations = 0;

  explicit BranchingChecker(const Combined& comb) : c(comb) {
    reach = c.silent_reach();
    size_t n2 = c.n - c.n1;
    rel.assign(c.n1, std::vector<uint8_t>(n2, 1));
    run();
  }

  bool related(uint32_t a, uint32_t bglobal) const {
    return rel[a][bglobal - c.n1] != 0;
  }

  // the branching transfer condition for a's move (l,d) against b
  bool matched(uint32_t a, uint32_t l, uint32_t d, uint32_t b,
               bool left_moves) const {
    if (c.silent(l)) {
      bool ok = left_moves ? rel[d][b - c.n1] : rel[b][d - c.n1];
      if (ok) return true;
    }
    for (uint32_t b0 : reach[b]) {
      bool base = left_moves ? rel[a][b0 - c.n1] : rel[b0][a - c.n1];
      if (!base) continue;
      for (const auto& [l2, d2] : c.out[b0]) {
        if (l2 != l) continue;
        bool ok = left_moves ? rel[d][d2 - c.n1] : rel[d2][d - c.n1];
        if (ok) return true;
      }
    }
    return false;
  }

  bool term_matched(uint32_t a, uint32_t b, bool left) const {
    for (uint32_t b0 : reach[b]) {
      bool base = left ? rel[a][b0 - c.n1] : rel[b0][a - c.n1];
      if (base && c.term[b0]) return true;
    }
    return false;
  }

  void run() {
    bool changed = true;
    while (changed) {
      changed = false;
      ++iterations;
      for (uint32_t i = 0; i < c.n1; ++i)
        for (uint32_t j = 0; j < c.n - c.n1; ++j) {
          if (!rel[i][j]) continue;
          uint32_t b = static_cast<uint32_t>(c.n1 + j);
          bool ok = true;
          for (const auto& [l, d] : c.out[i])
            if (!matched(i, l, d, b, true)) ok = false;
          if (ok)
            for (const auto& [l, d] : c.out[b])
              if (!matched(b, l, d, i, false)) ok = false;
          if (ok && c.term[i] && !term_matched(i, b, true)) ok = false;
          if (ok && c.term[b] && !term_matched(b, i, false)) ok = false;
          if (!ok) {
            rel[i][j] = 0;
            changed = true;
          }
        }
    }
  }
};

}  // namespace

EquivalenceVerdict check_rooted_branching_step_bisimulation(
    const TransitionSystem& t1, const TransitionSystem& t2) {
  auto start = Clock::now();
  Combined c(t1, t2);
  EquivalenceVerdict v;
  v.stats.states = c.n;
  BranchingChecker bc(c);
  v.stats.iterations = bc.iterations;

  // rooted condition: strict first moves and strict termination agreement
  uint32_t a = c.init1, b = c.init2;
  bool rooted = c.term[a] == c.term[b];
  std::string fail;
  if (!rooted) fail = "initial termination flags differ";
  if (rooted)
    for (const auto& [l, d] : c.out[a]) {
      bool ok = false;
      for (const auto& [l2, d2] : c.out[b])
        if (l2 == l && bc.related(d, d2)) ok = true;
      if (!ok) {
        rooted = false;
        fail = "left root offers " + c.labels[l].text();
        break;
      }
    }
  if (rooted)
    for (const auto& [l, d] : c.out[b]) {
      bool ok = false;
      for (const auto& [l2, d2] : c.out[a])
        if (l2 == l && bc.related(d2, d)) ok = true;
      if (!ok) {
        rooted = false;
        fail = "right root offers " + c.labels[l].text();
        break;
      }
    }
  v.related = rooted;
  if (v.related) {
    for (uint32_t i = 0; i < c.n1; ++i)
      for (uint32_t j = 0; j < c.n - c.n1; ++j)
        if (bc.rel[i][j]) v.relation.push_back({i, j});
  } else {
    v.distinguishing.push_back(fail);
    // descend for a short explanation of the non-branching pair
    uint32_t bad1 = a, bad2 = b;
    if (!bc.related(a, b)) {
      v.distinguishing.push_back("initial states are not branching bisimilar");
      (void)bad1;
      (void)bad2;
    }
  }
  v.stats.millis = elapsed_ms(start);
  return v;
}

bool validate_branching_witness(const TransitionSystem& t1,
                                const TransitionSystem& t2,
                                const EquivalenceVerdict& v) {
  if (!v.related) return false;
  Combined c(t1, t2);
  auto reach = c.silent_reach();
  std::vector<std::vector<uint8_t>> rel(c.n1,
                                        std::vector<uint8_t>(c.n - c.n1, 0));
  for (const auto& [i, j] : v.relation) rel[i][j] = 1;
  auto related = [&](uint32_t x, uint32_t yglob) {
    return rel[x][yglob - c.n1] != 0;
  };
  for (uint32_t i = 0; i < c.n1; ++i)
    for (uint32_t j = 0; j < c.n - c.n1; ++j) {
      if (!rel[i][j]) continue;
      uint32_t b = static_cast<uint32_t>(c.n1 + j);
      // re-check the transfer clauses directly
      for (const auto& [l, d] : c.out[i]) {
        bool ok = c.silent(l) && related(d, b);
        for (uint32_t b0 : reach[b]) {
          if (ok) break;
          if (!related(i, b0)) continue;
          for (const auto& [l2, d2] : c.out[b0])
            if (l2 == l && related(d, d2)) ok = true;
        }
        if (!ok) return false;
      }
      for (const auto& [l, d] : c.out[b]) {
        bool ok = c.silent(l) && related(i, d);
        for (uint32_t a0 : reach[i]) {
          if (ok) break;
          if (!related(a0, b)) continue;
          for (const auto& [l2, d2] : c.out[a0])
            if (l2 == l && related(d2, d)) ok = true;
        }
        if (!ok) return false;
      }
      if (c.term[i]) {
        bool ok = false;
        for (uint32_t b0 : reach[b])
          if (related(i, b0) && c.term[b0]) ok = true;
        if (!ok) return false;
      }
      if (c.term[b]) {
        bool ok = false;
        for (uint32_t a0 : reach[i])
          if (related(a0, b) && c.term[a0]) ok = true;
        if (!ok) return false;
      }
    }
  return true;
}

// ---------------------------------------------------------------------------
// Pomset bisimulation
// ---------------------------------------------------------------------------

namespace {

struct PesSide {
  const PrimeEventStructure& p;
  std::vector<EventSet> configs;
  std::map<EventSet, uint32_t> index;
  std::vector<std::vector<PomsetTransition>> trans;
  std::vector<uint8_t> term;
  std::vector<std::vector<std::string>> pomset_keys;  // canonical per trans

  explicit PesSide(const PrimeEventStructure& pes) : p(pes) {
    configs = enumerate_configurations(p);
    for (uint32_t i = 0; i < configs.size(); ++i) index[configs[i]] = i;
    trans.resize(configs.size());
    pomset_keys.resize(configs.size());
    term.resize(configs.size());
    for (uint32_t i = 0; i < configs.size(); ++i) {
      trans[i] = pomset_transitions(p, configs[i]);
      term[i] = configuration_terminated(p, configs[i]);
      for (const auto& t : trans[i])
        pomset_keys[i].push_back(canonical_pomset(p, t.add));
    }
  }
};

EquivalenceVerdict pomset_like_check(const PrimeEventStructure& p1,
                                     const PrimeEventStructure& p2,
                                     bool steps_only) {
  auto start = Clock::now();
  PesSide a(p1), b(p2);
  EquivalenceVerdict v;
  v.stats.states = a.configs.size() + b.configs.size();

  std::vector<std::vector<uint8_t>> rel(
      a.configs.size(), std::vector<uint8_t>(b.configs.size(), 1));
  for (uint32_t i = 0; i < a.configs.size(); ++i)
    for (uint32_t j = 0; j < b.configs.size(); ++j)
      if (a.term[i] != b.term[j]) rel[i][j] = 0;

  bool changed = true;
  while (changed) {
    changed = false;
    ++v.stats.iterations;
    for (uint32_t i = 0; i < a.configs.size(); ++i)
      for (uint32_t j = 0; j < b.configs.size(); ++j) {
        if (!rel[i][j]) continue;
        bool ok = true;
        for (size_t k = 0; k < a.trans[i].size() && ok; ++k) {
          if (steps_only && !a.trans[i][k].is_step) continue;
          bool m = false;
          for (size_t k2 = 0; k2 < b.trans[j].size() && !m; ++k2) {
            if (steps_only && !b.trans[j][k2].is_step) continue;
            if (a.pomset_keys[i][k] != b.pomset_keys[j][k2]) continue;
            if (rel[a.index.at(a.trans[i][k].to)]
                   [b.index.at(b.trans[j][k2].to)])
              m = true;
          }
          if (!m) ok = false;
        }
        for (size_t k2 = 0; k2 < b.trans[j].size() && ok; ++k2) {
          if (steps_only && !b.trans[j][k2].is_step) continue;
          bool m = false;
          for (size_t k = 0; k < a.trans[i].size() && !m; ++k) {
            if (steps_only && !a.trans[i][k].is_step) continue;
            if (a.pomset_keys[i][k] != b.pomset_keys[j][k2]) continue;
            if (rel[a.index.at(a.trans[i][k].to)]
                   [b.index.at(b.trans[j][k2].to)])
              m = true;
          }
          if (!m) ok = false;
        }
        if (!ok) {
          rel[i][j] = 0;
          changed = true;
        }
      }
  }
  uint32_t e1 = a.index.at({}), e2 = b.index.at({});
  v.related = rel[e1][e2] != 0;
  if (v.related) {
    for (uint32_t i = 0; i < a.configs.size(); ++i)
      for (uint32_t j = 0; j < b.configs.size(); ++j)
        if (rel[i][j]) v.relation.push_back({i, j});
  } else {
    v.distinguishing.push_back("empty configurations are not related");
  }
  v.stats.millis = elapsed_ms(start);
  return v;
}

}  // namespace

EquivalenceVerdict check_pomset_bisimulation(const PrimeEventStructure& p1,
                                             const PrimeEventStructure& p2) {
  return pomset_like_check(p1, p2, false);
}

// ---------------------------------------------------------------------------
// (Hereditary) history-preserving bisimulation
// ---------------------------------------------------------------------------

namespace {

struct Triple {
  EventSet c1;
  std::vector<std::pair<uint32_t, uint32_t>> f;  // sorted by first
  EventSet c2;

  bool operator<(const Triple& o) const {
    if (c1 != o.c1) return c1 < o.c1;
    if (c2 != o.c2) return c2 < o.c2;
    return f < o.f;
  }
};

struct HpChecker {
  const PrimeEventStructure& p1;
  const PrimeEventStructure& p2;
  bool hereditary;
  std::vector<Triple> triples;
  std::map<Triple, uint32_t> index;
  std::vector<uint8_t> alive;
  size_t iterations = 0;

  HpChecker(const PrimeEventStructure& a, const PrimeEventStructure& b,
            bool h)
      : p1(a), p2(b), hereditary(h) {
    build_triples();
    prune();
  }

  // label-and-order isomorphisms between two configurations
  void isos(const EventSet& c1, const EventSet& c2,
            std::vector<std::vector<std::pair<uint32_t, uint32_t>>>& out) {
    std::vector<uint32_t> e1(c1.begin(), c1.end());
    std::vector<uint32_t> e2(c2.begin(), c2.end());
    if (e1.size() != e2.size()) return;
    std::vector<uint32_t> perm(e1.size());
    std::vector<uint8_t> used(e2.size(), 0);
    std::function<void(size_t)> rec = [&](size_t k) {
      if (k == e1.size()) {
        // check order both ways
        for (size_t i = 0; i < e1.size(); ++i)
          for (size_t j = 0; j < e1.size(); ++j)
            if (p1.le(e1[i], e1[j]) != p2.le(perm[i], perm[j])) return;
        std::vector<std::pair<uint32_t, uint32_t>> f;
        for (size_t i = 0; i < e1.size(); ++i) f.push_back({e1[i], perm[i]});
        std::sort(f.begin(), f.end());
        out.push_back(std::move(f));
        return;
      }
      for (size_t j = 0; j < e2.size(); ++j) {
        if (used[j]) continue;
        if (!(p1.labels[e1[k]] == p2.labels[e2[j]])) continue;
        used[j] = 1;
        perm[k] = e2[j];
        rec(k + 1);
        used[j] = 0;
      }
    };
    rec(0);
  }

  void build_triples() {
    auto cfg1 = enumerate_configurations(p1);
    auto cfg2 = enumerate_configurations(p2);
    for (const auto& c1 : cfg1)
      for (const auto& c2 : cfg2) {
        std::vector<std::vector<std::pair<uint32_t, uint32_t>>> fs;
        isos(c1, c2, fs);
        for (auto& f : fs) {
          Triple t{c1, std::move(f), c2};
          index[t] = static_cast<uint32_t>(triples.size());
          triples.push_back(std::move(t));
        }
      }
    alive.assign(triples.size(), 1);
    // termination agreement baked in from the start
    for (size_t i = 0; i < triples.size(); ++i)
      if (configuration_terminated(p1, triples[i].c1) !=
          configuration_terminated(p2, triples[i].c2))
        alive[i] = 0;
  }

  std::vector<std::pair<uint32_t, EventSet>> singles(
      const PrimeEventStructure& p, const EventSet& c) const {
    std::vector<std::pair<uint32_t, EventSet>> out;
    for (uint32_t e = 0; e < p.labels.size(); ++e) {
      if (c.count(e) || !p.fireable(e)) continue;
      bool ok = true;
      for (uint32_t cause : p.causes[e])
        if (!c.count(cause)) ok = false;
      for (uint32_t in : c)
        if (p.in_conflict(e, in)) ok = false;
      if (!ok) continue;
      EventSet to = c;
      to.insert(e);
      out.push_back({e, std::move(to)});
    }
    return out;
  }

  bool transfer_ok(const Triple& t) const {
    for (const auto& [e1, to1] : singles(p1, t.c1)) {
      bool ok = false;
      for (const auto& [e2, to2] : singles(p2, t.c2)) {
        if (!(p1.labels[e1] == p2.labels[e2])) continue;
        Triple ext{to1, t.f, to2};
        ext.f.push_back({e1, e2});
        std::sort(ext.f.begin(), ext.f.end());
        auto it = index.find(ext);
        if (it != index.end() && alive[it->second]) ok = true;
        if (ok) break;
      }
      if (!ok) return false;
    }
    for (const auto& [e2, to2] : singles(p2, t.c2)) {
      bool ok = false;
      for (const auto& [e1, to1] : singles(p1, t.c1)) {
        if (!(p1.labels[e1] == p2.labels[e2])) continue;
        Triple ext{to1, t.f, to2};
        ext.f.push_back({e1, e2});
        std::sort(ext.f.begin(), ext.f.end());
        auto it = index.find(ext);
        if (it != index.end() && alive[it->second]) ok = true;
        if (ok) break;
      }
      if (!ok) return false;
    }
    return true;
  }

  bool downward_ok(const Triple& t) const {
    // every pointwise restriction of an alive triple must be alive
    std::vector<std::pair<uint32_t, uint32_t>> pairs = t.f;
    size_t k = pairs.size();
    for (size_t mask = 0; mask < (size_t{1} << k); ++mask) {
      if (mask + 1 == (size_t{1} << k)) continue;  // the triple itself
      Triple sub;
      for (size_t i = 0; i < k; ++i)
        if (mask & (size_t{1} << i)) {
          sub.c1.insert(pairs[i].first);
          sub.c2.insert(pairs[i].second);
          sub.f.push_back(pairs[i]);
        }
      // both sides must be configurations (causally closed)
      bool cfg = true;
      for (uint32_t e : sub.c1)
        for (uint32_t c : p1.causes[e])
          if (!sub.c1.count(c)) cfg = false;
      for (uint32_t e : sub.c2)
        for (uint32_t c : p2.causes[e])
          if (!sub.c2.count(c)) cfg = false;
      if (!cfg) continue;
      auto it = index.find(sub);
      if (it == index.end() || !alive[it->second]) return false;
    }
    return true;
  }

  void prune() {
    bool changed = true;
    while (changed) {
      changed = false;
      ++iterations;
      for (size_t i = 0; i < triples.size(); ++i) {
        if (!alive[i]) continue;
        if (!transfer_ok(triples[i]) ||
            (hereditary && !downward_ok(triples[i]))) {
          alive[i] = 0;
          changed = true;
        }
      }
    }
  }

  bool empty_related() const {
    Triple t{{}, {}, {}};
    auto it = index.find(t);
    return it != index.end() && alive[it->second];
  }
};

}  // namespace

EquivalenceVerdict check_hp_bisimulation(const PrimeEventStructure& p1,
                                         const PrimeEventStructure& p2) {
  auto start = Clock::now();
  HpChecker hc(p1, p2, false);
  EquivalenceVerdict v;
  v.stats.states = hc.triples.size();
  v.stats.iterations = hc.iterations;
  v.related = hc.empty_related();
  if (!v.related)
    v.distinguishing.push_back("no history-preserving relation survives");
  v.stats.millis = elapsed_ms(start);
  return v;
}

EquivalenceVerdict check_hhp_bisimulation(const PrimeEventStructure& p1,
                                          const PrimeEventStructure& p2) {
  auto start = Clock::now();
  HpChecker hc(p1, p2, true);
  EquivalenceVerdict v;
  v.stats.states = hc.triples.size();
  v.stats.iterations = hc.iterations;
  v.related = hc.empty_related();
  if (!v.related)
    v.distinguishing.push_back(
        "no downward-closed history-preserving relation survives");
  v.stats.millis = elapsed_ms(start);
  return v;
}

// ---------------------------------------------------------------------------

std::string EquivalenceVerdict::to_json(bool with_millis) const {
  std::ostringstream out;
  out << "{\"related\":" << (related ? "true" : "false");
  out << ",\"witness\":{";
  if (related) {
    out << "\"relation\":[";
    for (size_t i = 0; i < relation.size(); ++i) {
      if (i) out << ",";
      out << "[" << relation[i].first << "," << relation[i].second << "]";
    }
    out << "]";
  } else {
    out << "\"distinguishing\":[";
    for (size_t i = 0; i < distinguishing.size(); ++i) {
      if (i) out << ",";
      out << "\"" << distinguishing[i] << "\"";
    }
    out << "]";
  }
  out << "},\"stats\":{\"states\":" << stats.states
      << ",\"iterations\":" << stats.iterations
      << ",\"millis\":" << (with_millis ? stats.millis : 0) << "}}";
  return out.str();
}

}  // namespace aptc
