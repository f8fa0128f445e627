#include "aptc/model.hpp"

namespace aptc {

TermPtr Model::unfold(const std::string& spec, const std::string& var) const {
  auto key = std::make_pair(spec, var);
  auto it = unfold_cache_.find(key);
  if (it != unfold_cache_.end()) return it->second;
  const RecursiveSpec* sp = find_spec(spec);
  if (!sp) throw ModelError("unknown specification: " + spec);
  const TermPtr* rhs = sp->find(var);
  if (!rhs) throw ModelError("unknown equation " + var + " in " + spec);
  TermPtr t = *rhs;
  for (const auto& [v, _] : sp->equations)
    t = substitute(t, v, t_reccall(v, spec));
  unfold_cache_[key] = t;
  return t;
}

namespace {

void check_term_names(const Model& m, const TermPtr& t, const std::string& ctx) {
  if (!t) return;
  switch (t->kind) {
    case TermKind::Atom:
      if (t->act.is_visible() && !m.actions.count(t->act.name))
        throw ModelError("undeclared action '" + t->act.name + "' in " + ctx);
      break;
    case TermKind::Shadow:
      if (!m.actions.count(t->act.name))
        throw ModelError("undeclared shadow base '" + t->act.name + "' in " +
                         ctx);
      break;
    case TermKind::RecCall:
      if (!m.find_spec(t->spec_name))
        throw ModelError("undeclared specification '" + t->spec_name +
                         "' in " + ctx);
      break;
    case TermKind::Encap:
    case TermKind::Hide:
      for (const auto& n : t->names) {
        bool known = m.actions.count(n) > 0;
        if (!known)
          for (const auto& v : m.vars)
            if (v.name == n) known = true;  // hide may name guard predicates
        if (!known)
          throw ModelError("undeclared name '" + n + "' in set of " + ctx);
      }
      break;
    default:
      break;
  }
  check_term_names(m, t->l, ctx);
  check_term_names(m, t->r, ctx);
}

}  // namespace

void Model::validate() const {
  for (const auto& [pair, res] : gamma) {
    auto rev = gamma.find({pair.second, pair.first});
    if (rev == gamma.end() || !(rev->second == res))
      throw ModelError("communication table is not symmetric at " +
                       pair.first.text() + " | " + pair.second.text());
  }
  for (const auto& n : encap_set)
    if (hide_set.count(n))
      throw ModelError("name '" + n + "' appears in both encap and hide sets");
  for (const auto& sp : specs)
    for (const auto& [var, rhs] : sp.equations) {
      for (const auto& fv : free_recvars(rhs))
        if (!sp.find(fv))
          throw ModelError("variable '" + fv + "' is not defined in spec '" +
                           sp.name + "'");
      check_term_names(*this, rhs, sp.name + "." + var);
    }
  if (system) check_term_names(*this, system, "system");
  if (spec_term) check_term_names(*this, spec_term, "spec");
}

Model empty_model() {
  Model m;
  m.name = "empty";
  return m;
}

}  // namespace aptc
