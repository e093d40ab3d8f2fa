#include "mcbv/explain.hpp"

#include <algorithm>
#include <sstream>

#include "mcbv/explain_arith.hpp"
#include "mcbv/explain_eq.hpp"

namespace mcbv {

const char *explainer_name(Explainer e) {
  switch (e) {
  case Explainer::Eq: return "eq";
  case Explainer::Arith: return "arith";
  case Explainer::Closed: return "closed";
  case Explainer::Bitblast: return "bb";
  }
  return "?";
}

namespace {

std::vector<TermId> assemble(TermStore &store, const std::vector<TermId> &premises,
                             const std::vector<TermId> &literals) {
  std::vector<TermId> clause;
  auto push = [&](TermId l) {
    if (std::find(clause.begin(), clause.end(), l) == clause.end())
      clause.push_back(l);
  };
  for (TermId p : premises)
    push(store.mk_not(p));
  for (TermId l : literals)
    push(l);
  return clause;
}

void check(TermStore &store, Explainer by, const std::vector<TermId> &premises, const std::vector<TermId> &literals,
           TermId y, const Assignment &m, ExplainStats &stats) {
  ++stats.checked;
  InterpolantCheck chk = check_interpolant(store, premises, literals, y, m);
  if (chk.ok())
    return;
  std::ostringstream os;
  os << explainer_name(by) << " explainer produced an invalid clause (" << chk.describe() << "):";
  for (TermId p : premises)
    os << "\n  premise " << store.to_string(p);
  for (TermId l : literals)
    os << "\n  literal " << store.to_string(l);
  throw InvalidLearnedClause(os.str());
}

void check_rewrites(TermStore &store, Normalizer &nz, const std::vector<TermId> &core, TermId y) {
  for (TermId c : core) {
    RewriteTrace tr = nz.trace(c, y);
    if (!check_equiv(store, tr))
      throw InvalidLearnedClause("normalization changed the meaning of " + store.to_string(c) + " into " +
                                 store.to_string(tr.result));
  }
}

} // namespace

Explanation explain_conflict(TermStore &store, Normalizer &nz, const std::vector<TermId> &core, TermId y,
                             const Assignment &m, const ExplainConfig &cfg, ExplainStats &stats) {
  if (cfg.use_eq && applies_eq(store, core, y)) {
    try {
      EqExplanation ex = explain_eq(store, core, y, m);
      if (cfg.debug_check)
        check(store, Explainer::Eq, ex.premises, ex.literals, y, m, stats);
      ++stats.eq;
      return {Explainer::Eq, assemble(store, ex.premises, ex.literals)};
    } catch (const ExplainerUnavailable &) {
      ++stats.fallbacks;
    }
  }
  if (cfg.use_arith) {
    std::vector<TermId> normalized;
    for (TermId c : core)
      normalized.push_back(nz.normalize(c, y));
    if (applies_arith(store, normalized, y)) {
      if (cfg.debug_check)
        check_rewrites(store, nz, core, y);
      try {
        ArithExplanation ex = explain_arith(store, nz, core, y, m);
        if (cfg.debug_check)
          check(store, Explainer::Arith, ex.premises, ex.literals, y, m, stats);
        ++stats.arith;
        return {Explainer::Arith, assemble(store, ex.premises, ex.literals)};
      } catch (const ExplainerUnavailable &) {
        ++stats.fallbacks;
      }
    }
  }
  bool closed = std::all_of(core.begin(), core.end(), [&](TermId c) {
    const std::vector<TermId> &fv = store.free_vars(c);
    return fv.size() == 1 && fv[0] == y;
  });
  if (closed) {
    if (cfg.debug_check)
      check(store, Explainer::Closed, core, {}, y, m, stats);
    ++stats.closed;
    return {Explainer::Closed, assemble(store, core, {})};
  }
  std::vector<TermId> lits = explain_bb(store, core, y, m, cfg.bb, &stats.bb);
  if (cfg.debug_check)
    check(store, Explainer::Bitblast, core, lits, y, m, stats);
  ++stats.bitblast;
  return {Explainer::Bitblast, assemble(store, core, lits)};
}

} // namespace mcbv
