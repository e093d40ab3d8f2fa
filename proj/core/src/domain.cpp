#include "mcbv/domain.hpp"

namespace mcbv {

namespace {

struct BudgetScope {
  BddManager &mgr;
  BudgetScope(BddManager &m, std::size_t n) : mgr(m) { mgr.set_budget(n); }
  ~BudgetScope() { mgr.set_budget(0); }
};

} // namespace

DomainManager::DomainManager(const TermStore &store, BddManager &mgr, std::size_t node_budget)
    : store_(store), mgr_(mgr), compiler_(mgr), budget_(node_budget) {}

DomainManager::Domain &DomainManager::domain(TermId y) {
  std::size_t i = store_.var_index(y);
  if (domains_.size() <= i)
    domains_.resize(i + 1);
  return domains_[i];
}

BddRef DomainManager::root(TermId y) const {
  std::size_t i = store_.var_index(y);
  return i < domains_.size() ? domains_[i].root : BddManager::True;
}

const std::vector<TermId> &DomainManager::justifications(TermId y) const {
  static const std::vector<TermId> none;
  std::size_t i = store_.var_index(y);
  return i < domains_.size() ? domains_[i].justifications : none;
}

BddRef DomainManager::compile(TermId c, TermId y, const Assignment &m) {
  BudgetScope scope(mgr_, budget_);
  return compiler_.compile(store_, c, y, m);
}

UpdateResult DomainManager::assert_unit(TermId c, TermId y, const Assignment &m) {
  BddRef set = compile(c, y, m);
  Domain &d = domain(y);
  BddRef next;
  {
    BudgetScope scope(mgr_, budget_);
    next = mgr_.bdd_and(d.root, set);
  }
  undo_.push_back({level_, store_.var_index(y), d.root, d.justifications.size()});
  d.root = next;
  d.justifications.push_back(c);
  ++stats_.units_asserted;
  StatusResult st = mgr_.status(next, store_.width(y));
  switch (st.status) {
  case SetStatus::Empty:
    return {UpdateKind::NowEmpty, BvValue()};
  case SetStatus::Singleton:
    return {UpdateKind::NowSingleton, st.value};
  case SetStatus::Many:
    break;
  }
  return {UpdateKind::StillMany, BvValue()};
}

void DomainManager::backtrack(unsigned level) {
  while (!undo_.empty() && undo_.back().level > level) {
    const Undo &u = undo_.back();
    Domain &d = domains_[u.var];
    d.root = u.root;
    d.justifications.resize(u.just_size);
    undo_.pop_back();
  }
  level_ = level;
}

StatusResult DomainManager::status(TermId y) { return mgr_.status(root(y), store_.width(y)); }

std::size_t DomainManager::node_count(TermId y) { return mgr_.node_count(root(y)); }

BvValue DomainManager::pick(TermId y, const std::optional<BvValue> &hint) const {
  return mgr_.pick(root(y), store_.width(y), hint);
}

bool DomainManager::consistent(TermId y, const std::vector<TermId> &set, const Assignment &m) {
  ++stats_.consistency_checks;
  BddRef acc = BddManager::True;
  for (TermId c : set) {
    BddRef b = compile(c, y, m);
    BudgetScope scope(mgr_, budget_);
    acc = mgr_.bdd_and(acc, b);
    if (acc == BddManager::False)
      return false;
  }
  return true;
}

std::vector<TermId> DomainManager::qx(TermId y, BddRef base, bool delta_nonempty,
                                      const std::vector<TermId> &c, const Assignment &m) {
  ++stats_.consistency_checks;
  if (delta_nonempty && base == BddManager::False)
    return {};
  if (c.size() == 1)
    return c;
  std::size_t half = c.size() / 2;
  std::vector<TermId> c1(c.begin(), c.begin() + half), c2(c.begin() + half, c.end());
  auto conj = [&](BddRef acc, const std::vector<TermId> &set) {
    for (TermId t : set) {
      BddRef b = compile(t, y, m);
      BudgetScope scope(mgr_, budget_);
      acc = mgr_.bdd_and(acc, b);
    }
    return acc;
  };
  std::vector<TermId> d2 = qx(y, conj(base, c1), !c1.empty(), c2, m);
  std::vector<TermId> d1 = qx(y, conj(base, d2), !d2.empty(), c1, m);
  d1.insert(d1.end(), d2.begin(), d2.end());
  return d1;
}

std::vector<TermId> DomainManager::quickxplain(TermId y, const std::vector<TermId> &constraints,
                                               const Assignment &m) {
  if (constraints.empty() || consistent(y, constraints, m))
    throw NotInConflict();
  std::vector<TermId> core = qx(y, BddManager::True, false, constraints, m);
  ++stats_.cores_extracted;
  ++stats_.core_sizes[core.size()];
  return core;
}

ConflictCore DomainManager::conflict_core(TermId y, const Assignment &m) {
  if (root(y) != BddManager::False)
    throw NotInConflict();
  // Most recently asserted first.
  const auto &just = justifications(y);
  std::vector<TermId> ordered(just.rbegin(), just.rend());
  return {y, quickxplain(y, ordered, m)};
}

void DomainManager::maybe_collect() {
  if (mgr_.live_nodes() < gc_threshold_)
    return;
  std::vector<BddRef> roots;
  for (const Domain &d : domains_)
    roots.push_back(d.root);
  for (const Undo &u : undo_)
    roots.push_back(u.root);
  compiler_.clear_cache();
  mgr_.collect(roots);
  gc_threshold_ = std::max<std::size_t>(gc_threshold_, 2 * mgr_.live_nodes());
}

} // namespace mcbv
