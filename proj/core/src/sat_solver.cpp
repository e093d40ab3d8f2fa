#include "mcbv/sat_solver.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace mcbv::sat {

namespace {

const Lit kUndefLit{};

/// Luby sequence value for index x with base y.
double luby(double y, int x) {
  int size = 1, seq = 0;
  while (size < x + 1) {
    ++seq;
    size = 2 * size + 1;
  }
  while (size - 1 != x) {
    size = (size - 1) >> 1;
    --seq;
    x = x % size;
  }
  return std::pow(y, seq);
}

} // namespace

Var Solver::new_var() {
  Var v = num_vars();
  assigns_.push_back(LBool::Undef);
  level_.push_back(0);
  reason_.push_back(kNoReason);
  polarity_.push_back(1);
  seen_.push_back(0);
  activity_.push_back(0.0);
  heap_index_.push_back(-1);
  watches_.emplace_back();
  watches_.emplace_back();
  heap_insert(v);
  return v;
}

bool Solver::add_clause(std::vector<Lit> lits) {
  if (!ok_)
    return false;
  cancel_until(0);
  std::sort(lits.begin(), lits.end());
  std::vector<Lit> out;
  Lit prev = kUndefLit;
  for (Lit l : lits) {
    if (value(l) == LBool::True || l == ~prev)
      return true;
    if (value(l) != LBool::False && l != prev) {
      out.push_back(l);
      prev = l;
    }
  }
  if (out.empty()) {
    ok_ = false;
    return false;
  }
  ++num_original_;
  if (out.size() == 1) {
    units_.push_back(out[0]);
    enqueue(out[0], kNoReason);
    ok_ = propagate() == kNoReason;
    return ok_;
  }
  clauses_.push_back({std::move(out), false, false, 0});
  attach(static_cast<int>(clauses_.size()) - 1);
  return true;
}

void Solver::attach(int cref) {
  const Clause &c = clauses_[cref];
  watches_[(~c.lits[0]).x].push_back({cref, c.lits[1]});
  watches_[(~c.lits[1]).x].push_back({cref, c.lits[0]});
}

void Solver::enqueue(Lit p, int reason) {
  assigns_[p.var()] = p.sign() ? LBool::False : LBool::True;
  level_[p.var()] = decision_level();
  reason_[p.var()] = reason;
  trail_.push_back(p);
}

int Solver::propagate() {
  int confl = kNoReason;
  while (qhead_ < trail_.size()) {
    Lit p = trail_[qhead_++];
    std::vector<Watcher> &ws = watches_[p.x];
    ++stats_.propagations;
    std::size_t i = 0, j = 0;
    while (i < ws.size()) {
      Watcher w = ws[i];
      if (value(w.blocker) == LBool::True) {
        ws[j++] = ws[i++];
        continue;
      }
      Clause &c = clauses_[w.cref];
      if (c.removed) {
        ++i;
        continue;
      }
      Lit false_lit = ~p;
      if (c.lits[0] == false_lit)
        std::swap(c.lits[0], c.lits[1]);
      ++i;
      Lit first = c.lits[0];
      Watcher nw{w.cref, first};
      if (first != w.blocker && value(first) == LBool::True) {
        ws[j++] = nw;
        continue;
      }
      bool found = false;
      for (std::size_t k = 2; k < c.lits.size(); ++k) {
        if (value(c.lits[k]) != LBool::False) {
          std::swap(c.lits[1], c.lits[k]);
          watches_[(~c.lits[1]).x].push_back(nw);
          found = true;
          break;
        }
      }
      if (found)
        continue;
      ws[j++] = nw;
      if (value(first) == LBool::False) {
        confl = w.cref;
        qhead_ = trail_.size();
        while (i < ws.size())
          ws[j++] = ws[i++];
      } else {
        enqueue(first, w.cref);
      }
    }
    ws.resize(j);
  }
  return confl;
}

void Solver::analyze(int confl, std::vector<Lit> &learnt, int &bt_level) {
  int path = 0;
  Lit p = kUndefLit;
  learnt.assign(1, kUndefLit);
  int index = static_cast<int>(trail_.size()) - 1;
  do {
    Clause &c = clauses_[confl];
    if (c.learnt)
      bump_clause(c);
    for (std::size_t j = (p == kUndefLit ? 0 : 1); j < c.lits.size(); ++j) {
      Lit q = c.lits[j];
      if (!seen_[q.var()] && level_[q.var()] > 0) {
        bump_var(q.var());
        seen_[q.var()] = 1;
        if (level_[q.var()] >= decision_level())
          ++path;
        else
          learnt.push_back(q);
      }
    }
    while (!seen_[trail_[index--].var()]) {
    }
    p = trail_[index + 1];
    confl = reason_[p.var()];
    seen_[p.var()] = 0;
    --path;
  } while (path > 0);
  learnt[0] = ~p;

  // Drop literals implied by the rest of the clause through one reason step.
  std::vector<Lit> original = learnt;
  std::size_t keep = 1;
  for (std::size_t i = 1; i < learnt.size(); ++i) {
    int r = reason_[learnt[i].var()];
    bool redundant = r != kNoReason;
    if (redundant) {
      const Clause &c = clauses_[r];
      for (std::size_t k = 1; k < c.lits.size(); ++k) {
        Var v = c.lits[k].var();
        if (!seen_[v] && level_[v] > 0) {
          redundant = false;
          break;
        }
      }
    }
    if (!redundant)
      learnt[keep++] = learnt[i];
  }
  learnt.resize(keep);
  for (Lit l : original)
    seen_[l.var()] = 0;

  bt_level = 0;
  if (learnt.size() > 1) {
    std::size_t max_i = 1;
    for (std::size_t i = 2; i < learnt.size(); ++i)
      if (level_[learnt[i].var()] > level_[learnt[max_i].var()])
        max_i = i;
    std::swap(learnt[1], learnt[max_i]);
    bt_level = level_[learnt[1].var()];
  }
}

void Solver::analyze_final(Lit p) {
  core_.clear();
  core_.push_back(p);
  if (decision_level() == 0)
    return;
  seen_[p.var()] = 1;
  for (int i = static_cast<int>(trail_.size()) - 1; i >= trail_lim_[0]; --i) {
    Var x = trail_[i].var();
    if (!seen_[x])
      continue;
    if (reason_[x] == kNoReason) {
      // Decisions below the assumption levels are assumptions.
      core_.push_back(trail_[i]);
    } else {
      const Clause &c = clauses_[reason_[x]];
      for (std::size_t k = 1; k < c.lits.size(); ++k)
        if (level_[c.lits[k].var()] > 0)
          seen_[c.lits[k].var()] = 1;
    }
    seen_[x] = 0;
  }
  seen_[p.var()] = 0;
  std::sort(core_.begin(), core_.end());
  core_.erase(std::unique(core_.begin(), core_.end()), core_.end());
}

void Solver::cancel_until(int level) {
  if (decision_level() <= level)
    return;
  for (int i = static_cast<int>(trail_.size()) - 1; i >= trail_lim_[level]; --i) {
    Var x = trail_[i].var();
    assigns_[x] = LBool::Undef;
    reason_[x] = kNoReason;
    polarity_[x] = trail_[i].sign();
    heap_insert(x);
  }
  qhead_ = trail_lim_[level];
  trail_.resize(trail_lim_[level]);
  trail_lim_.resize(level);
}

Lit Solver::pick_branch() {
  while (!heap_.empty()) {
    Var v = heap_pop();
    if (assigns_[v] == LBool::Undef)
      return Lit(v, polarity_[v]);
  }
  return kUndefLit;
}

void Solver::bump_var(Var v) {
  if ((activity_[v] += var_inc_) > 1e100) {
    for (double &a : activity_)
      a *= 1e-100;
    var_inc_ *= 1e-100;
  }
  if (heap_index_[v] >= 0)
    heap_up(heap_index_[v]);
}

void Solver::bump_clause(Clause &c) {
  if ((c.activity += clause_inc_) > 1e20) {
    for (int cr : learnts_)
      clauses_[cr].activity *= 1e-20;
    clause_inc_ *= 1e-20;
  }
}

void Solver::reduce_db() {
  std::sort(learnts_.begin(), learnts_.end(),
            [&](int a, int b) { return clauses_[a].activity < clauses_[b].activity; });
  std::size_t half = learnts_.size() / 2;
  std::vector<int> kept;
  for (std::size_t i = 0; i < learnts_.size(); ++i) {
    Clause &c = clauses_[learnts_[i]];
    bool locked = reason_[c.lits[0].var()] == learnts_[i] && value(c.lits[0]) == LBool::True;
    if (i < half && !locked && c.lits.size() > 2)
      c.removed = true;
    else
      kept.push_back(learnts_[i]);
  }
  learnts_ = std::move(kept);
}

Result Solver::search(std::int64_t nof_conflicts, const std::vector<Lit> &assumptions) {
  std::int64_t local_conflicts = 0;
  std::vector<Lit> learnt;
  for (;;) {
    int confl = propagate();
    if (confl != kNoReason) {
      ++stats_.conflicts;
      ++local_conflicts;
      ++budget_used_;
      if (decision_level() == 0) {
        ok_ = false;
        return Result::Unsat;
      }
      int bt;
      analyze(confl, learnt, bt);
      cancel_until(bt);
      if (learnt.size() == 1) {
        enqueue(learnt[0], kNoReason);
      } else {
        clauses_.push_back({learnt, true, false, 0});
        int cref = static_cast<int>(clauses_.size()) - 1;
        attach(cref);
        bump_clause(clauses_[cref]);
        learnts_.push_back(cref);
        enqueue(learnt[0], cref);
      }
      var_inc_ /= 0.95;
      clause_inc_ /= 0.999;
      continue;
    }
    if ((nof_conflicts >= 0 && local_conflicts >= nof_conflicts) ||
        (budget_ >= 0 && budget_used_ >= budget_)) {
      cancel_until(0);
      return Result::Unknown;
    }
    if (static_cast<double>(learnts_.size()) >= max_learnts_)
      reduce_db();
    Lit next = kUndefLit;
    while (decision_level() < static_cast<int>(assumptions.size())) {
      Lit p = assumptions[decision_level()];
      if (value(p) == LBool::True) {
        trail_lim_.push_back(static_cast<int>(trail_.size()));
      } else if (value(p) == LBool::False) {
        analyze_final(p);
        return Result::Unsat;
      } else {
        next = p;
        break;
      }
    }
    if (next == kUndefLit) {
      ++stats_.decisions;
      next = pick_branch();
      if (next == kUndefLit) {
        model_ = assigns_;
        return Result::Sat;
      }
    }
    trail_lim_.push_back(static_cast<int>(trail_.size()));
    enqueue(next, kNoReason);
  }
}

Result Solver::solve(const std::vector<Lit> &assumptions_in, std::int64_t conflict_budget) {
  // Copy first: callers may pass core() back in.
  const std::vector<Lit> assumptions = assumptions_in;
  core_.clear();
  model_.clear();
  cancel_until(0);
  if (!ok_)
    return Result::Unsat;
  budget_ = conflict_budget;
  budget_used_ = 0;
  max_learnts_ = std::max<double>(static_cast<double>(num_original_) / 3.0, 2000.0);
  Result status = Result::Unknown;
  for (int restarts = 0; status == Result::Unknown; ++restarts) {
    status = search(static_cast<std::int64_t>(luby(2, restarts) * 100), assumptions);
    if (status == Result::Unknown && budget_ >= 0 && budget_used_ >= budget_)
      break;
    if (status == Result::Unknown)
      ++stats_.restarts;
    max_learnts_ *= 1.05;
  }
  cancel_until(0);
  return status;
}

void Solver::write_dimacs(std::ostream &out) const {
  std::size_t n = units_.size();
  for (const Clause &c : clauses_)
    if (!c.learnt && !c.removed)
      ++n;
  out << "p cnf " << num_vars() << ' ' << n << '\n';
  auto lit = [](Lit l) { return (l.var() + 1) * (l.sign() ? -1 : 1); };
  for (Lit u : units_)
    out << lit(u) << " 0\n";
  for (const Clause &c : clauses_) {
    if (c.learnt || c.removed)
      continue;
    for (Lit l : c.lits)
      out << lit(l) << ' ';
    out << "0\n";
  }
}

void Solver::heap_insert(Var v) {
  if (heap_index_[v] >= 0)
    return;
  heap_index_[v] = static_cast<int>(heap_.size());
  heap_.push_back(v);
  heap_up(heap_index_[v]);
}

void Solver::heap_up(int i) {
  Var v = heap_[i];
  while (i > 0) {
    int parent = (i - 1) >> 1;
    if (!heap_less(v, heap_[parent]))
      break;
    heap_[i] = heap_[parent];
    heap_index_[heap_[i]] = i;
    i = parent;
  }
  heap_[i] = v;
  heap_index_[v] = i;
}

void Solver::heap_down(int i) {
  Var v = heap_[i];
  int n = static_cast<int>(heap_.size());
  for (;;) {
    int child = 2 * i + 1;
    if (child >= n)
      break;
    if (child + 1 < n && heap_less(heap_[child + 1], heap_[child]))
      ++child;
    if (!heap_less(heap_[child], v))
      break;
    heap_[i] = heap_[child];
    heap_index_[heap_[i]] = i;
    i = child;
  }
  heap_[i] = v;
  heap_index_[v] = i;
}

Var Solver::heap_pop() {
  Var top = heap_[0];
  heap_index_[top] = -1;
  Var last = heap_.back();
  heap_.pop_back();
  if (!heap_.empty()) {
    heap_[0] = last;
    heap_index_[last] = 0;
    heap_down(0);
  }
  return top;
}

} // namespace mcbv::sat
