#include "mcbv/solver.hpp"

#include <algorithm>
#include <stdexcept>

namespace mcbv {

std::optional<SolverConfig> variant_config(const std::string &name) {
  SolverConfig c;
  if (name == "all")
    return c;
  if (name == "all-prop") {
    c.propagation = false;
    return c;
  }
  if (name == "bb") {
    c.use_eq = c.use_arith = false;
    return c;
  }
  if (name == "bb+eq") {
    c.use_arith = false;
    return c;
  }
  if (name == "bb+arith") {
    c.use_eq = false;
    return c;
  }
  return std::nullopt;
}

const char *verdict_name(Verdict v) {
  switch (v) {
  case Verdict::Sat: return "sat";
  case Verdict::Unsat: return "unsat";
  case Verdict::Unknown: return "unknown";
  }
  return "?";
}

namespace {

// 1, 1, 2, 1, 1, 2, 4, ...
std::uint64_t luby(std::uint64_t i) {
  std::uint64_t size = 1, seq = 0;
  while (size < i + 1) {
    ++seq;
    size = 2 * size + 1;
  }
  while (size - 1 != i) {
    size = (size - 1) >> 1;
    --seq;
    i %= size;
  }
  return std::uint64_t{1} << seq;
}

} // namespace

McSat::McSat(TermStore &store, SolverConfig cfg)
    : s_(store), cfg_(cfg), nz_(store), dm_(store, bdds_, cfg.bdd_budget), rng_(cfg.seed) {}

int McSat::atom_id(TermId atom) {
  auto it = atom_ids_.find(atom);
  if (it != atom_ids_.end())
    return it->second;
  int a = static_cast<int>(atoms_.size());
  AtomInfo info;
  info.atom = atom;
  info.theory = is_atom_kind(s_.kind(atom));
  if (info.theory) {
    for (TermId v : s_.free_vars(atom)) {
      int vi = var_id(v);
      info.vars.push_back(vi);
      vars_[vi].atoms.push_back(a);
      if (!vars_[vi].assigned)
        ++info.unassigned;
    }
    if (info.unassigned == 0)
      info.eval = *evaluate_bool(s_, atom, m_) ? 1 : 0;
  }
  atoms_.push_back(std::move(info));
  atom_ids_.emplace(atom, a);
  return a;
}

McSat::Ref McSat::ref_of(TermId lit) {
  if (s_.kind(lit) == Kind::Not)
    return {atom_id(s_.arg(lit, 0)), false};
  return {atom_id(lit), true};
}

int McSat::atom_value(int a) const {
  const AtomInfo &info = atoms_[a];
  if (info.value != kUndef)
    return info.value;
  if (info.theory && info.unassigned == 0)
    return info.eval;
  return kUndef;
}

int McSat::lit_value(Ref r) const {
  int v = atom_value(r.atom);
  if (v == kUndef)
    return kUndef;
  return r.positive ? v : 1 - v;
}

McSat::Why McSat::why(int a) const {
  const AtomInfo &info = atoms_[a];
  Why w{-1, -1, kUndef};
  bool have = false;
  if (info.theory && info.unassigned == 0) {
    w = {0, -1, kEvaluated};
    for (int v : info.vars) {
      if (vars_[v].pos > w.pos) {
        w.pos = vars_[v].pos;
        w.level = vars_[v].level;
      }
    }
    have = true;
  }
  if (info.value != kUndef && (!have || info.pos < w.pos))
    w = {info.level, info.pos, info.reason};
  return w;
}

int McSat::add_clause(std::vector<TermId> lits, bool learnt) {
  std::vector<TermId> uniq;
  for (TermId l : lits) {
    if (std::find(uniq.begin(), uniq.end(), l) != uniq.end())
      continue;
    if (std::find(uniq.begin(), uniq.end(), s_.mk_not(l)) != uniq.end())
      return -1;
    uniq.push_back(l);
  }
  int ci = static_cast<int>(clauses_.size());
  Clause c;
  c.lits = std::move(uniq);
  c.learnt = learnt;
  for (TermId l : c.lits) {
    Ref r = ref_of(l);
    c.refs.push_back(r);
    atoms_[r.atom].clauses.push_back(ci);
  }
  if (learnt) {
    c.activity = clause_inc_;
    ++live_learned_;
  }
  clauses_.push_back(std::move(c));
  return ci;
}

TermId McSat::encode(TermId t) {
  Kind k = s_.kind(t);
  if (k == Kind::Not)
    return s_.mk_not(encode(s_.arg(t, 0)));
  if (k != Kind::And && k != Kind::Or)
    return t;
  auto it = encoded_.find(t);
  if (it != encoded_.end())
    return it->second;
  std::vector<TermId> kids;
  for (TermId a : s_.args(t))
    kids.push_back(encode(a));
  TermId g = k == Kind::And ? s_.mk_and(kids) : s_.mk_or(kids);
  // g <-> op(kids), with g itself as the auxiliary atom.
  bool conj = k == Kind::And;
  std::vector<TermId> big{conj ? g : s_.mk_not(g)};
  for (TermId c : kids) {
    add_clause({conj ? s_.mk_not(g) : g, conj ? c : s_.mk_not(c)}, false);
    big.push_back(conj ? s_.mk_not(c) : c);
  }
  add_clause(big, false);
  encoded_.emplace(t, g);
  return g;
}

void McSat::assert_top(TermId t, bool positive) {
  Kind k = s_.kind(t);
  if (k == Kind::Not)
    return assert_top(s_.arg(t, 0), !positive);
  if ((k == Kind::And && positive) || (k == Kind::Or && !positive)) {
    for (TermId a : s_.args(t))
      assert_top(a, positive);
    return;
  }
  if (k == Kind::Or || k == Kind::And) {
    std::vector<TermId> lits;
    for (TermId a : s_.args(t)) {
      TermId e = encode(a);
      lits.push_back(positive ? e : s_.mk_not(e));
    }
    add_clause(lits, false);
    return;
  }
  TermId e = encode(t);
  add_clause({positive ? e : s_.mk_not(e)}, false);
}

McSat::Outcome McSat::check_clause(int ci, std::vector<TermId> &conflict) {
  Clause &c = clauses_[ci];
  if (c.removed)
    return Outcome::Ok;
  int undef = -1, n_undef = 0;
  for (std::size_t i = 0; i < c.refs.size(); ++i) {
    int v = lit_value(c.refs[i]);
    if (v == 1)
      return Outcome::Ok;
    if (v == kUndef) {
      ++n_undef;
      undef = static_cast<int>(i);
    }
  }
  if (n_undef == 0) {
    conflict = c.lits;
    bump(ci);
    return Outcome::Conflict;
  }
  if (n_undef == 1) {
    Ref r = c.refs[undef];
    assign_atom(r.atom, r.positive, ci);
    ++stats_.bool_propagations;
  }
  return Outcome::Ok;
}

void McSat::new_level() {
  level_start_.push_back(trail_.size());
  dm_.push_level();
}

void McSat::assign_atom(int a, bool value, int reason) {
  AtomInfo &info = atoms_[a];
  info.value = value ? 1 : 0;
  info.level = level();
  info.pos = static_cast<int>(trail_.size());
  info.reason = reason;
  trail_.push_back({false, a});
  bool_queue_.push_back(a);
  if (info.theory && info.unassigned == 1)
    theory_queue_.push_back(a);
}

void McSat::assign_var(int v, const BvValue &value) {
  VarInfo &vi = vars_[v];
  vi.assigned = true;
  vi.level = level();
  vi.pos = static_cast<int>(trail_.size());
  m_.set(s_, vi.var, value);
  trail_.push_back({true, v});
  for (int a : vi.atoms) {
    AtomInfo &info = atoms_[a];
    --info.unassigned;
    if (info.unassigned == 0) {
      info.eval = *evaluate_bool(s_, info.atom, m_) ? 1 : 0;
      if (info.value == kUndef)
        bool_queue_.push_back(a);
      else if (info.value != info.eval)
        throw std::logic_error("assigned value violates an asserted constraint: " + s_.to_string(info.atom));
    } else if (info.unassigned == 1 && info.value != kUndef) {
      theory_queue_.push_back(a);
    }
  }
}

void McSat::backtrack(int lvl) {
  if (lvl >= level())
    return;
  std::size_t keep = level_start_[lvl];
  while (trail_.size() > keep) {
    Entry e = trail_.back();
    trail_.pop_back();
    if (e.is_var) {
      VarInfo &vi = vars_[e.id];
      vi.hint = *m_.get(s_, vi.var);
      m_.unset(s_, vi.var);
      vi.assigned = false;
      vi.level = vi.pos = -1;
      for (int a : vi.atoms) {
        ++atoms_[a].unassigned;
        atoms_[a].eval = kUndef;
      }
    } else {
      AtomInfo &info = atoms_[e.id];
      info.value = kUndef;
      info.level = info.pos = -1;
      info.reason = kDecision;
    }
  }
  level_start_.resize(lvl);
  dm_.backtrack(static_cast<unsigned>(lvl));
  bool_queue_.clear();
  theory_queue_.clear();
  value_queue_.clear();
}

bool McSat::should_stop() {
  if (cancel_.load()) {
    stop_reason_ = "cancelled";
    return true;
  }
  if (has_deadline_ && std::chrono::steady_clock::now() >= deadline_) {
    stop_reason_ = "timeout";
    return true;
  }
  return false;
}

McSat::Outcome McSat::theory_conflict(int v, std::vector<TermId> &conflict) {
  ++stats_.theory_conflicts;
  ConflictCore core = dm_.conflict_core(vars_[v].var, m_);
  ExplainConfig ec;
  ec.use_eq = cfg_.use_eq;
  ec.use_arith = cfg_.use_arith;
  ec.debug_check = cfg_.debug_check;
  ec.bb.dimacs = cfg_.dimacs;
  Explanation ex = explain_conflict(s_, nz_, core.constraints, core.var, m_, ec, stats_.explain);
  conflict = std::move(ex.clause);
  return Outcome::Conflict;
}

McSat::Outcome McSat::propagate(std::vector<TermId> &conflict) {
  for (;;) {
    if (should_stop())
      return Outcome::Stop;
    while (!bool_queue_.empty()) {
      int a = bool_queue_.back();
      bool_queue_.pop_back();
      // Copy: check_clause may append to the occurrence list via ref_of.
      std::vector<int> occ = atoms_[a].clauses;
      for (int ci : occ)
        if (check_clause(ci, conflict) == Outcome::Conflict)
          return Outcome::Conflict;
    }
    while (!theory_queue_.empty()) {
      int a = theory_queue_.back();
      theory_queue_.pop_back();
      const AtomInfo &info = atoms_[a];
      if (info.value == kUndef || info.unassigned != 1)
        continue;
      int y = -1;
      for (int v : info.vars)
        if (!vars_[v].assigned)
          y = v;
      TermId lit = info.value ? info.atom : s_.mk_not(info.atom);
      UpdateResult r = dm_.assert_unit(lit, vars_[y].var, m_);
      if (r.kind == UpdateKind::NowEmpty)
        return theory_conflict(y, conflict);
      if (r.kind == UpdateKind::NowSingleton && cfg_.propagation)
        value_queue_.push_back(y);
    }
    bool progressed = false;
    while (!value_queue_.empty() && !progressed) {
      int y = value_queue_.front();
      value_queue_.erase(value_queue_.begin());
      if (vars_[y].assigned)
        continue;
      StatusResult st = dm_.status(vars_[y].var);
      if (st.status == SetStatus::Empty)
        return theory_conflict(y, conflict);
      if (st.status != SetStatus::Singleton)
        continue;
      // Above level 0 the value gets a level of its own, so analysis can
      // treat it exactly like a decision.
      if (level() > 0)
        new_level();
      assign_var(y, st.value);
      ++stats_.propagations;
      progressed = true;
    }
    if (!progressed && bool_queue_.empty() && theory_queue_.empty())
      return Outcome::Ok;
  }
}

void McSat::bump(int ci) {
  Clause &c = clauses_[ci];
  if (!c.learnt)
    return;
  c.activity += clause_inc_;
  if (c.activity > 1e100) {
    for (Clause &d : clauses_)
      d.activity *= 1e-100;
    clause_inc_ *= 1e-100;
  }
}

bool McSat::analyze(std::vector<TermId> conflict) {
  ++stats_.conflicts;
  for (;;) {
    if (conflict.empty())
      return false;
    int top_level = 0, top_pos = -2, top = -1, at_top = 0, second = 0;
    std::vector<Why> ws;
    for (std::size_t i = 0; i < conflict.size(); ++i) {
      Ref r = ref_of(conflict[i]);
      if (cfg_.debug_check && lit_value(r) != 0)
        throw InvalidLearnedClause("conflict clause literal is not false: " + s_.to_string(conflict[i]));
      ws.push_back(why(r.atom));
      top_level = std::max(top_level, ws.back().level);
    }
    for (std::size_t i = 0; i < ws.size(); ++i) {
      if (ws[i].level == top_level) {
        ++at_top;
        if (ws[i].pos > top_pos) {
          top_pos = ws[i].pos;
          top = static_cast<int>(i);
        }
      } else {
        second = std::max(second, ws[i].level);
      }
    }
    if (top_level == 0)
      return false;
    if (at_top > 1 && ws[top].reason >= 0) {
      // Resolve with the reason of the latest Boolean propagation.
      int a = ref_of(conflict[top]).atom;
      int ci = ws[top].reason;
      bump(ci);
      std::vector<TermId> next;
      for (TermId l : conflict)
        if (ref_of(l).atom != a && std::find(next.begin(), next.end(), l) == next.end())
          next.push_back(l);
      for (TermId l : clauses_[ci].lits)
        if (ref_of(l).atom != a && std::find(next.begin(), next.end(), l) == next.end())
          next.push_back(l);
      conflict = std::move(next);
      continue;
    }

    std::vector<TermId> learned = conflict;
    ++stats_.learned;
    clause_inc_ /= 0.999;
    if (at_top == 1) {
      backtrack(second);
      int ci = add_clause(learned, true);
      Ref r = ref_of(learned[top]);
      assign_atom(r.atom, r.positive, ci);
      if (cfg_.debug_check)
        check_progress(learned);
      return true;
    }
    // Several literals became false through the model at the top level; no
    // Boolean reason to resolve with. Drop the level and split on one of
    // them.
    backtrack(top_level - 1);
    add_clause(learned, true);
    int best = -1, best_free = 0;
    for (std::size_t i = 0; i < learned.size(); ++i) {
      Ref r = ref_of(learned[i]);
      if (lit_value(r) != kUndef)
        continue;
      int free_vars = atoms_[r.atom].unassigned;
      if (best < 0 || free_vars < best_free) {
        best = static_cast<int>(i);
        best_free = free_vars;
      }
    }
    Ref r = ref_of(learned[best]);
    ++stats_.semantic_splits;
    new_level();
    assign_atom(r.atom, r.positive, kDecision);
    if (cfg_.debug_check)
      check_progress(learned);
    return true;
  }
}

void McSat::check_progress(const std::vector<TermId> &learned) {
  // The same clause learned into the same trail would repeat the search
  // from here on.
  std::vector<TermId> key = learned;
  std::sort(key.begin(), key.end());
  std::size_t h = key.size();
  auto mix = [&h](std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2); };
  for (TermId l : key)
    mix(l.index);
  for (const Entry &e : trail_) {
    mix(e.is_var);
    mix(static_cast<std::size_t>(e.id));
    if (e.is_var)
      mix(std::hash<std::string>{}(m_.get(s_, vars_[e.id].var)->to_binary()));
    else
      mix(static_cast<std::size_t>(atoms_[e.id].value));
  }
  if (!progress_.insert(h).second)
    throw InvalidLearnedClause("no progress: clause learned again into the same trail");
}

bool McSat::decide() {
  for (const Clause &c : clauses_) {
    if (c.removed)
      continue;
    int pick = -1;
    bool sat = false;
    for (std::size_t i = 0; i < c.refs.size() && !sat; ++i) {
      int v = lit_value(c.refs[i]);
      if (v == 1)
        sat = true;
      else if (v == kUndef && pick < 0)
        pick = static_cast<int>(i);
    }
    if (!sat && pick >= 0) {
      ++stats_.bool_decisions;
      new_level();
      assign_atom(c.refs[pick].atom, c.refs[pick].positive, kDecision);
      return true;
    }
  }
  std::vector<int> best;
  std::size_t best_nodes = 0;
  for (std::size_t v = 0; v < vars_.size(); ++v) {
    if (vars_[v].assigned)
      continue;
    std::size_t n = dm_.node_count(vars_[v].var);
    if (best.empty() || n < best_nodes) {
      best.assign(1, static_cast<int>(v));
      best_nodes = n;
    } else if (n == best_nodes) {
      best.push_back(static_cast<int>(v));
    }
  }
  if (best.empty())
    return false;
  // vars_ is in declaration order, so best.front() is the lowest index.
  int v = best.front();
  if (cfg_.seed != 0 && best.size() > 1)
    v = best[std::uniform_int_distribution<std::size_t>(0, best.size() - 1)(rng_)];
  ++stats_.decisions;
  new_level();
  assign_var(v, dm_.pick(vars_[v].var, vars_[v].hint));
  return true;
}

void McSat::reduce_db() {
  if (live_learned_ <= cfg_.max_learned)
    return;
  std::vector<bool> locked(clauses_.size(), false);
  for (const Entry &e : trail_)
    if (!e.is_var && atoms_[e.id].reason >= 0)
      locked[atoms_[e.id].reason] = true;
  std::vector<int> cand;
  for (std::size_t i = 0; i < clauses_.size(); ++i)
    if (clauses_[i].learnt && !clauses_[i].removed && !locked[i])
      cand.push_back(static_cast<int>(i));
  std::sort(cand.begin(), cand.end(),
            [&](int a, int b) { return clauses_[a].activity < clauses_[b].activity; });
  std::size_t drop = std::min(cand.size(), live_learned_ - cfg_.max_learned / 2);
  for (std::size_t i = 0; i < drop; ++i) {
    Clause &c = clauses_[cand[i]];
    c.removed = true;
    --live_learned_;
  }
}

SolveResult McSat::finish(Verdict v, const std::vector<TermId> &assertions) {
  SolveResult r;
  r.verdict = v;
  if (v == Verdict::Sat) {
    r.model = m_;
    for (TermId a : assertions) {
      std::optional<bool> val = evaluate_bool(s_, a, r.model);
      if (!val || !*val)
        throw std::logic_error("model does not satisfy assertion " + s_.to_string(a));
    }
  } else if (v == Verdict::Unknown) {
    r.reason = stop_reason_;
  }
  return r;
}

SolveResult McSat::solve(const std::vector<TermId> &assertions) {
  if (cfg_.timeout > 0) {
    has_deadline_ = true;
    deadline_ = std::chrono::steady_clock::now() +
                std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                    std::chrono::duration<double>(cfg_.timeout));
  }
  for (TermId v : s_.vars()) {
    var_ids_.emplace(v, static_cast<int>(vars_.size()));
    VarInfo vi;
    vi.var = v;
    vars_.push_back(std::move(vi));
  }
  for (TermId a : assertions)
    assert_top(a, true);

  try {
    std::vector<TermId> conflict;
    bool conflicted = false;
    for (std::size_t ci = 0; ci < clauses_.size() && !conflicted; ++ci)
      conflicted = check_clause(static_cast<int>(ci), conflict) == Outcome::Conflict;
    if (conflicted && !analyze(conflict))
      return finish(Verdict::Unsat, assertions);

    std::uint64_t restart_no = 0;
    std::uint64_t until_restart = luby(restart_no) * 256;
    for (;;) {
      Outcome o = propagate(conflict);
      if (o == Outcome::Stop)
        return finish(Verdict::Unknown, assertions);
      if (o == Outcome::Conflict) {
        if (!analyze(std::move(conflict)))
          return finish(Verdict::Unsat, assertions);
        conflict.clear();
        if (cfg_.conflict_budget >= 0 && stats_.conflicts > static_cast<std::uint64_t>(cfg_.conflict_budget)) {
          stop_reason_ = "conflict budget";
          return finish(Verdict::Unknown, assertions);
        }
        if (--until_restart == 0) {
          ++stats_.restarts;
          until_restart = luby(++restart_no) * 256;
          backtrack(0);
          reduce_db();
        }
        continue;
      }
      if (!decide())
        return finish(Verdict::Sat, assertions);
    }
  } catch (const BddBudgetExceeded &e) {
    stop_reason_ = e.what();
    return finish(Verdict::Unknown, assertions);
  }
}

} // namespace mcbv
