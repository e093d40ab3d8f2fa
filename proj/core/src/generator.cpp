#include "mcbv/generator.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>
#include <stdexcept>

namespace mcbv {

const char *fragment_name(Fragment f) {
  switch (f) {
  case Fragment::Eq: return "eq";
  case Fragment::Arith: return "arith";
  case Fragment::Mixed: return "mixed";
  }
  return "?";
}

namespace {

struct Var {
  std::string name;
  unsigned width;
};

class Gen {
public:
  Gen(std::uint64_t seed, const GeneratorOptions &opts) : rng_(seed), opts_(opts) {
    unsigned n = 1 + below(opts.max_vars);
    if (n == 1 && opts.max_vars > 1 && coin(2))
      ++n;
    static const char *names[] = {"a", "b", "c", "d", "e", "f"};
    for (unsigned i = 0; i < n; ++i)
      vars_.push_back({i < 6 ? names[i] : "v" + std::to_string(i), 1 + below(opts.max_width)});
  }

  std::string script(Fragment f) {
    std::ostringstream os;
    os << "(set-logic QF_BV)\n";
    for (const Var &v : vars_)
      os << "(declare-const " << v.name << " (_ BitVec " << v.width << "))\n";
    unsigned n = opts_.min_atoms + below(opts_.max_atoms - opts_.min_atoms + 1);
    for (unsigned i = 0; i < n; ++i) {
      std::string a;
      switch (f) {
      case Fragment::Eq: a = eq_atom(); break;
      case Fragment::Arith: a = arith_atom(); break;
      case Fragment::Mixed: a = coin(4) ? mixed_atom() : "(or " + mixed_atom() + " " + mixed_atom() + ")"; break;
      }
      os << "(assert " << a << ")\n";
    }
    os << "(check-sat)\n";
    return os.str();
  }

private:
  unsigned below(unsigned n) { return n == 0 ? 0 : static_cast<unsigned>(rng_() % n); }
  // True with probability 1 - 1/n.
  bool coin(unsigned n) { return below(n) != 0; }

  std::string constant(unsigned w) {
    std::string s = "#b";
    std::uint64_t v = rng_();
    for (unsigned i = w; i-- > 0;)
      s += ((v >> i) & 1) ? '1' : '0';
    return s;
  }
  static std::string extract(const Var &v, unsigned hi, unsigned lo) {
    if (hi + 1 == v.width && lo == 0)
      return v.name;
    return "((_ extract " + std::to_string(hi) + " " + std::to_string(lo) + ") " + v.name + ")";
  }
  unsigned atom_width() {
    if (coin(4))
      return vars_[below(static_cast<unsigned>(vars_.size()))].width;
    return 1 + below(opts_.max_width);
  }

  // Slices and concatenations of variables and constants.
  std::string eq_term(unsigned w, int depth) {
    if (depth > 0 && w >= 2 && below(4) == 0) {
      unsigned hi = 1 + below(w - 1);
      return "(concat " + eq_term(hi, depth - 1) + " " + eq_term(w - hi, depth - 1) + ")";
    }
    std::vector<const Var *> fits;
    for (const Var &v : vars_)
      if (v.width >= w)
        fits.push_back(&v);
    if (fits.empty() || below(5) == 0)
      return constant(w);
    const Var &v = *fits[below(static_cast<unsigned>(fits.size()))];
    unsigned lo = below(v.width - w + 1);
    return extract(v, lo + w - 1, lo);
  }
  std::string eq_atom() {
    unsigned w = atom_width();
    std::string a = "(= " + eq_term(w, 1) + " " + eq_term(w, 1) + ")";
    return below(3) == 0 ? "(not " + a + ")" : a;
  }

  // One use of a variable, resized to width w by lower extraction or by
  // padding with zeros above or below.
  std::string linear_item(const Var &v, unsigned w) {
    std::string t;
    if (v.width == w)
      t = v.name;
    else if (v.width > w)
      t = extract(v, w - 1, 0);
    else if (coin(3))
      t = "((_ zero_extend " + std::to_string(w - v.width) + ") " + v.name + ")";
    else
      t = "(concat " + v.name + " #b" + std::string(w - v.width, '0') + ")";
    return below(4) == 0 ? "(bvneg " + t + ")" : t;
  }
  std::string sum(std::vector<std::string> items, unsigned w) {
    if (items.empty() || (items.size() < 2 && below(3) == 0))
      items.push_back(constant(w));
    if (items.size() == 1)
      return items[0];
    std::string s = "(bvadd";
    for (const std::string &i : items)
      s += " " + i;
    return s + ")";
  }
  std::string arith_atom() {
    unsigned w = atom_width();
    std::vector<unsigned> order(vars_.size());
    for (unsigned i = 0; i < order.size(); ++i)
      order[i] = i;
    std::shuffle(order.begin(), order.end(), rng_);
    unsigned used = 1 + below(static_cast<unsigned>(std::min<std::size_t>(vars_.size(), 3)));
    std::vector<std::string> lhs, rhs;
    for (unsigned i = 0; i < used; ++i)
      (coin(2) ? lhs : rhs).push_back(linear_item(vars_[order[i]], w));
    if (below(5) == 0) {
      // The same term on both sides, offset by different constants.
      std::string t = linear_item(vars_[order[0]], w);
      lhs = {t};
      rhs = {t, constant(w)};
    }
    static const char *preds[] = {"bvule", "bvule", "bvult", "bvult", "=", "=", "bvsle", "bvslt"};
    std::string a = std::string("(") + preds[below(8)] + " " + sum(lhs, w) + " " + sum(rhs, w) + ")";
    return below(5) < 2 ? "(not " + a + ")" : a;
  }

  std::string mixed_term(unsigned w, int depth) {
    if (depth <= 0 || below(4) == 0)
      return eq_term(w, 0);
    switch (below(9)) {
    case 0: return "(bvadd " + mixed_term(w, depth - 1) + " " + mixed_term(w, depth - 1) + ")";
    case 1: return "(bvmul " + mixed_term(w, depth - 1) + " " + mixed_term(w, depth - 1) + ")";
    case 2: return "(bvneg " + mixed_term(w, depth - 1) + ")";
    case 3: return "(bvnot " + mixed_term(w, depth - 1) + ")";
    case 4: return "(bvsub " + mixed_term(w, depth - 1) + " " + mixed_term(w, depth - 1) + ")";
    case 5:
      if (w >= 2) {
        unsigned hi = 1 + below(w - 1);
        return "(concat " + mixed_term(hi, depth - 1) + " " + mixed_term(w - hi, depth - 1) + ")";
      }
      break;
    case 6:
      if (w >= 2) {
        unsigned k = 1 + below(w - 1);
        return "((_ sign_extend " + std::to_string(k) + ") " + mixed_term(w - k, depth - 1) + ")";
      }
      break;
    case 7: {
      unsigned extra = 1 + below(2);
      unsigned lo = below(extra + 1);
      return "((_ extract " + std::to_string(lo + w - 1) + " " + std::to_string(lo) + ") " +
             mixed_term(w + extra, depth - 1) + ")";
    }
    default: break;
    }
    return eq_term(w, 0);
  }
  std::string mixed_atom() {
    unsigned w = atom_width();
    static const char *preds[] = {"=", "bvule", "bvult", "bvsle", "bvslt", "bvuge", "bvsgt"};
    std::string a = std::string("(") + preds[below(7)] + " " + mixed_term(w, 2) + " " + mixed_term(w, 2) + ")";
    return below(3) == 0 ? "(not " + a + ")" : a;
  }

  std::mt19937_64 rng_;
  GeneratorOptions opts_;
  std::vector<Var> vars_;
};

std::string header(std::initializer_list<std::pair<const char *, unsigned>> vars) {
  std::string s = "(set-logic QF_BV)\n";
  for (const auto &[name, w] : vars)
    s += "(declare-const " + std::string(name) + " (_ BitVec " + std::to_string(w) + "))\n";
  return s;
}

} // namespace

std::string random_instance(Fragment f, std::uint64_t seed, const GeneratorOptions &opts) {
  if (opts.max_vars == 0 || opts.max_width == 0 || opts.min_atoms == 0 || opts.max_atoms < opts.min_atoms)
    throw std::invalid_argument("bad generator options");
  return Gen(seed, opts).script(f);
}

std::vector<NamedInstance> worked_examples() {
  std::vector<NamedInstance> out;
  const std::string sat = "(check-sat)\n";
  std::string x123 = "(assert (= x1 #b1100))\n(assert (= x2 #b1101))\n(assert (= x3 #b0000))\n";

  out.push_back({"eq_baseline", header({{"x1", 4}, {"x2", 4}, {"y", 4}}) +
                                    "(assert (= x1 y))\n(assert (= x2 y))\n"
                                    "(assert (= x1 #b1001))\n(assert (= x2 #b0101))\n" +
                                    sat});
  std::string slicing = header({{"x1", 8}, {"y", 6}}) +
                        "(assert (= ((_ extract 3 0) x1) ((_ extract 7 4) x1)))\n"
                        "(assert (= ((_ extract 5 2) y) ((_ extract 3 0) y)))\n"
                        "(assert (not (= ((_ extract 3 0) y) ((_ extract 7 4) x1))))\n";
  out.push_back({"eq_slicing", slicing + sat});
  std::string type1 = header({{"x1", 5}, {"x2", 5}, {"y", 5}}) +
                      "(assert (= ((_ extract 0 0) x1) ((_ extract 0 0) y)))\n"
                      "(assert (= ((_ extract 1 1) x2) ((_ extract 1 1) y)))\n"
                      "(assert (= ((_ extract 2 2) y) ((_ extract 4 4) y)))\n"
                      "(assert (= ((_ extract 3 3) y) ((_ extract 4 4) y)))\n"
                      "(assert (not (= (concat ((_ extract 0 0) y) ((_ extract 2 2) y)) "
                      "(concat ((_ extract 1 1) y) ((_ extract 3 3) y)))))\n";
  out.push_back({"eq_diseq_type1", type1 + sat});
  out.push_back({"eq_diseq_type1_pinned", type1 + "(assert (= x1 #b00000))\n(assert (= x2 #b00000))\n" + sat});
  std::string type2 = header({{"x1", 2}, {"x2", 2}, {"y", 2}}) +
                      "(assert (not (= (concat ((_ extract 0 0) x2) ((_ extract 0 0) y)) "
                      "(concat ((_ extract 1 1) x2) ((_ extract 1 1) y)))))\n"
                      "(assert (not (= ((_ extract 0 0) x1) ((_ extract 0 0) y))))\n"
                      "(assert (not (= ((_ extract 1 1) x1) ((_ extract 1 1) y))))\n";
  out.push_back({"eq_diseq_type2", type2 + sat});
  out.push_back({"eq_diseq_type2_pinned", type2 + "(assert (= x1 #b00))\n(assert (= x2 #b00))\n" + sat});

  std::string full = header({{"x1", 4}, {"y", 4}}) + "(assert (not (bvule x1 y)))\n";
  out.push_back({"arith_full_interval", full + sat});
  out.push_back({"arith_full_interval_pinned", full + "(assert (= x1 #b0000))\n" + sat});
  std::string single = header({{"x1", 4}, {"x2", 4}, {"x3", 4}, {"y", 4}}) +
                       "(assert (not (= y x1)))\n"
                       "(assert (bvule x1 (bvadd x3 y)))\n"
                       "(assert (not (bvule (bvsub y x2) (bvadd x3 y))))\n";
  out.push_back({"arith_single_width", single + sat});
  out.push_back({"arith_single_width_pinned", single + x123 + sat});
  std::string multi = header({{"x1", 4}, {"x2", 4}, {"x3", 4}, {"y", 4}}) +
                      "(assert (not (= y x1)))\n"
                      "(assert (bvule x1 (bvadd x3 y)))\n"
                      "(assert (bvule ((_ extract 1 0) y) ((_ extract 1 0) x2)))\n"
                      "(assert (= ((_ extract 0 0) y) #b0))\n";
  out.push_back({"arith_multi_width", multi + sat});
  out.push_back({"arith_multi_width_pinned", multi + x123 + sat});
  return out;
}

std::size_t write_corpus(const std::filesystem::path &dir, std::uint64_t seed, const CorpusCounts &counts,
                         const GeneratorOptions &opts) {
  namespace fs = std::filesystem;
  std::size_t written = 0;
  auto put = [&](const fs::path &p, const std::string &text) {
    fs::create_directories(p.parent_path());
    std::ofstream f(p);
    if (!f)
      throw std::runtime_error("cannot write " + p.string());
    f << text;
    ++written;
  };
  for (const NamedInstance &e : worked_examples())
    put(dir / "examples" / (e.name + ".smt2"), e.text);
  std::pair<Fragment, std::size_t> plan[] = {
      {Fragment::Eq, counts.eq}, {Fragment::Arith, counts.arith}, {Fragment::Mixed, counts.mixed}};
  for (const auto &[f, n] : plan) {
    for (std::size_t i = 0; i < n; ++i) {
      std::ostringstream name;
      name << fragment_name(f) << "_" << std::setw(3) << std::setfill('0') << i << ".smt2";
      std::uint64_t s = seed * 1000003u + static_cast<std::uint64_t>(f) * 100003u + i;
      put(dir / fragment_name(f) / name.str(), random_instance(f, s, opts));
    }
  }
  return written;
}

} // namespace mcbv
