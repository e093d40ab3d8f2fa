#include "mcbv/smtlib.hpp"

#include <charconv>
#include <optional>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace mcbv {

ParseError::ParseError(const std::string &msg, std::size_t line, std::size_t column)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
      line_(line), column_(column) {}

UnsupportedFeature::UnsupportedFeature(std::string feature)
    : std::runtime_error("unsupported feature: " + feature), feature_(std::move(feature)) {}

namespace {

struct SExpr {
  bool is_list = false;
  /// Symbol, keyword, numeral, or literal text. Quoted symbols are unquoted.
  std::string text;
  bool is_string = false;
  std::vector<SExpr> items;
  std::size_t line = 0, column = 0;

  bool is_atom(std::string_view s) const { return !is_list && !is_string && text == s; }
};

class Reader {
public:
  Reader(std::string_view text, std::size_t max_depth) : text_(text), max_depth_(max_depth) {}

  /// Next top-level expression, or nullopt at end of input.
  std::optional<SExpr> next() {
    skip_ws();
    if (pos_ >= text_.size())
      return std::nullopt;
    return read(0);
  }

private:
  [[noreturn]] void fail(const std::string &msg) const { throw ParseError(msg, line_, col_); }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_ws() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n')
          advance();
      } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
        advance();
      } else {
        break;
      }
    }
  }

  static bool is_delim(char c) {
    return c == '(' || c == ')' || c == ';' || c == '"' || c == '|' || c == ' ' || c == '\t' ||
           c == '\n' || c == '\r' || c == '\f' || c == '\v';
  }

  SExpr read(std::size_t depth) {
    if (depth > max_depth_)
      fail("nesting depth limit exceeded");
    SExpr e;
    e.line = line_;
    e.column = col_;
    char c = text_[pos_];
    if (c == '(') {
      advance();
      e.is_list = true;
      for (;;) {
        skip_ws();
        if (pos_ >= text_.size())
          throw ParseError("unterminated list", e.line, e.column);
        if (text_[pos_] == ')') {
          advance();
          return e;
        }
        e.items.push_back(read(depth + 1));
      }
    }
    if (c == ')')
      fail("unexpected ')'");
    if (c == '|') {
      advance();
      while (pos_ < text_.size() && text_[pos_] != '|') {
        e.text.push_back(text_[pos_]);
        advance();
      }
      if (pos_ >= text_.size())
        throw ParseError("unterminated quoted symbol", e.line, e.column);
      advance();
      return e;
    }
    if (c == '"') {
      advance();
      e.is_string = true;
      for (;;) {
        if (pos_ >= text_.size())
          throw ParseError("unterminated string literal", e.line, e.column);
        char d = text_[pos_];
        advance();
        if (d == '"') {
          if (pos_ < text_.size() && text_[pos_] == '"') {
            e.text.push_back('"');
            advance();
            continue;
          }
          return e;
        }
        e.text.push_back(d);
      }
    }
    while (pos_ < text_.size() && !is_delim(text_[pos_])) {
      e.text.push_back(text_[pos_]);
      advance();
    }
    return e;
  }

  std::string_view text_;
  std::size_t max_depth_;
  std::size_t pos_ = 0, line_ = 1, col_ = 1;
};

[[noreturn]] void fail_at(const SExpr &e, const std::string &msg) {
  throw ParseError(msg, e.line, e.column);
}

bool is_numeral(const std::string &s) {
  if (s.empty())
    return false;
  for (char c : s)
    if (c < '0' || c > '9')
      return false;
  return true;
}

unsigned parse_index(const SExpr &e) {
  if (e.is_list || !is_numeral(e.text))
    fail_at(e, "expected a numeral");
  unsigned v = 0;
  auto [ptr, ec] = std::from_chars(e.text.data(), e.text.data() + e.text.size(), v);
  if (ec != std::errc() || ptr != e.text.data() + e.text.size())
    fail_at(e, "numeral out of range");
  return v;
}

/// Sort of a declared symbol: 0 means Bool.
unsigned parse_sort(const SExpr &e, const ParseOptions &opts) {
  if (e.is_atom("Bool"))
    return 0;
  if (e.is_list && e.items.size() == 3 && e.items[0].is_atom("_") && e.items[1].is_atom("BitVec")) {
    unsigned w = parse_index(e.items[2]);
    if (w == 0)
      fail_at(e, "bitvector width must be positive");
    if (w > opts.max_width)
      throw UnsupportedFeature("bitvector width " + std::to_string(w) + " exceeds the limit of " +
                               std::to_string(opts.max_width));
    return w;
  }
  if (!e.is_list)
    throw UnsupportedFeature("sort " + e.text);
  fail_at(e, "malformed sort");
}

class Converter {
public:
  Converter(TermStore &store, const ParseOptions &opts) : s_(store), opts_(opts) {}

  Script run(std::string_view text) {
    Reader reader(text, opts_.max_depth);
    while (auto cmd = reader.next()) {
      if (!command(*cmd))
        break;
    }
    return std::move(script_);
  }

private:
  bool command(const SExpr &c) {
    if (!c.is_list || c.items.empty() || c.items[0].is_list)
      fail_at(c, "expected a command");
    const std::string &name = c.items[0].text;
    auto arity = [&](std::size_t n) {
      if (c.items.size() != n + 1)
        fail_at(c, name + " expects " + std::to_string(n) + " argument(s)");
    };
    if (name == "set-logic") {
      arity(1);
      script_.logic = c.items[1].text;
      if (script_.logic != "QF_BV")
        throw UnsupportedFeature("logic " + script_.logic);
    } else if (name == "set-info" || name == "set-option" || name == "get-info") {
      // Metadata only.
    } else if (name == "declare-fun" || name == "declare-const") {
      std::size_t sort_pos = 2;
      if (name == "declare-fun") {
        arity(3);
        if (!c.items[2].is_list)
          fail_at(c.items[2], "expected parameter list");
        if (!c.items[2].items.empty())
          throw UnsupportedFeature("declare-fun with arguments");
        sort_pos = 3;
      } else {
        arity(2);
      }
      declare(c.items[1], parse_sort(c.items[sort_pos], opts_));
    } else if (name == "define-fun") {
      arity(4);
      const SExpr &sym = c.items[1];
      if (sym.is_list)
        fail_at(sym, "expected a symbol");
      if (!c.items[2].is_list)
        fail_at(c.items[2], "expected parameter list");
      if (!c.items[2].items.empty())
        throw UnsupportedFeature("define-fun with arguments");
      unsigned w = parse_sort(c.items[3], opts_);
      TermId body = term(c.items[4], 0);
      if (s_.width(body) != w || (w == 0) != s_.is_bool(body))
        fail_at(c.items[4], "definition body does not match declared sort");
      if (env_.count(sym.text))
        fail_at(sym, "symbol '" + sym.text + "' already defined");
      env_.emplace(sym.text, body);
      script_.definitions.emplace_back(sym.text, body);
    } else if (name == "assert") {
      arity(1);
      TermId t = term(c.items[1], 0);
      if (!s_.is_bool(t))
        fail_at(c.items[1], "assertion is not Boolean");
      script_.assertions.push_back(t);
    } else if (name == "check-sat") {
      arity(0);
      script_.commands.push_back({Command::CheckSat, script_.assertions.size()});
    } else if (name == "get-model") {
      arity(0);
      script_.commands.push_back({Command::GetModel, script_.assertions.size()});
    } else if (name == "exit") {
      script_.commands.push_back({Command::Exit, script_.assertions.size()});
      return false;
    } else {
      throw UnsupportedFeature(name);
    }
    return true;
  }

  void declare(const SExpr &sym, unsigned width) {
    if (sym.is_list)
      fail_at(sym, "expected a symbol");
    if (env_.count(sym.text))
      fail_at(sym, "symbol '" + sym.text + "' already declared");
    bool is_bool = width == 0;
    TermId v = s_.mk_var(sym.text, is_bool ? 1 : width);
    script_.declarations.push_back({sym.text, is_bool ? 1u : width, is_bool, v});
    env_.emplace(sym.text, is_bool ? s_.mk_eq(v, s_.mk_const(1, 1)) : v);
  }

  TermId lookup(const SExpr &e) {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it)
      if (auto f = it->find(e.text); f != it->end())
        return f->second;
    if (auto f = env_.find(e.text); f != env_.end())
      return f->second;
    fail_at(e, "unknown symbol '" + e.text + "'");
  }

  TermId constant(const BvValue &v) {
    if (v.width() > opts_.max_width)
      throw UnsupportedFeature("bitvector width " + std::to_string(v.width()) + " exceeds the limit of " +
                               std::to_string(opts_.max_width));
    return s_.mk_const(v);
  }

  TermId atom(const SExpr &e) {
    if (e.is_string)
      fail_at(e, "unexpected string literal");
    const std::string &t = e.text;
    if (t.size() > 2 && t[0] == '#' && (t[1] == 'b' || t[1] == 'x')) {
      std::size_t digits = t.size() - 2;
      if ((t[1] == 'b' ? digits : digits * 4) > opts_.max_width)
        throw UnsupportedFeature("bitvector width exceeds the limit of " + std::to_string(opts_.max_width));
      try {
        return constant(t[1] == 'b' ? BvValue::from_binary(t.substr(2)) : BvValue::from_hex(t.substr(2)));
      } catch (const std::invalid_argument &ex) {
        fail_at(e, ex.what());
      }
    }
    if (t == "true")
      return s_.mk_true();
    if (t == "false")
      return s_.mk_false();
    if (is_numeral(t))
      throw UnsupportedFeature("integer numeral " + t);
    if (!t.empty() && t[0] == '#')
      fail_at(e, "malformed literal '" + t + "'");
    return lookup(e);
  }

  TermId require_bool(const SExpr &e, TermId t) {
    if (!s_.is_bool(t))
      fail_at(e, "expected a Boolean term");
    return t;
  }

  TermId require_bv(const SExpr &e, TermId t) {
    if (s_.is_bool(t))
      fail_at(e, "expected a bitvector term");
    return t;
  }

  TermId term(const SExpr &e, std::size_t depth) {
    if (depth > opts_.max_depth)
      fail_at(e, "nesting depth limit exceeded");
    if (!e.is_list)
      return atom(e);
    if (e.items.empty())
      fail_at(e, "empty application");
    const SExpr &head = e.items[0];
    try {
      if (head.is_list)
        return indexed_app(e, depth);
      const std::string &op = head.text;
      if (op == "_")
        return indexed_constant(e);
      if (op == "let")
        return let(e, depth);
      if (op == "!") {
        if (e.items.size() < 2)
          fail_at(e, "malformed annotation");
        return term(e.items[1], depth + 1);
      }
      std::vector<TermId> args;
      args.reserve(e.items.size() - 1);
      for (std::size_t i = 1; i < e.items.size(); ++i)
        args.push_back(term(e.items[i], depth + 1));
      return app(e, op, args);
    } catch (const SortError &ex) {
      fail_at(e, ex.what());
    }
  }

  TermId indexed_constant(const SExpr &e) {
    if (e.items.size() == 3 && !e.items[1].is_list && e.items[1].text.rfind("bv", 0) == 0) {
      std::string digits = e.items[1].text.substr(2);
      if (!is_numeral(digits))
        fail_at(e.items[1], "malformed bitvector literal");
      unsigned w = parse_index(e.items[2]);
      if (w == 0)
        fail_at(e.items[2], "bitvector width must be positive");
      if (w > opts_.max_width)
        throw UnsupportedFeature("bitvector width " + std::to_string(w) + " exceeds the limit of " +
                                 std::to_string(opts_.max_width));
      return constant(BvValue::from_decimal(w, digits));
    }
    if (e.items.size() >= 2 && !e.items[1].is_list)
      throw UnsupportedFeature("_ " + e.items[1].text);
    fail_at(e, "malformed indexed identifier");
  }

  TermId indexed_app(const SExpr &e, std::size_t depth) {
    const SExpr &head = e.items[0];
    if (head.items.size() < 2 || !head.items[0].is_atom("_") || head.items[1].is_list)
      fail_at(head, "malformed indexed operator");
    const std::string &op = head.items[1].text;
    if (op != "extract" && op != "zero_extend" && op != "sign_extend")
      throw UnsupportedFeature(op);
    if (e.items.size() != 2)
      fail_at(e, op + " expects one argument");
    TermId a = require_bv(e.items[1], term(e.items[1], depth + 1));
    if (op == "extract") {
      if (head.items.size() != 4)
        fail_at(head, "extract expects two indices");
      unsigned i = parse_index(head.items[2]), j = parse_index(head.items[3]);
      if (j > i || i >= s_.width(a))
        fail_at(head, "extract indices out of range");
      return s_.mk_extract(a, i + 1, j);
    }
    if (head.items.size() != 3)
      fail_at(head, op + " expects one index");
    unsigned k = parse_index(head.items[2]);
    if (s_.width(a) + static_cast<std::uint64_t>(k) > opts_.max_width)
      throw UnsupportedFeature("bitvector width exceeds the limit of " + std::to_string(opts_.max_width));
    if (k == 0)
      return a;
    return op == "zero_extend" ? s_.mk_zero_extend(a, k) : s_.mk_sign_extend(a, k);
  }

  TermId let(const SExpr &e, std::size_t depth) {
    if (e.items.size() != 3 || !e.items[1].is_list)
      fail_at(e, "malformed let");
    std::unordered_map<std::string, TermId> scope;
    for (const SExpr &b : e.items[1].items) {
      if (!b.is_list || b.items.size() != 2 || b.items[0].is_list)
        fail_at(b, "malformed let binding");
      scope[b.items[0].text] = term(b.items[1], depth + 1);
    }
    scopes_.push_back(std::move(scope));
    TermId body = term(e.items[2], depth + 1);
    scopes_.pop_back();
    return body;
  }

  TermId iff(TermId a, TermId b) {
    return s_.mk_and({s_.mk_or({s_.mk_not(a), b}), s_.mk_or({a, s_.mk_not(b)})});
  }

  TermId equal(TermId a, TermId b) {
    if (s_.is_bool(a) != s_.is_bool(b))
      throw SortError("=: mixed Boolean and bitvector operands");
    return s_.is_bool(a) ? iff(a, b) : s_.mk_eq(a, b);
  }

  TermId app(const SExpr &e, const std::string &op, const std::vector<TermId> &args) {
    auto need = [&](std::size_t lo, std::size_t hi) {
      if (args.size() < lo || args.size() > hi)
        fail_at(e, "wrong number of arguments to " + op);
    };
    auto bv_args = [&]() {
      for (std::size_t i = 0; i < args.size(); ++i)
        require_bv(e.items[i + 1], args[i]);
    };
    auto bool_args = [&]() {
      for (std::size_t i = 0; i < args.size(); ++i)
        require_bool(e.items[i + 1], args[i]);
    };
    constexpr std::size_t many = static_cast<std::size_t>(-1);
    if (op == "concat") {
      need(2, many);
      bv_args();
      return s_.mk_term(Kind::Concat, args);
    }
    if (op == "bvadd" || op == "bvmul") {
      need(2, many);
      bv_args();
      return s_.mk_term(op == "bvadd" ? Kind::Add : Kind::Mul, args);
    }
    if (op == "bvsub") {
      need(2, many);
      bv_args();
      TermId acc = args[0];
      for (std::size_t i = 1; i < args.size(); ++i)
        acc = s_.mk_sub(acc, args[i]);
      return acc;
    }
    if (op == "bvneg" || op == "bvnot") {
      need(1, 1);
      bv_args();
      return op == "bvneg" ? s_.mk_neg(args[0]) : s_.mk_bvnot(args[0]);
    }
    static const std::unordered_map<std::string, std::pair<Kind, bool>> comparisons = {
        {"bvule", {Kind::Ule, false}}, {"bvult", {Kind::Ult, false}}, {"bvsle", {Kind::Sle, false}},
        {"bvslt", {Kind::Slt, false}}, {"bvuge", {Kind::Ule, true}},  {"bvugt", {Kind::Ult, true}},
        {"bvsge", {Kind::Sle, true}},  {"bvsgt", {Kind::Slt, true}},
    };
    if (auto it = comparisons.find(op); it != comparisons.end()) {
      need(2, 2);
      bv_args();
      auto [kind, swap] = it->second;
      return swap ? s_.mk_term(kind, {args[1], args[0]}) : s_.mk_term(kind, {args[0], args[1]});
    }
    if (op == "=") {
      need(2, many);
      if (args.size() == 2)
        return equal(args[0], args[1]);
      std::vector<TermId> parts;
      for (std::size_t i = 0; i + 1 < args.size(); ++i)
        parts.push_back(equal(args[i], args[i + 1]));
      return s_.mk_and(parts);
    }
    if (op == "distinct") {
      need(2, many);
      std::vector<TermId> parts;
      for (std::size_t i = 0; i < args.size(); ++i)
        for (std::size_t j = i + 1; j < args.size(); ++j)
          parts.push_back(s_.mk_not(equal(args[i], args[j])));
      return parts.size() == 1 ? parts[0] : s_.mk_and(parts);
    }
    if (op == "not") {
      need(1, 1);
      bool_args();
      return s_.mk_not(args[0]);
    }
    if (op == "and" || op == "or") {
      if (args.empty())
        return op == "and" ? s_.mk_true() : s_.mk_false();
      bool_args();
      if (args.size() == 1)
        return args[0];
      return op == "and" ? s_.mk_and(args) : s_.mk_or(args);
    }
    if (op == "=>") {
      need(2, many);
      bool_args();
      // Right associative.
      TermId acc = args.back();
      for (std::size_t i = args.size() - 1; i-- > 0;)
        acc = s_.mk_or({s_.mk_not(args[i]), acc});
      return acc;
    }
    if (op == "xor") {
      need(2, many);
      bool_args();
      TermId acc = args[0];
      for (std::size_t i = 1; i < args.size(); ++i)
        acc = s_.mk_not(iff(acc, args[i]));
      return acc;
    }
    throw UnsupportedFeature(op);
  }

  TermStore &s_;
  const ParseOptions &opts_;
  Script script_;
  std::unordered_map<std::string, TermId> env_;
  std::vector<std::unordered_map<std::string, TermId>> scopes_;
};

bool simple_symbol(const std::string &s) {
  if (s.empty() || (s[0] >= '0' && s[0] <= '9'))
    return false;
  static const std::string extra = "~!@$%^&*_-+=<>.?/";
  for (char c : s) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
              extra.find(c) != std::string::npos;
    if (!ok)
      return false;
  }
  return true;
}

std::string quote_symbol(const std::string &s) { return simple_symbol(s) ? s : "|" + s + "|"; }

} // namespace

Script parse_script(TermStore &store, std::string_view text, const ParseOptions &opts) {
  Converter conv(store, opts);
  return conv.run(text);
}

std::string print_model(const TermStore &store, const Script &script, const Assignment &m) {
  std::ostringstream out;
  for (const Declaration &d : script.declarations) {
    const BvValue *v = m.get(store, d.var);
    BvValue value = v ? *v : BvValue::zero(d.width);
    out << "(define-fun " << quote_symbol(d.name) << " () ";
    if (d.is_bool)
      out << "Bool " << (value.is_one() ? "true" : "false");
    else
      out << "(_ BitVec " << d.width << ") #b" << value.to_binary();
    out << ")\n";
  }
  return out.str();
}

Assignment parse_model(TermStore &store, std::string_view text) {
  Assignment m;
  Reader reader(text, 64);
  ParseOptions opts;
  auto entry = [&](const SExpr &e) {
    if (!e.is_list || e.items.size() != 5 || !e.items[0].is_atom("define-fun") || e.items[1].is_list)
      fail_at(e, "expected (define-fun name () sort value)");
    unsigned w = parse_sort(e.items[3], opts);
    const SExpr &val = e.items[4];
    BvValue v;
    if (w == 0) {
      if (!val.is_atom("true") && !val.is_atom("false"))
        fail_at(val, "expected true or false");
      v = BvValue(1, val.is_atom("true") ? 1 : 0);
      w = 1;
    } else if (!val.is_list && val.text.size() > 2 && val.text[0] == '#') {
      try {
        v = val.text[1] == 'b' ? BvValue::from_binary(val.text.substr(2))
                               : BvValue::from_hex(val.text.substr(2));
      } catch (const std::invalid_argument &ex) {
        fail_at(val, ex.what());
      }
    } else if (val.is_list && val.items.size() == 3 && val.items[0].is_atom("_") &&
               val.items[1].text.rfind("bv", 0) == 0 && is_numeral(val.items[1].text.substr(2))) {
      v = BvValue::from_decimal(parse_index(val.items[2]), val.items[1].text.substr(2));
    } else {
      fail_at(val, "expected a bitvector literal");
    }
    if (v.width() != w)
      fail_at(val, "value width does not match sort");
    TermId var;
    try {
      var = store.mk_var(e.items[1].text, w);
    } catch (const SortError &ex) {
      fail_at(e.items[1], ex.what());
    }
    m.set(store, var, v);
  };
  while (auto e = reader.next()) {
    if (e->is_list && !e->items.empty() && e->items[0].is_atom("model")) {
      for (std::size_t i = 1; i < e->items.size(); ++i)
        entry(e->items[i]);
    } else {
      entry(*e);
    }
  }
  return m;
}

} // namespace mcbv
