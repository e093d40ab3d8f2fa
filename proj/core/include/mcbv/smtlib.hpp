#pragma once

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mcbv/term_store.hpp"

namespace mcbv {

class ParseError : public std::runtime_error {
public:
  ParseError(const std::string &msg, std::size_t line, std::size_t column);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

private:
  std::size_t line_, column_;
};

/// Raised for well-formed input outside the supported QF_BV subset.
class UnsupportedFeature : public std::runtime_error {
public:
  explicit UnsupportedFeature(std::string feature);
  const std::string &feature() const { return feature_; }

private:
  std::string feature_;
};

struct Declaration {
  std::string name;
  unsigned width;
  /// Declared as Bool; represented by a width-1 variable.
  bool is_bool = false;
  TermId var;
};

struct Command {
  enum Kind { CheckSat, GetModel, Exit } kind;
  /// Number of assertions in effect when the command was issued.
  std::size_t assertion_count = 0;
};

struct Script {
  std::string logic;
  std::vector<Declaration> declarations;
  std::vector<TermId> assertions;
  std::vector<Command> commands;
  /// Zero-argument define-fun bindings, in order.
  std::vector<std::pair<std::string, TermId>> definitions;
};

struct ParseOptions {
  unsigned max_width = 2048;
  std::size_t max_depth = 10000;
};

Script parse_script(TermStore &store, std::string_view text, const ParseOptions &opts = {});

/// One define-fun line per declared variable, in declaration order.
std::string print_model(const TermStore &store, const Script &script, const Assignment &m);

/// Reads back the output of print_model. Variables are created in `store`
/// if they do not exist yet.
Assignment parse_model(TermStore &store, std::string_view text);

} // namespace mcbv
