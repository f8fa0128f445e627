#ifndef APTC_PARSER_HPP
#define APTC_PARSER_HPP

#include <stdexcept>
#include <string>

#include "aptc/model.hpp"

namespace aptc {

struct SyntaxError : std::runtime_error {
  int line;
  int col;
  std::string expected;
  SyntaxError(int line, int col, const std::string& expected,
              const std::string& got)
      : std::runtime_error("syntax error at " + std::to_string(line) + ":" +
                           std::to_string(col) + ": expected " + expected +
                           ", got '" + got + "'"),
        line(line),
        col(col),
        expected(expected) {}
};

struct UndeclaredName : ModelError {
  explicit UndeclaredName(const std::string& name)
      : ModelError("undeclared name '" + name + "'") {}
};

struct ArityMismatch : ModelError {
  explicit ArityMismatch(const std::string& what)
      : ModelError("arity mismatch: " + what) {}
};

struct AsymmetricGamma : ModelError {
  explicit AsymmetricGamma(const std::string& what)
      : ModelError("asymmetric communication declaration: " + what) {}
};

// Parses a full .aptc model. Finite sums and parameterized processes are
// expanded to ground equations; gamma patterns are instantiated over the
// declared domains; shadow constants without an explicit index get fresh
// ones in declaration order.
Model parse_model(const std::string& text);

// Parses one term against an existing model's declarations (used by the
// CLI --term/--left/--right flags). Process names resolve to RecCalls.
TermPtr parse_term_in_context(const Model& m, const std::string& text);

}  // namespace aptc

#endif
