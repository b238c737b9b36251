#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

#include "hlpv/polyalg/polynomial.h"
#include "hlpv/polyalg/var_env.h"

namespace hlpv::polyalg {

/// Syntax or name error in a polynomial expression; `position()` is the
/// zero-based character offset of the offending token.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, size_t position);
  size_t position() const { return position_; }

 private:
  size_t position_;
};

/// Named numeric constants that may appear in expressions (e.g. `nu`).
using ConstantTable = std::map<std::string, double, std::less<>>;

/// Parses an expression over the variables of `env`.
///
/// Grammar (whitespace ignored between tokens):
///
///     expr    := term (('+' | '-') term)*
///     term    := unary ('*' unary)*
///     unary   := ('+' | '-') unary | power
///     power   := primary ('^' integer)?
///     primary := number | identifier | '(' expr ')'
///     number  := digits ['.' digits] [('e'|'E') ['+'|'-'] digits]
///
/// Identifiers resolve first to variables of `env`, then to `constants`.
/// Exponents must be nonnegative integer literals. Decimal literals are
/// converted with correct rounding, so rendering and re-parsing is exact.
Polynomial ParsePolynomial(std::string_view text, const VarEnv& env,
                           const ConstantTable& constants = {});

/// Render with the names of `env`.
std::string Render(const Polynomial& p, const VarEnv& env);

}  // namespace hlpv::polyalg
