#include "hlpv/polyalg/parse.h"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>

#include "hlpv/polyalg/poly_matrix.h"

namespace hlpv::polyalg {

ParseError::ParseError(const std::string& message, size_t position)
    : std::runtime_error(message + " at position " + std::to_string(position)),
      position_(position) {}

namespace {

class Parser {
 public:
  Parser(std::string_view text, const VarEnv& env, const ConstantTable& consts)
      : text_(text), env_(env), consts_(consts) {}

  Polynomial Run() {
    SkipSpace();
    if (pos_ == text_.size()) throw ParseError("empty expression", pos_);
    Polynomial p = Expr();
    SkipSpace();
    if (pos_ != text_.size()) {
      throw ParseError("unexpected character '" + std::string(1, text_[pos_]) +
                           "'",
                       pos_);
    }
    return p;
  }

 private:
  void SkipSpace() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }
  bool Accept(char c) {
    SkipSpace();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Polynomial Expr() {
    Polynomial acc = Term();
    while (true) {
      if (Accept('+')) {
        acc += Term();
      } else if (Accept('-')) {
        acc -= Term();
      } else {
        return acc;
      }
    }
  }

  Polynomial Term() {
    Polynomial acc = Unary();
    while (Accept('*')) acc = acc * Unary();
    return acc;
  }

  Polynomial Unary() {
    if (Accept('-')) return -Unary();
    if (Accept('+')) return Unary();
    return Power();
  }

  Polynomial Power() {
    Polynomial base = Primary();
    if (!Accept('^')) return base;
    SkipSpace();
    const size_t start = pos_;
    if (pos_ >= text_.size() ||
        !std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      throw ParseError("exponent must be a nonnegative integer", start);
    }
    int e = 0;
    auto [ptr, ec] = std::from_chars(text_.data() + pos_,
                                     text_.data() + text_.size(), e);
    if (ec != std::errc()) throw ParseError("exponent out of range", start);
    pos_ = ptr - text_.data();
    if (pos_ < text_.size() && (text_[pos_] == '.' || text_[pos_] == 'e' ||
                                text_[pos_] == 'E')) {
      throw ParseError("exponent must be a nonnegative integer", start);
    }
    Polynomial out = Polynomial::Constant(env_.size(), 1.0);
    for (int i = 0; i < e; ++i) out = out * base;
    return out;
  }

  Polynomial Primary() {
    SkipSpace();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Polynomial inner = Expr();
      if (!Accept(')')) throw ParseError("expected ')'", pos_);
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return Number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      return Identifier();
    }
    throw ParseError("unexpected character '" + std::string(1, c) + "'", pos_);
  }

  Polynomial Number() {
    const size_t start = pos_;
    size_t end = pos_;
    auto digits = [&] {
      const size_t s = end;
      while (end < text_.size() &&
             std::isdigit(static_cast<unsigned char>(text_[end]))) {
        ++end;
      }
      return end > s;
    };
    bool any = digits();
    if (end < text_.size() && text_[end] == '.') {
      ++end;
      any = digits() || any;
    }
    if (!any) throw ParseError("malformed number", start);
    if (end < text_.size() && (text_[end] == 'e' || text_[end] == 'E')) {
      ++end;
      if (end < text_.size() && (text_[end] == '+' || text_[end] == '-')) ++end;
      if (!digits()) throw ParseError("malformed exponent in number", start);
    }
    const std::string literal(text_.substr(start, end - start));
    const double value = std::strtod(literal.c_str(), nullptr);
    pos_ = end;
    return Polynomial::Constant(env_.size(), value);
  }

  Polynomial Identifier() {
    const size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
            text_[pos_] == '_')) {
      ++pos_;
    }
    const std::string_view name = text_.substr(start, pos_ - start);
    if (auto var = env_.Find(name)) {
      return Polynomial::Term(Monomial::Var(env_.size(), var->index), 1.0);
    }
    if (auto it = consts_.find(name); it != consts_.end()) {
      return Polynomial::Constant(env_.size(), it->second);
    }
    throw ParseError("unknown identifier '" + std::string(name) + "'", start);
  }

  std::string_view text_;
  const VarEnv& env_;
  const ConstantTable& consts_;
  size_t pos_{0};
};

std::string ShortestDecimal(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

Polynomial ParsePolynomial(std::string_view text, const VarEnv& env,
                           const ConstantTable& constants) {
  return Parser(text, env, constants).Run();
}

double Evaluate(const Polynomial& p, std::span<const double> point) {
  if (static_cast<int>(point.size()) < p.arity()) {
    throw std::invalid_argument("evaluation point has too few coordinates");
  }
  double sum = 0.0;
  for (const auto& [m, c] : p.terms()) {
    double term = c;
    const auto exps = m.exponents();
    for (size_t v = 0; v < exps.size(); ++v) {
      if (exps[v] == 0) continue;
      if (std::isnan(point[v])) {
        throw std::invalid_argument("variable " + std::to_string(v) +
                                    " is not assigned");
      }
      term *= exps[v] == 1 ? point[v] : std::pow(point[v], exps[v]);
    }
    sum += term;
  }
  return sum;
}

std::string Render(const Polynomial& p, std::span<const std::string> names) {
  if (p.IsZero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [m, c] : p.terms()) {
    const bool negative = std::signbit(c);
    const double mag = std::fabs(c);
    if (first) {
      if (negative) out += "-";
    } else {
      out += negative ? " - " : " + ";
    }
    first = false;
    std::string factors;
    for (int v = 0; v < m.arity(); ++v) {
      if (m[v] == 0) continue;
      if (!factors.empty()) factors += "*";
      factors += names[v];
      if (m[v] > 1) factors += "^" + std::to_string(m[v]);
    }
    if (factors.empty()) {
      out += ShortestDecimal(mag);
    } else if (mag == 1.0) {
      out += factors;
    } else {
      out += ShortestDecimal(mag) + "*" + factors;
    }
  }
  return out;
}

std::string Render(const Polynomial& p, const VarEnv& env) {
  std::vector<std::string> names;
  for (int i = 0; i < env.size(); ++i) names.push_back(env.name(i));
  return Render(p, names);
}

Eigen::MatrixXd Evaluate(const PolyMatrix& m, std::span<const double> point) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) out(i, j) = Evaluate(m(i, j), point);
  }
  return out;
}

PolyMatrix FromConstant(const Eigen::MatrixXd& value, int arity) {
  PolyMatrix out(static_cast<int>(value.rows()), static_cast<int>(value.cols()),
                 arity);
  for (int i = 0; i < value.rows(); ++i) {
    for (int j = 0; j < value.cols(); ++j) {
      out(i, j) = Polynomial::Constant(arity, value(i, j));
    }
  }
  out.set_symmetric(out.IsSymmetric());
  return out;
}

}  // namespace hlpv::polyalg
