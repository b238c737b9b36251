#include "hlpv/soscomp/affine_expr.h"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace hlpv::soscomp {

AffineExpr AffineExpr::Unknown(int id, double coeff) {
  AffineExpr e;
  if (coeff != 0.0) e.terms_.emplace_back(id, coeff);
  return e;
}

double AffineExpr::Evaluate(std::span<const double> values) const {
  double s = constant_;
  for (const auto& [k, c] : terms_) s += c * values[k];
  return s;
}

namespace {

void Merge(std::vector<std::pair<int, double>>* a,
           const std::vector<std::pair<int, double>>& b, double sign) {
  if (b.empty()) return;
  std::vector<std::pair<int, double>> out;
  out.reserve(a->size() + b.size());
  auto i = a->begin();
  auto j = b.begin();
  while (i != a->end() || j != b.end()) {
    if (j == b.end() || (i != a->end() && i->first < j->first)) {
      out.push_back(*i++);
    } else if (i == a->end() || j->first < i->first) {
      out.emplace_back(j->first, sign * j->second);
      ++j;
    } else {
      const double v = i->second + sign * j->second;
      if (v != 0.0) out.emplace_back(i->first, v);
      ++i;
      ++j;
    }
  }
  *a = std::move(out);
}

}  // namespace

AffineExpr& AffineExpr::operator+=(const AffineExpr& o) {
  constant_ += o.constant_;
  Merge(&terms_, o.terms_, 1.0);
  return *this;
}

AffineExpr& AffineExpr::operator-=(const AffineExpr& o) {
  constant_ -= o.constant_;
  Merge(&terms_, o.terms_, -1.0);
  return *this;
}

AffineExpr& AffineExpr::operator*=(double s) {
  if (s == 0.0) {
    constant_ = 0.0;
    terms_.clear();
    return *this;
  }
  constant_ *= s;
  for (auto& t : terms_) t.second *= s;
  return *this;
}

AffineExpr operator*(const AffineExpr& a, const AffineExpr& b) {
  if (a.IsConstant()) return b * a.constant();
  if (b.IsConstant()) return a * b.constant();
  throw std::domain_error("product of two expressions that depend on unknowns");
}

std::string ToString(const AffineExpr& e) {
  auto num = [](double v) {
    char buf[64];
    return std::string(buf, std::to_chars(buf, buf + sizeof(buf), v).ptr);
  };
  std::string out = num(e.constant());
  for (const auto& [k, c] : e.terms()) {
    out += c < 0 ? " - " : " + ";
    out += num(std::abs(c)) + "*u" + std::to_string(k);
  }
  return out;
}

AffinePolyMatrix Lift(const polyalg::PolyMatrix& m) {
  return m.Transform([](double c) { return AffineExpr(c); });
}

polyalg::PolyMatrix EvaluateUnknowns(const AffinePolyMatrix& m,
                                     std::span<const double> values) {
  return m.Transform([&](const AffineExpr& c) { return c.Evaluate(values); });
}

}  // namespace hlpv::soscomp
