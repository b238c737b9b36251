#include "hlpv/cli/problem_file.h"

#include <algorithm>
#include <fstream>
#include <regex>
#include <set>

#include "hlpv/polyalg/parse.h"

namespace hlpv::cli {

using lpvcert::Polynomial;
using lpvcert::PolyMatrix;

SchemaError::SchemaError(std::string pointer, const std::string& message)
    : std::runtime_error((pointer.empty() ? std::string("(document)") : pointer) + ": " +
                         message),
      pointer_(std::move(pointer)) {}

namespace {

std::string Child(const std::string& ptr, std::string_view key) {
  std::string out = ptr + "/";
  for (char c : key) {
    if (c == '~') {
      out += "~0";
    } else if (c == '/') {
      out += "~1";
    } else {
      out += c;
    }
  }
  return out;
}

std::string Child(const std::string& ptr, size_t index) { return ptr + "/" + std::to_string(index); }

void CheckKeys(const Json& obj, const std::string& ptr, const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw SchemaError(ptr, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) throw SchemaError(Child(ptr, key), "unknown key");
  }
}

const Json& Require(const Json& obj, const std::string& ptr, const char* key) {
  if (!obj.contains(key)) throw SchemaError(Child(ptr, key), "required key is missing");
  return obj.at(key);
}

const Json& Array(const Json& v, const std::string& ptr) {
  if (!v.is_array()) throw SchemaError(ptr, "expected an array");
  return v;
}

int Integer(const Json& v, const std::string& ptr, int min) {
  if (!v.is_number_integer()) throw SchemaError(ptr, "expected an integer");
  const auto x = v.get<long long>();
  if (x < min || x > 1000000) throw SchemaError(ptr, "integer out of range");
  return static_cast<int>(x);
}

/// Number literal or constant expression.
double Number(const Json& v, const std::string& ptr, const polyalg::ConstantTable& constants) {
  if (v.is_number()) return v.get<double>();
  if (!v.is_string()) throw SchemaError(ptr, "expected a number or a constant expression");
  const std::string text = v.get<std::string>();
  try {
    const Polynomial p = polyalg::ParsePolynomial(text, polyalg::VarEnv{}, constants);
    return polyalg::Evaluate(p, {});
  } catch (const polyalg::ParseError& e) {
    throw SchemaError(ptr, "column " + std::to_string(e.position() + 1) + ": " + e.what());
  }
}

struct Context {
  const polyalg::VarEnv& names;
  const polyalg::ConstantTable& constants;
  std::vector<int> p_vars;
};

Polynomial Poly(const Json& v, const std::string& ptr, const Context& ctx) {
  if (v.is_number()) return Polynomial::Constant(ctx.names.size(), v.get<double>());
  if (!v.is_string()) throw SchemaError(ptr, "expected a polynomial string");
  Polynomial p;
  try {
    p = polyalg::ParsePolynomial(v.get<std::string>(), ctx.names, ctx.constants);
  } catch (const polyalg::ParseError& e) {
    throw SchemaError(ptr, "column " + std::to_string(e.position() + 1) + ": " + e.what());
  }
  for (const auto& [mono, c] : p.terms()) {
    for (int var = 0; var < mono.arity(); ++var) {
      if (mono[var] == 0) continue;
      if (std::find(ctx.p_vars.begin(), ctx.p_vars.end(), var) == ctx.p_vars.end()) {
        throw SchemaError(ptr, "'" + ctx.names.name(var) + "' is not a declared parameter");
      }
    }
  }
  return p;
}

PolyMatrix Matrix(const Json& v, const std::string& ptr, int rows, int cols,
                  const Context& ctx) {
  Array(v, ptr);
  if (static_cast<int>(v.size()) != rows) {
    throw SchemaError(ptr, "expected " + std::to_string(rows) + " rows");
  }
  PolyMatrix out(rows, cols, ctx.names.size());
  for (int i = 0; i < rows; ++i) {
    const std::string row_ptr = Child(ptr, i);
    Array(v[i], row_ptr);
    if (static_cast<int>(v[i].size()) != cols) {
      throw SchemaError(row_ptr, "expected " + std::to_string(cols) + " columns");
    }
    for (int j = 0; j < cols; ++j) out(i, j) = Poly(v[i][j], Child(row_ptr, j), ctx);
  }
  return out;
}

std::vector<Polynomial> PolyList(const Json& doc, const char* key, const Context& ctx) {
  std::vector<Polynomial> out;
  if (!doc.contains(key)) return out;
  const std::string ptr = Child("", key);
  const Json& list = Array(doc.at(key), ptr);
  for (size_t i = 0; i < list.size(); ++i) {
    out.push_back(Poly(list[i], Child(ptr, i), ctx));
    if (out.back().degree() == 0) throw SchemaError(Child(ptr, i), "must not be constant");
  }
  return out;
}

}  // namespace

ProblemFile ParseProblem(const Json& doc, const polyalg::ConstantTable& overrides) {
  CheckKeys(doc, "", {"name", "description", "n", "m", "params", "constants", "generators",
                      "equalities", "box_generators", "derivative", "A", "B", "J",
                      "defaults"});
  ProblemFile pf;
  pf.source = doc;
  if (doc.contains("name")) {
    if (!doc["name"].is_string()) throw SchemaError("/name", "expected a string");
    pf.name = doc["name"].get<std::string>();
  }
  if (doc.contains("description") && !doc["description"].is_string()) {
    throw SchemaError("/description", "expected a string");
  }
  const int n = Integer(Require(doc, "", "n"), "/n", 1);
  const int m = doc.contains("m") ? Integer(doc["m"], "/m", 0) : 0;

  // Constants, with overrides written back into the echoed source.
  const std::regex ident("[A-Za-z_][A-Za-z0-9_]*");
  if (doc.contains("constants")) {
    const Json& c = doc["constants"];
    if (!c.is_object()) throw SchemaError("/constants", "expected an object");
    for (const auto& [key, value] : c.items()) {
      const std::string ptr = Child("/constants", key);
      if (!std::regex_match(key, ident)) throw SchemaError(ptr, "invalid constant name");
      if (!value.is_number()) throw SchemaError(ptr, "expected a number");
      pf.constants[key] = value.get<double>();
    }
  }
  for (const auto& [key, value] : overrides) {
    if (!pf.constants.contains(key)) {
      throw SchemaError(Child("/constants", key), "override names an undeclared constant");
    }
    pf.constants[key] = value;
    pf.source["constants"][key] = value;
  }

  // Parameters; their names replace p1..pN in an environment of the same
  // shape as the system's.
  const Json& params = doc.contains("params") ? Array(doc["params"], "/params") : Json::array();
  const int num_params = static_cast<int>(params.size());
  pf.system = lpvcert::MakeSystem(n, m, num_params);
  pf.names.Add("t", polyalg::VarKind::kClock);
  for (int i = 0; i < num_params; ++i) {
    const std::string ptr = Child("/params", i);
    CheckKeys(params[i], ptr, {"name", "min", "max"});
    const Json& name = Require(params[i], ptr, "name");
    if (!name.is_string() || !std::regex_match(name.get<std::string>(), ident)) {
      throw SchemaError(Child(ptr, "name"), "expected an identifier");
    }
    const std::string pname = name.get<std::string>();
    if (pf.constants.contains(pname)) {
      throw SchemaError(Child(ptr, "name"), "parameter name collides with a constant");
    }
    try {
      pf.names.Add(pname, polyalg::VarKind::kParameter);
    } catch (const std::invalid_argument&) {
      throw SchemaError(Child(ptr, "name"), "duplicate or reserved name");
    }
    pf.param_names.push_back(pname);
    const double lo = Number(Require(params[i], ptr, "min"), Child(ptr, "min"), pf.constants);
    const double hi = Number(Require(params[i], ptr, "max"), Child(ptr, "max"), pf.constants);
    if (!(lo < hi)) throw SchemaError(Child(ptr, "max"), "max must exceed min");
    pf.system.box_lo.push_back(lo);
    pf.system.box_hi.push_back(hi);
  }
  for (int i = num_params + 1; i < pf.system.env.size(); ++i) {
    const std::string& reserved = pf.system.env.name(i);
    if (pf.names.Find(reserved)) {
      const auto it = std::find(pf.param_names.begin(), pf.param_names.end(), reserved);
      throw SchemaError(Child(Child("/params", it - pf.param_names.begin()), "name"),
                        "name '" + reserved + "' is reserved");
    }
    pf.names.Add(reserved, pf.system.env.kind(i));
  }
  for (const auto& [key, value] : pf.constants) {
    if (pf.names.Find(key)) {
      throw SchemaError(Child("/constants", key), "constant name is reserved");
    }
  }

  const Context ctx{pf.names, pf.constants, pf.system.p_vars()};
  auto& sys = pf.system;
  sys.A = Matrix(Require(doc, "", "A"), "/A", n, n, ctx);
  if (m > 0) {
    sys.B = Matrix(Require(doc, "", "B"), "/B", n, m, ctx);
  } else if (doc.contains("B")) {
    throw SchemaError("/B", "B given but m = 0");
  }
  sys.J = doc.contains("J") ? Matrix(doc["J"], "/J", n, n, ctx)
                            : PolyMatrix::Identity(n, sys.env.size(), 1.0);
  sys.g = PolyList(doc, "generators", ctx);
  sys.h = PolyList(doc, "equalities", ctx);
  if (doc.contains("box_generators")) {
    if (!doc["box_generators"].is_boolean()) {
      throw SchemaError("/box_generators", "expected a boolean");
    }
    sys.box_generators = doc["box_generators"].get<bool>();
  }

  if (num_params == 0) {
    if (doc.contains("derivative")) throw SchemaError("/derivative", "no parameters declared");
    sys.vertices = lpvcert::BoxVertices(sys.env.size(), {}, {});
  } else if (doc.contains("derivative")) {
    const Json& d = doc["derivative"];
    CheckKeys(d, "/derivative", {"box", "vertices"});
    if (d.contains("box") == d.contains("vertices")) {
      throw SchemaError("/derivative", "exactly one of box and vertices is required");
    }
    if (d.contains("box")) {
      const Json& box = Array(d["box"], "/derivative/box");
      if (static_cast<int>(box.size()) != num_params) {
        throw SchemaError("/derivative/box", "expected one entry per parameter");
      }
      std::vector<double> lo, hi;
      for (int i = 0; i < num_params; ++i) {
        const std::string ptr = Child("/derivative/box", i);
        if (box[i].is_array()) {
          if (box[i].size() != 2) throw SchemaError(ptr, "expected [lo, hi]");
          lo.push_back(Number(box[i][0], Child(ptr, 0), pf.constants));
          hi.push_back(Number(box[i][1], Child(ptr, 1), pf.constants));
        } else {
          const double nu = Number(box[i], ptr, pf.constants);
          lo.push_back(-nu);
          hi.push_back(nu);
        }
        if (!(lo.back() <= hi.back())) throw SchemaError(ptr, "empty derivative interval");
      }
      sys.vertices = lpvcert::BoxVertices(sys.env.size(), lo, hi);
    } else {
      const Json& verts = Array(d["vertices"], "/derivative/vertices");
      if (verts.empty()) throw SchemaError("/derivative/vertices", "expected at least one vertex");
      for (size_t k = 0; k < verts.size(); ++k) {
        const std::string ptr = Child("/derivative/vertices", k);
        Array(verts[k], ptr);
        if (static_cast<int>(verts[k].size()) != num_params) {
          throw SchemaError(ptr, "expected one entry per parameter");
        }
        std::vector<Polynomial> v;
        for (int i = 0; i < num_params; ++i) v.push_back(Poly(verts[k][i], Child(ptr, i), ctx));
        sys.vertices.push_back(std::move(v));
      }
    }
  }

  if (doc.contains("defaults")) {
    const Json& d = doc["defaults"];
    CheckKeys(d, "/defaults", {"degree", "epsilon", "multiplier_degree"});
    if (d.contains("degree")) pf.degree = Integer(d["degree"], "/defaults/degree", 0);
    if (d.contains("epsilon")) {
      pf.epsilon = Number(d["epsilon"], "/defaults/epsilon", pf.constants);
      if (!(pf.epsilon >= 0.0)) throw SchemaError("/defaults/epsilon", "must be >= 0");
    }
    if (d.contains("multiplier_degree")) {
      pf.multiplier_degree = Integer(d["multiplier_degree"], "/defaults/multiplier_degree", 0);
    }
  }

  try {
    sys.Validate();
  } catch (const std::invalid_argument& e) {
    throw SchemaError("", e.what());
  }
  return pf;
}

Json ReadJson(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("", "cannot read " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw SchemaError("", path.string() + ": " + e.what());
  }
}

ProblemFile LoadProblem(const std::filesystem::path& path,
                        const polyalg::ConstantTable& overrides) {
  return ParseProblem(ReadJson(path), overrides);
}

}  // namespace hlpv::cli
