#include "hlpv/cli/result_file.h"

#include <set>

namespace hlpv::cli {

using lpvcert::Certificate;
using lpvcert::PolyMatrix;
using polyalg::Monomial;

namespace {

std::string Child(const std::string& ptr, std::string_view key) {
  return ptr + "/" + std::string(key);
}

const Json& Field(const Json& obj, const std::string& ptr, const char* key) {
  if (!obj.is_object()) throw SchemaError(ptr, "expected an object");
  if (!obj.contains(key)) throw SchemaError(Child(ptr, key), "required key is missing");
  return obj.at(key);
}

double NumberField(const Json& obj, const std::string& ptr, const char* key) {
  const Json& v = Field(obj, ptr, key);
  if (!v.is_number()) throw SchemaError(Child(ptr, key), "expected a number");
  return v.get<double>();
}

int IntField(const Json& obj, const std::string& ptr, const char* key, int min) {
  const Json& v = Field(obj, ptr, key);
  if (!v.is_number_integer() || v.get<long long>() < min || v.get<long long>() > 1000000) {
    throw SchemaError(Child(ptr, key), "expected an integer >= " + std::to_string(min));
  }
  return v.get<int>();
}

}  // namespace

Json MatrixToJson(const PolyMatrix& m) {
  std::set<Monomial, polyalg::GradedLexLess> monos;
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      for (const auto& [mono, c] : m(i, j).terms()) monos.insert(mono);
    }
  }
  const std::vector<Monomial> basis(monos.begin(), monos.end());
  Json jb = Json::array();
  for (const auto& mono : basis) {
    jb.push_back(std::vector<int>(mono.exponents().begin(), mono.exponents().end()));
  }
  Json coeffs = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < m.cols(); ++j) {
      Json entry = Json::array();
      for (const auto& mono : basis) entry.push_back(m(i, j).coefficient(mono));
      row.push_back(std::move(entry));
    }
    coeffs.push_back(std::move(row));
  }
  return {{"rows", m.rows()},
          {"cols", m.cols()},
          {"symmetric", m.symmetric()},
          {"basis", std::move(jb)},
          {"coefficients", std::move(coeffs)}};
}

PolyMatrix MatrixFromJson(const Json& j, const std::string& ptr, int arity) {
  const int rows = IntField(j, ptr, "rows", 1);
  const int cols = IntField(j, ptr, "cols", 1);
  const Json& sym = Field(j, ptr, "symmetric");
  if (!sym.is_boolean()) throw SchemaError(Child(ptr, "symmetric"), "expected a boolean");
  const Json& jb = Field(j, ptr, "basis");
  if (!jb.is_array()) throw SchemaError(Child(ptr, "basis"), "expected an array");
  std::vector<Monomial> basis;
  for (size_t k = 0; k < jb.size(); ++k) {
    const std::string bp = Child(ptr, "basis") + "/" + std::to_string(k);
    const Json& e = jb[k];
    if (!e.is_array() || static_cast<int>(e.size()) != arity) {
      throw SchemaError(bp, "expected " + std::to_string(arity) + " exponents");
    }
    std::vector<int> exps;
    for (const auto& x : e) {
      if (!x.is_number_integer() || x.get<int>() < 0) {
        throw SchemaError(bp, "exponents must be nonnegative integers");
      }
      exps.push_back(x.get<int>());
    }
    basis.emplace_back(std::move(exps));
  }
  const Json& coeffs = Field(j, ptr, "coefficients");
  const std::string cp = Child(ptr, "coefficients");
  if (!coeffs.is_array() || static_cast<int>(coeffs.size()) != rows) {
    throw SchemaError(cp, "expected " + std::to_string(rows) + " rows");
  }
  PolyMatrix out(rows, cols, arity);
  for (int r = 0; r < rows; ++r) {
    const std::string rp = cp + "/" + std::to_string(r);
    if (!coeffs[r].is_array() || static_cast<int>(coeffs[r].size()) != cols) {
      throw SchemaError(rp, "expected " + std::to_string(cols) + " columns");
    }
    for (int c = 0; c < cols; ++c) {
      const std::string ep = rp + "/" + std::to_string(c);
      const Json& entry = coeffs[r][c];
      if (!entry.is_array() || entry.size() != basis.size()) {
        throw SchemaError(ep, "expected one coefficient per basis monomial");
      }
      for (size_t k = 0; k < basis.size(); ++k) {
        if (!entry[k].is_number()) {
          throw SchemaError(ep + "/" + std::to_string(k), "expected a number");
        }
        out(r, c).AddTerm(basis[k], entry[k].get<double>());
      }
    }
  }
  out.set_symmetric(sym.get<bool>());
  if (out.symmetric() && !out.IsSymmetric()) {
    throw SchemaError(cp, "matrix marked symmetric is not");
  }
  return out;
}

Json CertificateToJson(const Certificate& cert, const polyalg::VarEnv& names) {
  Json vars = Json::array();
  for (int i = 0; i < names.size(); ++i) vars.push_back(names.name(i));
  Json j = {{"mode", lpvcert::ModeName(cert.mode)},
            {"degree", cert.degree},
            {"epsilon", cert.epsilon},
            {"dwell", cert.dwell},
            {"tmin", cert.tmin},
            {"tmax", cert.tmax},
            {"box1_verbatim", cert.box1_verbatim},
            {"size", cert.size},
            {"variables", std::move(vars)}};
  if (lpvcert::IsSynthesis(cert.mode)) {
    j["R"] = MatrixToJson(cert.R);
    j["U"] = MatrixToJson(cert.U);
  } else {
    j["S"] = MatrixToJson(cert.S);
  }
  return j;
}

Certificate CertificateFromJson(const Json& j, const std::string& ptr,
                                const polyalg::VarEnv& names) {
  Certificate c;
  const Json& mode = Field(j, ptr, "mode");
  const auto parsed = mode.is_string() ? lpvcert::ParseMode(mode.get<std::string>())
                                       : std::nullopt;
  if (!parsed) throw SchemaError(Child(ptr, "mode"), "unknown mode");
  c.mode = *parsed;
  c.degree = IntField(j, ptr, "degree", 0);
  c.epsilon = NumberField(j, ptr, "epsilon");
  c.dwell = NumberField(j, ptr, "dwell");
  c.tmin = NumberField(j, ptr, "tmin");
  c.tmax = NumberField(j, ptr, "tmax");
  const Json& verbatim = Field(j, ptr, "box1_verbatim");
  if (!verbatim.is_boolean()) throw SchemaError(Child(ptr, "box1_verbatim"), "expected a boolean");
  c.box1_verbatim = verbatim.get<bool>();
  c.size = IntField(j, ptr, "size", 1);

  const Json& vars = Field(j, ptr, "variables");
  bool same = vars.is_array() && static_cast<int>(vars.size()) == names.size();
  for (int i = 0; same && i < names.size(); ++i) {
    same = vars[i].is_string() && vars[i].get<std::string>() == names.name(i);
  }
  if (!same) throw SchemaError(Child(ptr, "variables"), "does not match the problem variables");

  auto square = [&](const char* key) {
    PolyMatrix m = MatrixFromJson(Field(j, ptr, key), Child(ptr, key), names.size());
    if (m.rows() != c.size || m.cols() != c.size || !m.symmetric()) {
      throw SchemaError(Child(ptr, key), "expected a symmetric matrix of the certificate size");
    }
    return m;
  };
  if (lpvcert::IsSynthesis(c.mode)) {
    c.R = square("R");
    c.U = MatrixFromJson(Field(j, ptr, "U"), Child(ptr, "U"), names.size());
    if (c.U.cols() != c.size) throw SchemaError(Child(ptr, "U"), "column count must equal size");
  } else {
    c.S = square("S");
  }
  return c;
}

Json StatsToJson(const lpvcert::CertifyResult& r) {
  return {{"status", sdpcore::StatusName(r.status)},
          {"margin", r.margin},
          {"iterations", r.iterations},
          {"primal_residual", r.primal_residual},
          {"dual_residual", r.dual_residual},
          {"seconds", r.seconds},
          {"rows", r.stats.rows},
          {"blocks", r.stats.blocks},
          {"max_block", r.stats.max_block},
          {"free_vars", r.stats.free_vars},
          {"primal_vars", r.stats.primal_vars},
          {"message", r.message}};
}

Json ProbesToJson(const std::vector<lpvcert::Probe>& probes) {
  Json out = Json::array();
  for (const auto& p : probes) {
    out.push_back({{"dwell", p.dwell},
                   {"status", sdpcore::StatusName(p.status)},
                   {"margin", p.margin},
                   {"seconds", p.seconds}});
  }
  return out;
}

Json GridReportToJson(const lpvcert::GridReport& rep, const lpvcert::GridSpec& spec) {
  Json conds = Json::array();
  for (const auto& c : rep.conditions) {
    conds.push_back({{"name", c.name},
                     {"max_eig", c.max_eig},
                     {"worst_point", c.worst_point},
                     {"evaluations", c.evaluations},
                     {"pass", c.pass}});
  }
  return {{"pass", rep.pass},
          {"points", spec.points},
          {"sigma_points", spec.sigma_points},
          {"tol", spec.tol},
          {"min_eig", rep.min_eig},
          {"min_eig_point", rep.min_eig_point},
          {"min_eig_threshold", rep.min_eig_threshold},
          {"conditions", std::move(conds)}};
}

ResultFile ParseResult(const Json& doc) {
  ResultFile r;
  r.doc = doc;
  const Json& command = Field(doc, "", "command");
  if (!command.is_string()) throw SchemaError("/command", "expected a string");
  r.command = command.get<std::string>();
  const Json& status = Field(doc, "", "status");
  if (!status.is_string()) throw SchemaError("/status", "expected a string");
  r.status = status.get<std::string>();
  try {
    r.problem = ParseProblem(Field(doc, "", "problem"));
  } catch (const SchemaError& e) {
    // Re-root problem errors under /problem.
    const std::string msg = e.what();
    throw SchemaError("/problem" + e.pointer(), msg.substr(msg.find(": ") + 2));
  }
  if (doc.contains("certificate") && !doc["certificate"].is_null()) {
    r.certificate = CertificateFromJson(doc["certificate"], "/certificate", r.problem.names);
  }
  return r;
}

ResultFile LoadResult(const std::filesystem::path& path) { return ParseResult(ReadJson(path)); }

int ExitCodeForStatus(std::string_view status) {
  if (status == "feasible" || status == "pass" || status == "success") return 0;
  if (status == "infeasible" || status == "fail") return 1;
  return 2;
}

}  // namespace hlpv::cli
