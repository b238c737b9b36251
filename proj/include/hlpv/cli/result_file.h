#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "hlpv/cli/problem_file.h"
#include "hlpv/lpvcert/bisection.h"
#include "hlpv/lpvcert/certify.h"
#include "hlpv/lpvcert/grid_check.h"

namespace hlpv::cli {

/// Polynomial matrix as coefficient lists against an explicit monomial
/// basis in graded-lex order:
///
///     {"rows", "cols", "symmetric", "basis": [[exponents]],
///      "coefficients": [[[c per basis monomial]]]}
Json MatrixToJson(const lpvcert::PolyMatrix& m);
lpvcert::PolyMatrix MatrixFromJson(const Json& j, const std::string& ptr, int arity);

/// Certificate with its options and the variable names of `names`, which
/// must match on reading.
Json CertificateToJson(const lpvcert::Certificate& cert, const polyalg::VarEnv& names);
lpvcert::Certificate CertificateFromJson(const Json& j, const std::string& ptr,
                                         const polyalg::VarEnv& names);

Json StatsToJson(const lpvcert::CertifyResult& r);
Json ProbesToJson(const std::vector<lpvcert::Probe>& probes);
Json GridReportToJson(const lpvcert::GridReport& rep, const lpvcert::GridSpec& spec);

/// Result document:
///
///     {"command", "status", "message", "problem": <problem document>,
///      "options", "dwell", "bisection", "certificate", "gain",
///      "solver", "grid_check", ...}
///
/// Only command, status and problem are always present.
struct ResultFile {
  Json doc;
  std::string command;
  std::string status;
  ProblemFile problem;
  std::optional<lpvcert::Certificate> certificate;
};

ResultFile ParseResult(const Json& doc);
ResultFile LoadResult(const std::filesystem::path& path);

/// 0 for feasible, pass and success; 1 for infeasible and fail; 2 for
/// marginal, numerical-failure and diverged.
int ExitCodeForStatus(std::string_view status);

}  // namespace hlpv::cli
