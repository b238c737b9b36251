#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "hlpv/lpvcert/lpv_system.h"

namespace hlpv::cli {

using Json = nlohmann::json;

/// Invalid problem or result document; `pointer()` is the JSON pointer of
/// the offending value.
class SchemaError : public std::runtime_error {
 public:
  SchemaError(std::string pointer, const std::string& message);
  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

/// Validated problem document.
///
///     {"name": str, "n": int, "m": int,
///      "params": [{"name", "min", "max"}],
///      "constants": {name: number},
///      "generators": [poly], "equalities": [poly], "box_generators": bool,
///      "derivative": {"box": [ν | [lo, hi]]} | {"vertices": [[poly]]},
///      "A": [[poly]], "B": [[poly]], "J": [[poly]],
///      "defaults": {"degree", "epsilon", "multiplier_degree"}}
///
/// Polynomials are strings over the declared parameter names and constants.
/// Bounds and box entries may be numbers or constant expressions.
struct ProblemFile {
  /// The document with constant overrides applied.
  Json source;
  std::string name;
  std::vector<std::string> param_names;
  polyalg::ConstantTable constants;
  /// System environment with the parameter slots renamed to param_names.
  polyalg::VarEnv names;
  lpvcert::LpvSystem system;
  int degree{2};
  double epsilon{0.01};
  int multiplier_degree{-1};
};

/// Validates and builds the problem. `overrides` replace declared constants;
/// an unknown override name is a schema error at /constants.
ProblemFile ParseProblem(const Json& doc, const polyalg::ConstantTable& overrides = {});

/// Reads and parses a file. Throws SchemaError with pointer "" when the file
/// is unreadable or not JSON.
Json ReadJson(const std::filesystem::path& path);
ProblemFile LoadProblem(const std::filesystem::path& path,
                        const polyalg::ConstantTable& overrides = {});

}  // namespace hlpv::cli
