#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "hlpv/sdpcore/sdp_problem.h"

namespace hlpv::sdpcore {

class SdpaParseError : public std::runtime_error {
 public:
  SdpaParseError(int line, int column, const std::string& what)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) +
                           ": " + what),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// SDPA sparse format (.dat-s). The problem maps onto the SDPA dual
///
///     max ⟨F0, Y⟩  s.t.  ⟨F_i, Y⟩ = c_i,  Y ⪰ 0
///
/// with c = b, F0 = −C, F_i = A_i and Y = X. Free variables are written as a
/// trailing diagonal block of size 2p holding x = x⁺ − x⁻, the coefficient of
/// x⁻ being the negated coefficient of x⁺. Feasibility problems carry the
/// comment line `* hlpv feasibility`. Output is canonical: entries sorted by
/// (matrix, block, i, j), numbers in shortest round-trip form.
std::string ExportSdpa(const SdpProblem& p);

/// Inverse of ExportSdpa. A trailing diagonal block whose entries pair up as
/// above becomes free variables; other diagonal blocks become 1×1 blocks.
/// Throws SdpaParseError with 1-based line and column.
SdpProblem ImportSdpa(std::string_view text);

}  // namespace hlpv::sdpcore
