#include <charconv>
#include <sstream>
#include <stdexcept>
#include <string>

#include "hlpv/sdpcore/solver.h"

namespace hlpv::sdpcore {

namespace {

std::string_view Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double ToDouble(std::string_view key, std::string_view v) {
  double out = 0.0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) {
    throw std::invalid_argument("bad value for " + std::string(key) + ": " + std::string(v));
  }
  return out;
}

int ToInt(std::string_view key, std::string_view v) {
  int out = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) {
    throw std::invalid_argument("bad value for " + std::string(key) + ": " + std::string(v));
  }
  return out;
}

bool ToBool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::invalid_argument("bad value for " + std::string(key) + ": " + std::string(v));
}

}  // namespace

SolverOptions ParseSolverOptions(std::string_view text, SolverOptions base) {
  SolverOptions o = base;
  size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    const size_t nl = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": expected key=value");
    }
    const std::string_view key = Trim(line.substr(0, eq));
    const std::string_view val = Trim(line.substr(eq + 1));
    if (key == "tol") {
      o.tol = ToDouble(key, val);
    } else if (key == "max_iter") {
      o.max_iter = ToInt(key, val);
    } else if (key == "margin_threshold") {
      o.margin_threshold = ToDouble(key, val);
    } else if (key == "trace_cap") {
      o.trace_cap = ToDouble(key, val);
    } else if (key == "step_fraction") {
      o.step_fraction = ToDouble(key, val);
    } else if (key == "early_stop") {
      o.early_stop = ToBool(key, val);
    } else if (key == "verbose") {
      o.verbose = ToBool(key, val);
    } else {
      throw std::invalid_argument("line " + std::to_string(line_no) +
                                  ": unknown option " + std::string(key));
    }
  }
  if (!(o.tol > 0.0) || o.max_iter < 1 || !(o.trace_cap > 0.0) ||
      !(o.step_fraction > 0.0 && o.step_fraction < 1.0) || !(o.margin_threshold >= 0.0)) {
    throw std::invalid_argument("solver option out of range");
  }
  return o;
}

std::string FormatSolverOptions(const SolverOptions& o) {
  std::ostringstream os;
  os.precision(17);
  os << "tol=" << o.tol << "\n"
     << "max_iter=" << o.max_iter << "\n"
     << "margin_threshold=" << o.margin_threshold << "\n"
     << "trace_cap=" << o.trace_cap << "\n"
     << "step_fraction=" << o.step_fraction << "\n"
     << "early_stop=" << (o.early_stop ? "true" : "false") << "\n"
     << "verbose=" << (o.verbose ? "true" : "false") << "\n";
  return os.str();
}

}  // namespace hlpv::sdpcore
