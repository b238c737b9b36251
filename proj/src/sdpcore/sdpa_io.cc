#include "hlpv/sdpcore/sdpa_io.h"

#include <algorithm>
#include <charconv>
#include <map>
#include <tuple>
#include <vector>

namespace hlpv::sdpcore {

namespace {

constexpr std::string_view kFeasibilityComment = "* hlpv feasibility";

std::string Num(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

struct Quint {
  int mat, blk, i, j;
  double v;
};

}  // namespace

std::string ExportSdpa(const SdpProblem& in) {
  in.Validate();
  const SdpProblem p = Canonicalize(in);
  const int nb = p.num_blocks();
  const int free_block = p.num_free > 0 ? nb : -1;
  std::vector<Quint> q;
  for (const auto& e : p.objective) q.push_back({0, e.block, e.i, e.j, -e.value});
  for (int k = 0; k < static_cast<int>(p.objective_free.size()); ++k) {
    const double c = p.objective_free[k];
    if (c == 0.0) continue;
    q.push_back({0, free_block, k, k, -c});
    q.push_back({0, free_block, p.num_free + k, p.num_free + k, c});
  }
  for (int r = 0; r < p.num_rows(); ++r) {
    for (const auto& e : p.constraints[r].entries) {
      q.push_back({r + 1, e.block, e.i, e.j, e.value});
    }
    for (const auto& [k, v] : p.constraints[r].free) {
      q.push_back({r + 1, free_block, k, k, v});
      q.push_back({r + 1, free_block, p.num_free + k, p.num_free + k, -v});
    }
  }
  std::sort(q.begin(), q.end(), [](const Quint& a, const Quint& b) {
    return std::tie(a.mat, a.blk, a.i, a.j) < std::tie(b.mat, b.blk, b.i, b.j);
  });

  std::string out;
  if (p.sense == Sense::kFeasibility) {
    out += kFeasibilityComment;
    out += '\n';
  }
  out += std::to_string(p.num_rows()) + "\n";
  out += std::to_string(nb + (p.num_free > 0 ? 1 : 0)) + "\n";
  std::string sizes;
  for (int d : p.block_dims) sizes += (sizes.empty() ? "" : " ") + std::to_string(d);
  if (p.num_free > 0) {
    sizes += (sizes.empty() ? "" : " ") + std::to_string(-2 * p.num_free);
  }
  out += sizes + "\n";
  std::string rhs;
  for (const auto& c : p.constraints) rhs += (rhs.empty() ? "" : " ") + Num(c.rhs);
  out += rhs + "\n";
  for (const auto& e : q) {
    out += std::to_string(e.mat) + " " + std::to_string(e.blk + 1) + " " +
           std::to_string(e.i + 1) + " " + std::to_string(e.j + 1) + " " + Num(e.v) +
           "\n";
  }
  return out;
}

namespace {

struct Token {
  std::string_view text;
  int line, col;
};

class Tokens {
 public:
  explicit Tokens(std::string_view text) {
    int line = 1;
    size_t pos = 0;
    bool header = true;
    while (pos < text.size()) {
      size_t nl = text.find('\n', pos);
      if (nl == std::string_view::npos) nl = text.size();
      std::string_view l = text.substr(pos, nl - pos);
      const bool comment = !l.empty() && (l[0] == '*' || l[0] == '"');
      if (comment && header) {
        if (l.substr(0, kFeasibilityComment.size()) == kFeasibilityComment) {
          feasibility_ = true;
        }
      } else {
        header = false;
        size_t i = 0;
        while (i < l.size()) {
          while (i < l.size() && IsSep(l[i])) ++i;
          const size_t b = i;
          while (i < l.size() && !IsSep(l[i])) ++i;
          if (i > b) toks_.push_back({l.substr(b, i - b), line, static_cast<int>(b) + 1});
        }
      }
      pos = nl + 1;
      ++line;
    }
    end_line_ = line;
  }

  bool feasibility() const { return feasibility_; }
  bool done() const { return at_ >= toks_.size(); }
  const Token& peek() const { return toks_[at_]; }

  int Int(const char* what) {
    const Token& t = Next(what);
    int v = 0;
    std::string_view s = t.text;
    if (!s.empty() && s[0] == '+') s.remove_prefix(1);
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
      throw SdpaParseError(t.line, t.col, std::string("expected integer ") + what);
    }
    return v;
  }

  double Real(const char* what) {
    const Token& t = Next(what);
    double v = 0.0;
    std::string_view s = t.text;
    if (!s.empty() && s[0] == '+') s.remove_prefix(1);
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
      throw SdpaParseError(t.line, t.col, std::string("expected number ") + what);
    }
    return v;
  }

  const Token& last() const { return toks_[at_ - 1]; }

 private:
  static bool IsSep(char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '{' || c == '}' || c == '(' ||
           c == ')' || c == ',';
  }
  const Token& Next(const char* what) {
    if (done()) {
      throw SdpaParseError(end_line_, 1, std::string("unexpected end of input, expected ") + what);
    }
    return toks_[at_++];
  }

  std::vector<Token> toks_;
  size_t at_{0};
  int end_line_{1};
  bool feasibility_{false};
};

}  // namespace

SdpProblem ImportSdpa(std::string_view text) {
  Tokens tk(text);
  const int m = tk.Int("(number of constraints)");
  if (m < 0) throw SdpaParseError(tk.last().line, tk.last().col, "negative constraint count");
  const int nblk = tk.Int("(number of blocks)");
  if (nblk < 0) throw SdpaParseError(tk.last().line, tk.last().col, "negative block count");
  std::vector<int> sizes(nblk);
  for (int k = 0; k < nblk; ++k) {
    sizes[k] = tk.Int("(block size)");
    if (sizes[k] == 0) throw SdpaParseError(tk.last().line, tk.last().col, "zero block size");
  }
  std::vector<double> c(m);
  for (int r = 0; r < m; ++r) c[r] = tk.Real("(objective coefficient)");

  std::vector<Quint> q;
  while (!tk.done()) {
    const Token start = tk.peek();
    Quint e;
    e.mat = tk.Int("(matrix number)");
    e.blk = tk.Int("(block number)") - 1;
    e.i = tk.Int("(row index)") - 1;
    e.j = tk.Int("(column index)") - 1;
    e.v = tk.Real("(value)");
    if (e.mat < 0 || e.mat > m) throw SdpaParseError(start.line, start.col, "matrix number out of range");
    if (e.blk < 0 || e.blk >= nblk) throw SdpaParseError(start.line, start.col, "block number out of range");
    const int dim = std::abs(sizes[e.blk]);
    if (e.i < 0 || e.j < 0 || e.i >= dim || e.j >= dim) {
      throw SdpaParseError(start.line, start.col, "index out of range");
    }
    if (e.i > e.j) std::swap(e.i, e.j);
    if (sizes[e.blk] < 0 && e.i != e.j) {
      throw SdpaParseError(start.line, start.col, "off-diagonal entry in diagonal block");
    }
    q.push_back(e);
  }

  // A trailing even diagonal block whose entries come in (k, p+k) pairs with
  // opposite values holds free variables.
  int free_blk = -1, p = 0;
  if (nblk > 0 && sizes[nblk - 1] < 0 && sizes[nblk - 1] % 2 == 0) {
    const int last = nblk - 1;
    p = -sizes[last] / 2;
    std::map<std::pair<int, int>, double> pos, neg;
    bool ok = true;
    for (const auto& e : q) {
      if (e.blk != last) continue;
      auto& slot = e.i < p ? pos : neg;
      const auto key = std::make_pair(e.mat, e.i % p);
      if (slot.count(key)) ok = false;
      slot[key] += e.v;
    }
    if (ok && pos.size() == neg.size()) {
      for (const auto& [key, v] : pos) {
        const auto it = neg.find(key);
        if (it == neg.end() || it->second != -v) {
          ok = false;
          break;
        }
      }
    } else {
      ok = false;
    }
    if (ok) free_blk = last;
  }

  SdpProblem prob;
  prob.sense = tk.feasibility() ? Sense::kFeasibility : Sense::kMinimize;
  std::vector<int> first(nblk, -1);
  for (int k = 0; k < nblk; ++k) {
    if (k == free_blk) continue;
    first[k] = prob.num_blocks();
    if (sizes[k] > 0) {
      prob.block_dims.push_back(sizes[k]);
    } else {
      prob.block_dims.insert(prob.block_dims.end(), -sizes[k], 1);
    }
  }
  prob.num_free = free_blk >= 0 ? p : 0;
  prob.constraints.resize(m);
  for (int r = 0; r < m; ++r) prob.constraints[r].rhs = c[r];
  std::vector<double> cf(prob.num_free, 0.0);
  for (const auto& e : q) {
    if (e.blk == free_blk) {
      if (e.i >= p) continue;
      if (e.mat == 0) {
        cf[e.i] -= e.v;
      } else {
        prob.constraints[e.mat - 1].free.emplace_back(e.i, e.v);
      }
      continue;
    }
    BlockEntry be = sizes[e.blk] > 0 ? BlockEntry{first[e.blk], e.i, e.j, e.v}
                                     : BlockEntry{first[e.blk] + e.i, 0, 0, e.v};
    if (e.mat == 0) {
      be.value = -be.value;
      prob.objective.push_back(be);
    } else {
      prob.constraints[e.mat - 1].entries.push_back(be);
    }
  }
  prob.objective_free = cf;
  return Canonicalize(prob);
}

}  // namespace hlpv::sdpcore
