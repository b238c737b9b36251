#include "hlpv/hybridsim/trajectories.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace hlpv::hybridsim {

namespace {

void CheckHorizon(double horizon) {
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be > 0");
}

JumpSequence Generate(double lo, double hi, double horizon, std::uint64_t seed) {
  CheckHorizon(horizon);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> gap(lo, hi);
  JumpSequence s;
  s.horizon = horizon;
  double t = 0.0;
  while (true) {
    t += lo == hi ? lo : gap(rng);
    if (t >= horizon) {
      s.next = t;
      return s;
    }
    s.times.push_back(t);
  }
}

void CheckBox(const std::vector<double>& lo, const std::vector<double>& hi) {
  if (lo.size() != hi.size()) throw std::invalid_argument("bounds size mismatch");
  for (size_t i = 0; i < lo.size(); ++i) {
    if (!(lo[i] <= hi[i])) throw std::invalid_argument("empty parameter interval");
  }
}

}  // namespace

int JumpSequence::IntervalAt(double t) const {
  return static_cast<int>(std::upper_bound(times.begin(), times.end(), t) - times.begin());
}

JumpSequence MinDwellJumps(double dwell, double horizon, std::uint64_t seed, double spread) {
  if (!(dwell > 0.0)) throw std::invalid_argument("dwell time must be > 0");
  if (!(spread >= 0.0)) throw std::invalid_argument("spread must be >= 0");
  return Generate(dwell, dwell * (1.0 + spread), horizon, seed);
}

JumpSequence RangeDwellJumps(double tmin, double tmax, double horizon, std::uint64_t seed) {
  if (!(tmin > 0.0 && tmin <= tmax)) throw std::invalid_argument("need 0 < tmin <= tmax");
  return Generate(tmin, tmax, horizon, seed);
}

JumpSequence ExplicitJumps(std::vector<double> times, double horizon) {
  CheckHorizon(horizon);
  for (size_t k = 0; k < times.size(); ++k) {
    if (!(times[k] > 0.0 && times[k] < horizon)) {
      throw std::invalid_argument("jump instants must lie in (0, horizon)");
    }
    if (k > 0 && !(times[k] > times[k - 1])) {
      throw std::invalid_argument("jump instants must be strictly increasing");
    }
  }
  JumpSequence s;
  s.times = std::move(times);
  s.horizon = horizon;
  return s;
}

ParamTrajectory ParamTrajectory::Constant(std::vector<double> value) {
  ParamTrajectory p;
  p.kind_ = Kind::kConstant;
  p.dim_ = static_cast<int>(value.size());
  p.constant_ = std::move(value);
  return p;
}

ParamTrajectory ParamTrajectory::Sinusoid(std::vector<double> lo, std::vector<double> hi,
                                          double nu, double phase) {
  CheckBox(lo, hi);
  if (!(nu >= 0.0)) throw std::invalid_argument("nu must be >= 0");
  ParamTrajectory p;
  p.kind_ = Kind::kSinusoid;
  p.dim_ = static_cast<int>(lo.size());
  p.lo_ = std::move(lo);
  p.hi_ = std::move(hi);
  p.nu_ = nu;
  p.phases_ = {std::vector<double>(p.dim_, phase)};
  return p;
}

ParamTrajectory ParamTrajectory::PhaseJump(std::vector<double> lo, std::vector<double> hi,
                                           double nu, std::uint64_t seed, int intervals) {
  ParamTrajectory p = Sinusoid(std::move(lo), std::move(hi), nu, 0.0);
  p.kind_ = Kind::kPhaseJump;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  p.phases_.assign(std::max(intervals, 1), std::vector<double>(p.dim_));
  for (auto& row : p.phases_) {
    for (auto& v : row) v = phase(rng);
  }
  return p;
}

ParamTrajectory ParamTrajectory::Table(std::vector<double> times,
                                       std::vector<std::vector<double>> values) {
  if (times.empty() || times.size() != values.size()) {
    throw std::invalid_argument("table needs matching nonempty times and values");
  }
  for (size_t k = 1; k < times.size(); ++k) {
    if (!(times[k] > times[k - 1])) throw std::invalid_argument("table times must increase");
    if (values[k].size() != values[0].size()) throw std::invalid_argument("ragged table");
  }
  ParamTrajectory p;
  p.kind_ = Kind::kTable;
  p.dim_ = static_cast<int>(values[0].size());
  p.table_t_ = std::move(times);
  p.table_v_ = std::move(values);
  return p;
}

std::vector<double> ParamTrajectory::Value(double t, int interval) const {
  switch (kind_) {
    case Kind::kConstant:
      return constant_;
    case Kind::kSinusoid:
    case Kind::kPhaseJump: {
      const auto& phase =
          phases_[std::clamp<size_t>(interval, 0, phases_.size() - 1)];
      std::vector<double> out(dim_);
      for (int i = 0; i < dim_; ++i) {
        const double w = hi_[i] - lo_[i];
        out[i] = w == 0.0 ? lo_[i]
                          : lo_[i] + w * 0.5 * (1.0 + std::sin(2.0 * nu_ * t / w + phase[i]));
      }
      return out;
    }
    case Kind::kTable: {
      if (t <= table_t_.front()) return table_v_.front();
      if (t >= table_t_.back()) return table_v_.back();
      const size_t k = std::upper_bound(table_t_.begin(), table_t_.end(), t) - table_t_.begin();
      const double a = (t - table_t_[k - 1]) / (table_t_[k] - table_t_[k - 1]);
      std::vector<double> out(dim_);
      for (int i = 0; i < dim_; ++i) {
        out[i] = (1.0 - a) * table_v_[k - 1][i] + a * table_v_[k][i];
      }
      return out;
    }
  }
  return {};
}

}  // namespace hlpv::hybridsim
