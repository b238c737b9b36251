#include "hlpv/polyalg/var_env.h"

#include <stdexcept>

namespace hlpv::polyalg {

VarEnv VarEnv::Standard(int num_params, bool with_sigma) {
  VarEnv env;
  env.Add("t", VarKind::kClock);
  for (int i = 1; i <= num_params; ++i) {
    env.Add("p" + std::to_string(i), VarKind::kParameter);
  }
  for (int i = 1; i <= num_params; ++i) {
    env.Add("q" + std::to_string(i), VarKind::kCopyParameter);
  }
  if (with_sigma) env.Add("s", VarKind::kClock);
  return env;
}

VarId VarEnv::Add(std::string name, VarKind kind) {
  if (Find(name)) {
    throw std::invalid_argument("duplicate variable name '" + name + "'");
  }
  names_.push_back(std::move(name));
  kinds_.push_back(kind);
  return {size() - 1, kind};
}

std::optional<VarId> VarEnv::Find(std::string_view name) const {
  for (int i = 0; i < size(); ++i) {
    if (names_[i] == name) return VarId{i, kinds_[i]};
  }
  return std::nullopt;
}

VarId VarEnv::Get(std::string_view name) const {
  auto found = Find(name);
  if (!found) {
    throw std::out_of_range("unknown variable '" + std::string(name) + "'");
  }
  return *found;
}

std::vector<int> VarEnv::OfKind(VarKind kind) const {
  std::vector<int> out;
  for (int i = 0; i < size(); ++i) {
    if (kinds_[i] == kind) out.push_back(i);
  }
  return out;
}

}  // namespace hlpv::polyalg
