#include "csb/action.h"

#include <algorithm>

#include "csb/error.h"

namespace csb {

Action::Action(int num_arms, std::vector<int> arms)
    : arms_(std::move(arms)), bits_(num_arms, 0) {
  std::sort(arms_.begin(), arms_.end());
  for (std::size_t i = 0; i < arms_.size(); ++i) {
    const int a = arms_[i];
    if (a < 0 || a >= num_arms) {
      throw Error(ErrorCode::kInvalidArm,
                  "arm " + std::to_string(a) + " outside [0, " +
                      std::to_string(num_arms) + ")");
    }
    if (i > 0 && arms_[i - 1] == a) {
      throw Error(ErrorCode::kInvalidArm,
                  "duplicate arm " + std::to_string(a) + " in action");
    }
    bits_[a] = 1;
  }
}

Action Action::FromBits(const std::vector<std::uint8_t>& bits) {
  Action action;
  action.bits_.assign(bits.size(), 0);
  for (std::size_t a = 0; a < bits.size(); ++a) {
    if (bits[a]) {
      action.bits_[a] = 1;
      action.arms_.push_back(static_cast<int>(a));
    }
  }
  return action;
}

double Action::Payoff(const std::vector<double>& rewards) const {
  double total = 0.0;
  for (int a : arms_) total += rewards[a];
  return total;
}

std::string Action::ToString() const {
  std::string out;
  for (std::size_t i = 0; i < arms_.size(); ++i) {
    if (i > 0) out += ';';
    out += std::to_string(arms_[i]);
  }
  return out;
}

}  // namespace csb
