#ifndef CSB_ACTION_H_
#define CSB_ACTION_H_

#include <cstdint>
#include <string>
#include <vector>

namespace csb {

// A combinatorial decision: a subset of the arms [0, K), kept both as a
// sorted arm list and as a 0/1 incidence vector.
class Action {
 public:
  Action() = default;
  // Arms must be distinct and lie in [0, num_arms); throws kInvalidArm.
  Action(int num_arms, std::vector<int> arms);
  static Action FromBits(const std::vector<std::uint8_t>& bits);

  int num_arms() const { return static_cast<int>(bits_.size()); }
  int size() const { return static_cast<int>(arms_.size()); }
  const std::vector<int>& arms() const { return arms_; }
  const std::vector<std::uint8_t>& bits() const { return bits_; }
  bool contains(int arm) const { return bits_[arm] != 0; }

  // Inner product with a reward vector.
  double Payoff(const std::vector<double>& rewards) const;

  // "0;3;5"
  std::string ToString() const;

  friend bool operator==(const Action& a, const Action& b) {
    return a.bits_ == b.bits_;
  }
  // Lexicographic order on sorted arm lists.
  friend bool operator<(const Action& a, const Action& b) {
    return a.arms_ < b.arms_;
  }

 private:
  std::vector<int> arms_;
  std::vector<std::uint8_t> bits_;
};

}  // namespace csb

#endif  // CSB_ACTION_H_
