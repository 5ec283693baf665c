#pragma once

#include <optional>
#include <vector>

namespace rvdse {

// Strict round-robin: the search starts one past the last grant.
class RoundRobinArbiter {
 public:
  explicit RoundRobinArbiter(unsigned n = 1) : n_(n) {}

  unsigned size() const { return n_; }
  void resize(unsigned n) {
    n_ = n;
    last_ = n ? n - 1 : 0;
  }

  template <typename Pred>
  std::optional<unsigned> pick(Pred requesting) {
    for (unsigned k = 1; k <= n_; ++k) {
      const unsigned i = (last_ + k) % n_;
      if (requesting(i)) {
        last_ = i;
        return i;
      }
    }
    return std::nullopt;
  }

  std::optional<unsigned> pick(const std::vector<bool>& requesting) {
    return pick([&](unsigned i) { return i < requesting.size() && requesting[i]; });
  }

 private:
  unsigned n_;
  unsigned last_ = n_ ? n_ - 1 : 0;
};

}  // namespace rvdse
