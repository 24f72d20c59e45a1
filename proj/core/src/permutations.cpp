#include "qgi/permutations.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

#include "qgi/error.hpp"

namespace qgi {

namespace {

constexpr int kMaxOrder = 8;

void require_order(int n) {
  if (n < 1) throw DomainError("permutation order must be >= 1");
  if (n > kMaxOrder) {
    throw DomainError("refusing to enumerate " + std::to_string(n) + "! terms (limit n <= 8)");
  }
}

std::vector<int> cycle_lengths(const std::vector<int>& perm) {
  std::vector<int> lengths;
  std::vector<bool> seen(perm.size(), false);
  for (std::size_t s = 0; s < perm.size(); ++s) {
    if (seen[s]) continue;
    int len = 0;
    for (std::size_t r = s; !seen[r]; r = static_cast<std::size_t>(perm[r])) {
      seen[r] = true;
      ++len;
    }
    lengths.push_back(len);
  }
  std::sort(lengths.begin(), lengths.end(), std::greater<>());
  return lengths;
}

}  // namespace

const char* to_string(CycleClass c) {
  switch (c) {
    case CycleClass::Identity:
      return "identity";
    case CycleClass::FullCycle:
      return "full_cycle";
    case CycleClass::Other:
      return "other";
  }
  return "other";
}

std::vector<PermutationTerm> permutation_sum_terms(int n) {
  require_order(n);
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<PermutationTerm> terms;
  do {
    PermutationTerm t;
    t.image = perm;
    t.cycle_type = cycle_lengths(perm);
    if (static_cast<int>(t.cycle_type.size()) == n) {
      t.tag = CycleClass::Identity;
    } else if (t.cycle_type.size() == 1) {
      t.tag = CycleClass::FullCycle;
    } else {
      t.tag = CycleClass::Other;
    }
    terms.push_back(std::move(t));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return terms;
}

std::vector<SetPartition> set_partitions(int n) {
  require_order(n);
  std::vector<SetPartition> out;
  std::vector<int> rgs(static_cast<std::size_t>(n), 0);
  std::function<void(int, int)> grow = [&](int r, int used) {
    if (r == n) {
      out.push_back({rgs, used});
      return;
    }
    for (int b = 0; b <= used; ++b) {
      rgs[static_cast<std::size_t>(r)] = b;
      grow(r + 1, std::max(used, b + 1));
    }
  };
  rgs[0] = 0;
  grow(1, 1);
  return out;
}

double mobius_to_top(const SetPartition& p) {
  double fact = 1.0;
  for (int i = 2; i < p.blocks; ++i) fact *= i;
  return (p.blocks % 2 == 1 ? 1.0 : -1.0) * fact;
}

bool preserves_blocks(const std::vector<int>& perm, const SetPartition& p) {
  for (std::size_t r = 0; r < perm.size(); ++r) {
    if (p.block[r] != p.block[static_cast<std::size_t>(perm[r])]) return false;
  }
  return true;
}

}  // namespace qgi
