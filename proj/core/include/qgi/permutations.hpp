#pragma once

#include <string>
#include <vector>

namespace qgi {

enum class CycleClass { Identity, FullCycle, Other };

const char* to_string(CycleClass c);

struct PermutationTerm {
  std::vector<int> image;       ///< image[r] = P(r), zero-based
  CycleClass tag = CycleClass::Other;
  std::vector<int> cycle_type;  ///< cycle lengths, descending
};

/// All n! permutations of {0..n-1} in lexicographic order. Refuses n > 8.
std::vector<PermutationTerm> permutation_sum_terms(int n);

/// Set partition of {0..n-1} as a restricted growth string: block[r] is the
/// block of element r, blocks numbered in order of their smallest element.
struct SetPartition {
  std::vector<int> block;
  int blocks = 0;
};

/// Every set partition of {0..n-1} (Bell(n) of them). Refuses n > 8.
std::vector<SetPartition> set_partitions(int n);

/// Moebius function mu(pi, top) of the partition lattice: (-1)^(k-1) (k-1)!.
double mobius_to_top(const SetPartition& p);

/// True when the permutation maps every block of `p` onto itself.
bool preserves_blocks(const std::vector<int>& perm, const SetPartition& p);

}  // namespace qgi
