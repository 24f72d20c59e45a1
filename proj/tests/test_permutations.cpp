#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "qgi/error.hpp"
#include "qgi/permutations.hpp"

using namespace qgi;

namespace {

std::vector<int> cycle_lengths(const std::vector<int>& perm) {
  std::vector<bool> seen(perm.size(), false);
  std::vector<int> out;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    if (seen[i]) continue;
    int len = 0;
    for (std::size_t j = i; !seen[j]; j = static_cast<std::size_t>(perm[j])) {
      seen[j] = true;
      ++len;
    }
    out.push_back(len);
  }
  std::sort(out.rbegin(), out.rend());
  return out;
}

// Brute-force oracle: all permutations by std::next_permutation.
std::map<std::vector<int>, int> brute_cycle_counts(int n) {
  std::vector<int> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  std::map<std::vector<int>, int> counts;
  do {
    ++counts[cycle_lengths(p)];
  } while (std::next_permutation(p.begin(), p.end()));
  return counts;
}

}  // namespace

TEST(Permutations, CountsMatchBruteForce) {
  for (int n = 1; n <= 6; ++n) {
    const auto terms = permutation_sum_terms(n);
    std::set<std::vector<int>> distinct;
    std::map<std::vector<int>, int> counts;
    for (const auto& t : terms) {
      distinct.insert(t.image);
      ++counts[t.cycle_type];
      EXPECT_EQ(t.cycle_type, cycle_lengths(t.image));
    }
    EXPECT_EQ(distinct.size(), terms.size());
    EXPECT_EQ(counts, brute_cycle_counts(n)) << "n=" << n;
  }
}

TEST(Permutations, FactorialSizeAndLexicographicOrder) {
  std::size_t fact = 1;
  for (int n = 1; n <= 7; ++n) {
    fact *= static_cast<std::size_t>(n);
    const auto terms = permutation_sum_terms(n);
    EXPECT_EQ(terms.size(), fact);
    for (std::size_t i = 1; i < terms.size(); ++i) EXPECT_LT(terms[i - 1].image, terms[i].image);
  }
}

TEST(Permutations, SmallCases) {
  const auto two = permutation_sum_terms(2);
  ASSERT_EQ(two.size(), 2u);
  EXPECT_EQ(two[0].tag, CycleClass::Identity);
  EXPECT_EQ(two[1].tag, CycleClass::FullCycle);

  std::map<CycleClass, int> three;
  for (const auto& t : permutation_sum_terms(3)) ++three[t.tag];
  EXPECT_EQ(three[CycleClass::Identity], 1);
  EXPECT_EQ(three[CycleClass::FullCycle], 2);
  EXPECT_EQ(three[CycleClass::Other], 3);
}

TEST(Permutations, FourElementCycleTypes) {
  std::map<std::vector<int>, int> counts;
  for (const auto& t : permutation_sum_terms(4)) ++counts[t.cycle_type];
  EXPECT_EQ((counts[{1, 1, 1, 1}]), 1);
  EXPECT_EQ((counts[{2, 1, 1}]), 6);
  EXPECT_EQ((counts[{3, 1}]), 8);
  EXPECT_EQ((counts[{2, 2}]), 3);
  EXPECT_EQ((counts[{4}]), 6);
}

TEST(Permutations, RefusesLargeN) {
  EXPECT_THROW(permutation_sum_terms(9), Error);
  EXPECT_THROW(permutation_sum_terms(0), Error);
  EXPECT_THROW(set_partitions(9), Error);
}

TEST(SetPartitions, BellNumbersAndRestrictedGrowth) {
  const int bell[] = {1, 1, 2, 5, 15, 52, 203, 877, 4140};
  for (int n = 1; n <= 8; ++n) {
    const auto parts = set_partitions(n);
    EXPECT_EQ(static_cast<int>(parts.size()), bell[n]) << "n=" << n;
    for (const auto& p : parts) {
      int top = -1;
      for (int b : p.block) {
        EXPECT_LE(b, top + 1);
        top = std::max(top, b);
      }
      EXPECT_EQ(p.blocks, top + 1);
    }
  }
}

TEST(SetPartitions, MobiusSumsToZero) {
  // Sum over the lattice of mu(pi, top) vanishes for n >= 2.
  for (int n = 2; n <= 7; ++n) {
    double sum = 0.0;
    for (const auto& p : set_partitions(n)) sum += mobius_to_top(p);
    EXPECT_EQ(sum, 0.0) << "n=" << n;
  }
  SetPartition singletons{{0, 1, 2, 3}, 4};
  EXPECT_EQ(mobius_to_top(singletons), -6.0);
}

TEST(SetPartitions, MobiusInversionIsolatesFullCycles) {
  // sum_pi mu(pi, top) * #{perms preserving pi} counts permutations whose
  // cycles join everything into one block: the (n-1)! full cycles.
  for (int n = 1; n <= 6; ++n) {
    const auto terms = permutation_sum_terms(n);
    double total = 0.0;
    for (const auto& p : set_partitions(n)) {
      int preserving = 0;
      for (const auto& t : terms) preserving += preserves_blocks(t.image, p) ? 1 : 0;
      total += mobius_to_top(p) * preserving;
    }
    double fact = 1.0;
    for (int k = 2; k < n; ++k) fact *= k;
    EXPECT_EQ(total, fact) << "n=" << n;
  }
}
