#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "test_support.hpp"

using namespace gtmc;
using gtmc::testing::items;
using gtmc::testing::worked_m;
using gtmc::testing::worked_missing;
using gtmc::testing::samples_of;

namespace {

ErasedSystem worked_system(bool with_third) {
  const auto m = worked_m();
  const auto mm = worked_missing();
  std::vector<InputVector> xs{items(12, {3, 4}), items(12, {3, 6})};
  if (with_third) xs.push_back(items(12, {2, 3}));
  return build_erased_system(mm, ErasureMap::of(mm), samples_of(m, xs));
}

/// Direct reading of the informativeness definition on trits.
bool informative_oracle(const MissingMatrix& mm, const InputVector& x, std::size_t i) {
  bool erased = false;
  for (std::size_t j = 0; j < mm.cols(); ++j) {
    if (!x.get(j)) continue;
    if (mm.get(i, j) == Trit::One) return false;
    if (mm.get(i, j) == Trit::Erased) erased = true;
  }
  return erased;
}

/// Per-entry backbone over all 2^r assignments: Zero/One if constant over
/// every consistent assignment, Unknown otherwise.
PsiEstimate backbone_oracle(const ErasedSystem& sys) {
  const std::size_t r = sys.r();
  std::uint64_t always = ~std::uint64_t{0}, ever = 0;
  bool any = false;
  for (std::uint64_t a = 0; a < (std::uint64_t{1} << r); ++a) {
    PsiVector psi(r);
    for (std::size_t g = 0; g < r; ++g) psi.set(g, (a >> g) & 1U);
    if (!satisfies(sys, psi)) continue;
    any = true;
    always &= a;
    ever |= a;
  }
  EXPECT_TRUE(any);
  PsiEstimate est(r, PsiState::Unknown);
  for (std::size_t g = 0; g < r; ++g) {
    if ((always >> g) & 1U) {
      est[g] = PsiState::One;
    } else if (!((ever >> g) & 1U)) {
      est[g] = PsiState::Zero;
    }
  }
  return est;
}

}  // namespace

// ---------------------------------------------------------------- informative pairs

TEST(Informative, WorkedPairs) {
  const auto mm = worked_missing();
  const auto x1 = items(12, {3, 4});
  const auto x2 = items(12, {3, 6});
  EXPECT_FALSE(is_informative(mm, x1, 0));
  EXPECT_TRUE(is_informative(mm, x1, 1));
  EXPECT_TRUE(is_informative(mm, x1, 4));
  EXPECT_TRUE(is_informative(mm, x1, 5));
  EXPECT_TRUE(is_informative(mm, x2, 4));
  // (x2, 2) hits the erased (2,3) but also the known 1 at (2,6).
  EXPECT_FALSE(is_informative(mm, x2, 1));
  std::size_t count = 0;
  for (const auto& x : {x1, x2}) {
    for (std::size_t i = 0; i < 9; ++i) count += is_informative(mm, x, i);
  }
  EXPECT_EQ(count, 4U);
}

TEST(Informative, EmptyInputNeverInformative) {
  const auto mm = worked_missing();
  for (std::size_t i = 0; i < 9; ++i) EXPECT_FALSE(is_informative(mm, InputVector(12), i));
}

TEST(Informative, RowWithoutErasureIsNotInformative) {
  // A fully known row is never informative, whatever x is.
  const auto mm = io::parse_missing_matrix("2 5\n0001*\n10101\n");
  EXPECT_FALSE(is_informative(mm, items(5, {1, 3}), 1));
  EXPECT_FALSE(is_informative(mm, items(5, {2}), 1));
  EXPECT_TRUE(is_informative(mm, items(5, {3, 5}), 0));
  EXPECT_FALSE(is_informative(mm, items(5, {4, 5}), 0));
}

TEST(Informative, MatchesDefinitionOnRandomPatterns) {
  RngStream r(21);
  for (int trial = 0; trial < 300; ++trial) {
    auto in = gtmc::testing::random_instance(r, 30, 15);
    for (const auto& x : in.samples.inputs) {
      for (std::size_t i = 0; i < in.m.rows(); ++i) {
        ASSERT_EQ(is_informative(in.er.missing, x, i), informative_oracle(in.er.missing, x, i));
      }
    }
  }
}

TEST(Signature, WorkedSignatures) {
  const auto mm = worked_missing();
  const auto map = ErasureMap::of(mm);
  EXPECT_EQ(signature(mm, map, items(12, {3, 4}), 1), (Signature{0, 1}));
  EXPECT_EQ(signature(mm, map, items(12, {3, 6}), 4), (Signature{2, 3}));
  EXPECT_EQ(signature(mm, map, items(12, {3, 4}), 5), (Signature{4}));
  EXPECT_THROW(signature(mm, map, items(12, {3, 4}), 0), PreconditionViolated);
}

// ---------------------------------------------------------------- construction

TEST(BuildSystem, WorkedGammaAndV) {
  const auto sys = worked_system(false);
  ASSERT_EQ(sys.h(), 4U);
  ASSERT_EQ(sys.r(), 5U);
  const auto g = sys.gamma();
  const std::vector<std::string> expected{"11000", "00100", "00001", "00110"};
  for (std::size_t k = 0; k < 4; ++k) EXPECT_EQ(g.row_vector(k).to_string(), expected[k]) << k;
  EXPECT_EQ(sys.v, (std::vector<std::uint8_t>{1, 0, 1, 0}));
}

TEST(BuildSystem, ThirdSampleAppendsRow) {
  const auto sys = worked_system(true);
  ASSERT_EQ(sys.h(), 5U);
  EXPECT_EQ(sys.gamma().row_vector(4).to_string(), "10000");
  EXPECT_EQ(sys.v, (std::vector<std::uint8_t>{1, 0, 1, 0, 0}));
  EXPECT_TRUE(satisfies(sys, PsiVector::from_string("01001")));
}

TEST(BuildSystem, WorkedDumpMatchesGolden) {
  EXPECT_EQ(io::write_system(worked_system(false)), gtmc::testing::fixture("worked_system2.txt"));
  EXPECT_EQ(io::parse_system(gtmc::testing::fixture("worked_system2.txt"), 9, 12).rows, worked_system(false).rows);
}

TEST(BuildSystem, EmptySamples) {
  const auto mm = worked_missing();
  const auto sys = build_erased_system(mm, ErasureMap::of(mm), SampleSet{});
  EXPECT_EQ(sys.h(), 0U);
  EXPECT_TRUE(sys.v.empty());
}

TEST(BuildSystem, ConflictingOutcomesRejected) {
  const auto m = worked_m();
  const auto mm = worked_missing();
  // Both inputs hit only the erased (2,4) on row 2, so they share a signature.
  auto s3 = samples_of(m, {items(12, {4, 8}), items(12, {4, 9})});
  s3.outcomes[1].set(1, !s3.outcomes[1].get(1));
  EXPECT_THROW(build_erased_system(mm, ErasureMap::of(mm), s3), InconsistentOutcome);
}

TEST(BuildSystem, MismatchedDimensions) {
  const auto mm = worked_missing();
  SampleSet bad;
  bad.inputs.push_back(InputVector(11));
  bad.outcomes.push_back(OutcomeVector(9));
  EXPECT_THROW(build_erased_system(mm, ErasureMap::of(mm), bad), DimensionMismatch);
}

TEST(BuildSystem, InvariantsOnRandomPipelines) {
  RngStream r(22);
  for (int trial = 0; trial < 500; ++trial) {
    auto in = gtmc::testing::random_instance(r, 30, 15);
    const auto sys = build_erased_system(in.er.missing, in.er.map, in.samples);
    ASSERT_TRUE(satisfies(sys, in.er.psi));
    std::set<Signature> seen;
    for (std::size_t k = 0; k < sys.h(); ++k) {
      const auto& row = sys.rows[k];
      ASSERT_FALSE(row.empty());
      ASSERT_TRUE(seen.insert(row).second);
      ASSERT_TRUE(std::ranges::is_sorted(row));
      for (auto z : row) ASSERT_EQ(sys.map[z].row, sys.source[k].test_row);
    }
  }
}

TEST(BuildSystem, RowCountMatchesDistinctSignatureOracle) {
  RngStream r(23);
  for (int trial = 0; trial < 300; ++trial) {
    auto in = gtmc::testing::random_instance(r, 25, 12);
    std::set<std::vector<std::size_t>> distinct;
    for (const auto& x : in.samples.inputs) {
      for (std::size_t i = 0; i < in.m.rows(); ++i) {
        if (!informative_oracle(in.er.missing, x, i)) continue;
        std::vector<std::size_t> sig;
        for (std::size_t g = 0; g < in.er.map.size(); ++g) {
          if (in.er.map[g].row == i && x.get(in.er.map[g].col)) sig.push_back(g);
        }
        distinct.insert(sig);
      }
    }
    ASSERT_EQ(build_erased_system(in.er.missing, in.er.map, in.samples).h(), distinct.size());
  }
}

TEST(BuildSystem, DedupIdempotence) {
  RngStream r(24);
  for (int trial = 0; trial < 100; ++trial) {
    auto in = gtmc::testing::random_instance(r, 30, 15);
    const auto a = build_erased_system(in.er.missing, in.er.map, in.samples);
    const auto b = build_erased_system(in.er.missing, in.er.map, in.samples);
    ASSERT_EQ(a, b);
    auto doubled = in.samples;
    for (std::size_t k = 0; k < in.samples.size(); ++k) {
      doubled.inputs.push_back(in.samples.inputs[k]);
      doubled.outcomes.push_back(in.samples.outcomes[k]);
    }
    const auto c = build_erased_system(in.er.missing, in.er.map, doubled);
    ASSERT_EQ(c.rows, a.rows);
    ASSERT_EQ(c.v, a.v);
  }
}

TEST(BuildSystem, NonInformativeOutcomesDependOnKnownCellsOnly) {
  RngStream r(25);
  for (int trial = 0; trial < 300; ++trial) {
    auto in = gtmc::testing::random_instance(r, 30, 15);
    for (std::size_t k = 0; k < in.samples.size(); ++k) {
      const auto& x = in.samples.inputs[k];
      for (std::size_t i = 0; i < in.m.rows(); ++i) {
        if (is_informative(in.er.missing, x, i)) continue;
        // Outcome recomputed with every erased cell set to 0.
        bool known = false;
        for (auto j : x.support()) known = known || in.er.missing.get(i, j) == Trit::One;
        ASSERT_EQ(known, in.samples.outcomes[k].get(i));
      }
    }
  }
}

// ---------------------------------------------------------------- psi solver

TEST(SolvePsi, WorkedPartialRecovery) {
  const auto rep = solve_psi(worked_system(false));
  const PsiEstimate expected{PsiState::Unknown, PsiState::Unknown, PsiState::Zero, PsiState::Zero, PsiState::One};
  EXPECT_EQ(rep.estimate, expected);
  EXPECT_EQ(rep.forced_zero, 2U);
  EXPECT_EQ(rep.forced_one, 1U);
  EXPECT_EQ(rep.unknown, 2U);
  EXPECT_EQ(rep.components, 3U);
  EXPECT_EQ(io::write_psi(worked_system(false).map, rep.estimate), gtmc::testing::fixture("worked_psi2.txt"));
}

TEST(SolvePsi, WorkedFullRecovery) {
  const auto rep = solve_psi(worked_system(true));
  EXPECT_EQ(rep.estimate, estimate_from(PsiVector::from_string("01001")));
  EXPECT_EQ(rep.unknown, 0U);
}

TEST(SolvePsi, EmptySystemLeavesEverythingUnknown) {
  ErasedSystem sys;
  sys.map = ErasureMap::of(worked_missing());
  const auto rep = solve_psi(sys);
  EXPECT_EQ(rep.estimate, PsiEstimate(5, PsiState::Unknown));
  EXPECT_EQ(rep.unknown, 5U);
}

TEST(SolvePsi, InconsistentSystemRejected) {
  auto sys = worked_system(false);
  sys.rows.push_back({2});
  sys.v.push_back(1);
  sys.source.push_back({0, 4});
  EXPECT_THROW(solve_psi(sys), InconsistentSystem);
}

TEST(SolvePsi, SoundOnRandomPipelines) {
  RngStream r(26);
  for (int trial = 0; trial < 1000; ++trial) {
    auto in = gtmc::testing::random_instance(r, 30, 15);
    const auto sys = build_erased_system(in.er.missing, in.er.map, in.samples);
    const auto rep = solve_psi(sys);
    ASSERT_EQ(rep.forced_zero + rep.forced_one + rep.unknown, sys.r());
    for (std::size_t g = 0; g < sys.r(); ++g) {
      if (rep.estimate[g] == PsiState::Unknown) continue;
      ASSERT_EQ(rep.estimate[g] == PsiState::One, in.er.psi.get(g));
    }
  }
}

TEST(SolvePsi, EqualsBackboneOracleOnSmallSystems) {
  RngStream r(27);
  int checked = 0;
  while (checked < 300) {
    auto in = gtmc::testing::random_instance(r, 10, 5);
    if (in.er.map.size() > 14) continue;
    const auto sys = build_erased_system(in.er.missing, in.er.map, in.samples);
    ASSERT_EQ(solve_psi(sys, 64).estimate, backbone_oracle(sys));
    ++checked;
  }
}

TEST(SolvePsi, RowOrderDoesNotChangeFixpoint) {
  RngStream r(28);
  for (int trial = 0; trial < 300; ++trial) {
    auto in = gtmc::testing::random_instance(r, 30, 15);
    const auto sys = build_erased_system(in.er.missing, in.er.map, in.samples);
    auto shuffled = sys;
    std::vector<std::size_t> order(sys.h());
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t k = order.size(); k > 1; --k) std::swap(order[k - 1], order[r.below(k)]);
    for (std::size_t k = 0; k < order.size(); ++k) {
      shuffled.rows[k] = sys.rows[order[k]];
      shuffled.v[k] = sys.v[order[k]];
      shuffled.source[k] = sys.source[order[k]];
    }
    ASSERT_EQ(solve_psi(shuffled).estimate, solve_psi(sys).estimate);
    ASSERT_EQ(solve_psi(sys, 0).estimate, solve_psi(sys).estimate);
  }
}

TEST(SolvePsi, MoreSamplesNeverFlipForcedStates) {
  RngStream r(29);
  for (int trial = 0; trial < 200; ++trial) {
    auto in = gtmc::testing::random_instance(r, 30, 15);
    if (in.samples.size() < 2) continue;
    SampleSet prefix;
    PsiEstimate prev(in.er.map.size(), PsiState::Unknown);
    for (std::size_t k = 0; k < in.samples.size(); ++k) {
      prefix.inputs.push_back(in.samples.inputs[k]);
      prefix.outcomes.push_back(in.samples.outcomes[k]);
      const auto est = solve_psi(build_erased_system(in.er.missing, in.er.map, prefix)).estimate;
      for (std::size_t g = 0; g < est.size(); ++g) {
        if (prev[g] != PsiState::Unknown) {
          ASSERT_EQ(est[g], prev[g]);
        }
      }
      prev = est;
    }
  }
}

// ---------------------------------------------------------------- fill

TEST(ResolveUnknowns, WorkedZeroFillViolatesFirstRow) {
  const auto sys = worked_system(false);
  RngStream rng(30);
  const auto out = resolve_unknowns(solve_psi(sys), sys, FillPolicy::zero(), rng);
  EXPECT_EQ(out.psi.to_string(), "00001");
  EXPECT_EQ(out.violated_rows, (std::vector<std::size_t>{0}));
}

TEST(ResolveUnknowns, WorkedGreedyCoverPicksLowestIndex) {
  const auto sys = worked_system(false);
  RngStream rng(31);
  const auto out = resolve_unknowns(solve_psi(sys), sys, FillPolicy::greedy_cover(0.1), rng);
  EXPECT_EQ(out.psi.to_string(), "10001");
  EXPECT_TRUE(out.violated_rows.empty());
}

TEST(ResolveUnknowns, KnownEntriesPassThrough) {
  const auto sys = worked_system(true);
  RngStream rng(32);
  for (const auto& policy : {FillPolicy::zero(), FillPolicy::one(), FillPolicy::greedy_cover(0.5)}) {
    EXPECT_EQ(resolve_unknowns(solve_psi(sys), sys, policy, rng).psi.to_string(), "01001");
  }
}

TEST(ResolveUnknowns, GreedyCoverAlwaysSatisfies) {
  RngStream r(33);
  for (int trial = 0; trial < 500; ++trial) {
    auto in = gtmc::testing::random_instance(r, 30, 15);
    const auto sys = build_erased_system(in.er.missing, in.er.map, in.samples);
    const auto rep = solve_psi(sys);
    const auto out = resolve_unknowns(rep, sys, FillPolicy::greedy_cover(0.3), r);
    ASSERT_TRUE(out.violated_rows.empty());
    ASSERT_TRUE(satisfies(sys, out.psi));
    for (std::size_t g = 0; g < sys.r(); ++g) {
      if (rep.estimate[g] != PsiState::Unknown) {
        ASSERT_EQ(out.psi.get(g), rep.estimate[g] == PsiState::One);
      }
    }
  }
}

TEST(ResolveUnknowns, UnconstrainedEntriesFollowPolicy) {
  ErasedSystem sys;
  sys.map = ErasureMap::of(worked_missing());
  RngStream rng(34);
  const auto rep = solve_psi(sys);
  EXPECT_EQ(resolve_unknowns(rep, sys, FillPolicy::greedy_cover(0.1, FillRule::One), rng).psi.to_string(), "11111");
  EXPECT_EQ(resolve_unknowns(rep, sys, FillPolicy::greedy_cover(0.1, FillRule::Zero), rng).psi.to_string(), "00000");
}
