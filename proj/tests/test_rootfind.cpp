#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "oracles.hpp"
#include "ssrchain/rootfind.hpp"
#include "ssrchain/ssr.hpp"

using namespace ssrchain;

namespace {

FindOptions unclassified() {
  FindOptions o;
  o.classify = false;
  return o;
}

std::vector<cplx> nonzero(const std::vector<Pole>& poles) {
  std::vector<cplx> out;
  for (const auto& p : poles)
    if (p.classification != PoleClass::zero_mode) out.push_back(p.delta);
  return out;
}

}  // namespace

TEST(CountZeros, SimpleZero) {
  EXPECT_EQ(count_zeros([](cplx z) { return z - cplx{0.3, -0.4}; }, {0.0, 1.0, -1.0, 0.0}), 1);
}

TEST(CountZeros, DoubleZeroCountsTwice) {
  EXPECT_EQ(count_zeros([](cplx z) { return (z + cplx{0.0, 0.2}) * (z + cplx{0.0, 0.2}); }, {-1.0, 1.0, -1.0, 1.0}), 2);
}

TEST(CountZeros, OriginZerosOfUndeflatedFunction) {
  EXPECT_EQ(count_zeros(CharFn(ChainParams::sr(3, 0.4)), {-1e-3, 1e-3, -1e-3, 1e-3}), 2);
}

TEST(CountZeros, EmptyWindow) {
  EXPECT_EQ(count_zeros([](cplx z) { return std::exp(z); }, {-2.0, 2.0, -2.0, 2.0}), 0);
}

TEST(CountZeros, ZeroOnBoundaryIsJitteredAway) {
  // The zero sits on the top edge; the jittered boundary decides which side it falls on.
  const int c = count_zeros([](cplx z) { return z - cplx{0.5, 0.0}; }, {0.0, 1.0, -1.0, 0.0});
  EXPECT_TRUE(c == 0 || c == 1);
}

TEST(CountZeros, UnusableFunctionThrows) {
  EXPECT_THROW(count_zeros([](cplx) { return cplx{std::nan(""), 0.0}; }, {0.0, 1.0, -1.0, 0.0}), BoundaryDegeneracy);
}

TEST(LocalizeZeros, TwoSimpleZeros) {
  const cplx a{-0.5, -0.1}, b{0.5, -0.1};
  auto fn = [&](cplx z) { return (z - a) * (z - b); };
  const auto seeds = localize_zeros(fn, {-1.0, 1.0, -1.0, 0.0}, 0.1);
  ASSERT_EQ(seeds.size(), 2u);
  for (const auto& s : seeds) {
    EXPECT_EQ(s.multiplicity, 1);
    EXPECT_LT(std::min(std::abs(s.center - a), std::abs(s.center - b)), 0.1);
  }
}

TEST(LocalizeZeros, NearlyDegeneratePairAboveCriticalSeparation) {
  const CharFn h = CharFn::deflated(ChainParams::sr(2, 0.56));
  const SearchWindow w{-3.0, 3.0, -6.0, 0.0};
  const auto seeds = localize_zeros(h, w, w.size() / 16.0);
  EXPECT_EQ(seeds.size(), 2u);
  int total = 0;
  for (const auto& s : seeds) total += s.multiplicity;
  EXPECT_EQ(total, count_zeros(h, w));
}

TEST(LocalizeZeros, EmptyWindowGivesNoSeeds) {
  EXPECT_TRUE(localize_zeros([](cplx z) { return z - cplx{5.0, 5.0}; }, {-1.0, 1.0, -1.0, 0.0}, 0.1).empty());
}

TEST(LocalizeZeros, MultiplicitiesSumToCount) {
  for (int n : {2, 3, 5, 8}) {
    for (double l : {0.05, 0.4, 1.3}) {
      const CharFn h = CharFn::deflated(ChainParams::sr(n, l));
      const SearchWindow w = SearchWindow::default_for(n);
      int total = 0;
      for (const auto& s : localize_zeros(h, w, w.size() / 16.0)) total += s.multiplicity;
      EXPECT_EQ(total, count_zeros(h, w)) << "N=" << n << " L=" << l;
    }
  }
}

TEST(LocalizeZeros, RejectsNonPositiveCell) {
  EXPECT_THROW(localize_zeros([](cplx z) { return z; }, {-1.0, 1.0, -1.0, 1.0}, 0.0), ContractViolation);
}

TEST(Refine, LinearFunction) {
  const cplx z = refine([](cplx d) { return d + cplx{0.0, 0.5}; }, cplx{-0.1, -0.4});
  EXPECT_LT(std::abs(z - cplx{0.0, -0.5}), 1e-12);
}

TEST(Refine, SeedFromLocalization) {
  const CharFn h = CharFn::deflated(ChainParams::sr(2, 0.56));
  const auto seeds = localize_zeros(h, {-3.0, 3.0, -6.0, 0.0}, 0.375);
  ASSERT_FALSE(seeds.empty());
  for (const auto& s : seeds) {
    const cplx z = refine(h, s.center);
    EXPECT_LT(h.evaluate(z).relative(), 1e-12);
    // Just above the critical separation the pair is 4.555 +- 0.423i.
    EXPECT_NEAR((2.0 * kI * z).real(), 4.5547, 0.05);
  }
}

TEST(Refine, FarSeedFails) {
  const CharFn f(ChainParams::sr(1, 1.0));
  try {
    refine(f, cplx{100.0, -100.0});
    FAIL() << "expected a refinement failure";
  } catch (const RefinementFailure& e) {
    EXPECT_GT(e.residual(), 0.0);
  }
}

TEST(FindCollectiveRates, SingleEmitterIsExact) {
  for (double l : {0.1, 0.3, 1.0, 10.0}) {
    for (int idx : {1, 2, 5}) {
      const auto set = find_collective_rates(ChainParams::sr(1, l, idx), SearchWindow::default_for(1));
      ASSERT_EQ(set.poles.size(), 1u) << "L=" << l;
      EXPECT_NEAR(std::abs(set.poles[0].gamma - cplx{1.0}), 0.0, 1e-12);
      EXPECT_EQ(set.poles[0].classification, PoleClass::markovian_like);
    }
  }
}

TEST(FindCollectiveRates, PairJustAboveCriticalSeparation) {
  const auto set = find_collective_rates(ChainParams::sr(2, 0.56), SearchWindow::default_for(2));
  const auto u = superradiant_pole(ChainParams::sr(2, 0.56));
  EXPECT_NEAR(u.gamma.real(), 4.5547, 0.05);
  EXPECT_GT(u.gamma.imag(), 0.0);
  int ml = 0, nm = 0;
  for (const auto& p : set.poles) {
    if (std::abs(std::abs(p.delta) - std::abs(u.delta)) > 1e-9) continue;
    if (p.classification == PoleClass::markovian_like) ++ml;
    if (p.classification == PoleClass::exclusively_non_markovian) ++nm;
  }
  EXPECT_EQ(ml, 1);
  EXPECT_EQ(nm, 1);
}

TEST(FindCollectiveRates, ClassificationBelowCriticalSeparation) {
  const auto set = find_collective_rates(ChainParams::sr(2, 0.3), SearchWindow::default_for(2));
  ASSERT_GE(set.poles.size(), 2u);
  EXPECT_EQ(set.poles[0].classification, PoleClass::zero_mode);
  EXPECT_EQ(set.poles[0].multiplicity, 1);
  EXPECT_EQ(set.poles[1].classification, PoleClass::markovian_like);
  EXPECT_NEAR(set.poles[1].gamma.imag(), 0.0, 1e-9);
}

TEST(FindCollectiveRates, SubradiantAtLargeSeparation) {
  const auto u = superradiant_pole(ChainParams::sr(2, 5.0));
  EXPECT_LT(u.gamma.real(), 2.0);
  EXPECT_GT(u.gamma.real(), 0.0);
}

TEST(FindCollectiveRates, AcceptedPoleInvariants) {
  for (int n : {1, 2, 3, 4, 6}) {
    for (double l : {0.2 / n, 1.76 / (n * n), 0.7}) {
      const auto set = find_collective_rates(ChainParams::sr(n, l), SearchWindow::default_for(n));
      EXPECT_TRUE(set.failures.empty()) << set.failures.front();
      for (std::size_t i = 0; i < set.poles.size(); ++i) {
        const auto& p = set.poles[i];
        EXPECT_EQ(p.gamma, 2.0 * kI * p.delta);
        EXPECT_LT(p.residual, 1e-9);
        EXPECT_GE(p.gamma.real(), -1e-9);
        EXPECT_NE(p.classification, PoleClass::unclassified);
        if (i > 0) EXPECT_FALSE(pole_order(p, set.poles[i - 1]));
      }
    }
  }
}

TEST(FindCollectiveRates, ConjugatePairsUpToSixQubits) {
  for (int n = 1; n <= 6; ++n) {
    for (double l : {0.5 / (n * n), 1.76 / (n * n), 0.5, 1.5}) {
      FindOptions o = unclassified();
      const auto zs = nonzero(find_collective_rates(ChainParams::sr(n, l), SearchWindow::default_for(n), o).poles);
      for (cplx z : zs) {
        double best = INFINITY;
        for (cplx w : zs) best = std::min(best, std::abs(w + std::conj(z)));
        EXPECT_LT(best, 1e-8 * (1.0 + std::abs(z))) << "N=" << n << " L=" << l << " z=" << z;
      }
    }
  }
}

TEST(FindCollectiveRates, MatchesGridScanOracle) {
  struct Case {
    int n;
    double l;
    Mode mode;
  };
  const Case cases[] = {{2, 0.3, Mode::sr_condition},  {2, 0.56, Mode::sr_condition}, {3, 0.2, Mode::sr_condition},
                        {3, 1.0, Mode::sr_condition},  {4, 0.1, Mode::sr_condition},  {4, 0.5, Mode::sr_condition},
                        {1, 2.0, Mode::general},       {2, 0.3, Mode::general},       {3, 0.45, Mode::general}};
  for (const auto& c : cases) {
    const ChainParams p = c.mode == Mode::general ? ChainParams::general(c.n, 50.0, c.l) : ChainParams::sr(c.n, c.l);
    const SearchWindow w = SearchWindow::default_for(c.n);
    const auto set = find_collective_rates(p, w, unclassified());
    EXPECT_TRUE(set.failures.empty());

    const oracle::Chain chain{c.n, 50.0, c.l, 1, c.mode == Mode::general ? oracle::Phase::general : oracle::Phase::sr};
    const int deflate = c.mode == Mode::general ? 0 : c.n - 1;
    const oracle::GridScan grid{w.re_min, w.re_max, w.im_min, w.im_max, 2000, 2000};
    const auto ref = oracle::grid_scan_zeros(
        [&](cplx z) { return oracle::charfn(chain, z) / std::pow(z, deflate); }, grid);

    // The oracle skips a two-cell margin; compare only poles clear of it.
    const double mx = 3.0 * w.width() / 1999.0, my = 3.0 * w.height() / 1999.0;
    std::vector<cplx> mine_all, mine_inner;
    for (const auto& pole : set.poles) {
      if (c.mode == Mode::sr_condition && pole.classification == PoleClass::zero_mode) continue;
      mine_all.push_back(pole.delta);
      if (SearchWindow{w.re_min + mx, w.re_max - mx, w.im_min + my, w.im_max - my}.contains(pole.delta))
        mine_inner.push_back(pole.delta);
    }
    ASSERT_FALSE(ref.empty());
    EXPECT_LT(oracle::max_nearest_distance(mine_inner, ref), 1e-6) << "N=" << c.n << " L=" << c.l;
    EXPECT_LT(oracle::max_nearest_distance(ref, mine_all), 1e-6) << "N=" << c.n << " L=" << c.l;
  }
}

TEST(FindCollectiveRates, MarkovianModeReturnsAllRoots) {
  const auto set = find_collective_rates(ChainParams::markovian(4, 50.0, std::numbers::pi / 50.0), {-1, 1, -1, 0});
  ASSERT_EQ(set.poles.size(), 4u);
  EXPECT_NEAR(std::abs(set.poles.back().gamma - cplx{4.0}), 0.0, 1e-10);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(set.poles[i].classification, PoleClass::zero_mode);
}

TEST(FindCollectiveRates, RejectsDegenerateWindow) {
  EXPECT_THROW(find_collective_rates(ChainParams::sr(2, 0.3), {0.0, 0.0, -1.0, 0.0}), ContractViolation);
}

TEST(ContinuePole, SinglePointPath) {
  const ChainParams p = ChainParams::sr(2, 0.3);
  const Pole u = superradiant_pole(p);
  const auto path = continue_pole(p, u, {0.3});
  ASSERT_EQ(path.size(), 1u);
  EXPECT_EQ(path[0].delta, u.delta);
}

TEST(ContinuePole, SuperradiantBranchRisesToCriticalPoint) {
  const ChainParams p = ChainParams::sr(2, 1e-3);
  const Pole u = superradiant_pole(p);
  EXPECT_NEAR(u.gamma.real(), 2.0, 0.01);
  const double lc = 0.556929085522;
  std::vector<double> l_path;
  for (int k = 0; k <= 400; ++k) l_path.push_back(1e-3 + (lc * (1.0 - 1e-6) - 1e-3) * k / 400.0);
  const auto path = continue_pole(p, u, l_path);
  ASSERT_EQ(path.size(), l_path.size());
  for (std::size_t i = 1; i < path.size(); ++i) EXPECT_GT(path[i].gamma.real(), path[i - 1].gamma.real());
  EXPECT_NEAR(path.back().gamma.real(), 4.59, 0.02);
}

TEST(ContinuePole, AntisymmetricBranchStaysUnderEnvelope) {
  const ChainParams p = ChainParams::general(2, 50.0, 1e-3);
  const auto set = find_collective_rates(p, {-6.0, 6.0, -8.0, 0.0}, unclassified());
  ASSERT_EQ(set.poles.size(), 2u);
  const Pole anti = set.poles[0];
  EXPECT_LT(anti.gamma.real(), 0.01);
  std::vector<double> l_path;
  for (int k = 0; k <= 500; ++k) l_path.push_back(1e-3 + (0.5 - 1e-3) * k / 500.0);
  const auto path = continue_pole(p, anti, l_path);
  ASSERT_EQ(path.size(), l_path.size());
  for (std::size_t i = 0; i < path.size(); i += 10) {
    const double envelope = superradiant_pole(ChainParams::sr(2, l_path[i])).gamma.real();
    EXPECT_LE(path[i].gamma.real(), envelope + 1e-7) << "L=" << l_path[i];
  }
}

TEST(ContinuePole, BreakdownCarriesPartialPath) {
  const ChainParams p = ChainParams::sr(2, 0.3);
  try {
    continue_pole(p, Pole::at(cplx{1.0, -1.0}), {0.3, 0.31});
    FAIL() << "expected a continuation breakdown";
  } catch (const ContinuationBreakdown& e) {
    ASSERT_FALSE(e.partial_path().empty());
    EXPECT_EQ(e.partial_path().front().first, 0.3);
  }
}

TEST(ContinuePole, PathMustStartAtCurrentSeparation) {
  const ChainParams p = ChainParams::sr(2, 0.3);
  EXPECT_THROW(continue_pole(p, superradiant_pole(p), {0.2, 0.3}), ContractViolation);
  EXPECT_THROW(continue_pole(p, superradiant_pole(p), {}), ContractViolation);
}

TEST(PolynomialRoots, MatchCompanionMatrix) {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> g;
  for (int deg = 1; deg <= 15; ++deg) {
    std::vector<cplx> c(deg + 1);
    for (auto& v : c) v = {g(rng), g(rng)};
    const auto mine = polynomial_roots(c);
    const auto ref = oracle::companion_roots(c);
    ASSERT_EQ(mine.size(), static_cast<std::size_t>(deg));
    EXPECT_LT(oracle::max_nearest_distance(mine, ref), 1e-8) << "degree " << deg;
    EXPECT_LT(oracle::max_nearest_distance(ref, mine), 1e-8) << "degree " << deg;
  }
}

TEST(PolynomialRoots, ExactZeroCoefficientsGiveExactOriginRoots) {
  const auto r = polynomial_roots({0.0, 0.0, 0.0, cplx{0.0, 2.0}, 1.0});
  ASSERT_EQ(r.size(), 4u);
  int at_origin = 0;
  for (cplx z : r) at_origin += (z == cplx{0.0});
  EXPECT_EQ(at_origin, 3);
}

TEST(SearchWindow, DefaultScalesWithN) {
  const SearchWindow w = SearchWindow::default_for(4);
  EXPECT_EQ(w.re_min, -6.0);
  EXPECT_EQ(w.re_max, 6.0);
  EXPECT_EQ(w.im_min, -10.0);
  EXPECT_EQ(w.im_max, 0.0);
  EXPECT_THROW((SearchWindow{1.0, 0.0, -1.0, 0.0}.check()), ContractViolation);
}
