#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "cifc/dmc_regions.hpp"
#include "cifc/json_io.hpp"
#include "cifc/parallel.hpp"

using namespace cifc;

namespace {

DmcChannel random_channel(std::uint64_t seed, int x1, int x2, std::vector<Axis> outs, double conc = 1.0) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<double>> m;
  for (const auto& o : outs) {
    std::vector<double> rows;
    for (int r = 0; r < x1 * x2; ++r) {
      auto d = dirichlet(rng, static_cast<std::size_t>(o.size), conc);
      rows.insert(rows.end(), d.begin(), d.end());
    }
    m.push_back(rows);
  }
  return DmcChannel::from_marginals(x1, x2, outs, m);
}

// Output o is a deterministic function f_o(x1, x2).
DmcChannel deterministic(int x1, int x2, std::vector<Axis> outs,
                         const std::vector<std::function<int(int, int)>>& f) {
  std::vector<std::vector<double>> m;
  for (std::size_t o = 0; o < outs.size(); ++o) {
    std::vector<double> rows;
    for (int a = 0; a < x1; ++a)
      for (int b = 0; b < x2; ++b)
        for (int y = 0; y < outs[o].size; ++y) rows.push_back(f[o](a, b) == y ? 1.0 : 0.0);
    m.push_back(rows);
  }
  return DmcChannel::from_marginals(x1, x2, outs, m);
}

// Aux PD with Q1 = X1 and Q = U = V = X2 on top of P_{X1X2}.
AuxAssignment substitution(const JointDist& px) {
  int n1 = px.axes()[0].size, n2 = px.axes()[1].size;
  std::vector<Axis> axes{{"Q1", n1}, {"Q", n2}, {"U", n2}, {"V", n2}, {"X1", n1}, {"X2", n2}};
  return AuxAssignment(JointDist::from_function(axes, [&](std::span<const int> i) {
    bool ok = i[0] == i[4] && i[1] == i[5] && i[2] == i[5] && i[3] == i[5];
    return ok ? px[static_cast<std::size_t>(i[4] * n2 + i[5])] : 0.0;
  }));
}

Frontier2D frontier_of(const IneqSystem& s) {
  Frontier2D f = project_to_frontier(s, "R1", "R2");
  return f.empty() ? Frontier2D({{0, 0}}) : f;
}

}  // namespace

TEST_CASE("inner bound under Q1 = X1, Q = U = V = X2 equals the five-row system") {
  for (std::uint64_t s = 0; s < 40; ++s) {
    DmcChannel ch = random_channel(s, 2, 2, {{"Y1", 2}, {"Y2", 3}, {"Z", 2}}, 0.5);
    JointDist px = sample_input_dist({{"X1", 2}, {"X2", 2}}, 500 + s);
    Frontier2D t = theorem1_region(substitution(px), ch);
    Frontier2D five = frontier_of(vsi_five_system(ch, px));
    CHECK(region_equal(t, five, 1e-9));
  }
}

TEST_CASE("constant auxiliaries on a useless channel give the origin") {
  std::vector<double> probs(2 * 2 * 4, 0.25);
  DmcChannel ch(2, 2, {{"Y", 2}, {"Z", 2}}, probs);
  auto aux = AuxAssignment(JointDist::from_function(
      {{"Q1", 1}, {"Q", 1}, {"U", 1}, {"V", 1}, {"X1", 2}, {"X2", 2}}, [](std::span<const int>) { return 1.0; }));
  Frontier2D f = theorem1_region(aux, ch);
  CHECK(f.points() == std::vector<RatePoint>{{0, 0}});
  CHECK(verify_fme_appendix_b(aux, ch));
}

TEST_CASE("without the helper the inner bound is Marton's multicast region") {
  // Q carries part of W2 only, so the common-message sum row is absent; adding
  // it gives a region that must sit inside.
  for (std::uint64_t s = 0; s < 60; ++s) {
    AuxAssignment aux = sample_aux({1, 2, 2, 2, 1, 2}, s);
    DmcChannel ch = random_channel(1000 + s, 1, 2, {{"Y1", 2}, {"Y2", 2}, {"Z", 2}}, 0.3);
    JointDist p = compose_with_channel(aux.joint, ch);
    auto mi = [&](VarSet l, VarSet r, VarSet g = {}) { return mutual_information(p, l, r, g); };
    double uy = std::min(mi({"Q", "U"}, {"Y1"}), mi({"Q", "U"}, {"Y2"}));
    double uy_q = std::min(mi({"U"}, {"Y1"}, {"Q"}), mi({"U"}, {"Y2"}, {"Q"}));
    double vz = mi({"Q", "V"}, {"Z"}), vz_q = mi({"V"}, {"Z"}, {"Q"}), uv = mi({"U"}, {"V"}, {"Q"});
    double q_all = std::min({mi({"Q"}, {"Y1"}), mi({"Q"}, {"Y2"}), mi({"Q"}, {"Z"})});
    IneqSystem m({"R1", "R2"});
    m.add({{"R1", 1}}, rationalize(uy));
    m.add({{"R2", 1}}, rationalize(vz));
    m.add({{"R1", 1}, {"R2", 1}}, rationalize(uy + vz_q - uv));
    m.add({{"R1", 1}, {"R2", 1}}, rationalize(uy_q + vz - uv));
    IneqSystem m5 = m;
    m5.add({{"R1", 1}, {"R2", 1}}, rationalize(q_all + uy_q + vz_q - uv));
    Frontier2D t = theorem1_region(aux, ch);
    CHECK(region_equal(t, frontier_of(m), 1e-9));
    CHECK(frontier_contains(t, frontier_of(m5), 1e-9));
  }
}

TEST_CASE("inner bound sanity on sampled instances") {
  for (std::uint64_t s = 0; s < 30; ++s) {
    FmeInstance inst = sample_fme_instance(s);
    Theorem1Terms terms = theorem1_terms(inst.aux, inst.channel);
    Frontier2D f = theorem1_region(inst.aux, inst.channel);
    CHECK_FALSE(f.empty());
    CHECK(f.r1_max() <= terms.a + 1e-10);
  }
}

TEST_CASE("an identical extra receiver leaves the inner bound unchanged") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    std::mt19937_64 rng(70 + s);
    std::vector<double> y, z;
    for (int r = 0; r < 4; ++r) {
      auto a = dirichlet(rng, 2), b = dirichlet(rng, 2);
      y.insert(y.end(), a.begin(), a.end());
      z.insert(z.end(), b.begin(), b.end());
    }
    DmcChannel one = DmcChannel::from_marginals(2, 2, {{"Y1", 2}, {"Z", 2}}, {y, z});
    DmcChannel two = DmcChannel::from_marginals(2, 2, {{"Y1", 2}, {"Y2", 2}, {"Z", 2}}, {y, y, z});
    AuxAssignment aux = sample_fme_instance(s).aux;
    CHECK(region_equal(theorem1_region(aux, one), theorem1_region(aux, two), 1e-12));
  }
}

TEST_CASE("projected codebook constraints never exceed the inner bound") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    FmeInstance inst = sample_fme_instance(s);
    Frontier2D proj = appendix_b_projection(inst.aux, inst.channel);
    CHECK(frontier_contains(theorem1_region(inst.aux, inst.channel), proj, 1e-9));
  }
}

TEST_CASE("FME check detects a corrupted coefficient") {
  // Seed 2 passes; shift one right-hand side of the reference system.
  FmeInstance inst = sample_fme_instance(2);
  REQUIRE(verify_fme_appendix_b(inst.aux, inst.channel));
  IneqSystem ref = theorem1_system(theorem1_terms(inst.aux, inst.channel));
  CHECK(verify_fme_against(inst.aux, inst.channel, ref));
  bool caught = false;
  for (std::size_t row = 0; row < ref.inequalities().size() && !caught; ++row) {
    IneqSystem bad = ref;
    bad.inequalities()[row].bound -= Rational(1, 20);
    caught = !verify_fme_against(inst.aux, inst.channel, bad);
  }
  CHECK(caught);
  IneqSystem looser = ref;
  for (auto& q : looser.inequalities()) q.bound += Rational(1, 10);
  CHECK_FALSE(verify_fme_against(inst.aux, inst.channel, looser));
  CHECK_THROWS(appendix_b_system(inst.aux, random_channel(1, 2, 2, {{"Y1", 2}, {"Y2", 2}, {"Z", 2}})));
}

TEST_CASE("regime check examples") {
  // N = 1, Z a copy of Y1: the strong condition holds with equality.
  DmcChannel copy = deterministic(2, 2, {{"Y1", 4}, {"Z", 4}},
                                  {[](int a, int b) { return a * 2 + b; }, [](int a, int b) { return a * 2 + b; }});
  RegimeQuery vsi{ChannelClass::multi_primary, Regime::vsi, std::nullopt};
  SamplingConfig cfg{200, 0, 3, true};
  RegimeReport r = check_regime(copy, vsi, cfg);
  CHECK(r.passed());
  CHECK(r.label == Regime::vsi);
  CHECK(r.samples_checked == 165 + 200);
  for (std::size_t i = 0; i < 50; ++i)
    for (const auto& s : regime_slacks(copy, vsi, sample_input_dist({{"X1", 2}, {"X2", 2}}, i)))
      if (s.condition == "strong_interference") CHECK(std::abs(s.slack) < 1e-12);

  // Y pure noise, Z = X2: the sum-rate condition holds, the strong one fails.
  std::vector<std::vector<double>> m{std::vector<double>(8, 0.5), {}};
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int z = 0; z < 2; ++z) m[1].push_back(z == b ? 1.0 : 0.0);
  DmcChannel noisy = DmcChannel::from_marginals(2, 2, {{"Y1", 2}, {"Z", 2}}, m);
  RegimeReport f = check_regime(noisy, vsi, cfg);
  REQUIRE_FALSE(f.passed());
  CHECK(f.label == Regime::none);
  CHECK(f.witness->condition == "strong_interference");
  CHECK(f.witness->margin > 0);
  for (const auto& s : regime_slacks(noisy, vsi, f.witness->input))
    if (s.condition == "very_strong_interference") CHECK(s.slack >= 0);

  CHECK_THROWS_AS(check_regime(noisy, {ChannelClass::multi_primary, Regime::mixed, std::nullopt}, cfg),
                  validation_error);
  CHECK_THROWS_AS(check_regime(noisy, vsi, SamplingConfig{0, 0, 0, true}), validation_error);
}

TEST_CASE("regime check matches a separate implementation on the same seed stream") {
  DmcChannel ch = random_channel(99, 2, 2, {{"Y1", 2}, {"Z", 2}}, 0.4);
  // Orient the channel so that the VSI conditions are nearly tight somewhere.
  for (std::uint64_t seed : {0ULL, 17ULL}) {
    SamplingConfig cfg{10000, 0, seed, false};
    RegimeQuery q{ChannelClass::multi_primary, Regime::vsi, std::nullopt};
    RegimeReport rep = check_regime(ch, q, cfg);
    std::size_t first_bad = cfg.samples;
    std::string cond;
    for (std::size_t i = 0; i < cfg.samples && first_bad == cfg.samples; ++i) {
      JointDist in = sample_input_dist({{"X1", 2}, {"X2", 2}}, seed + i);
      JointDist p = compose_with_channel(in, ch);
      double z2 = mutual_information(p, {"X2"}, {"Z"}, {"X1"}), y2 = mutual_information(p, {"X2"}, {"Y1"}, {"X1"});
      double za = mutual_information(p, {"X1", "X2"}, {"Z"}), ya = mutual_information(p, {"X1", "X2"}, {"Y1"});
      if (z2 - y2 > regime_violation_tol) first_bad = i, cond = "strong_interference";
      else if (ya - za > regime_violation_tol) first_bad = i, cond = "very_strong_interference";
    }
    if (first_bad == cfg.samples) {
      CHECK(rep.passed());
      CHECK(rep.samples_checked == cfg.samples);
    } else {
      REQUIRE_FALSE(rep.passed());
      CHECK(rep.witness->sample_index == first_bad);
      CHECK(rep.witness->condition == cond);
      CHECK(rep.samples_checked == first_bad + 1);
    }
  }
}

TEST_CASE("partitions") {
  Partition p = parse_partition("1, 3|2");
  CHECK(p.weak == std::vector<std::size_t>{0, 2});
  CHECK(p.strong == std::vector<std::size_t>{1});
  CHECK(format_partition(p) == "1,3|2");
  CHECK_NOTHROW(validate_partition(p, 3));
  CHECK_THROWS_AS(validate_partition(p, 2), validation_error);
  CHECK_THROWS_AS(validate_partition(p, 4), validation_error);
  CHECK_THROWS_AS(validate_partition(parse_partition("1|1"), 1), validation_error);
  CHECK_THROWS_AS(parse_partition("1,2"), validation_error);
  CHECK_THROWS_AS(parse_partition("0|1"), validation_error);
  CHECK_THROWS_AS(parse_partition("a|1"), validation_error);
  CHECK(parse_partition("|1").weak.empty());
}

TEST_CASE("noiseless VSI channel reaches the full pentagon") {
  auto both = [](int a, int b) { return a * 2 + b; };
  DmcChannel ch = deterministic(2, 2, {{"Y1", 4}, {"Z", 4}}, {both, both});
  RegimeQuery q{ChannelClass::multi_primary, Regime::vsi, std::nullopt};
  RegimeReport rep = check_regime(ch, q, SamplingConfig{64, 0, 0, true});
  REQUIRE(rep.passed());
  RegionSearch s;
  s.grid = 8;
  s.samples = 16;
  Frontier2D f = dmc_capacity_region(ch, rep, s);
  CHECK(frontier_contains(f, Frontier2D::pentagon(2, 1, 2), 1e-12));
  // Nothing beats the step-1/64 exhaustive grid of the same pentagon formula.
  double best_sum = 0, best_r2 = 0;
  for (const auto& g : simplex_grid(4, 64)) {
    std::vector<double> w(g.begin(), g.end());
    JointDist in = JointDist::normalized({{"X1", 2}, {"X2", 2}}, w);
    JointDist p = compose_with_channel(in, ch);
    best_sum = std::max(best_sum, mutual_information(p, {"X1", "X2"}, {"Y1"}));
    best_r2 = std::max(best_r2, mutual_information(p, {"X2"}, {"Z"}, {"X1"}));
  }
  CHECK(f.r1_max() == doctest::Approx(best_sum).epsilon(1e-12));
  CHECK(f.r2_max() == doctest::Approx(best_r2).epsilon(1e-12));
}

TEST_CASE("Z blind to X2 leaves no secondary rate") {
  auto first = [](int a, int) { return a; };
  DmcChannel ch = deterministic(2, 2, {{"Y1", 2}, {"Z", 2}}, {first, first});
  RegimeQuery q{ChannelClass::multi_primary, Regime::vsi, std::nullopt};
  RegimeReport rep = check_regime(ch, q, SamplingConfig{64, 0, 0, true});
  REQUIRE(rep.passed());
  Frontier2D f = dmc_capacity_region(ch, rep, RegionSearch{});
  CHECK(f.r2_max() < 1e-12);
  CHECK(f.r1_max() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("single-receiver VWI region against its direct value") {
  // Y = X1 and Z = (X1, X2) noiselessly: the region is the unit box.
  DmcChannel ch = deterministic(2, 2, {{"Y1", 2}, {"Z", 4}},
                                {[](int a, int) { return a; }, [](int a, int b) { return a * 2 + b; }});
  RegimeQuery q{ChannelClass::multi_primary, Regime::vwi, std::nullopt};
  RegimeReport rep = check_regime(ch, q, SamplingConfig{64, 0, 0, true});
  REQUIRE(rep.passed());
  Frontier2D f = dmc_capacity_region(ch, rep, RegionSearch{});
  CHECK(region_equal(f, Frontier2D::box(1, 1), 1e-9));

  // Multi-secondary mirror image.
  RegimeQuery qs{ChannelClass::multi_secondary, Regime::vwi, std::nullopt};
  RegimeReport reps = check_regime(ch, qs, SamplingConfig{64, 0, 0, true});
  REQUIRE(reps.passed());
  CHECK(region_equal(dmc_capacity_region(ch, reps, RegionSearch{}), Frontier2D::box(1, 1), 1e-9));
}

TEST_CASE("region search is monotone in its budget") {
  auto both = [](int a, int b) { return a * 2 + b; };
  DmcChannel base = deterministic(2, 2, {{"Y1", 4}, {"Z", 4}}, {both, both});
  RegimeQuery q{ChannelClass::multi_primary, Regime::vsi, std::nullopt};
  RegimeReport rep = check_regime(base, q, SamplingConfig{16, 0, 0, true});
  REQUIRE(rep.passed());
  RegionSearch small, big;
  small.grid = big.grid = 0;
  small.samples = 8;
  big.samples = 64;
  CHECK(frontier_contains(dmc_capacity_region(base, rep, big), dmc_capacity_region(base, rep, small), 1e-9));
  CHECK_THROWS_AS(dmc_capacity_region(base, RegimeReport{}, big), regime_error);
}

TEST_CASE("mixed regime: the Z sum-rate row is redundant") {
  auto x1 = [](int a, int) { return a; };
  auto both = [](int a, int b) { return a * 2 + b; };
  DmcChannel ch = deterministic(2, 2, {{"Y1", 2}, {"Y2", 4}, {"Z", 4}}, {x1, both, both});
  RegimeQuery q{ChannelClass::multi_primary, Regime::mixed, parse_partition("1|2")};
  RegimeReport rep = check_regime(ch, q, SamplingConfig{128, 0, 0, true});
  REQUIRE(rep.passed());
  for (std::uint64_t s = 0; s < 20; ++s) {
    JointDist in = sample_input_dist({{"U", 5}, {"X1", 2}, {"X2", 2}}, s);
    Frontier2D r = regime_region(ch, q, in);
    double zsum = mutual_information(compose_with_channel(in, ch), {"X1", "X2"}, {"Z"});
    CHECK(region_equal(frontier_intersect(r, Frontier2D::pentagon(zsum, zsum, zsum)), r, 1e-9));
  }
}

TEST_CASE("VSI rows dropped by the regime conditions are redundant") {
  CounterexampleSearch cs;
  int found = 0;
  for (std::size_t i = 0; i < 400 && found < 5; ++i) {
    DmcChannel ch = random_counterexample_channel(cs, i);
    RegimeQuery q{ChannelClass::multi_primary, Regime::vsi, std::nullopt};
    if (!check_regime(ch, q, SamplingConfig{64, 0, i, true}).passed()) continue;
    ++found;
    for (std::uint64_t s = 0; s < 10; ++s) {
      JointDist in = sample_input_dist({{"X1", 2}, {"X2", 2}}, 7000 + s);
      IneqSystem full = vsi_five_system(ch, in);
      std::vector<std::size_t> rows(vsi_redundant_rows.begin(), vsi_redundant_rows.end());
      CHECK(region_equal(frontier_of(full), frontier_of(drop_rows(full, rows)), 1e-9));
    }
  }
  CHECK(found == 5);
}

TEST_CASE("counterexample search") {
  CounterexampleSearch none;
  none.budget = 0;
  CHECK_FALSE(vaezi_counterexample_search(none).has_value());

  CounterexampleSearch s;
  s.budget = 2000;
  auto w = vaezi_counterexample_search(s);
  REQUIRE(w.has_value());
  CHECK(w->margin > 1e-6);
  JointDist p = compose_with_channel(w->input, w->channel);
  std::string y = "Y" + std::to_string(w->receiver + 1);
  double direct = mutual_information(p, {"U"}, {y}, {"X1"}) - mutual_information(p, {"U"}, {"Z"}, {"X1"});
  CHECK(direct == doctest::Approx(w->margin).epsilon(1e-12));
  CHECK(verify_counterexample(*w));
  // The same channel fails the weak condition, so the VWI check must reject it.
  RegimeQuery vwi{ChannelClass::multi_primary, Regime::vwi, std::nullopt};
  SamplingConfig with_witness_u{256, 2, 0, true};
  CHECK_FALSE(check_regime(w->channel, vwi, with_witness_u).passed());
}

TEST_CASE("stored counterexample fixture re-verifies") {
  CounterexampleWitness w = witness_from_json(read_json(std::string(CIFC_FIXTURES) + "/counterexample.json"));
  CHECK(verify_counterexample(w));
  CHECK(weak_condition_margin(w.channel, w.input, w.receiver) > 1e-6);
}
