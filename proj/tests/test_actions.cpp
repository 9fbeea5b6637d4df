#include <doctest.h>

#include <cmath>
#include <random>

#include "adiaspec/actions.hpp"
#include "adiaspec/error.hpp"
#include "reference_data.hpp"

using namespace adiaspec;

namespace {

AdiabaticModel reference_model() {
  const auto v = PeriodicPotential::trig_sum({{1, 2.0, 0.0}});
  return {v, AnalyticPotential({{1, reference::kAmplitude, 0.0}}, 0.5), band_edges(v, 45.0)};
}

IsoEnergyGeometry geometry_at(const AdiabaticModel& model, double e) {
  return branch_points(model.w, model.bands, analyze_window(model.w, model.bands, e, 1, 0));
}

}  // namespace

TEST_CASE("reference actions match the brute-force oracle") {
  const auto model = reference_model();
  const auto j = admissible_interval(model.w, model.bands, 1, 0);
  CHECK(std::abs(j.maximizer - reference::kEnergy) < 1e-9);
  const auto g = geometry_at(model, j.maximizer);
  const auto s0 = tunneling_action(model, g, "g0");
  const auto s1 = tunneling_action(model, g, "g1");
  CHECK(std::abs(s0.value - reference::kActionG0) < 1e-6 * reference::kActionG0);
  CHECK(std::abs(s1.value - reference::kActionG1) < 1e-6 * reference::kActionG1);
  CHECK(s0.error <= 1e-8 * s0.value);
  CHECK(s1.error <= 1e-8 * s1.value);

  const auto set = tunneling_actions(model, g);
  REQUIRE(set.entries.size() == 2);
  CHECK(set.entries[0].label == "g0");
  CHECK(set.entries[1].label == "g1");
  CHECK(std::abs(set.total_action - (s0.value + s1.value)) <= 1e-12 * set.total_action);
}

TEST_CASE("both boundary sides give the same action") {
  const auto model = reference_model();
  const auto g = geometry_at(model, reference::kEnergy);
  for (const auto& gap : g.pre_gaps) {
    const double up = tunneling_action(model, g, gap.label, Side::upper).value;
    const double down = tunneling_action(model, g, gap.label, Side::lower).value;
    CHECK(std::abs(up - down) < 1e-8 * up);
  }
}

TEST_CASE("doubling the nodes leaves the action unchanged") {
  const auto model = reference_model();
  const auto g = geometry_at(model, reference::kEnergy);
  for (const auto& gap : g.pre_gaps) {
    const double a = tunneling_action_fixed(model, g, gap.label, 2);
    const double b = tunneling_action_fixed(model, g, gap.label, 4);
    CHECK(std::abs(a - b) < 1e-8 * b);
  }
}

TEST_CASE("actions are positive and continuous across J") {
  const auto model = reference_model();
  const auto j = admissible_interval(model.w, model.bands, 1, 0);
  for (int i = 1; i <= 20; ++i) {
    const double e = j.lower + (j.upper - j.lower) * i / 21.0;
    const auto set = tunneling_actions(model, geometry_at(model, e));
    for (const auto& entry : set.entries) CHECK(entry.action > 0.0);
  }
  const double e = reference::kEnergy;
  const auto base = tunneling_actions(model, geometry_at(model, e));
  const auto d3 = tunneling_actions(model, geometry_at(model, e + 1e-3));
  const auto d4 = tunneling_actions(model, geometry_at(model, e + 1e-4));
  for (std::size_t k = 0; k < base.entries.size(); ++k) {
    const double a = std::abs(d3.entries[k].action - base.entries[k].action);
    const double b = std::abs(d4.entries[k].action - base.entries[k].action);
    CHECK(a / b == doctest::Approx(10.0).epsilon(0.05));
  }
}

TEST_CASE("invalid action requests") {
  const auto model = reference_model();
  auto g = geometry_at(model, reference::kEnergy);
  CHECK_THROWS_AS(tunneling_action(model, g, "g7"), Error);
  g.pre_gaps[1].upper = g.pre_gaps[1].lower;
  try {
    tunneling_action(model, g, "g1");
    FAIL("expected an error for a closed gap");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::degenerate_point);
  }
}

TEST_CASE("tunneling coefficients") {
  CHECK(tunneling_coefficient(0.0, 0.3).value == 1.0);
  CHECK(std::abs(tunneling_coefficient(2.0, 1.0).value - std::exp(-1.0)) < 1e-16);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1e4);
  for (int i = 0; i < 100; ++i) {
    const double ratio = u(rng);
    const double eps = 0.01 + i * 0.001;
    const double s = ratio * eps;
    const auto t = tunneling_coefficient(s, eps);
    CHECK(t.log_value == -s / (2.0 * eps));
  }
  double prev = 0.0;
  for (double eps : {0.01, 0.05, 0.1, 0.5, 1.0}) {
    const double t = tunneling_coefficient(3.0, eps).value;
    CHECK(t > prev);
    CHECK(t < 1.0);
    prev = t;
  }
  const auto tiny = tunneling_coefficient(1e4, 1.0);
  CHECK(tiny.underflow);
  CHECK(tiny.value == 0.0);
  CHECK(tiny.log_value == -5000.0);
  CHECK_THROWS_AS(tunneling_coefficient(1.0, 0.0), Error);
  CHECK_THROWS_AS(tunneling_coefficient(-1.0, 1.0), Error);
}

TEST_CASE("total T") {
  ActionSet empty;
  CHECK(total_T(empty, 0.1).value == 1.0);
  ActionSet two;
  two.entries = {{"a", 2.0, 0.0}, {"b", 4.0, 0.0}};
  two.total_action = 6.0;
  CHECK(std::abs(total_T(two, 1.0).value - std::exp(-3.0)) < 1e-16);
  ActionSet first, second;
  first.entries = {two.entries[0]};
  first.total_action = 2.0;
  second.entries = {two.entries[1]};
  second.total_action = 4.0;
  CHECK(total_T(first, 0.7).log_value + total_T(second, 0.7).log_value == total_T(two, 0.7).log_value);
}

TEST_CASE("asymptotic lyapunov exponent") {
  ActionSet one;
  one.entries = {{"g", 4.0 * pi, 0.0}};
  one.total_action = 4.0 * pi;
  CHECK(std::abs(lyapunov_asymptotic(one, 0.1).theta_asym - 1.0) < 1e-15);

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.01, 20.0);
  for (int i = 0; i < 100; ++i) {
    ActionSet s;
    for (int k = 0; k < 1 + i % 4; ++k) {
      s.entries.push_back({"g" + std::to_string(k), u(rng), 0.0});
      s.total_action += s.entries.back().action;
    }
    const double eps = u(rng) / 20.0;
    const auto a = lyapunov_asymptotic(s, eps);
    CHECK(a.theta_asym > 0.0);
    CHECK(std::abs(a.theta_asym - a.theta_from_coefficients) <= 1e-14 * a.theta_asym);
  }
  CHECK_THROWS_AS(lyapunov_asymptotic(ActionSet{}, 0.1), Error);
}

TEST_CASE("coefficient magnitude window") {
  const auto w = coefficient_magnitude_window(1.0, 2.0);
  CHECK(w.first == 0.5);
  CHECK(w.second == 2.0);
  CHECK_THROWS_AS(coefficient_magnitude_window(1.0, 1.0), Error);
  CHECK_THROWS_AS(coefficient_magnitude_window(0.0, 2.0), Error);
  // Doubling the action at fixed epsilon squares 1/T.
  ActionSet s;
  s.entries = {{"g", 1.3, 0.0}};
  s.total_action = 1.3;
  ActionSet d = s;
  d.entries[0].action = 2.6;
  d.total_action = 2.6;
  const double t1 = total_T(s, 0.2).value;
  const double t2 = total_T(d, 0.2).value;
  CHECK(std::abs(1.0 / t2 - std::pow(1.0 / t1, 2)) < 1e-12 / t2);
  const auto lw = coefficient_magnitude_window_log(total_T(s, 0.2).log_value, 3.0);
  const auto pw = coefficient_magnitude_window(t1, 3.0);
  CHECK(std::abs(std::exp(lw.first) - pw.first) < 1e-12 * pw.first);
  CHECK(std::abs(std::exp(lw.second) - pw.second) < 1e-12 * pw.second);
}
