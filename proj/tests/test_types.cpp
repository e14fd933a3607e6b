#include "doctest.h"
#include "reliag/config.hpp"
#include "reliag/types.hpp"

using namespace reliag;

TEST_CASE("IDK carries no canonical id or surface") {
  Answer idk = Answer::idk();
  CHECK(idk.is_idk());
  CHECK_THROWS_AS((void)idk.canonical_id(), Error);
  CHECK_THROWS_AS((void)idk.surface(), Error);
}

TEST_CASE("TEXT answers require a canonical id") {
  CHECK_THROWS_AS(Answer::text(""), Error);
  Answer a = Answer::text("paris", "Paris is the capital");
  CHECK(a.is_text());
  CHECK(a.canonical_id() == "paris");
  CHECK(a.surface() == "Paris is the capital");
}

TEST_CASE("answers with equal canonical ids but different surfaces differ as values") {
  CHECK(Answer::text("x", "a") != Answer::text("x", "b"));
  CHECK(Answer::idk() == Answer::idk());
}

TEST_CASE("profile fields must lie in [0,1]") {
  CHECK_THROWS_AS(validate_profile({0, 1.3, 0.5}), Error);
  CHECK_THROWS_AS(validate_profile({0, 0.5, -0.1}), Error);
  CHECK_NOTHROW(validate_profile({0, 0.0, 1.0}));
}

TEST_CASE("weight vector keeps v == scale*w - 1") {
  auto wv = WeightVector::from_w_hat({0.83, 0.64, 0.43}, 8.0);
  CHECK(wv.v[0] == doctest::Approx(5.64).epsilon(1e-12));
  CHECK(wv.v[1] == doctest::Approx(4.12).epsilon(1e-12));
  CHECK(wv.v[2] == doctest::Approx(2.44).epsilon(1e-12));

  WeightVector broken = wv;
  broken.v[1] += 1e-6;
  CHECK_THROWS_AS(broken.validate(), Error);

  broken = wv;
  broken.v.pop_back();
  CHECK_THROWS_AS(broken.validate(), Error);

  broken = wv;
  broken.scale = 0.5;
  CHECK_THROWS_AS(broken.validate(), Error);
}

TEST_CASE("prior validation") {
  CHECK_THROWS_AS(PriorSpec::beta(0.0, 0.6), Error);
  CHECK_THROWS_AS(PriorSpec::beta(1.0, 0.6), Error);
  CHECK_THROWS_AS(PriorSpec::beta(0.6, 1.2), Error);
  CHECK_THROWS_AS(PriorSpec::adversary_hammer(5, 3, 0.6), Error);
  CHECK_NOTHROW(PriorSpec::adversary_hammer(3, 9, 0.6));
  CHECK_THROWS_AS(PriorSpec::explicit_profiles({}), Error);
  CHECK_THROWS_AS(PriorSpec::explicit_profiles({{0, 1.3, 0.5}}), Error);
}

namespace {

NoiseModel tiny_noise() {
  NoiseModel m;
  m.tau = 0.1;
  // factual: correct 0.9, idk 0.05, hallucination 0.05
  m.raw[0] = {0.9, 0.0, 0.05, 0.05};
  m.filtered[0] = {0.8, 0.0, 0.16, 0.04};
  // misinformation: correct 0.05, incorrect 0.8, idk 0.05, hallucination 0.1
  m.raw[1] = {0.05, 0.8, 0.05, 0.1};
  m.filtered[1] = {0.04, 0.7, 0.18, 0.08};
  // irrelevant: correct 0.2, idk 0.5, hallucination 0.3
  m.raw[2] = {0.2, 0.0, 0.5, 0.3};
  m.filtered[2] = {0.05, 0.0, 0.85, 0.1};
  return m;
}

}  // namespace

TEST_CASE("noise distributions must sum to one") {
  NoiseModel m = tiny_noise();
  CHECK_NOTHROW(m.validate());
  m.raw[0][0] += 0.01;
  CHECK_THROWS_AS(m.validate(), Error);
}

TEST_CASE("factual raw distribution carries no INCORRECT mass") {
  NoiseModel m = tiny_noise();
  m.raw[0] = {0.85, 0.05, 0.05, 0.05};
  CHECK_THROWS_AS(m.validate(), Error);
}

TEST_CASE("survival ratios are clamped at one") {
  NoiseModel m = tiny_noise();
  // filtered mass exceeding raw cannot be realized by censoring
  m.filtered[1] = {0.04, 0.82, 0.06, 0.08};
  CHECK(m.survival(DocType::Misinfo, AnswerType::Incorrect) == 1.0);
  auto eff = m.effective_filtered(DocType::Misinfo);
  CHECK(eff[static_cast<int>(AnswerType::Incorrect)] == doctest::Approx(0.8));
  double sum = 0.0;
  for (double x : eff) sum += x;
  CHECK(sum == doctest::Approx(1.0));
}

TEST_CASE("cost model rejects negative fields") {
  CostModel cost;
  CHECK_NOTHROW(cost.validate());
  cost.tokens_per_call = -1.0;
  CHECK_THROWS_AS(cost.validate(), Error);
}

TEST_CASE("config defaults: kappa 4, tau 0.1, scale follows N") {
  ExperimentConfig config = validate(ExperimentConfig{});
  CHECK(config.kappa == 4);
  CHECK(config.tau == doctest::Approx(0.1));
  CHECK(config.estimation.scale == 0.0);
  CHECK(config.estimation.effective_scale(9) == doctest::Approx(9.0));
  CHECK(config.n_trials == 10);
  CHECK(config.m_est == 200);
  CHECK(config.m_test == 1400);
}

TEST_CASE("config validation rejects out-of-range fields") {
  ExperimentConfig config;
  config.kappa = 0;
  CHECK_THROWS_AS(validate(config), Error);

  config = ExperimentConfig{};
  config.tau = 1.5;
  CHECK_THROWS_AS(validate(config), Error);

  config = ExperimentConfig{};
  config.n_trials = 0;
  CHECK_THROWS_AS(validate(config), Error);

  config = ExperimentConfig{};
  config.methods.clear();
  CHECK_THROWS_AS(validate(config), Error);

  config = ExperimentConfig{};
  config.prior = PriorSpec::beta(0.6, 0.6);
  config.prior.w_bar = 1.3;  // bypasses the factory check
  CHECK_THROWS_AS(validate(config), Error);
}
