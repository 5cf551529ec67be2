#include "doctest.h"

#include "crm/bounds.hpp"
#include "crm/error.hpp"

#include <chrono>
#include <cmath>

using namespace crm::bounds;

TEST_CASE("required samples") {
    CHECK(required_samples(0.1, 0.05, HypothesisClassSpec::from_size(1024)).value == 100);
    CHECK(required_samples(0.1, 0.05, HypothesisClassSpec::from_ln(std::log(0.05))).value == 0);
    CHECK(required_samples(0.01, 0.05, HypothesisClassSpec::from_ln(36.84)).value == 3984);
    CHECK(required_samples(0.01, 0.05, HypothesisClassSpec::from_ln(rule_class_log_size(10, 1000, 4).value)).value ==
          3984);
    CHECK(required_samples(0.1, 0.05, HypothesisClassSpec::from_size(8)).unit == BoundUnit::Samples);
    CHECK_THROWS_AS(required_samples(0.0, 0.05, HypothesisClassSpec::from_size(8)), crm::DomainError);
    CHECK_THROWS_AS(required_samples(0.1, 1.0, HypothesisClassSpec::from_size(8)), crm::DomainError);
    CHECK_THROWS_AS(required_samples(1.5, 0.5, HypothesisClassSpec::from_size(8)), crm::DomainError);
    CHECK(HypothesisClassSpec::from_size(1024).ln_size == doctest::Approx(std::log(1024.0)).epsilon(1e-12));
}

TEST_CASE("largest supported class") {
    CHECK(max_class_log_size(500, 0.01, 0.05).value == doctest::Approx(7.9957).epsilon(1e-4));
    CHECK(std::fabs(max_class_log_size(500, 0.01, 0.05).value - 8.0) < 0.01);
    CHECK(*max_class_log_size(500, 0.01, 0.05).bits() == doctest::Approx(11.535).epsilon(1e-3));
    // the quoted "about 45" is not what the formula gives for these inputs
    CHECK(std::fabs(max_class_log_size(500, 0.01, 0.05).value - 45.0) > 30.0);
    CHECK(max_class_log_size(700, 0.01, 1.0).value == doctest::Approx(7.0));
    CHECK(std::fabs(max_class_log_size(4000, 0.01, 0.05).value - 43.0) < 0.01);
    CHECK(max_class_log_size(1, 0.5, 0.5).unit == BoundUnit::Nats);
}

TEST_CASE("rule class size") {
    CHECK(std::fabs(rule_class_log_size(200, 1000, 4).value - 48.8) < 0.1);
    CHECK(rule_class_log_size(200, 1000, 4).value == doctest::Approx(48.82).epsilon(1e-4));
    CHECK(std::fabs(rule_class_log_size(10, 1000, 4).value - 36.8) < 0.1);
    CHECK(rule_class_log_size(1, 1, 9).value == 0.0);
    CHECK_THROWS_AS(rule_class_log_size(0, 1, 1), crm::DomainError);
}

TEST_CASE("hidden worm bound") {
    const auto c = HypothesisClassSpec::from_size(1000);
    CHECK(hidden_worm_bound(c, 0.1, 100).value == doctest::Approx(1000 * std::pow(0.9, 100)));
    CHECK(std::fabs(hidden_worm_bound(c, 0.1, 100).value - 0.0266) < 1e-4);
    CHECK(hidden_worm_bound(c, 0.1, 0).value == 1.0);
    CHECK(hidden_worm_bound(HypothesisClassSpec::from_size(1), 0.1, 0).value == 1.0);
    CHECK(hidden_worm_bound(c, 1.0, 1).value == 0.0);
    CHECK(hidden_worm_bound(c, 0.1, 100).unit == BoundUnit::Probability);
}

TEST_CASE("hidden worm simulation") {
    const auto start = std::chrono::steady_clock::now();
    const auto r = simulate_hidden_worm(1000, 0.1, 100, 10000, 7);
    CHECK(r.frequency <= 0.0266 + 0.005);
    CHECK(r.frequency <= r.analytic_bound + 3 * r.sigma);
    CHECK(r.worm_trials > 0);
    CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(60));

    CHECK(simulate_hidden_worm(1000, 0.1, 100, 2000, 7, 1).worm_trials ==
          simulate_hidden_worm(1000, 0.1, 100, 2000, 7, 4).worm_trials);
    CHECK(simulate_hidden_worm(50, 1.0, 10, 100, 1).frequency == 0.0);
    CHECK(simulate_hidden_worm(3, 0.3, 0, 100, 1).frequency == 1.0);
    CHECK_THROWS_AS(simulate_hidden_worm(100000, 0.1, 100000, 10, 1), crm::RefusedError);
    CHECK_THROWS_AS(simulate_hidden_worm(0, 0.1, 10, 10, 1), crm::DomainError);
}

TEST_CASE("property: simulation stays under the bound") {
    int checked = 0;
    for (std::uint64_t size : {1ull, 10ull, 100ull, 1000ull, 5000ull}) {
        for (double eps : {0.05, 0.1, 0.2, 0.3, 0.5}) {
            for (std::uint64_t n : {10ull, 40ull}) {
                const auto r = simulate_hidden_worm(size, eps, n, 400, size * 131 + n);
                CHECK(r.frequency <= r.analytic_bound + 3 * r.sigma + 1e-12);
                ++checked;
            }
        }
    }
    CHECK(checked == 50);
}

TEST_CASE("property: sample bound monotonicity and duality") {
    for (double ln_size : {0.0, 1.0, 5.0, 20.0, 80.0}) {
        const auto spec = HypothesisClassSpec::from_ln(ln_size);
        const auto bigger = HypothesisClassSpec::from_ln(ln_size + 3.0);
        for (double eps : {0.01, 0.05, 0.1, 0.3}) {
            for (double delta : {0.01, 0.05, 0.2}) {
                const double n = required_samples(eps, delta, spec).value;
                CHECK(required_samples(eps * 1.5, delta, spec).value <= n);
                CHECK(required_samples(eps, delta * 2, spec).value <= n);
                CHECK(required_samples(eps, delta, bigger).value >= n);
                CHECK(max_class_log_size(n, eps, delta).value >= ln_size - eps);
            }
        }
    }
}

TEST_CASE("compression view") {
    const auto found = compression_view_codelength(true, HypothesisClassSpec::from_log2(20), 1000);
    CHECK(found.bits == doctest::Approx(21.0));
    CHECK(found.fallback_bits == 1001.0);
    CHECK(found.saves);
    const auto missed = compression_view_codelength(false, HypothesisClassSpec::from_log2(20), 1000);
    CHECK(missed.bits == 1001.0);
    CHECK_FALSE(missed.saves);
    const auto tie = compression_view_codelength(true, HypothesisClassSpec::from_log2(1000), 1000);
    CHECK(tie.bits == doctest::Approx(tie.fallback_bits));
    CHECK_FALSE(tie.saves);

    for (std::uint64_t n = 1; n < 64; ++n)
        for (std::uint64_t k = 0; k < 64; ++k)
            CHECK(compression_view_codelength(true, HypothesisClassSpec::from_size(1ull << k), n).saves == (k < n));
}

TEST_CASE("compression generalization bound") {
    const auto b = compression_generalization_bound(0.1, 1000, 0.05);
    CHECK(b.value == doctest::Approx(2 * (0.1 * std::log(2.0) - std::log(0.05) / 1000)));
    CHECK(std::fabs(b.value - 0.1446) < 1e-3);
    CHECK(compression_generalization_bound(0.0, 1e9, 0.05).value < 1e-8);
    CHECK(compression_generalization_bound(0.3, 10, 1.0).value == doctest::Approx(0.6 * std::log(2.0)));
    CHECK_THROWS_AS(compression_generalization_bound(-0.1, 10, 0.5), crm::DomainError);
    CHECK_THROWS_AS(compression_generalization_bound(0.1, 0.5, 0.5), crm::DomainError);
}

TEST_CASE("model complexity ceiling") {
    CHECK(model_complexity_ceiling(1000, 1000).value == 1000.0);
    CHECK(model_complexity_ceiling(1, 1).value == 1.0);
    CHECK(model_complexity_ceiling(1000, 1000).unit == BoundUnit::Bits);
    CHECK(two_part_savings(200, 500, 1000) == 300.0);
    CHECK_THROWS_AS(model_complexity_ceiling(0, 10), crm::DomainError);
}
