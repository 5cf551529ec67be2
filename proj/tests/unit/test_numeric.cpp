#include "doctest.h"

#include "crm/error.hpp"
#include "crm/numeric.hpp"

#include <cmath>
#include <random>

using namespace crm::numeric;
using crm::coding::BitString;

namespace {

std::vector<std::uint64_t> geometric_data(double lambda, std::size_t n, std::uint64_t seed) {
    return sample_family(FamilyModel{Family::Geometric, {static_cast<float>(lambda)}}, n, seed);
}

std::vector<std::uint64_t> fuzz_stream(std::mt19937_64& rng) {
    std::vector<std::uint64_t> v(rng() % 300);
    for (auto& x : v) {
        switch (rng() % 4) {
        case 0: x = rng() % 3; break;
        case 1: x = rng() % 40; break;
        case 2: x = rng() % 100000; break;
        default: x = rng() >> (rng() % 64); break;
        }
    }
    return v;
}

} // namespace

TEST_CASE("geometric entropy") {
    const auto h = geometric_entropy(2.0);
    CHECK(std::fabs(h.nats - 0.4585) < 1e-3);
    CHECK(std::fabs(h.bits - 0.6614) < 1e-3);
    CHECK(h.bits == doctest::Approx(h.nats / std::log(2.0)));
    CHECK(geometric_entropy(200.0).nats < 1e-80);

    // direct summation over x <= 100
    const double lambda = std::log(2.0);
    double direct = 0.0;
    for (int x = 0; x <= 100; ++x) {
        const double p = (1 - std::exp(-lambda)) * std::exp(-lambda * x);
        direct -= p * std::log(p);
    }
    CHECK(geometric_entropy(lambda).nats == doctest::Approx(direct).epsilon(1e-12));

    CHECK_THROWS_AS(geometric_entropy(0.0), crm::DomainError);
    CHECK_THROWS_AS(geometric_entropy(-1.0), crm::DomainError);
}

TEST_CASE("geometric cross-entropy and KL") {
    CHECK(std::fabs(geometric_cross_entropy(2, 3).nats - 0.5206) < 1e-3);
    CHECK(geometric_cross_entropy(1.3, 1.3).nats == doctest::Approx(geometric_entropy(1.3).nats));
    const double kl = geometric_cross_entropy(2, 3).nats - geometric_cross_entropy(2, 2).nats;
    CHECK(std::fabs(kl - 0.0622) < 1e-3);
    CHECK(geometric_kl(2, 3).nats == doctest::Approx(kl));

    // truncated sum oracle
    double direct = 0.0;
    for (int x = 0; x < 200; ++x) {
        const double p = (1 - std::exp(-2.0)) * std::exp(-2.0 * x);
        const double q = (1 - std::exp(-3.0)) * std::exp(-3.0 * x);
        direct += p * std::log(p / q);
    }
    CHECK(geometric_kl(2, 3).nats == doctest::Approx(direct).epsilon(1e-9));
    CHECK_THROWS_AS(geometric_cross_entropy(2, 0), crm::DomainError);
    CHECK_THROWS_AS(geometric_cross_entropy(-2, 1), crm::DomainError);
}

TEST_CASE("rate estimation") {
    std::vector<std::uint64_t> data(100000, 0);
    for (std::size_t i = 0; i < 15652; ++i) data[i] = 1;
    CHECK(std::fabs(mle_lambda(data) - 2.0) < 1e-4);

    const std::vector<std::uint64_t> zeros(50, 0);
    CHECK(mle_lambda(zeros) == kLambdaMax);

    const double est = mle_lambda(geometric_data(2.0, 100000, 31));
    CHECK(est >= 1.98);
    CHECK(est <= 2.02);

    const std::vector<std::int64_t> negative{1, 2, -3};
    CHECK_THROWS_AS(mle_lambda(negative), crm::DomainError);
    CHECK_THROWS_AS(mle_lambda(std::span<const std::uint64_t>{}), crm::DomainError);
}

TEST_CASE("crossover threshold") {
    CHECK(crossover_n(64, 0.0620) == 1032);
    const auto consistent = crossover_n(64, 0.0622 / std::log(2.0));
    CHECK(consistent >= 712);
    CHECK(consistent <= 714);
    CHECK(crossover_n(64, 0.0897) == 713);
    CHECK(crossover_n(64, 64) == 1);
    CHECK_THROWS_AS(crossover_n(0, 1), crm::DomainError);
    CHECK_THROWS_AS(crossover_n(64, -0.1), crm::DomainError);
}

TEST_CASE("integer coder escapes in both directions") {
    const auto wide = FamilyModel{Family::DiscretizedGaussian, {1000.0f, 5.0f}}.pmf();
    const IntegerCoder coder(wide);
    CHECK(coder.window_low() > 0);
    const std::vector<std::uint64_t> values{1000, 0, 3, 999, 5000, 1ull << 40, coder.window_low(),
                                            coder.window_high(), coder.window_low() - 1};
    crm::coding::ArithmeticEncoder enc;
    double predicted = 0.0;
    for (auto v : values) {
        coder.encode(enc, v);
        predicted += coder.cost_bits(v);
    }
    const auto bits = enc.finish();
    CHECK(static_cast<double>(bits.size()) <= predicted + 2.0 + 1.0);
    crm::coding::BitStringSource src(bits);
    crm::coding::ArithmeticDecoder dec(src);
    for (auto v : values) CHECK(coder.decode(dec) == v);

    const auto g = geometric_coder(2.0);
    CHECK(g.window_low() == 0);
    CHECK(g.cost_bits(~0ull) < 200.0);
}

TEST_CASE("property: integer decoding of random bits is total") {
    const auto coder = geometric_coder(0.7);
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto bits = crm::coding::random_bits(256, seed);
        crm::coding::BitStringSource src(bits);
        crm::coding::ArithmeticDecoder dec(src);
        for (int i = 0; i < 20; ++i) {
            try {
                (void)coder.decode(dec);
            } catch (const crm::DomainError&) {
                break;
            }
        }
    }
}

TEST_CASE("fixed-guess coder") {
    const auto data = geometric_data(2.0, 100000, 5);
    const auto known = encode_fixed(data, 2.0);
    CHECK(known.score.model_bits == 0);
    const double per_known = static_cast<double>(known.score.payload_bits) / data.size();
    CHECK(per_known == doctest::Approx(geometric_entropy(2.0).bits).epsilon(0.01));

    const auto guess = encode_fixed(data, 3.0);
    const double per_guess = static_cast<double>(guess.score.payload_bits) / data.size();
    CHECK(per_guess == doctest::Approx(0.7511).epsilon(0.01));
    CHECK(decode_fixed(guess.payload, 3.0, data.size()) == data);

    const auto empty = encode_fixed({}, 3.0);
    CHECK(empty.payload.size() == 2);
    CHECK(empty.score.total == 2);
}

TEST_CASE("header coder") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        auto data = fuzz_stream(rng);
        if (data.empty()) data.push_back(rng() % 5);
        const auto s = encode_with_header(data);
        CHECK(s.header.size() == 8);
        CHECK(s.score.model_bits == 64);
        REQUIRE(decode_with_header(s.header, s.payload, data.size()) == data);
    }

    const auto data = geometric_data(2.0, 10000, 9);
    const auto s = encode_with_header(data);
    CHECK(static_cast<double>(s.score.total) ==
          doctest::Approx(64 + 10000 * geometric_entropy(2.0).bits).epsilon(0.01));

    const std::vector<std::uint64_t> one{3};
    CHECK(encode_with_header(one).score.total >= 64);
}

TEST_CASE("header beats the fixed guess past the crossover") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto data = geometric_data(2.0, 20000, seed);
        const auto header = encode_with_header(data);
        const auto fixed = encode_fixed(data, 3.0);
        const double penalty =
            (static_cast<double>(fixed.score.total) - static_cast<double>(header.score.payload_bits)) /
            data.size();
        REQUIRE(penalty > 0.0);
        CHECK(data.size() > crossover_n(64, penalty));
        CHECK(header.score.total <= fixed.score.total);
    }
}

TEST_CASE("online adaptive coder") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 100; ++trial) {
        const auto data = fuzz_stream(rng);
        const auto [s, trace] = encode_online_adaptive(data);
        CHECK(s.score.model_bits == 0);
        CHECK(s.header.empty());
        REQUIRE(decode_online_adaptive(s.payload, data.size()) == data);
        double sum = 0.0;
        for (double b : trace.per_sample_bits) sum += b;
        CHECK(trace.cumulative_bits == sum);
    }

    const std::vector<std::uint64_t> single{2};
    const auto [one, one_trace] = encode_online_adaptive(single);
    CHECK(one_trace.per_sample_bits[0] == geometric_coder(std::log(2.0)).cost_bits(2));

    const auto data = geometric_data(2.0, 10000, 2024);
    const auto [s, trace] = encode_online_adaptive(data);
    double second_half = 0.0;
    for (std::size_t i = 5000; i < 10000; ++i) second_half += trace.per_sample_bits[i];
    CHECK(std::fabs(second_half / 5000 - 0.6614) <= 0.02 * 0.6614);
    const auto known = encode_fixed(data, 2.0);
    const double excess =
        (static_cast<double>(s.score.total) - static_cast<double>(known.score.total)) / data.size();
    CHECK(excess < 0.02);
    CHECK(std::fabs(trace.cumulative_bits - static_cast<double>(s.payload.size())) < 40.0);
}

TEST_CASE("family pmfs are normalized") {
    const std::vector<FamilyModel> models{
        {Family::Geometric, {0.01f}},        {Family::Geometric, {50.0f}},
        {Family::Poisson, {0.0f}},           {Family::Poisson, {4.0f}},
        {Family::Poisson, {900.0f}},         {Family::DiscretizedGaussian, {30.0f, 8.0f}},
        {Family::DiscretizedGaussian, {0.0f, 0.01f}}, {Family::DiscretizedGaussian, {-3.0f, 2.0f}},
        {Family::DiscretizedLaplace, {30.0f, 4.0f}},  {Family::DiscretizedLaplace, {0.0f, 100.0f}},
    };
    for (const auto& m : models) {
        const auto pmf = m.pmf();
        double sum = 0.0;
        for (double p : pmf) {
            CHECK(p >= 0.0);
            sum += p;
        }
        CHECK(std::fabs(sum - 1.0) < 1e-9);
        CHECK(FamilyModel::parse(m.serialize()).params == m.params);
    }
    CHECK_THROWS_AS((FamilyModel{Family::Poisson, {1.0f, 2.0f}}.pmf()), crm::DomainError);
    CHECK_THROWS_AS((FamilyModel{Family::DiscretizedLaplace, {1.0f, 0.0f}}.pmf()), crm::DomainError);
    const std::vector<std::uint8_t> bad{9, 0, 0, 0, 0};
    CHECK_THROWS_AS(FamilyModel::parse(bad), crm::ParseError);
}

TEST_CASE("family selection") {
    const auto poisson = sample_family({Family::Poisson, {4.0f}}, 10000, 3);
    const auto sel = select_family(poisson);
    CHECK(sel.model.family == Family::Poisson);
    CHECK(sel.model.params[0] == doctest::Approx(4.0).epsilon(0.05));
    CHECK(sel.score.model_bits == 2 + 32);
    CHECK(decode_family(sel.model, sel.payload, poisson.size()) == poisson);
    for (const auto& c : sel.candidates) CHECK(sel.score.total <= c.total);

    CHECK(select_family(geometric_data(2.0, 10000, 4)).model.family == Family::Geometric);

    const std::vector<std::uint64_t> zeros(1000, 0);
    const auto degenerate = select_family(zeros);
    CHECK(degenerate.model.family == Family::Geometric);
    CHECK(degenerate.model.params[0] == static_cast<float>(kLambdaMax));

    const std::vector<FamilyModel> truths{{Family::Geometric, {0.5f}},
                                          {Family::Poisson, {4.0f}},
                                          {Family::DiscretizedGaussian, {30.0f, 8.0f}},
                                          {Family::DiscretizedLaplace, {30.0f, 4.0f}}};
    for (const auto& t : truths) {
        int hits = 0;
        for (std::uint64_t seed = 0; seed < 10; ++seed)
            hits += select_family(sample_family(t, 10000, 1000 + seed)).model.family == t.family;
        CHECK(hits >= 9);
    }
}

TEST_CASE("synthetic samplers match their means") {
    const auto p = sample_family({Family::Poisson, {7.5f}}, 50000, 1);
    double m = 0.0;
    for (auto x : p) m += static_cast<double>(x);
    CHECK(m / p.size() == doctest::Approx(7.5).epsilon(0.02));
    CHECK(sample_family({Family::Geometric, {1.0f}}, 100, 8) ==
          sample_family({Family::Geometric, {1.0f}}, 100, 8));
    const auto g = sample_normal(0.0, 1.0, 50000, 3);
    double s = 0.0, ss = 0.0;
    for (double v : g) {
        s += v;
        ss += v * v;
    }
    CHECK(std::fabs(s / g.size()) < 0.02);
    CHECK(ss / g.size() == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("gaussian versus comb") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto data = sample_normal(0.0, 1.0, 100, seed);
        const auto r = mdl_gaussian_vs_comb(data);
        CHECK(r.single.model_bits == 64.0);
        CHECK(r.comb.model_bits == 6400.0);
        CHECK(r.comb.payload_bits < r.single.payload_bits);
        CHECK(r.single.total() < r.comb.total());
        CHECK(r.single_wins);
    }
    const std::vector<double> twins{0.25, 0.25};
    const auto r = mdl_gaussian_vs_comb(twins);
    CHECK(std::isfinite(r.single.total()));
    CHECK(std::isfinite(r.comb.total()));
    CHECK(r.single.payload_bits == doctest::Approx(r.comb.payload_bits));
    const std::vector<double> lone{1.0};
    CHECK_THROWS_AS(mdl_gaussian_vs_comb(lone), crm::DomainError);
}
