#include "doctest.h"

#include "crm/coding.hpp"
#include "crm/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

using namespace crm::coding;

namespace {

// Oracle: truncated geometric pmf p(x) = (1 - e^-l) e^(-l x), cut where the
// remaining tail drops below 1e-12.
std::vector<double> truncated_geometric(double lambda, std::size_t length) {
    std::vector<double> pmf(length);
    for (std::size_t x = 0; x < length; ++x)
        pmf[x] = (1.0 - std::exp(-lambda)) * std::exp(-lambda * static_cast<double>(x));
    double sum = 0.0;
    for (double p : pmf) sum += p;
    for (double& p : pmf) p /= sum;
    return pmf;
}

SymbolDistribution random_distribution(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(0.01, 1.0);
    std::vector<double> w(n);
    for (double& x : w) x = u(rng);
    return SymbolDistribution::from_weights(w);
}

// Adaptive frequency model used to fuzz the coder: counts start at `seed_count`
// (0 for symbols the generator never emits) and grow by one per occurrence.
struct FuzzModel {
    std::vector<std::uint32_t> base;
    CumulativeTable operator()(std::span<const std::uint32_t> history) const {
        std::vector<std::uint32_t> f = base;
        for (std::uint32_t s : history) ++f[s];
        return CumulativeTable::from_frequencies(f);
    }
};

} // namespace

TEST_CASE("shannon codelength") {
    CHECK(shannon_codelength(0.5) == doctest::Approx(1.0));
    CHECK(shannon_codelength(0.2) == doctest::Approx(2.3219).epsilon(1e-4));
    CHECK(shannon_codelength(1.0 / 26.0) == doctest::Approx(4.7004).epsilon(1e-4));
    CHECK(shannon_codelength(1.0) == 0.0);
    CHECK_THROWS_AS(shannon_codelength(0.0), crm::DomainError);
    CHECK_THROWS_AS(shannon_codelength(-0.1), crm::DomainError);
    CHECK_THROWS_AS(shannon_codelength(1.5), crm::DomainError);
}

TEST_CASE("symbol distribution validation") {
    CHECK_THROWS_AS(SymbolDistribution({0.5, 0.4}), crm::DomainError);
    CHECK_THROWS_AS(SymbolDistribution({1.2, -0.2}), crm::DomainError);
    CHECK_THROWS_AS(SymbolDistribution(std::vector<double>{}), crm::DomainError);
    CHECK_NOTHROW(SymbolDistribution({0.5, 0.5 + 5e-10}));
}

TEST_CASE("entropy") {
    CHECK(entropy(SymbolDistribution::uniform(16), Unit::Bits) == doctest::Approx(4.0));
    CHECK(entropy(SymbolDistribution({0.0, 1.0, 0.0}), Unit::Bits) == 0.0);
    CHECK(entropy(SymbolDistribution({0.5, 0.25, 0.125, 0.125}), Unit::Bits) ==
          doctest::Approx(1.75));
}

TEST_CASE("cross entropy") {
    const SymbolDistribution p({0.3, 0.7});
    CHECK(cross_entropy(p, p, Unit::Nats) == doctest::Approx(entropy(p, Unit::Nats)));
    CHECK(cross_entropy(SymbolDistribution({1.0, 0.0}), SymbolDistribution({0.5, 0.5}),
                        Unit::Bits) == doctest::Approx(1.0));

    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const auto a = random_distribution(rng, 8);
        const auto b = random_distribution(rng, 8);
        double direct = 0.0; // direct summation oracle
        for (std::size_t i = 0; i < 8; ++i) direct -= a[i] * std::log2(b[i]);
        CHECK(cross_entropy(a, b, Unit::Bits) == doctest::Approx(direct).epsilon(1e-12));
        CHECK(cross_entropy(a, b, Unit::Bits) ==
              doctest::Approx(entropy(a, Unit::Bits) + kl_divergence(a, b, Unit::Bits))
                  .epsilon(1e-12));
    }

    try {
        (void)cross_entropy(SymbolDistribution({0.5, 0.5, 0.0}), SymbolDistribution({1.0, 0.0, 0.0}),
                            Unit::Bits);
        FAIL("expected a support violation");
    } catch (const crm::DomainError& e) {
        CHECK(std::string(e.what()).find("symbol 1") != std::string::npos);
    }
}

TEST_CASE("kl divergence") {
    const SymbolDistribution p({0.2, 0.3, 0.5});
    CHECK(kl_divergence(p, p, Unit::Nats) == 0.0);

    // Closed form for geometric rates 2 and 3: ln(p/p') + E[x](l' - l) = 0.06216 nats.
    const auto g2 = truncated_geometric(2.0, 15);
    const auto g3 = truncated_geometric(3.0, 15);
    CHECK(std::exp(-2.0 * 15) < 1e-12);
    CHECK(kl_divergence(SymbolDistribution(g2), SymbolDistribution(g3), Unit::Nats) ==
          doctest::Approx(0.0622).epsilon(1e-3 / 0.0622));

    CHECK(kl_divergence(SymbolDistribution({0.9, 0.1}), SymbolDistribution({0.1, 0.9}),
                        Unit::Bits) == doctest::Approx(0.8 * std::log2(9.0)));
    CHECK(kl_divergence(SymbolDistribution({0.9, 0.1}), SymbolDistribution({0.1, 0.9}),
                        Unit::Bits) == doctest::Approx(2.536).epsilon(1e-3));

    CHECK_THROWS_AS(kl_divergence(SymbolDistribution({0.5, 0.5}), SymbolDistribution({1.0, 0.0}),
                                  Unit::Nats),
                    crm::DomainError);
}

TEST_CASE("kraft sum") {
    const std::vector<unsigned> dna{1, 2, 3, 3};
    CHECK(kraft_sum(dna) == 1.0);
    const std::vector<unsigned> infeasible{1, 1, 1};
    CHECK(kraft_sum(infeasible) == 1.5);
    const std::vector<unsigned> complete{2, 2, 2, 2};
    CHECK(kraft_sum(complete) == 1.0);
    CHECK_THROWS_AS(kraft_sum(std::span<const unsigned>{}), crm::DomainError);
    const std::vector<unsigned> zero{0, 1};
    CHECK_THROWS_AS(kraft_sum(zero), crm::DomainError);
}

TEST_CASE("property: shannon lengths rounded up are kraft feasible") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        const auto d = random_distribution(rng, 2 + trial % 40);
        std::vector<unsigned> lengths;
        for (double p : d.probs())
            lengths.push_back(std::max(1u, static_cast<unsigned>(std::ceil(-std::log2(p)))));
        CHECK(kraft_sum(lengths) <= 1.0 + 1e-12);
    }
}

TEST_CASE("property: gibbs inequality and unit coherence") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 2 + trial % 15;
        const auto p = random_distribution(rng, n);
        const auto q = random_distribution(rng, n);
        const double kl = kl_divergence(p, q, Unit::Nats);
        CHECK(kl >= 0.0);
        double max_diff = 0.0;
        for (std::size_t i = 0; i < n; ++i) max_diff = std::max(max_diff, std::abs(p[i] - q[i]));
        if (kl == 0.0) CHECK(max_diff < 1e-12);

        CHECK(entropy(p, Unit::Bits) * std::numbers::ln2 ==
              doctest::Approx(entropy(p, Unit::Nats)).epsilon(1e-12));
        CHECK(cross_entropy(p, q, Unit::Bits) * std::numbers::ln2 ==
              doctest::Approx(cross_entropy(p, q, Unit::Nats)).epsilon(1e-12));
        CHECK(kl_divergence(p, q, Unit::Bits) * std::numbers::ln2 ==
              doctest::Approx(kl).epsilon(1e-12));
    }
}

TEST_CASE("quantization keeps every realizable symbol") {
    const SymbolDistribution d({1e-9, 0.0, 1.0 - 1e-9});
    const auto t = CumulativeTable::quantize(d);
    CHECK(t.total() == CumulativeTable::kDefaultTotal);
    CHECK(t.frequency(0) == 1);
    CHECK(t.frequency(1) == 0);
    CHECK(t.frequency(2) == CumulativeTable::kDefaultTotal - 1);

    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        const auto p = random_distribution(rng, 2 + trial);
        const auto q = CumulativeTable::quantize(p);
        CHECK(q.total() == CumulativeTable::kDefaultTotal);
        double loss = 0.0; // expected extra bits per symbol from quantization
        for (std::size_t i = 0; i < p.size(); ++i) {
            CHECK(q.frequency(i) >= 1);
            loss += p[i] * std::log2(p[i] / q.probability(i));
        }
        if (p.size() <= 64) CHECK(loss < 0.02);
    }
    CHECK_THROWS_AS(CumulativeTable::quantize(SymbolDistribution::uniform(20), 10),
                    crm::DomainError);
}

TEST_CASE("arithmetic coder: empty sequence flushes at most two bits") {
    const auto bits = arith_encode({}, [](auto) {
        return CumulativeTable::quantize(SymbolDistribution::uniform(4));
    });
    CHECK(bits.size() <= 2);
    CHECK(arith_decode(bits, [](auto) { return CumulativeTable::quantize(SymbolDistribution::uniform(4)); }, 0)
              .empty());
}

TEST_CASE("arithmetic coder: DNA source codes near 1.75 bits per symbol") {
    const auto table = CumulativeTable::quantize(SymbolDistribution({0.5, 0.25, 0.125, 0.125}));
    std::vector<std::uint32_t> seq;
    seq.insert(seq.end(), 500, 0);
    seq.insert(seq.end(), 250, 1);
    seq.insert(seq.end(), 125, 2);
    seq.insert(seq.end(), 125, 3);
    std::shuffle(seq.begin(), seq.end(), std::mt19937_64(2024));
    const auto source = [&](auto) { return table; };
    const auto bits = arith_encode(seq, source);
    CHECK(table_codelength(seq, source) == doctest::Approx(1750.0));
    CHECK(static_cast<double>(bits.size()) == doctest::Approx(1750.0).epsilon(0.01));
    CHECK(arith_decode(bits, source, seq.size()) == seq);
}

TEST_CASE("arithmetic coder: all-zero input decodes to the first symbols") {
    BitString zeros;
    for (int i = 0; i < 8; ++i) zeros.push_back(false);
    const auto out = arith_decode(
        zeros, [](auto) { return CumulativeTable::quantize(SymbolDistribution::uniform(4)); }, 3);
    CHECK(out == std::vector<std::uint32_t>{0, 0, 0});
}

TEST_CASE("arithmetic coder: zero-frequency symbol names its position") {
    const auto table = CumulativeTable::from_frequencies(std::vector<std::uint32_t>{3, 0, 1});
    const std::vector<std::uint32_t> seq{0, 2, 1};
    try {
        (void)arith_encode(seq, [&](auto) { return table; });
        FAIL("expected an encoding error");
    } catch (const crm::EncodingError& e) {
        CHECK(e.position() == 2);
    }
}

TEST_CASE("property: fuzzed round trip and near-optimal length") {
    std::mt19937_64 rng(90210);
    for (int trial = 0; trial < 10000; ++trial) {
        const std::size_t alphabet = 2 + rng() % 60;
        const std::size_t length = rng() % 120;
        FuzzModel model;
        model.base.resize(alphabet);
        std::vector<std::size_t> live;
        for (std::size_t s = 0; s < alphabet; ++s) {
            model.base[s] = (rng() % 4 == 0) ? 0u : static_cast<std::uint32_t>(1 + rng() % 500);
            if (model.base[s] > 0) live.push_back(s);
        }
        if (live.empty()) {
            model.base[0] = 1;
            live.push_back(0);
        }
        std::vector<std::uint32_t> seq(length);
        const bool skewed = rng() % 2 == 0;
        for (auto& s : seq)
            s = static_cast<std::uint32_t>(skewed && rng() % 3 != 0 ? live[0] : live[rng() % live.size()]);

        const auto bits = arith_encode(seq, model);
        REQUIRE(arith_decode(bits, model, seq.size()) == seq);
        const double ideal = table_codelength(seq, model);
        const double excess = static_cast<double>(bits.size()) - ideal;
        CHECK(excess >= -1e-9);
        CHECK(excess <= 2.0 + 0.02 * static_cast<double>(seq.size()));
    }
}

TEST_CASE("decoding arbitrary bits is total and deterministic") {
    const auto model = [](auto) {
        return CumulativeTable::quantize(SymbolDistribution({0.7, 0.2, 0.1}));
    };
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto bits = random_bits(64, seed);
        const auto a = arith_decode(bits, model, 200);
        CHECK(a.size() == 200);
        CHECK(a == arith_decode(bits, model, 200));
    }
}

TEST_CASE("realized codelength") {
    const std::vector<std::uint32_t> one{0};
    CHECK(realized_codelength(one, [](auto) { return SymbolDistribution({0.5, 0.5}); }, Unit::Bits) ==
          doctest::Approx(1.0));

    // Law of large numbers: sampled data costs the entropy per symbol.
    const SymbolDistribution d({0.6, 0.25, 0.1, 0.05});
    std::mt19937_64 rng(42);
    std::discrete_distribution<std::uint32_t> draw(d.probs().begin(), d.probs().end());
    std::vector<std::uint32_t> data(100000);
    for (auto& x : data) x = draw(rng);
    const double per_symbol =
        realized_codelength(data, [&](auto) { return d; }, Unit::Bits) / data.size();
    CHECK(per_symbol == doctest::Approx(entropy(d, Unit::Bits)).epsilon(0.01));

    const std::vector<std::uint32_t> bad{0, 1, 2};
    try {
        (void)realized_codelength(bad, [](auto) { return SymbolDistribution({0.5, 0.5, 0.0}); },
                                  Unit::Bits);
        FAIL("expected zero-probability error");
    } catch (const crm::EncodingError& e) {
        CHECK(e.position() == 2);
    }
}

TEST_CASE("bit string packing") {
    BitString b;
    for (bool bit : {true, false, true, true, false, false, true, false, true}) b.push_back(bit);
    CHECK(b.size() == 9);
    CHECK(b.bytes().size() == 2);
    CHECK(b.bytes()[0] == 0xB2);
    CHECK(b.bytes()[1] == 0x80);
    CHECK(b.padding_bits() == 7);
    const auto copy = BitString::from_bytes({0xB2, 0xFF}, 9);
    CHECK(copy == b);
    CHECK_THROWS_AS(BitString::from_bytes({0xB2}, 9), crm::DomainError);
}
