#include "doctest.h"

#include "crm/error.hpp"
#include "crm/models.hpp"

#include <cmath>
#include <random>

using namespace crm::models;
using crm::coding::BitString;
using crm::coding::SymbolDistribution;

namespace {

std::vector<std::uint32_t> as_symbols(std::span<const std::uint8_t> bytes) {
    return {bytes.begin(), bytes.end()};
}

EncodedContainer order0_encode(std::span<const std::uint8_t> data) {
    AdaptiveFrequencyModel model(256);
    EncodedContainer c;
    c.model_id = model.model_id();
    c.model_header = model.serialize();
    c.original_length = data.size();
    c.payload = encode_sequence(model, as_symbols(data));
    c.checksum = sha256(data);
    return c;
}

std::vector<std::uint8_t> order0_decode(const EncodedContainer& c) {
    const auto model = ModelFactory::with_builtins().load(c.model_id, c.model_header);
    const auto symbols = decode_sequence(*model, c.payload, c.original_length);
    return {symbols.begin(), symbols.end()};
}

} // namespace

TEST_CASE("two-part score") {
    const auto sophie = score_two_part(0, 3'300'000'000ull);
    CHECK(sophie.total == 3'300'000'000ull);
    const auto rival = score_two_part(6'700'000'000ull, 2'100'000'000ull);
    CHECK(rival.total == 8'800'000'000ull);
    CHECK(score_two_part(0, 0).total == 0);
    CHECK_THROWS_AS(score_two_part(1ull << 62, 1ull << 62), crm::DomainError);
    CHECK_NOTHROW(score_two_part((1ull << 63) - 2, 1));
}

TEST_CASE("champion comparison") {
    CHECK(compare_champion(score_two_part(0, 3'300'000'000ull),
                           score_two_part(6'700'000'000ull, 2'100'000'000ull)) == Champion::Incumbent);
    CHECK(compare_champion(score_two_part(10, 90), score_two_part(20, 80)) == Champion::Incumbent);
    CHECK(compare_champion(score_two_part(20, 80), score_two_part(10, 90)) == Champion::Challenger);
    CHECK(compare_champion(score_two_part(5, 5), score_two_part(5, 5)) == Champion::Incumbent);
    CHECK(compare_champion(score_two_part(5, 50), score_two_part(5, 40)) == Champion::Challenger);
}

TEST_CASE("property: champion relation is a strict order up to full ties") {
    std::mt19937_64 rng(77);
    auto random_score = [&] { return score_two_part(rng() % 8, rng() % 8); };
    auto beats = [](const NetScore& a, const NetScore& b) {
        return compare_champion(b, a) == Champion::Challenger; // a displaces incumbent b
    };
    for (int trial = 0; trial < 5000; ++trial) {
        const auto a = random_score(), b = random_score(), c = random_score();
        CHECK_FALSE((beats(a, b) && beats(b, a)));
        if (beats(a, b) && beats(b, c)) CHECK(beats(a, c));
        if (!beats(a, b) && !beats(b, a)) CHECK(a == b);
    }
}

TEST_CASE("container layout is fixed") {
    EncodedContainer c;
    c.model_id = "ab";
    c.model_header = {0x07};
    c.original_length = 3;
    c.payload = BitString::from_bytes({0xA0}, 3);
    c.checksum.fill(0xEE);
    const auto bytes = c.serialize();
    const std::vector<std::uint8_t> head{'C', 'R', 'M', '1', 1, 2, 0, 'a', 'b', 1, 0, 0, 0, 0x07,
                                         3,   0,   0,   0,   0, 0, 0, 0,   3,   0, 0, 0, 0, 0,
                                         0,   0,   0xA0};
    REQUIRE(bytes.size() == head.size() + 32);
    CHECK(std::equal(head.begin(), head.end(), bytes.begin()));

    const auto back = EncodedContainer::parse(bytes);
    CHECK(back.model_id == "ab");
    CHECK(back.model_header == c.model_header);
    CHECK(back.payload == c.payload);
    CHECK(back.checksum == c.checksum);
    CHECK(back.serialize() == bytes);
}

TEST_CASE("container parse errors carry offsets") {
    EncodedContainer c;
    c.model_id = "m";
    c.payload = BitString::from_bytes({0x80}, 1);
    auto bytes = c.serialize();

    auto bad_magic = bytes;
    bad_magic[0] = 'X';
    CHECK_THROWS_AS(EncodedContainer::parse(bad_magic), crm::ParseError);

    auto bad_version = bytes;
    bad_version[4] = 9;
    try {
        (void)EncodedContainer::parse(bad_version);
        FAIL("expected parse error");
    } catch (const crm::ParseError& e) {
        CHECK(e.offset() == 4);
    }

    auto truncated = bytes;
    truncated.resize(truncated.size() - 5);
    CHECK_THROWS_AS(EncodedContainer::parse(truncated), crm::ParseError);

    auto trailing = bytes;
    trailing.push_back(0);
    CHECK_THROWS_AS(EncodedContainer::parse(trailing), crm::ParseError);
}

TEST_CASE("sha256 known answer") {
    const std::string abc = "abc";
    const auto d = sha256({reinterpret_cast<const std::uint8_t*>(abc.data()), abc.size()});
    CHECK(to_hex(d) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("verify round trip") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<std::uint8_t> data(rng() % 2000);
        for (auto& b : data) b = static_cast<std::uint8_t>(rng() % (trial % 2 ? 256 : 7));
        const auto c = EncodedContainer::parse(order0_encode(data).serialize());
        const auto report = verify_roundtrip(data, c, order0_decode);
        CHECK(report.ok);
        CHECK(report.byte_length == data.size());
        CHECK(report.decoded_checksum == sha256(data));
    }

    const std::vector<std::uint8_t> empty;
    const auto report = verify_roundtrip(empty, order0_encode(empty), order0_decode);
    CHECK(report.ok);
    CHECK(report.byte_length == 0);
}

TEST_CASE("verify round trip detects a flipped payload bit") {
    std::vector<std::uint8_t> data(500);
    std::mt19937_64 rng(4);
    for (auto& b : data) b = static_cast<std::uint8_t>('a' + rng() % 6);
    auto c = order0_encode(data);
    auto bytes = std::vector<std::uint8_t>(c.payload.bytes().begin(), c.payload.bytes().end());
    bytes[bytes.size() / 2] ^= 0x10;
    c.payload = BitString::from_bytes(bytes, c.payload.size());
    const auto report = verify_roundtrip(data, c, order0_decode);
    CHECK_FALSE(report.ok);
    REQUIRE(report.first_mismatch_offset.has_value());
    CHECK(*report.first_mismatch_offset < data.size());
}

TEST_CASE("sampling by decoding random bits") {
    AdaptiveFrequencyModel model(5);
    const auto bits = crm::coding::random_bits(300, 99);
    const auto a = sample_from_model(model, bits, 80);
    CHECK(a == sample_from_model(model, bits, 80));

    // The uniform byte model is the identity coder.
    UniformModel bytes_model(256);
    const auto raw = crm::coding::random_bits(8 * 40, 5);
    const auto sampled = sample_from_model(bytes_model, raw, 40);
    for (std::size_t i = 0; i < sampled.size(); ++i) CHECK(sampled[i] == raw.bytes()[i]);
}

TEST_CASE("property: re-encoding a sample reproduces the consumed random bits") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        AdaptiveFrequencyModel model(3 + seed % 20, 1, 8);
        const auto bits = crm::coding::random_bits(512, seed);
        const auto sample = sample_from_model(model, bits, 40);

        model.reset();
        crm::coding::ArithmeticEncoder encoder;
        for (auto s : sample) {
            encoder.encode(model.predict_table(), s);
            model.observe(s);
        }
        const auto committed = encoder.bits_emitted();
        const auto encoded = encoder.finish();
        CHECK(encoded.size() <= committed + 2 + 32);
        for (std::uint64_t i = 0; i < committed; ++i) REQUIRE(encoded[i] == bits[i]);
    }
}

TEST_CASE("no free lunch") {
    UniformModel uniform(2);
    CHECK(nfl_average_codelength(uniform, 8) == doctest::Approx(10.0));
    StaticModel biased(SymbolDistribution({0.9, 0.1}));
    CHECK(nfl_average_codelength(biased, 12) >= 12.0);
    AdaptiveFrequencyModel adaptive(2, 1, 2);
    CHECK(nfl_average_codelength(adaptive, 1) >= 1.0);
    CHECK_THROWS_AS(nfl_average_codelength(uniform, 17), crm::RefusedError);
    UniformModel ternary(3);
    CHECK_THROWS_AS(nfl_average_codelength(ternary, 4), crm::DomainError);

    // Some strings shrink under the biased model; the average still does not.
    const std::vector<std::uint32_t> zeros(12, 0);
    CHECK(encode_sequence(biased, zeros).size() < 12);
}

TEST_CASE("virtual label") {
    StaticModel geometric(SymbolDistribution({0.8, 0.16, 0.032, 0.008}));
    UniformModel uniform(4);
    const std::vector<std::uint32_t> window{0, 0, 1, 0, 0, 0, 2, 0, 1, 0};
    CHECK(virtual_label(window, uniform, uniform) == 0.0);
    double direct = 0.0; // direct codelength subtraction
    for (auto s : window) direct += 2.0 + std::log2(geometric.predict()[s]);
    CHECK(virtual_label(window, uniform, geometric) == doctest::Approx(direct));
    CHECK(direct > 0.0);

    // Uniform noise: a specialist cannot help on average.
    std::mt19937_64 rng(123);
    double sum = 0.0;
    for (int trial = 0; trial < 2000; ++trial) {
        std::vector<std::uint32_t> noise(32);
        for (auto& s : noise) s = static_cast<std::uint32_t>(rng() % 4);
        sum += virtual_label(noise, uniform, geometric);
    }
    CHECK(sum / 2000 <= 0.0);

    const std::vector<std::uint32_t> impossible{3};
    StaticModel blind(SymbolDistribution({0.5, 0.5, 0.0, 0.0}));
    CHECK_THROWS_AS(virtual_label(impossible, uniform, blind), crm::EncodingError);
}

TEST_CASE("model headers rebuild identical predictions") {
    const auto factory = ModelFactory::with_builtins();
    std::vector<std::unique_ptr<ProbModel>> models;
    models.push_back(std::make_unique<UniformModel>(7));
    models.push_back(std::make_unique<StaticModel>(SymbolDistribution({0.1, 0.2, 0.7})));
    models.push_back(std::make_unique<AdaptiveFrequencyModel>(3, 2, 16, 4096));
    std::mt19937_64 rng(1);
    for (auto& m : models) {
        auto copy = factory.load(m->model_id(), m->serialize());
        m->reset();
        copy->reset();
        for (int step = 0; step < 300; ++step) {
            const auto a = m->predict();
            const auto b = copy->predict();
            for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
            const auto s = static_cast<std::uint32_t>(rng() % m->alphabet_size());
            m->observe(s);
            copy->observe(s);
        }
    }
    CHECK_THROWS_AS(factory.load("nope", {}), crm::NotFoundError);
}
