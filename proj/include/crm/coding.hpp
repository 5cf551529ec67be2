#pragma once

// Entropy-coding primitives: bit strings, the integer arithmetic coder, and
// the information measures (Shannon codelength, entropy, cross-entropy, KL,
// Kraft sum).

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

namespace crm::coding {

enum class Unit { Bits, Nats };

/// Converts a value computed in nats into `unit`.
double from_nats(double nats, Unit unit);

/// Normalized probability vector over a finite alphabet {0, ..., size-1}.
class SymbolDistribution {
public:
    static constexpr double kSumTolerance = 1e-9;

    /// Validates: nonempty, every entry finite and in [0,1], sum within 1e-9 of 1.
    explicit SymbolDistribution(std::vector<double> probs);

    static SymbolDistribution uniform(std::size_t alphabet_size);
    /// Normalizes nonnegative weights (at least one positive).
    static SymbolDistribution from_weights(std::span<const double> weights);

    std::size_t size() const noexcept { return probs_.size(); }
    double operator[](std::size_t symbol) const { return probs_.at(symbol); }
    std::span<const double> probs() const noexcept { return probs_; }

private:
    std::vector<double> probs_;
};

/// Integer cumulative frequencies: cum[0] = 0, cum[n] = total, nondecreasing.
/// This is the form the arithmetic coder consumes.
class CumulativeTable {
public:
    static constexpr std::uint32_t kMaxTotal = 1u << 16;
    static constexpr std::uint32_t kDefaultTotal = 1u << 14;

    static CumulativeTable from_frequencies(std::span<const std::uint32_t> freqs);

    /// Quantizes `dist` to integer counts summing to `total`. Every symbol with
    /// nonzero probability gets a count of at least 1; zero-probability
    /// symbols get 0.
    static CumulativeTable quantize(const SymbolDistribution& dist,
                                    std::uint32_t total = kDefaultTotal);

    std::size_t size() const noexcept { return cum_.size() - 1; }
    std::uint32_t total() const noexcept { return cum_.back(); }
    std::uint32_t low(std::size_t symbol) const { return cum_.at(symbol); }
    std::uint32_t high(std::size_t symbol) const { return cum_.at(symbol + 1); }
    std::uint32_t frequency(std::size_t symbol) const { return high(symbol) - low(symbol); }
    double probability(std::size_t symbol) const {
        return static_cast<double>(frequency(symbol)) / total();
    }
    /// The symbol s with low(s) <= target < high(s). Requires target < total().
    std::size_t symbol_for(std::uint32_t target) const;

private:
    explicit CumulativeTable(std::vector<std::uint32_t> cum) : cum_(std::move(cum)) {}
    std::vector<std::uint32_t> cum_;
};

/// Bit sequence with an exact length. Bits are packed MSB-first within bytes;
/// the unused low bits of the final byte are zero and are the padding.
class BitString {
public:
    BitString() = default;
    static BitString from_bytes(std::vector<std::uint8_t> bytes, std::uint64_t length_bits);

    void push_back(bool bit);
    void append(const BitString& other);
    bool operator[](std::uint64_t index) const;

    std::uint64_t size() const noexcept { return length_; }
    bool empty() const noexcept { return length_ == 0; }
    std::span<const std::uint8_t> bytes() const noexcept { return bytes_; }
    /// Number of pad bits in the last byte (0..7).
    unsigned padding_bits() const noexcept {
        return static_cast<unsigned>((8 - length_ % 8) % 8);
    }
    BitString slice(std::uint64_t offset, std::uint64_t length) const;

    friend bool operator==(const BitString&, const BitString&) = default;

private:
    std::vector<std::uint8_t> bytes_;
    std::uint64_t length_ = 0;
};

/// Input to the decoder. Implementations must be deterministic.
class BitSource {
public:
    virtual ~BitSource() = default;
    virtual bool next_bit() = 0;
};

/// Reads a BitString and zero-extends once it is exhausted.
class BitStringSource final : public BitSource {
public:
    explicit BitStringSource(const BitString& bits) : bits_(bits) {}
    bool next_bit() override;
    std::uint64_t consumed() const noexcept { return position_; }
    /// Bits requested past the end (served as zeros).
    std::uint64_t underrun() const noexcept {
        return position_ > bits_.size() ? position_ - bits_.size() : 0;
    }

private:
    const BitString& bits_;
    std::uint64_t position_ = 0;
};

/// Unbounded stream of pseudo-random bits from a seeded mt19937_64.
class RandomBitSource final : public BitSource {
public:
    explicit RandomBitSource(std::uint64_t seed) : engine_(seed) {}
    bool next_bit() override;

private:
    std::mt19937_64 engine_;
    std::uint64_t word_ = 0;
    int remaining_ = 0;
};

/// Produces `length_bits` seeded random bits.
BitString random_bits(std::uint64_t length_bits, std::uint64_t seed);

/// Bit-oriented arithmetic coder over a 32-bit interval. Carries are resolved
/// with pending (follow) bits; finish() emits the pending bits plus two bits.
class ArithmeticEncoder {
public:
    void encode(const CumulativeTable& table, std::size_t symbol);
    /// Codes one of `total` equally wide slots, total <= 2^16.
    void encode_uniform(std::uint32_t value, std::uint32_t total);
    /// Bits emitted so far, excluding pending bits.
    std::uint64_t bits_emitted() const noexcept { return out_.size(); }
    BitString finish();

private:
    void narrow(std::uint32_t low, std::uint32_t high, std::uint32_t total);
    void emit(bool bit);

    std::uint64_t low_ = 0;
    std::uint64_t high_ = 0xFFFFFFFFull;
    std::uint64_t pending_ = 0;
    BitString out_;
    bool finished_ = false;
};

class ArithmeticDecoder {
public:
    explicit ArithmeticDecoder(BitSource& source);
    std::size_t decode(const CumulativeTable& table);
    std::uint32_t decode_uniform(std::uint32_t total);

private:
    std::uint32_t target(std::uint32_t total) const;
    void narrow(std::uint32_t low, std::uint32_t high, std::uint32_t total);

    BitSource& source_;
    std::uint64_t low_ = 0;
    std::uint64_t high_ = 0xFFFFFFFFull;
    std::uint64_t value_ = 0;
};

/// Per-step integer model: given the symbols coded so far, the table for the
/// next one.
using TableSource = std::function<CumulativeTable(std::span<const std::uint32_t> history)>;
/// Per-step probability model used for realized codelengths.
using DistributionSource =
    std::function<SymbolDistribution(std::span<const std::uint32_t> history)>;

/// -log2(p), the optimal codelength in bits of an outcome with probability p.
double shannon_codelength(double p);

double entropy(const SymbolDistribution& d, Unit unit);
double cross_entropy(const SymbolDistribution& p, const SymbolDistribution& q, Unit unit);
double kl_divergence(const SymbolDistribution& p, const SymbolDistribution& q, Unit unit);

/// Sum of 2^-L over the code lengths. Feasible for a prefix code iff <= 1.
double kraft_sum(std::span<const unsigned> lengths);

BitString arith_encode(std::span<const std::uint32_t> symbols, const TableSource& model);
std::vector<std::uint32_t> arith_decode(const BitString& bits, const TableSource& model,
                                        std::size_t n_symbols);

/// Sum over the data of -log Q(x_k | x_<k).
double realized_codelength(std::span<const std::uint32_t> data, const DistributionSource& model,
                           Unit unit);
/// Same, measured against the integer tables the coder actually uses (bits).
double table_codelength(std::span<const std::uint32_t> data, const TableSource& model);

} // namespace crm::coding
