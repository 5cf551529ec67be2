#include "crm/coding.hpp"
#include "crm/error.hpp"

namespace crm::coding {
namespace {

constexpr std::uint64_t kHalf = 1ull << 31;
constexpr std::uint64_t kQuarter = 1ull << 30;
constexpr std::uint64_t kThreeQuarters = 3 * kQuarter;

} // namespace

void ArithmeticEncoder::emit(bool bit) {
    out_.push_back(bit);
    for (; pending_ > 0; --pending_) out_.push_back(!bit);
}

void ArithmeticEncoder::narrow(std::uint32_t low, std::uint32_t high, std::uint32_t total) {
    if (finished_) throw DomainError("encoder already finished");
    const std::uint64_t range = high_ - low_ + 1;
    high_ = low_ + range * high / total - 1;
    low_ = low_ + range * low / total;
    for (;;) {
        if (high_ < kHalf) {
            emit(false);
        } else if (low_ >= kHalf) {
            emit(true);
            low_ -= kHalf;
            high_ -= kHalf;
        } else if (low_ >= kQuarter && high_ < kThreeQuarters) {
            ++pending_;
            low_ -= kQuarter;
            high_ -= kQuarter;
        } else {
            break;
        }
        low_ = 2 * low_;
        high_ = 2 * high_ + 1;
    }
}

void ArithmeticEncoder::encode(const CumulativeTable& table, std::size_t symbol) {
    if (symbol >= table.size()) throw DomainError("symbol outside the table alphabet");
    if (table.frequency(symbol) == 0)
        throw DomainError("symbol " + std::to_string(symbol) + " has zero frequency");
    narrow(table.low(symbol), table.high(symbol), table.total());
}

void ArithmeticEncoder::encode_uniform(std::uint32_t value, std::uint32_t total) {
    if (total == 0 || total > CumulativeTable::kMaxTotal || value >= total)
        throw DomainError("uniform slot outside [0, total)");
    narrow(value, value + 1, total);
}

BitString ArithmeticEncoder::finish() {
    if (!finished_) {
        ++pending_;
        emit(low_ >= kQuarter);
        finished_ = true;
    }
    return out_;
}

ArithmeticDecoder::ArithmeticDecoder(BitSource& source) : source_(source) {
    for (int i = 0; i < 32; ++i) value_ = (value_ << 1) | (source_.next_bit() ? 1u : 0u);
}

std::uint32_t ArithmeticDecoder::target(std::uint32_t total) const {
    const std::uint64_t range = high_ - low_ + 1;
    return static_cast<std::uint32_t>(((value_ - low_ + 1) * total - 1) / range);
}

void ArithmeticDecoder::narrow(std::uint32_t low, std::uint32_t high, std::uint32_t total) {
    const std::uint64_t range = high_ - low_ + 1;
    high_ = low_ + range * high / total - 1;
    low_ = low_ + range * low / total;
    for (;;) {
        if (high_ < kHalf) {
        } else if (low_ >= kHalf) {
            low_ -= kHalf;
            high_ -= kHalf;
            value_ -= kHalf;
        } else if (low_ >= kQuarter && high_ < kThreeQuarters) {
            low_ -= kQuarter;
            high_ -= kQuarter;
            value_ -= kQuarter;
        } else {
            break;
        }
        low_ = 2 * low_;
        high_ = 2 * high_ + 1;
        value_ = 2 * value_ + (source_.next_bit() ? 1u : 0u);
    }
}

std::size_t ArithmeticDecoder::decode(const CumulativeTable& table) {
    const std::size_t symbol = table.symbol_for(target(table.total()));
    narrow(table.low(symbol), table.high(symbol), table.total());
    return symbol;
}

std::uint32_t ArithmeticDecoder::decode_uniform(std::uint32_t total) {
    if (total == 0 || total > CumulativeTable::kMaxTotal) throw DomainError("uniform total outside [1, 2^16]");
    const std::uint32_t value = target(total);
    narrow(value, value + 1, total);
    return value;
}

BitString arith_encode(std::span<const std::uint32_t> symbols, const TableSource& model) {
    ArithmeticEncoder encoder;
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        const CumulativeTable table = model(symbols.first(i));
        if (symbols[i] >= table.size() || table.frequency(symbols[i]) == 0)
            throw EncodingError("symbol " + std::to_string(symbols[i]) + " has zero frequency", i);
        encoder.encode(table, symbols[i]);
    }
    return encoder.finish();
}

std::vector<std::uint32_t> arith_decode(const BitString& bits, const TableSource& model,
                                        std::size_t n_symbols) {
    BitStringSource source(bits);
    ArithmeticDecoder decoder(source);
    std::vector<std::uint32_t> out;
    out.reserve(n_symbols);
    for (std::size_t i = 0; i < n_symbols; ++i)
        out.push_back(static_cast<std::uint32_t>(decoder.decode(model(out))));
    return out;
}

} // namespace crm::coding
