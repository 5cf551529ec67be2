#include "crm/error.hpp"
#include "crm/models.hpp"

#include <cmath>
#include <stdexcept>

namespace crm::models {

using coding::BitString;

BitString encode_sequence(ProbModel& model, std::span<const std::uint32_t> symbols) {
    model.reset();
    coding::ArithmeticEncoder encoder;
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        const auto table = model.predict_table();
        if (symbols[i] >= table.size() || table.frequency(symbols[i]) == 0)
            throw EncodingError("symbol " + std::to_string(symbols[i]) + " has zero probability under " +
                                    model.model_id(),
                                i);
        encoder.encode(table, symbols[i]);
        model.observe(symbols[i]);
    }
    return encoder.finish();
}

std::vector<std::uint32_t> decode_sequence(ProbModel& model, coding::BitSource& bits,
                                           std::size_t n_symbols) {
    model.reset();
    coding::ArithmeticDecoder decoder(bits);
    std::vector<std::uint32_t> out;
    out.reserve(n_symbols);
    for (std::size_t i = 0; i < n_symbols; ++i) {
        const auto symbol = static_cast<std::uint32_t>(decoder.decode(model.predict_table()));
        out.push_back(symbol);
        model.observe(symbol);
    }
    return out;
}

std::vector<std::uint32_t> decode_sequence(ProbModel& model, const BitString& bits,
                                           std::size_t n_symbols) {
    coding::BitStringSource source(bits);
    return decode_sequence(model, source, n_symbols);
}

double sequence_codelength(ProbModel& model, std::span<const std::uint32_t> symbols,
                           coding::Unit unit) {
    model.reset();
    double nats = 0.0;
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        const auto d = model.predict();
        const double q = symbols[i] < d.size() ? d[symbols[i]] : 0.0;
        if (!(q > 0.0)) throw EncodingError("symbol has zero probability under " + model.model_id(), i);
        nats -= std::log(q);
        model.observe(symbols[i]);
    }
    return coding::from_nats(nats, unit);
}

std::vector<std::uint32_t> sample_from_model(ProbModel& model, const BitString& random_bits,
                                             std::size_t n_symbols) {
    return decode_sequence(model, random_bits, n_symbols);
}

double nfl_average_codelength(ProbModel& binary_model, unsigned n_bits) {
    if (n_bits > 16) throw RefusedError("exhaustive enumeration is limited to 16-bit strings");
    if (binary_model.alphabet_size() != 2)
        throw DomainError("no-free-lunch check needs a binary model");
    const std::uint64_t count = 1ull << n_bits;
    std::uint64_t total_bits = 0;
    std::vector<std::uint32_t> bits(n_bits);
    for (std::uint64_t v = 0; v < count; ++v) {
        for (unsigned i = 0; i < n_bits; ++i) bits[i] = (v >> (n_bits - 1 - i)) & 1u;
        total_bits += encode_sequence(binary_model, bits).size();
    }
    const double mean = static_cast<double>(total_bits) / static_cast<double>(count);
    if (mean < static_cast<double>(n_bits))
        throw std::logic_error("mean codelength below the string length: the coder is not lossless");
    return mean;
}

double virtual_label(std::span<const std::uint32_t> window, ProbModel& default_model,
                     ProbModel& specialized_model) {
    return sequence_codelength(default_model, window, coding::Unit::Bits) -
           sequence_codelength(specialized_model, window, coding::Unit::Bits);
}

} // namespace crm::models
