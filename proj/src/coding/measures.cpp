#include "crm/coding.hpp"
#include "crm/error.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace crm::coding {

double from_nats(double nats, Unit unit) {
    return unit == Unit::Nats ? nats : nats / std::numbers::ln2;
}

double shannon_codelength(double p) {
    if (!(p > 0.0) || p > 1.0) throw DomainError("codelength needs a probability in (0, 1]");
    return -std::log2(p);
}

double entropy(const SymbolDistribution& d, Unit unit) {
    double nats = 0.0;
    for (double p : d.probs())
        if (p > 0.0) nats -= p * std::log(p);
    return from_nats(nats, unit);
}

namespace {

void check_support(const SymbolDistribution& p, const SymbolDistribution& q) {
    if (p.size() != q.size()) throw DomainError("distributions have different alphabet sizes");
    for (std::size_t i = 0; i < p.size(); ++i)
        if (p[i] > 0.0 && q[i] <= 0.0)
            throw DomainError("symbol " + std::to_string(i) +
                              " has positive probability under p but zero under q");
}

} // namespace

double cross_entropy(const SymbolDistribution& p, const SymbolDistribution& q, Unit unit) {
    check_support(p, q);
    double nats = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
        if (p[i] > 0.0) nats -= p[i] * std::log(q[i]);
    return from_nats(nats, unit);
}

double kl_divergence(const SymbolDistribution& p, const SymbolDistribution& q, Unit unit) {
    check_support(p, q);
    double nats = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
        if (p[i] > 0.0) nats += p[i] * std::log(p[i] / q[i]);
    return from_nats(std::max(nats, 0.0), unit);
}

double kraft_sum(std::span<const unsigned> lengths) {
    if (lengths.empty()) throw DomainError("Kraft sum of an empty code");
    double sum = 0.0;
    for (unsigned len : lengths) {
        if (len < 1) throw DomainError("code lengths must be at least 1");
        sum += std::ldexp(1.0, -static_cast<int>(len));
    }
    return sum;
}

double realized_codelength(std::span<const std::uint32_t> data, const DistributionSource& model,
                           Unit unit) {
    double nats = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const SymbolDistribution d = model(data.first(i));
        const double q = data[i] < d.size() ? d[data[i]] : 0.0;
        if (!(q > 0.0)) throw EncodingError("datum has zero probability", i);
        nats -= std::log(q);
    }
    return from_nats(nats, unit);
}

double table_codelength(std::span<const std::uint32_t> data, const TableSource& model) {
    double bits = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const CumulativeTable t = model(data.first(i));
        if (data[i] >= t.size() || t.frequency(data[i]) == 0)
            throw EncodingError("datum has zero frequency", i);
        bits -= std::log2(t.probability(data[i]));
    }
    return bits;
}

} // namespace crm::coding
