#include "crm/numeric.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>

#include "crm/error.hpp"
#include "crm/wire.hpp"

namespace crm::numeric {

using coding::ArithmeticDecoder;
using coding::ArithmeticEncoder;
using coding::BitString;
using coding::BitStringSource;
using coding::CumulativeTable;

namespace {

constexpr std::size_t kMaxWindow = 4096;
constexpr unsigned kMaxGammaWidth = 64;

void require_rate(double lambda, const char* what) {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw DomainError(std::string(what) + ": rate must be a positive finite number");
}

void encode_gamma(ArithmeticEncoder& enc, std::uint64_t v) { // v >= 1
    const unsigned width = static_cast<unsigned>(std::bit_width(v));
    for (unsigned i = 1; i < width; ++i) enc.encode_uniform(0, 2);
    for (unsigned i = width; i-- > 0;) enc.encode_uniform(static_cast<std::uint32_t>((v >> i) & 1u), 2);
}

std::uint64_t decode_gamma(ArithmeticDecoder& dec) {
    unsigned zeros = 0;
    while (dec.decode_uniform(2) == 0) {
        if (++zeros >= kMaxGammaWidth) throw DomainError("integer escape: distance code too long");
    }
    std::uint64_t v = 1;
    for (unsigned i = 0; i < zeros; ++i) v = (v << 1) | dec.decode_uniform(2);
    return v;
}

double gamma_bits(std::uint64_t v) {
    return 2.0 * static_cast<double>(std::bit_width(v)) - 1.0;
}

} // namespace

DualUnit DualUnit::from_nats(double nats) { return {nats, nats / std::log(2.0)}; }

GeometricModel::GeometricModel(double lambda) : lambda_(lambda) {
    require_rate(lambda, "geometric model");
    q_ = std::exp(-lambda);
    p_ = -std::expm1(-lambda);
}

double GeometricModel::pmf(std::uint64_t x) const { return std::exp(log_pmf(x)); }

double GeometricModel::log_pmf(std::uint64_t x) const {
    return std::log(p_) - lambda_ * static_cast<double>(x);
}

DualUnit geometric_entropy(double lambda) {
    const GeometricModel g(lambda);
    return DualUnit::from_nats(-std::log(g.success()) + lambda * g.mean());
}

DualUnit geometric_cross_entropy(double lambda_true, double lambda_guess) {
    const GeometricModel t(lambda_true);
    const GeometricModel g(lambda_guess);
    return DualUnit::from_nats(-std::log(g.success()) + lambda_guess * t.mean());
}

DualUnit geometric_kl(double lambda_true, double lambda_guess) {
    const double h = geometric_entropy(lambda_true).nats;
    const double x = geometric_cross_entropy(lambda_true, lambda_guess).nats;
    return DualUnit::from_nats(std::max(0.0, x - h));
}

namespace {
double lambda_from_mean(double m) {
    if (m <= 0.0) return kLambdaMax;
    return std::min(kLambdaMax, std::log1p(1.0 / m));
}
} // namespace

double mle_lambda(std::span<const std::uint64_t> data) {
    if (data.empty()) throw DomainError("mle_lambda: empty data");
    long double sum = 0;
    for (auto x : data) sum += static_cast<long double>(x);
    return lambda_from_mean(static_cast<double>(sum / data.size()));
}

double mle_lambda(std::span<const std::int64_t> data) {
    if (data.empty()) throw DomainError("mle_lambda: empty data");
    std::vector<std::uint64_t> v;
    v.reserve(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (data[i] < 0)
            throw DomainError("mle_lambda: negative entry at index " + std::to_string(i));
        v.push_back(static_cast<std::uint64_t>(data[i]));
    }
    return mle_lambda(std::span<const std::uint64_t>(v));
}

std::uint64_t crossover_n(double header_bits, double per_sample_penalty) {
    if (!(header_bits > 0.0) || !(per_sample_penalty > 0.0) || !std::isfinite(header_bits) ||
        !std::isfinite(per_sample_penalty))
        throw DomainError("crossover_n: inputs must be positive");
    const double n = std::floor(header_bits / per_sample_penalty);
    if (n >= 9.2e18) throw DomainError("crossover_n: threshold overflows");
    return static_cast<std::uint64_t>(n);
}

// ---------------------------------------------------------------------------

IntegerCoder::IntegerCoder()
    : table_(CumulativeTable::from_frequencies(std::vector<std::uint32_t>{1})) {}

IntegerCoder::IntegerCoder(std::span<const double> pmf, std::uint32_t total) : IntegerCoder() {
    if (pmf.empty()) throw DomainError("integer coder: empty pmf");
    const double threshold = 0.25 / total;
    std::size_t mode = 0;
    for (std::size_t x = 0; x < pmf.size(); ++x) {
        if (!(pmf[x] >= 0.0) || !std::isfinite(pmf[x])) throw DomainError("integer coder: bad pmf entry");
        if (pmf[x] > pmf[mode]) mode = x;
    }
    std::size_t lo = mode, hi = mode + 1;
    while (lo > 0 && pmf[lo - 1] >= threshold && hi - lo < kMaxWindow) --lo;
    while (hi < pmf.size() && pmf[hi] >= threshold && hi - lo < kMaxWindow) ++hi;

    std::vector<double> window(pmf.begin() + static_cast<std::ptrdiff_t>(lo),
                               pmf.begin() + static_cast<std::ptrdiff_t>(hi));
    double inside = 0.0, all = 0.0;
    for (double w : window) inside += w;
    for (double w : pmf) all += w;
    build(lo, std::move(window), all - inside, total);
}

IntegerCoder IntegerCoder::from_window(std::uint64_t lo, std::vector<double> window,
                                       double outside_mass, std::uint32_t total) {
    for (double w : window)
        if (!(w >= 0.0) || !std::isfinite(w)) throw DomainError("integer coder: bad pmf entry");
    if (window.empty() || window.size() > kMaxWindow)
        throw DomainError("integer coder: window must hold 1.." + std::to_string(kMaxWindow) + " values");
    IntegerCoder c;
    c.build(lo, std::move(window), outside_mass, total);
    return c;
}

void IntegerCoder::build(std::uint64_t lo, std::vector<double> window, double outside_mass,
                         std::uint32_t total) {
    double inside = 0.0;
    for (double w : window) inside += w;
    if (!(inside > 0.0)) throw DomainError("integer coder: pmf has no mass");
    lo_ = lo;
    hi_ = lo + window.size();
    window.push_back(std::max(outside_mass, inside * 1e-12));
    table_ = CumulativeTable::quantize(coding::SymbolDistribution::from_weights(window), total);
}

void IntegerCoder::encode(ArithmeticEncoder& encoder, std::uint64_t value) const {
    if (value >= lo_ && value < hi_) {
        encoder.encode(table_, static_cast<std::size_t>(value - lo_));
        return;
    }
    encoder.encode(table_, table_.size() - 1);
    if (lo_ > 0) encoder.encode_uniform(value >= hi_ ? 1 : 0, 2);
    encode_gamma(encoder, value >= hi_ ? value - hi_ + 1 : lo_ - value);
}

std::uint64_t IntegerCoder::decode(ArithmeticDecoder& decoder) const {
    const auto s = decoder.decode(table_);
    if (s + 1 < table_.size()) return lo_ + s;
    const bool above = lo_ == 0 || decoder.decode_uniform(2) == 1;
    const std::uint64_t d = decode_gamma(decoder);
    if (above) {
        if (d - 1 > std::numeric_limits<std::uint64_t>::max() - hi_)
            throw DomainError("integer escape: value overflows");
        return hi_ + d - 1;
    }
    if (d > lo_) throw DomainError("integer escape: value below zero");
    return lo_ - d;
}

double IntegerCoder::cost_bits(std::uint64_t value) const {
    if (value >= lo_ && value < hi_)
        return -std::log2(table_.probability(static_cast<std::size_t>(value - lo_)));
    double bits = -std::log2(table_.probability(table_.size() - 1));
    if (lo_ > 0) bits += 1.0;
    return bits + gamma_bits(value >= hi_ ? value - hi_ + 1 : lo_ - value);
}

IntegerCoder geometric_coder(double lambda) {
    const GeometricModel g(lambda);
    const double threshold = 0.25 / coding::CumulativeTable::kDefaultTotal;
    std::vector<double> window;
    while (window.size() < kMaxWindow) {
        const double p = g.pmf(window.size());
        if (!window.empty() && p < threshold) break;
        window.push_back(p);
    }
    const double outside = std::exp(-lambda * static_cast<double>(window.size()));
    return IntegerCoder::from_window(0, std::move(window), outside);
}

// ---------------------------------------------------------------------------

namespace {

IntegerStream code_all(std::span<const std::uint64_t> data, const IntegerCoder& coder,
                       std::uint64_t model_bits) {
    ArithmeticEncoder enc;
    for (auto x : data) coder.encode(enc, x);
    IntegerStream out;
    out.payload = enc.finish();
    out.score = models::score_two_part(model_bits, out.payload.size());
    return out;
}

std::vector<std::uint64_t> decode_all(const BitString& payload, const IntegerCoder& coder,
                                      std::size_t n) {
    BitStringSource src(payload);
    ArithmeticDecoder dec(src);
    std::vector<std::uint64_t> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(coder.decode(dec));
    return out;
}

} // namespace

IntegerStream encode_fixed(std::span<const std::uint64_t> data, double lambda_guess) {
    return code_all(data, geometric_coder(lambda_guess), 0);
}

std::vector<std::uint64_t> decode_fixed(const BitString& payload, double lambda_guess, std::size_t n) {
    return decode_all(payload, geometric_coder(lambda_guess), n);
}

IntegerStream encode_with_header(std::span<const std::uint64_t> data) {
    const double lambda = mle_lambda(data);
    auto out = code_all(data, geometric_coder(lambda), 64);
    wire::ByteWriter w;
    w.f64(lambda);
    out.header = std::move(w).take();
    return out;
}

std::vector<std::uint64_t> decode_with_header(std::span<const std::uint8_t> header,
                                              const BitString& payload, std::size_t n) {
    wire::ByteReader r(header);
    const double lambda = r.f64();
    if (!r.at_end()) throw ParseError("geometric header: trailing bytes", r.position());
    return decode_all(payload, geometric_coder(lambda), n);
}

namespace {
double adaptive_rate(long double sum, std::size_t seen) {
    return lambda_from_mean(static_cast<double>((sum + 1.0L) / static_cast<long double>(seen + 1)));
}
} // namespace

std::pair<IntegerStream, AdaptiveCoderTrace> encode_online_adaptive(std::span<const std::uint64_t> data) {
    ArithmeticEncoder enc;
    AdaptiveCoderTrace trace;
    trace.per_sample_bits.reserve(data.size());
    long double sum = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto coder = geometric_coder(adaptive_rate(sum, i));
        const double bits = coder.cost_bits(data[i]);
        trace.per_sample_bits.push_back(bits);
        trace.cumulative_bits += bits;
        coder.encode(enc, data[i]);
        sum += static_cast<long double>(data[i]);
    }
    IntegerStream out;
    out.payload = enc.finish();
    out.score = models::score_two_part(0, out.payload.size());
    return {std::move(out), std::move(trace)};
}

std::vector<std::uint64_t> decode_online_adaptive(const BitString& payload, std::size_t n) {
    BitStringSource src(payload);
    ArithmeticDecoder dec(src);
    std::vector<std::uint64_t> out;
    out.reserve(n);
    long double sum = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto x = geometric_coder(adaptive_rate(sum, i)).decode(dec);
        out.push_back(x);
        sum += static_cast<long double>(x);
    }
    return out;
}

} // namespace crm::numeric
