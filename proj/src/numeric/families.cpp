#include "crm/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "crm/error.hpp"
#include "crm/wire.hpp"

namespace crm::numeric {

namespace {

constexpr double kTailMass = 1e-12;
constexpr std::size_t kMaxPmfLength = 1u << 20;
constexpr float kMinSpread = 0.01f;

std::size_t param_count(Family f) {
    return f == Family::Geometric || f == Family::Poisson ? 1 : 2;
}

void check_params(const FamilyModel& m) {
    if (m.params.size() != param_count(m.family))
        throw DomainError(family_name(m.family) + ": wrong number of parameters");
    for (float p : m.params)
        if (!std::isfinite(p)) throw DomainError(family_name(m.family) + ": non-finite parameter");
    switch (m.family) {
    case Family::Geometric:
        if (!(m.params[0] > 0.0f)) throw DomainError("geometric: rate must be positive");
        break;
    case Family::Poisson:
        if (!(m.params[0] >= 0.0f)) throw DomainError("poisson: mean must be nonnegative");
        break;
    default:
        if (!(m.params[1] > 0.0f)) throw DomainError(family_name(m.family) + ": scale must be positive");
    }
}

// Mass of a continuous density on [l, u), measured via lower CDF F or upper
// survival S, whichever is the more accurate on that side of the center.
struct Continuous {
    double center;
    virtual double cdf(double t) const = 0;
    virtual double sf(double t) const = 0;
    double mass(double l, double u) const {
        return u <= center ? cdf(u) - cdf(l) : sf(l) - sf(u);
    }
    virtual ~Continuous() = default;
};

struct Gaussian final : Continuous {
    double sigma;
    Gaussian(double mu, double s) : sigma(s) { center = mu; }
    double cdf(double t) const override {
        return 0.5 * std::erfc(-(t - center) / (sigma * std::numbers::sqrt2));
    }
    double sf(double t) const override {
        return 0.5 * std::erfc((t - center) / (sigma * std::numbers::sqrt2));
    }
};

struct Laplace final : Continuous {
    double scale;
    Laplace(double mu, double b) : scale(b) { center = mu; }
    double cdf(double t) const override {
        return t < center ? 0.5 * std::exp((t - center) / scale) : 1.0 - 0.5 * std::exp(-(t - center) / scale);
    }
    double sf(double t) const override {
        return t < center ? 1.0 - 0.5 * std::exp((t - center) / scale) : 0.5 * std::exp(-(t - center) / scale);
    }
};

std::vector<double> discretize(const Continuous& c) {
    const double z = c.sf(-0.5);
    if (!(z > 0.0)) throw DomainError("discretized family: no mass above zero");
    std::vector<double> pmf;
    for (std::size_t x = 0; pmf.size() < kMaxPmfLength; ++x) {
        const double l = static_cast<double>(x) - 0.5;
        pmf.push_back(c.mass(l, l + 1.0) / z);
        if (l + 1.0 > c.center && c.sf(l + 1.0) / z < kTailMass) break;
    }
    return pmf;
}

std::vector<double> poisson_pmf(double mu) {
    if (mu == 0.0) return {1.0};
    std::vector<double> pmf;
    double log_p = -mu, cum = 0.0;
    for (std::size_t x = 0; pmf.size() < kMaxPmfLength; ++x) {
        if (x > 0) log_p += std::log(mu) - std::log(static_cast<double>(x));
        const double p = std::exp(log_p);
        pmf.push_back(p);
        cum += p;
        if (static_cast<double>(x) >= mu && 1.0 - cum < kTailMass) break;
    }
    double sum = 0.0;
    for (double p : pmf) sum += p;
    for (double& p : pmf) p /= sum;
    return pmf;
}

double mean_of(std::span<const std::uint64_t> data) {
    long double s = 0;
    for (auto x : data) s += static_cast<long double>(x);
    return static_cast<double>(s / data.size());
}

} // namespace

std::string family_name(Family f) {
    switch (f) {
    case Family::Geometric: return "geometric";
    case Family::Poisson: return "poisson";
    case Family::DiscretizedGaussian: return "gaussian";
    case Family::DiscretizedLaplace: return "laplace";
    }
    return "unknown";
}

std::optional<Family> parse_family(std::string_view name) {
    for (auto f : kAllFamilies)
        if (family_name(f) == name) return f;
    return std::nullopt;
}

std::vector<double> FamilyModel::pmf() const {
    check_params(*this);
    switch (family) {
    case Family::Geometric: {
        const GeometricModel g(params[0]);
        std::vector<double> out;
        double tail = 1.0;
        for (std::uint64_t x = 0; tail >= kTailMass && out.size() < kMaxPmfLength; ++x) {
            out.push_back(g.pmf(x));
            tail *= std::exp(-g.lambda());
        }
        return out;
    }
    case Family::Poisson: return poisson_pmf(params[0]);
    case Family::DiscretizedGaussian: return discretize(Gaussian(params[0], params[1]));
    case Family::DiscretizedLaplace: return discretize(Laplace(params[0], params[1]));
    }
    throw DomainError("unknown family");
}

std::vector<std::uint8_t> FamilyModel::serialize() const {
    check_params(*this);
    wire::ByteWriter w;
    w.u8(static_cast<std::uint8_t>(family));
    for (float p : params) w.f32(p);
    return std::move(w).take();
}

FamilyModel FamilyModel::parse(std::span<const std::uint8_t> header) {
    wire::ByteReader r(header);
    const auto id = r.u8();
    if (id > 3) throw ParseError("family header: unknown family id", 0);
    FamilyModel m;
    m.family = static_cast<Family>(id);
    for (std::size_t i = 0; i < param_count(m.family); ++i) m.params.push_back(r.f32());
    if (!r.at_end()) throw ParseError("family header: trailing bytes", r.position());
    check_params(m);
    return m;
}

FamilyModel fit_family(Family family, std::span<const std::uint64_t> data) {
    if (data.empty()) throw DomainError("fit_family: empty data");
    FamilyModel m;
    m.family = family;
    const double mean = mean_of(data);
    switch (family) {
    case Family::Geometric:
        m.params = {static_cast<float>(mle_lambda(data))};
        break;
    case Family::Poisson:
        m.params = {static_cast<float>(mean)};
        break;
    case Family::DiscretizedGaussian: {
        long double ss = 0;
        for (auto x : data) {
            const long double d = static_cast<long double>(x) - mean;
            ss += d * d;
        }
        const double sigma = std::sqrt(static_cast<double>(ss / data.size()));
        m.params = {static_cast<float>(mean), std::max(static_cast<float>(sigma), kMinSpread)};
        break;
    }
    case Family::DiscretizedLaplace: {
        std::vector<std::uint64_t> sorted(data.begin(), data.end());
        const auto mid = sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2);
        std::nth_element(sorted.begin(), mid, sorted.end());
        const double median = static_cast<double>(*mid);
        long double dev = 0;
        for (auto x : data) dev += std::fabs(static_cast<double>(x) - median);
        const double b = static_cast<double>(dev / data.size());
        m.params = {static_cast<float>(median), std::max(static_cast<float>(b), kMinSpread)};
        break;
    }
    }
    return m;
}

FamilySelection select_family(std::span<const std::uint64_t> data) {
    if (data.empty()) throw DomainError("select_family: empty data");
    std::optional<FamilySelection> best;
    std::array<models::NetScore, 4> candidates{};
    for (auto f : kAllFamilies) {
        auto model = fit_family(f, data);
        const IntegerCoder coder(model.pmf());
        coding::ArithmeticEncoder enc;
        for (auto x : data) coder.encode(enc, x);
        auto payload = enc.finish();
        const auto score = models::score_two_part(
            kFamilyIdBits + kParameterBits * model.params.size(), payload.size());
        candidates[static_cast<std::size_t>(f)] = score;
        if (!best || score.total < best->score.total)
            best = FamilySelection{std::move(model), score, std::move(payload), {}};
    }
    best->candidates = candidates;
    return std::move(*best);
}

std::vector<std::uint64_t> decode_family(const FamilyModel& model, const coding::BitString& payload,
                                         std::size_t n) {
    const IntegerCoder coder(model.pmf());
    coding::BitStringSource src(payload);
    coding::ArithmeticDecoder dec(src);
    std::vector<std::uint64_t> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(coder.decode(dec));
    return out;
}

// ---------------------------------------------------------------------------

namespace {

class Uniform01 {
public:
    explicit Uniform01(std::uint64_t seed) : engine_(seed) {}
    double operator()() { // strictly inside (0, 1)
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

private:
    std::mt19937_64 engine_;
};

double standard_normal(Uniform01& u) {
    return std::sqrt(-2.0 * std::log(u())) * std::cos(2.0 * std::numbers::pi * u());
}

} // namespace

std::vector<std::uint64_t> sample_family(const FamilyModel& model, std::size_t n, std::uint64_t seed) {
    check_params(model);
    Uniform01 u(seed);
    std::vector<std::uint64_t> out;
    out.reserve(n);
    const double a = model.params[0];
    const double b = model.params.size() > 1 ? model.params[1] : 0.0;
    if (model.family == Family::Poisson && a > 1e6) throw DomainError("poisson: mean too large to sample");
    if ((model.family == Family::DiscretizedGaussian || model.family == Family::DiscretizedLaplace) &&
        a + 40.0 * b < -0.5)
        throw DomainError(family_name(model.family) + ": no mass above zero");
    auto to_int = [](double v) { return static_cast<std::uint64_t>(std::floor(v + 0.5)); };
    while (out.size() < n) {
        switch (model.family) {
        case Family::Geometric:
            out.push_back(static_cast<std::uint64_t>(std::floor(-std::log(u()) / a)));
            break;
        case Family::Poisson: {
            // inversion, walking up from zero in the log domain
            const double target = u();
            double log_p = -a, cum = 0.0;
            std::uint64_t x = 0;
            for (;; ++x) {
                if (x > 0) log_p += std::log(a) - std::log(static_cast<double>(x));
                cum += std::exp(log_p);
                if (cum >= target || (static_cast<double>(x) > a && std::exp(log_p) < 1e-300)) break;
            }
            out.push_back(x);
            break;
        }
        case Family::DiscretizedGaussian: {
            const double v = a + b * standard_normal(u);
            if (v >= -0.5) out.push_back(to_int(v));
            break;
        }
        case Family::DiscretizedLaplace: {
            const double w = u() - 0.5;
            const double v = a - b * (w < 0 ? -1.0 : 1.0) * std::log(1.0 - 2.0 * std::fabs(w));
            if (v >= -0.5) out.push_back(to_int(v));
            break;
        }
        }
    }
    return out;
}

std::vector<double> sample_normal(double mean, double sigma, std::size_t n, std::uint64_t seed) {
    if (!(sigma > 0.0)) throw DomainError("sample_normal: sigma must be positive");
    Uniform01 u(seed);
    std::vector<double> out(n);
    for (auto& v : out) v = mean + sigma * standard_normal(u);
    return out;
}

// ---------------------------------------------------------------------------

CombReport mdl_gaussian_vs_comb(std::span<const double> data) {
    if (data.size() < 2) throw DomainError("mdl_gaussian_vs_comb: need at least two samples");
    const double n = static_cast<double>(data.size());
    double mean = 0.0;
    for (double x : data) mean += x;
    mean /= n;
    double var = 0.0;
    for (double x : data) var += (x - mean) * (x - mean);
    var = std::max(var / n, kCombVarianceFloor);

    auto log2_normal = [](double x, double mu, double v) {
        return (-0.5 * std::log(2.0 * std::numbers::pi * v) - (x - mu) * (x - mu) / (2.0 * v)) /
               std::numbers::ln2;
    };
    const double cell = std::log2(kRealResolution);

    CombReport r;
    r.single.model_bits = 64.0;
    for (double x : data) r.single.payload_bits -= log2_normal(x, mean, var) + cell;

    r.comb.model_bits = 64.0 * n;
    for (double x : data) {
        // log-sum-exp over the equally weighted components
        std::vector<double> terms;
        terms.reserve(data.size());
        for (double c : data) terms.push_back(log2_normal(x, c, kCombVarianceFloor));
        const double top = *std::max_element(terms.begin(), terms.end());
        double s = 0.0;
        for (double t : terms) s += std::exp2(t - top);
        r.comb.payload_bits -= top + std::log2(s) - std::log2(n) + cell;
    }
    r.single_wins = r.single.total() < r.comb.total();
    return r;
}

} // namespace crm::numeric
