#include "crm/bounds.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <thread>
#include <vector>

#include "crm/error.hpp"

namespace crm::bounds {

namespace {

void require_open_unit(double v, const char* name) {
    if (!(v > 0.0 && v < 1.0)) throw DomainError(std::string(name) + " must lie in (0, 1)");
}

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string(name) + " must be positive");
}

void require_spec(const HypothesisClassSpec& spec) {
    if (!std::isfinite(spec.ln_size)) throw DomainError("class log-size must be finite");
}

std::uint64_t mix(std::uint64_t x) { // splitmix64 finalizer
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

} // namespace

std::string unit_name(BoundUnit unit) {
    switch (unit) {
    case BoundUnit::Samples: return "samples";
    case BoundUnit::Nats: return "nats";
    case BoundUnit::Bits: return "bits";
    case BoundUnit::Probability: return "probability";
    case BoundUnit::Dimensionless: return "dimensionless";
    }
    return "unknown";
}

std::optional<double> BoundResult::bits() const {
    if (unit == BoundUnit::Bits) return value;
    if (unit == BoundUnit::Nats) return value / std::log(2.0);
    return std::nullopt;
}

std::optional<double> BoundResult::nats() const {
    if (unit == BoundUnit::Nats) return value;
    if (unit == BoundUnit::Bits) return value * std::log(2.0);
    return std::nullopt;
}

HypothesisClassSpec HypothesisClassSpec::from_size(std::uint64_t size) {
    if (size == 0) throw DomainError("class size must be at least 1");
    return {std::log(static_cast<double>(size)), size};
}

HypothesisClassSpec HypothesisClassSpec::from_ln(double ln_size) {
    HypothesisClassSpec s{ln_size, std::nullopt};
    require_spec(s);
    return s;
}

HypothesisClassSpec HypothesisClassSpec::from_log2(double log2_size) {
    return from_ln(log2_size * std::log(2.0));
}

BoundResult required_samples(double epsilon, double delta, const HypothesisClassSpec& spec) {
    require_open_unit(epsilon, "epsilon");
    require_open_unit(delta, "delta");
    require_spec(spec);
    const double n = std::ceil((spec.ln_size - std::log(delta)) / epsilon - 1e-9);
    return {"required_samples", std::max(0.0, n), BoundUnit::Samples};
}

BoundResult max_class_log_size(double n, double epsilon, double delta) {
    if (!(n >= 0.0) || !std::isfinite(n)) throw DomainError("N must be nonnegative");
    require_open_unit(epsilon, "epsilon");
    if (!(delta > 0.0 && delta <= 1.0)) throw DomainError("delta must lie in (0, 1]");
    return {"max_class_log_size", n * epsilon - std::log(delta), BoundUnit::Nats};
}

BoundResult rule_class_log_size(std::uint64_t k, std::uint64_t e, std::uint64_t d) {
    if (k == 0 || e == 0 || d == 0) throw DomainError("K, E and D must be positive");
    const double v = static_cast<double>(d) * (std::log(static_cast<double>(k)) + std::log(static_cast<double>(e)));
    return {"rule_class_log_size", v, BoundUnit::Nats};
}

BoundResult hidden_worm_bound(const HypothesisClassSpec& spec, double epsilon, std::uint64_t n) {
    require_spec(spec);
    if (!(epsilon > 0.0 && epsilon <= 1.0)) throw DomainError("epsilon must lie in (0, 1]");
    double v;
    if (epsilon == 1.0) {
        v = n == 0 ? 1.0 : 0.0;
    } else {
        const double log_v = spec.ln_size + static_cast<double>(n) * std::log1p(-epsilon);
        v = std::min(1.0, std::exp(log_v));
    }
    return {"hidden_worm_bound", v, BoundUnit::Probability};
}

WormSimulation simulate_hidden_worm(std::uint64_t size, double epsilon, std::uint64_t n,
                                    std::uint64_t trials, std::uint64_t seed, unsigned threads) {
    if (size == 0 || trials == 0) throw DomainError("size and trials must be positive");
    if (!(epsilon > 0.0 && epsilon <= 1.0)) throw DomainError("epsilon must lie in (0, 1]");
    const double work = static_cast<double>(size) * static_cast<double>(std::max<std::uint64_t>(n, 1)) *
                        static_cast<double>(trials);
    if (work > kMaxSimulationWork)
        throw RefusedError("simulation of " + std::to_string(work) + " draws exceeds the limit of 1e10");

    const double scaled = std::ldexp(epsilon, 64);
    const std::uint64_t threshold = scaled >= 0x1.0p64 ? ~0ull : static_cast<std::uint64_t>(scaled);
    auto run_trial = [&](std::uint64_t t) {
        std::mt19937_64 rng(mix(seed ^ mix(t)));
        for (std::uint64_t h = 0; h < size; ++h) {
            std::uint64_t i = 0;
            while (i < n && rng() >= threshold && epsilon < 1.0) ++i;
            if (i == n) return true;
        }
        return false;
    };

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, trials));
    std::atomic<std::uint64_t> next{0}, worms{0};
    auto worker = [&] {
        std::uint64_t local = 0;
        for (std::uint64_t t; (t = next.fetch_add(1)) < trials;) local += run_trial(t);
        worms += local;
    };
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    WormSimulation r;
    r.trials = trials;
    r.worm_trials = worms;
    r.frequency = static_cast<double>(r.worm_trials) / static_cast<double>(trials);
    r.analytic_bound = hidden_worm_bound(HypothesisClassSpec::from_size(size), epsilon, n).value;
    const double p = std::min(r.analytic_bound, 1.0);
    r.sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
    return r;
}

CompressionView compression_view_codelength(bool found, const HypothesisClassSpec& spec, std::uint64_t n) {
    require_spec(spec);
    CompressionView v;
    const double log2_size = spec.ln_size / std::log(2.0);
    v.fallback_bits = 1.0 + static_cast<double>(n);
    v.bits = found ? 1.0 + log2_size : v.fallback_bits;
    v.saves = found && log2_size < static_cast<double>(n) * (1.0 - 1e-12);
    return v;
}

BoundResult compression_generalization_bound(double k_rate, double n, double delta) {
    if (!(k_rate >= 0.0) || !std::isfinite(k_rate)) throw DomainError("compression rate must be nonnegative");
    if (!(n >= 1.0) || !std::isfinite(n)) throw DomainError("N must be at least 1");
    if (!(delta > 0.0 && delta <= 1.0)) throw DomainError("delta must lie in (0, 1]");
    return {"compression_generalization_bound", 2.0 * (k_rate * std::log(2.0) - std::log(delta) / n),
            BoundUnit::Dimensionless};
}

BoundResult model_complexity_ceiling(double n_labels, double payload_bits_flat) {
    require_positive(n_labels, "N");
    require_positive(payload_bits_flat, "flat payload");
    return {"model_complexity_ceiling", payload_bits_flat, BoundUnit::Bits};
}

double two_part_savings(double model_bits, double payload_bits, double flat_bits) {
    return flat_bits - (model_bits + payload_bits);
}

} // namespace crm::bounds
