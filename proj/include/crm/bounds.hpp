#pragma once

// Generalization calculators: sample complexity from class size, the largest
// class a sample supports, rule-class sizes, the hidden-worm bound and its
// Monte Carlo check, the compression view of learning and the
// compression-rate risk bound. Logs are natural unless a result says bits.

#include <cstdint>
#include <optional>
#include <string>

namespace crm::bounds {

enum class BoundUnit { Samples, Nats, Bits, Probability, Dimensionless };

std::string unit_name(BoundUnit unit);

struct BoundResult {
    std::string quantity;
    double value = 0.0;
    BoundUnit unit = BoundUnit::Dimensionless;

    /// The value in bits when the unit is nats or bits.
    std::optional<double> bits() const;
    std::optional<double> nats() const;
};

/// ln |C|, optionally with the exact size it came from. Any finite value is
/// accepted so that |C| / delta = 1 stays expressible.
struct HypothesisClassSpec {
    double ln_size = 0.0;
    std::optional<std::uint64_t> exact_size;

    static HypothesisClassSpec from_size(std::uint64_t size);
    static HypothesisClassSpec from_ln(double ln_size);
    static HypothesisClassSpec from_log2(double log2_size);
};

/// ceil((ln|C| - ln delta) / epsilon), never below 0.
BoundResult required_samples(double epsilon, double delta, const HypothesisClassSpec& spec);
/// N epsilon - ln delta.
BoundResult max_class_log_size(double n, double epsilon, double delta);
/// D (ln K + ln E).
BoundResult rule_class_log_size(std::uint64_t k, std::uint64_t e, std::uint64_t d);
/// min(1, |C| (1 - epsilon)^N).
BoundResult hidden_worm_bound(const HypothesisClassSpec& spec, double epsilon, std::uint64_t n);

/// Largest size * N * trials the simulator accepts.
inline constexpr double kMaxSimulationWork = 1e10;

struct WormSimulation {
    std::uint64_t trials = 0;
    std::uint64_t worm_trials = 0; // trials in which some hypothesis survived
    double frequency = 0.0;
    double analytic_bound = 0.0;
    double sigma = 0.0; // binomial standard deviation at the bound
};

/// Each trial draws `size` hypotheses that err on each sample independently
/// with probability epsilon and records whether any survives all N samples.
/// Trials run in parallel with seeds derived from `seed` and the trial index.
/// Throws RefusedError when size * N * trials exceeds kMaxSimulationWork.
WormSimulation simulate_hidden_worm(std::uint64_t size, double epsilon, std::uint64_t n,
                                    std::uint64_t trials, std::uint64_t seed,
                                    unsigned threads = 0);

struct CompressionView {
    double bits = 0.0;          // flag + hypothesis index, or flag + raw labels
    double fallback_bits = 0.0; // 1 + N
    bool saves = false;         // found and log2|C| < N
};

CompressionView compression_view_codelength(bool found, const HypothesisClassSpec& spec,
                                            std::uint64_t n);

/// 2 (K ln 2 - ln(delta) / N) with K in bits per sample.
BoundResult compression_generalization_bound(double k_rate, double n, double delta);

/// A model must cost fewer bits than the flat encoding it displaces.
BoundResult model_complexity_ceiling(double n_labels, double payload_bits_flat);

/// flat - (model + payload).
double two_part_savings(double model_bits, double payload_bits, double flat_bits);

} // namespace crm::bounds
