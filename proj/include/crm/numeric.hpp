#pragma once

// Integer-valued data coded at four levels of prior knowledge: a fixed
// geometric guess, the true rate, a rate sent in a 64-bit header, and an
// online estimate that needs no header. Also family selection over four
// discrete families and the Gaussian-versus-comb two-part comparison.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "crm/coding.hpp"
#include "crm/models.hpp"

namespace crm::numeric {

/// A quantity reported in both units.
struct DualUnit {
    double nats = 0.0;
    double bits = 0.0;
    static DualUnit from_nats(double nats);
};

/// P(x) = (1 - e^-lambda) e^(-lambda x) over x = 0, 1, 2, ...
class GeometricModel {
public:
    explicit GeometricModel(double lambda);
    double lambda() const noexcept { return lambda_; }
    double success() const noexcept { return p_; }   // 1 - e^-lambda
    double mean() const noexcept { return q_ / p_; } // E[x]
    double pmf(std::uint64_t x) const;
    double log_pmf(std::uint64_t x) const;

private:
    double lambda_, p_, q_;
};

DualUnit geometric_entropy(double lambda);
/// Expected codelength of data at rate `lambda_true` coded at `lambda_guess`.
DualUnit geometric_cross_entropy(double lambda_true, double lambda_guess);
DualUnit geometric_kl(double lambda_true, double lambda_guess);

/// Rate returned for an all-zero sample.
inline constexpr double kLambdaMax = 50.0;

/// ln((1 + m) / m) for sample mean m; kLambdaMax when m = 0.
double mle_lambda(std::span<const std::uint64_t> data);
double mle_lambda(std::span<const std::int64_t> data);

/// floor(header_bits / penalty): the largest N at which the fixed guess still
/// ties or wins against paying for the header.
std::uint64_t crossover_n(double header_bits, double per_sample_penalty);

/// Codes nonnegative integers against a pmf given on 0..pmf.size()-1. Values
/// in a contiguous window around the bulk of the mass get their own symbol;
/// everything else goes through an escape symbol followed by a side bit and
/// an Elias-gamma distance, so every integer is codable.
class IntegerCoder {
public:
    explicit IntegerCoder(std::span<const double> pmf,
                          std::uint32_t total = coding::CumulativeTable::kDefaultTotal);
    /// Window [lo, lo + window.size()) given directly, with the mass outside it.
    static IntegerCoder from_window(std::uint64_t lo, std::vector<double> window, double outside_mass,
                                    std::uint32_t total = coding::CumulativeTable::kDefaultTotal);

    void encode(coding::ArithmeticEncoder& encoder, std::uint64_t value) const;
    std::uint64_t decode(coding::ArithmeticDecoder& decoder) const;
    /// Bits the coder spends on `value`, from the integer table.
    double cost_bits(std::uint64_t value) const;

    std::uint64_t window_low() const noexcept { return lo_; }
    std::uint64_t window_high() const noexcept { return hi_; } // exclusive
    const coding::CumulativeTable& table() const noexcept { return table_; }

private:
    IntegerCoder();
    void build(std::uint64_t lo, std::vector<double> window, double outside_mass, std::uint32_t total);

    std::uint64_t lo_ = 0, hi_ = 0;
    coding::CumulativeTable table_;
};

/// Coder for a geometric rate.
IntegerCoder geometric_coder(double lambda);

struct IntegerStream {
    models::NetScore score;
    std::vector<std::uint8_t> header;
    coding::BitString payload;
};

/// Scenario "guess": no header, every sample coded at `lambda_guess`.
IntegerStream encode_fixed(std::span<const std::uint64_t> data, double lambda_guess);
std::vector<std::uint64_t> decode_fixed(const coding::BitString& payload, double lambda_guess,
                                        std::size_t n);

/// Scenario "header": the MLE rate as an IEEE double in a 64-bit header.
IntegerStream encode_with_header(std::span<const std::uint64_t> data);
std::vector<std::uint64_t> decode_with_header(std::span<const std::uint8_t> header,
                                              const coding::BitString& payload, std::size_t n);

struct AdaptiveCoderTrace {
    std::vector<double> per_sample_bits;
    double cumulative_bits = 0.0;
};

/// Scenario "universal": sample i is coded at the rate estimated from samples
/// before it plus one pseudo-observation of value 1. No header.
std::pair<IntegerStream, AdaptiveCoderTrace> encode_online_adaptive(std::span<const std::uint64_t> data);
std::vector<std::uint64_t> decode_online_adaptive(const coding::BitString& payload, std::size_t n);

enum class Family : std::uint8_t { Geometric = 0, Poisson = 1, DiscretizedGaussian = 2, DiscretizedLaplace = 3 };
inline constexpr std::array<Family, 4> kAllFamilies{Family::Geometric, Family::Poisson,
                                                     Family::DiscretizedGaussian,
                                                     Family::DiscretizedLaplace};
std::string family_name(Family f);
std::optional<Family> parse_family(std::string_view name);

/// Bits for the family id and for each real parameter in a selected format.
inline constexpr std::uint64_t kFamilyIdBits = 2;
inline constexpr std::uint64_t kParameterBits = 32;

/// A family with float32 parameters: geometric {lambda}, poisson {mean},
/// gaussian {mean, sigma}, laplace {location, scale}.
struct FamilyModel {
    Family family = Family::Geometric;
    std::vector<float> params;

    /// pmf over 0..X where the renormalized upper tail beyond X is < 1e-12.
    /// Continuous families integrate their density over [x - 0.5, x + 0.5)
    /// and drop the mass below -0.5.
    std::vector<double> pmf() const;
    std::vector<std::uint8_t> serialize() const;
    static FamilyModel parse(std::span<const std::uint8_t> header);
};

/// Maximum-likelihood style estimates for one family.
FamilyModel fit_family(Family family, std::span<const std::uint64_t> data);

struct FamilySelection {
    FamilyModel model;
    models::NetScore score;
    coding::BitString payload;
    std::array<models::NetScore, 4> candidates; // indexed by family id
};

/// Codes the data under every family and keeps the smallest two-part total;
/// ties go to the lower family id.
FamilySelection select_family(std::span<const std::uint64_t> data);
std::vector<std::uint64_t> decode_family(const FamilyModel& model, const coding::BitString& payload,
                                         std::size_t n);

/// Width of the cells real values are coded to.
inline constexpr double kRealResolution = 1.0 / 65536.0;
inline constexpr double kCombVarianceFloor = 1e-4;

struct TwoPartReal {
    double model_bits = 0.0;
    double payload_bits = 0.0; // likelihood-only codelength at kRealResolution
    double total() const { return model_bits + payload_bits; }
};

struct CombReport {
    TwoPartReal single; // one Gaussian: 64 parameter bits
    TwoPartReal comb;   // one component per sample: 64 bits each
    bool single_wins = false;
};

CombReport mdl_gaussian_vs_comb(std::span<const double> data);

// Seeded generators for synthetic datasets.
std::vector<std::uint64_t> sample_family(const FamilyModel& model, std::size_t n, std::uint64_t seed);
std::vector<double> sample_normal(double mean, double sigma, std::size_t n, std::uint64_t seed);

} // namespace crm::numeric
