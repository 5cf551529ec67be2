#pragma once

// The model contract: sequential probability models, two-part scores,
// champion selection, the self-describing container, round-trip
// verification, sampling by decoding random bits, and the exhaustive
// no-free-lunch check.

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "crm/coding.hpp"

namespace crm::models {

/// A sequential model over a finite alphabet. The next-symbol distribution
/// depends only on the serialized header and the symbols observed since
/// reset(), so an encoder and a decoder built from the same header stay in
/// lockstep.
class ProbModel {
public:
    virtual ~ProbModel() = default;

    virtual std::string model_id() const = 0;
    virtual std::size_t alphabet_size() const = 0;
    /// Returns to the start context.
    virtual void reset() = 0;
    virtual coding::SymbolDistribution predict() const = 0;
    /// Integer table the coder uses for the next symbol.
    virtual coding::CumulativeTable predict_table() const {
        return coding::CumulativeTable::quantize(predict());
    }
    virtual void observe(std::uint32_t symbol) = 0;
    virtual std::vector<std::uint8_t> serialize() const = 0;
    virtual std::unique_ptr<ProbModel> clone() const = 0;
};

/// Rebuilds models from (model_id, header bytes).
class ModelFactory {
public:
    using Loader = std::function<std::unique_ptr<ProbModel>(std::span<const std::uint8_t>)>;

    void add(const std::string& model_id, Loader loader);
    bool contains(const std::string& model_id) const { return loaders_.contains(model_id); }
    std::unique_ptr<ProbModel> load(const std::string& model_id,
                                    std::span<const std::uint8_t> header) const;

    /// Factory knowing the generic models defined in this header.
    static ModelFactory with_builtins();

private:
    std::map<std::string, Loader> loaders_;
};

/// Every symbol equally likely.
class UniformModel final : public ProbModel {
public:
    explicit UniformModel(std::size_t alphabet_size);
    std::string model_id() const override { return "uniform"; }
    std::size_t alphabet_size() const override { return size_; }
    void reset() override {}
    coding::SymbolDistribution predict() const override;
    coding::CumulativeTable predict_table() const override;
    void observe(std::uint32_t) override {}
    std::vector<std::uint8_t> serialize() const override;
    std::unique_ptr<ProbModel> clone() const override { return std::make_unique<UniformModel>(*this); }
    static std::unique_ptr<ProbModel> load(std::span<const std::uint8_t> header);

private:
    std::size_t size_;
};

/// A fixed i.i.d. distribution.
class StaticModel final : public ProbModel {
public:
    explicit StaticModel(coding::SymbolDistribution dist);
    std::string model_id() const override { return "static"; }
    std::size_t alphabet_size() const override { return dist_.size(); }
    void reset() override {}
    coding::SymbolDistribution predict() const override { return dist_; }
    coding::CumulativeTable predict_table() const override { return table_; }
    void observe(std::uint32_t) override {}
    std::vector<std::uint8_t> serialize() const override;
    std::unique_ptr<ProbModel> clone() const override { return std::make_unique<StaticModel>(*this); }
    static std::unique_ptr<ProbModel> load(std::span<const std::uint8_t> header);

private:
    coding::SymbolDistribution dist_;
    coding::CumulativeTable table_;
};

/// Order-0 adaptive frequency counts. Each count starts at `initial`, grows by
/// `increment` per occurrence, and all counts are halved (staying >= 1) when
/// the total would exceed `limit` (<= 2^16).
class AdaptiveFrequencyModel final : public ProbModel {
public:
    AdaptiveFrequencyModel(std::size_t alphabet_size, std::uint32_t initial = 1,
                           std::uint32_t increment = 32,
                           std::uint32_t limit = coding::CumulativeTable::kMaxTotal);
    std::string model_id() const override { return "adaptive-frequency"; }
    std::size_t alphabet_size() const override { return counts_.size(); }
    void reset() override;
    coding::SymbolDistribution predict() const override;
    coding::CumulativeTable predict_table() const override;
    void observe(std::uint32_t symbol) override;
    std::vector<std::uint8_t> serialize() const override;
    std::unique_ptr<ProbModel> clone() const override {
        return std::make_unique<AdaptiveFrequencyModel>(*this);
    }
    static std::unique_ptr<ProbModel> load(std::span<const std::uint8_t> header);

private:
    std::uint32_t initial_, increment_, limit_;
    std::vector<std::uint32_t> counts_;
    std::uint64_t total_ = 0;
};

/// Codes `symbols` from the model's start context. Throws EncodingError on a
/// zero-frequency symbol.
coding::BitString encode_sequence(ProbModel& model, std::span<const std::uint32_t> symbols);
std::vector<std::uint32_t> decode_sequence(ProbModel& model, coding::BitSource& bits,
                                           std::size_t n_symbols);
std::vector<std::uint32_t> decode_sequence(ProbModel& model, const coding::BitString& bits,
                                           std::size_t n_symbols);

/// Realized codelength under the model's (unquantized) predictions.
double sequence_codelength(ProbModel& model, std::span<const std::uint32_t> symbols,
                           coding::Unit unit);

/// Two-part codelength: model bits H[f] plus payload bits L(T|f).
struct NetScore {
    std::uint64_t model_bits = 0;
    std::uint64_t payload_bits = 0;
    std::uint64_t total = 0;

    friend bool operator==(const NetScore&, const NetScore&) = default;
};

/// Throws DomainError when the total would exceed 2^63 - 1.
NetScore score_two_part(std::uint64_t model_bits, std::uint64_t payload_bits);

enum class Champion { Incumbent, Challenger };

/// Smaller total wins; equal totals go to fewer model bits; a full tie keeps
/// the incumbent.
Champion compare_champion(const NetScore& incumbent, const NetScore& challenger);

using Digest = std::array<std::uint8_t, 32>;

Digest sha256(std::span<const std::uint8_t> data);
std::string to_hex(std::span<const std::uint8_t> bytes);

/// Binary layout, little-endian: "CRM1", u8 version, u16 id length + id,
/// u32 header length + header, u64 original length, u64 payload bit length,
/// payload bytes, 32-byte SHA-256 of the original.
struct EncodedContainer {
    static constexpr std::uint8_t kFormatVersion = 1;

    std::string model_id;
    std::vector<std::uint8_t> model_header;
    std::uint64_t original_length = 0;
    coding::BitString payload;
    Digest checksum{};

    std::vector<std::uint8_t> serialize() const;
    /// Throws ParseError naming the offending offset.
    static EncodedContainer parse(std::span<const std::uint8_t> bytes);
};

using ContainerDecoder = std::function<std::vector<std::uint8_t>(const EncodedContainer&)>;

struct VerificationReport {
    bool ok = false;
    Digest decoded_checksum{};
    std::uint64_t byte_length = 0;
    std::optional<std::uint64_t> first_mismatch_offset;
    std::string diagnostic;
};

/// Decodes `container` and compares it byte for byte with `original`.
VerificationReport verify_roundtrip(std::span<const std::uint8_t> original,
                                    const EncodedContainer& container,
                                    const ContainerDecoder& decode);

/// Draws symbols by feeding bits to the decoder (zero-extended when exhausted).
std::vector<std::uint32_t> sample_from_model(ProbModel& model, const coding::BitString& random_bits,
                                             std::size_t n_symbols);

/// Mean encoded length in bits over all 2^n_bits binary strings of length
/// n_bits. Refuses n_bits > 16.
double nfl_average_codelength(ProbModel& binary_model, unsigned n_bits);

/// Realized codelength under the default model minus that under the
/// specialized one, in bits. Positive means the specialist helps.
double virtual_label(std::span<const std::uint32_t> window, ProbModel& default_model,
                     ProbModel& specialized_model);

} // namespace crm::models
