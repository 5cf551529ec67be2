#pragma once

// The benchmark harness: dataset registry, the codec catalogue, verified
// runs scored by two-part codelength, leaderboards, sampling and reports.
// State lives in a JSON registry under a workspace directory.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "crm/models.hpp"

namespace crm::bench {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kRegistryVersion = 1;

enum class DatasetKind { Text, Integers, Reals, Image, FrameTriple, Bitstrings };

std::string kind_name(DatasetKind kind);
std::optional<DatasetKind> parse_kind(std::string_view name);

/// Throws ParseError (with offset) when the bytes are not a valid `kind` file.
/// Text accepts any bytes.
void validate_dataset(DatasetKind kind, std::span<const std::uint8_t> bytes);

/// One nonnegative decimal integer per line.
std::vector<std::uint64_t> parse_integers(std::span<const std::uint8_t> bytes);
std::string render_integers(std::span<const std::uint64_t> values);
/// One real per line.
std::vector<double> parse_reals(std::span<const std::uint8_t> bytes);
/// Lines of '0' and '1'.
std::vector<std::string> parse_bitstrings(std::span<const std::uint8_t> bytes);

struct Codec {
    std::string id;
    std::string description;
    std::vector<DatasetKind> kinds;
    std::uint64_t default_program_bits = 0;

    std::function<models::EncodedContainer(std::span<const std::uint8_t>)> encode;
    std::function<std::vector<std::uint8_t>(const models::EncodedContainer&)> decode;
    /// Renders `count` samples drawn by decoding seeded random bits; empty
    /// when the codec cannot generate.
    std::function<std::string(std::size_t count, std::uint64_t seed)> sample;
    /// The binary sequential model of a bit-string codec.
    std::function<std::unique_ptr<models::ProbModel>()> bit_model;

    bool supports(DatasetKind kind) const;
    bool sampleable() const { return static_cast<bool>(sample); }
};

const std::vector<Codec>& codecs();
/// Throws RefusedError for an unknown id.
const Codec& find_codec(const std::string& id);

/// Draws samples from a sampleable codec. Throws RefusedError otherwise.
std::string sample(const std::string& model_id, std::size_t count, std::uint64_t seed);

/// Synthetic dataset text, one value per line. Integer families
/// (geometric, poisson, gaussian, laplace) take their model parameters,
/// normal takes mean and sigma and writes reals, bernoulli takes p and writes
/// one line of n bits.
std::string generate_dataset(const std::string& family, std::span<const double> params, std::size_t n,
                             std::uint64_t seed);

struct DatasetEntry {
    std::string id;
    std::string path;
    std::string checksum; // SHA-256, hex
    DatasetKind kind = DatasetKind::Text;
    std::uint64_t bytes = 0;
};

struct RunReport {
    std::string dataset;
    std::string model;
    std::uint64_t seed = 0;
    models::NetScore score;
    bool verified = false;
    double wall_time = 0.0; // seconds
    std::string tool_version = kToolVersion;
    std::string container;        // path relative to the workspace
    std::string container_sha256; // of the container file
    std::uint64_t original_bytes = 0;
    std::string diagnostic;
};

struct RunOptions {
    /// Applied to the container after it is written and read back, before
    /// verification. For fault-injection tests.
    std::function<void(models::EncodedContainer&)> tamper;
};

class Workspace {
public:
    explicit Workspace(std::filesystem::path home);
    /// $CRM_HOME, or ".crm" when unset.
    static std::filesystem::path default_home();

    const std::filesystem::path& home() const noexcept { return home_; }

    /// Registers a file under `id` (default: the file name without its
    /// extension). Idempotent for identical content; refuses a changed file
    /// under an existing id and identical content under another kind.
    DatasetEntry register_dataset(const std::filesystem::path& path, DatasetKind kind,
                                  std::optional<std::string> id = std::nullopt);

    /// Encodes, writes the container, reads it back, decodes and verifies.
    /// The report is stored (replacing an earlier run of the same dataset,
    /// model and seed) whether or not verification passed.
    RunReport run(const std::string& dataset_id, const std::string& model_id, std::uint64_t seed = 0,
                  const RunOptions& options = {});

    /// Verified runs for the dataset, champion first.
    std::vector<RunReport> leaderboard(const std::string& dataset_id) const;

    std::vector<DatasetEntry> datasets() const;
    std::vector<RunReport> runs() const;
    std::uint64_t program_bits_constant(const std::string& model_id) const;

    std::string report_json(bool include_timing = true) const;
    std::string report_table(bool include_timing = true) const;

    /// Re-verifies a stored container file against a registered dataset.
    models::VerificationReport verify_container(const std::filesystem::path& container,
                                                const std::string& dataset_id) const;

private:
    std::filesystem::path home_;
};

} // namespace crm::bench
