#include "crm/error.hpp"
#include "crm/models.hpp"
#include "crm/wire.hpp"

namespace crm::models {

using coding::CumulativeTable;
using coding::SymbolDistribution;

void ModelFactory::add(const std::string& model_id, Loader loader) {
    loaders_[model_id] = std::move(loader);
}

std::unique_ptr<ProbModel> ModelFactory::load(const std::string& model_id,
                                              std::span<const std::uint8_t> header) const {
    const auto it = loaders_.find(model_id);
    if (it == loaders_.end()) throw NotFoundError("unknown model id '" + model_id + "'");
    return it->second(header);
}

ModelFactory ModelFactory::with_builtins() {
    ModelFactory f;
    f.add("uniform", UniformModel::load);
    f.add("static", StaticModel::load);
    f.add("adaptive-frequency", AdaptiveFrequencyModel::load);
    return f;
}

UniformModel::UniformModel(std::size_t alphabet_size) : size_(alphabet_size) {
    if (size_ == 0 || size_ > CumulativeTable::kMaxTotal)
        throw DomainError("uniform model alphabet must be in [1, 2^16]");
}

SymbolDistribution UniformModel::predict() const { return SymbolDistribution::uniform(size_); }

CumulativeTable UniformModel::predict_table() const {
    return CumulativeTable::from_frequencies(std::vector<std::uint32_t>(size_, 1));
}

std::vector<std::uint8_t> UniformModel::serialize() const {
    wire::ByteWriter w;
    w.u32(static_cast<std::uint32_t>(size_));
    return std::move(w).take();
}

std::unique_ptr<ProbModel> UniformModel::load(std::span<const std::uint8_t> header) {
    wire::ByteReader r(header);
    return std::make_unique<UniformModel>(r.u32());
}

StaticModel::StaticModel(SymbolDistribution dist)
    : dist_(std::move(dist)), table_(CumulativeTable::quantize(dist_)) {}

std::vector<std::uint8_t> StaticModel::serialize() const {
    wire::ByteWriter w;
    w.u32(static_cast<std::uint32_t>(dist_.size()));
    for (double p : dist_.probs()) w.f64(p);
    return std::move(w).take();
}

std::unique_ptr<ProbModel> StaticModel::load(std::span<const std::uint8_t> header) {
    wire::ByteReader r(header);
    const std::uint32_t n = r.u32();
    if (n == 0 || n > r.remaining() / 8) throw ParseError("bad static model size", 0);
    std::vector<double> probs(n);
    for (double& p : probs) p = r.f64();
    return std::make_unique<StaticModel>(SymbolDistribution(std::move(probs)));
}

AdaptiveFrequencyModel::AdaptiveFrequencyModel(std::size_t alphabet_size, std::uint32_t initial,
                                               std::uint32_t increment, std::uint32_t limit)
    : initial_(initial), increment_(increment), limit_(limit), counts_(alphabet_size, initial) {
    if (alphabet_size == 0) throw DomainError("adaptive model over an empty alphabet");
    if (initial == 0 || increment == 0) throw DomainError("adaptive counts must start and grow positive");
    if (limit > CumulativeTable::kMaxTotal || alphabet_size * initial + increment > limit)
        throw DomainError("adaptive model total limit too small for the alphabet");
    total_ = static_cast<std::uint64_t>(alphabet_size) * initial;
}

void AdaptiveFrequencyModel::reset() {
    std::fill(counts_.begin(), counts_.end(), initial_);
    total_ = static_cast<std::uint64_t>(counts_.size()) * initial_;
}

SymbolDistribution AdaptiveFrequencyModel::predict() const {
    std::vector<double> w(counts_.begin(), counts_.end());
    return SymbolDistribution::from_weights(w);
}

CumulativeTable AdaptiveFrequencyModel::predict_table() const {
    return CumulativeTable::from_frequencies(counts_);
}

void AdaptiveFrequencyModel::observe(std::uint32_t symbol) {
    counts_.at(symbol) += increment_;
    total_ += increment_;
    if (total_ + increment_ > limit_) {
        total_ = 0;
        for (auto& c : counts_) {
            c = (c + 1) / 2;
            total_ += c;
        }
    }
}

std::vector<std::uint8_t> AdaptiveFrequencyModel::serialize() const {
    wire::ByteWriter w;
    w.u32(static_cast<std::uint32_t>(counts_.size()));
    w.u32(initial_);
    w.u32(increment_);
    w.u32(limit_);
    return std::move(w).take();
}

std::unique_ptr<ProbModel> AdaptiveFrequencyModel::load(std::span<const std::uint8_t> header) {
    wire::ByteReader r(header);
    const std::uint32_t n = r.u32();
    const std::uint32_t initial = r.u32();
    const std::uint32_t increment = r.u32();
    const std::uint32_t limit = r.u32();
    return std::make_unique<AdaptiveFrequencyModel>(n, initial, increment, limit);
}

} // namespace crm::models
