#include "crm/coding.hpp"
#include "crm/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <string>

namespace crm::coding {

SymbolDistribution::SymbolDistribution(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.empty()) throw DomainError("distribution over an empty alphabet");
    double sum = 0.0;
    for (std::size_t i = 0; i < probs_.size(); ++i) {
        const double p = probs_[i];
        if (!std::isfinite(p) || p < 0.0 || p > 1.0)
            throw DomainError("probability of symbol " + std::to_string(i) + " is outside [0,1]");
        sum += p;
    }
    if (std::abs(sum - 1.0) > kSumTolerance)
        throw DomainError("probabilities sum to " + std::to_string(sum) + ", not 1");
}

SymbolDistribution SymbolDistribution::uniform(std::size_t alphabet_size) {
    if (alphabet_size == 0) throw DomainError("uniform distribution over an empty alphabet");
    return SymbolDistribution(std::vector<double>(alphabet_size, 1.0 / alphabet_size));
}

SymbolDistribution SymbolDistribution::from_weights(std::span<const double> weights) {
    double sum = 0.0;
    for (double w : weights) {
        if (!std::isfinite(w) || w < 0.0) throw DomainError("weights must be finite and nonnegative");
        sum += w;
    }
    if (!(sum > 0.0)) throw DomainError("weights sum to zero");
    std::vector<double> probs(weights.begin(), weights.end());
    for (double& p : probs) p /= sum;
    return SymbolDistribution(std::move(probs));
}

CumulativeTable CumulativeTable::from_frequencies(std::span<const std::uint32_t> freqs) {
    if (freqs.empty()) throw DomainError("frequency table over an empty alphabet");
    std::vector<std::uint32_t> cum(freqs.size() + 1, 0);
    std::uint64_t running = 0;
    for (std::size_t i = 0; i < freqs.size(); ++i) {
        running += freqs[i];
        if (running > kMaxTotal)
            throw DomainError("cumulative frequency total exceeds 2^16");
        cum[i + 1] = static_cast<std::uint32_t>(running);
    }
    if (running == 0) throw DomainError("frequency table with zero total");
    return CumulativeTable(std::move(cum));
}

CumulativeTable CumulativeTable::quantize(const SymbolDistribution& dist, std::uint32_t total) {
    if (total == 0 || total > kMaxTotal) throw DomainError("quantization total must be in [1, 2^16]");
    const auto probs = dist.probs();
    const std::size_t n = probs.size();
    const auto positive = static_cast<std::size_t>(
        std::count_if(probs.begin(), probs.end(), [](double p) { return p > 0.0; }));
    if (positive > total)
        throw DomainError("alphabet has more realizable symbols than the quantization total");

    std::vector<std::uint32_t> counts(n, 0);
    std::vector<double> ideal(n, 0.0);
    std::int64_t sum = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (probs[i] <= 0.0) continue;
        ideal[i] = probs[i] * total;
        counts[i] = std::max<std::uint32_t>(1, static_cast<std::uint32_t>(std::floor(ideal[i])));
        sum += counts[i];
    }

    if (sum < total) {
        // Largest remainder first; ties go to the lower symbol index.
        std::vector<std::size_t> order;
        for (std::size_t i = 0; i < n; ++i)
            if (probs[i] > 0.0) order.push_back(i);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return ideal[a] - counts[a] > ideal[b] - counts[b];
        });
        for (std::size_t k = 0; sum < total; k = (k + 1) % order.size()) {
            ++counts[order[k]];
            ++sum;
        }
    } else if (sum > total) {
        // Take back from the most over-allocated symbols that can spare a count.
        using Entry = std::pair<double, std::size_t>;
        auto cmp = [](const Entry& a, const Entry& b) {
            return a.first < b.first || (a.first == b.first && a.second > b.second);
        };
        std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> heap(cmp);
        for (std::size_t i = 0; i < n; ++i)
            if (counts[i] > 1) heap.emplace((counts[i] - ideal[i]) / counts[i], i);
        while (sum > total) {
            auto [score, i] = heap.top();
            heap.pop();
            --counts[i];
            --sum;
            if (counts[i] > 1) heap.emplace((counts[i] - ideal[i]) / counts[i], i);
        }
    }
    return from_frequencies(counts);
}

std::size_t CumulativeTable::symbol_for(std::uint32_t target) const {
    if (target >= total()) throw DomainError("decode target outside the table");
    const auto it = std::upper_bound(cum_.begin(), cum_.end(), target);
    return static_cast<std::size_t>(it - cum_.begin()) - 1;
}

} // namespace crm::coding
