#pragma once

// Letter-level text models (interpolated character n-grams and the
// vowel-constrained word model), word sampling, and the probabilistic
// context-free grammar derivation coder.

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "crm/coding.hpp"
#include "crm/models.hpp"

namespace crm::text {

/// 26 lowercase letters (indices 0..25) plus the word-end marker (26).
struct LetterAlphabet {
    static constexpr std::uint32_t kSize = 27;
    static constexpr std::uint32_t kWordEnd = 26;

    static bool is_letter(char c) noexcept;
    static std::uint32_t index_of(char letter);
    static char letter(std::uint32_t index);
    /// a, e, i, o, u and y.
    static bool is_vowel(std::uint32_t index) noexcept;

    /// Lowercases ASCII letters; any other ASCII character ends the current
    /// word. Every word is followed by one word-end marker. Bytes >= 0x80 and
    /// control characters other than whitespace throw ParseError with the
    /// offset.
    static std::vector<std::uint32_t> normalize(std::string_view text);
    /// Words of a symbol stream, split at word-end markers.
    static std::vector<std::string> words(std::span<const std::uint32_t> symbols);
};

struct Smoothing {
    double weight = 0.9; // interpolation weight on the higher-order estimate
    double alpha = 0.5;  // add-alpha constant of the unigram base
};

/// Counts for every context length 0..order with recursive interpolation
/// P_k = w * MLE_k + (1 - w) * P_{k-1}, base P_0 = (c + alpha) / (N + 27 alpha).
/// Contexts with no observations fall through to the lower order.
class InterpolatedCounts {
public:
    using Row = std::array<std::uint32_t, LetterAlphabet::kSize>;

    InterpolatedCounts(int order, Smoothing smoothing);

    int order() const noexcept { return order_; }
    const Smoothing& smoothing() const noexcept { return smoothing_; }

    /// `context` holds exactly order() symbols, oldest first.
    void add(std::span<const std::uint32_t> context, std::uint32_t symbol);
    std::array<double, LetterAlphabet::kSize> probabilities(std::span<const std::uint32_t> context) const;

    /// Count of `symbol` after the last context.size() symbols of `context`.
    std::uint64_t count(std::span<const std::uint32_t> context, std::uint32_t symbol) const;
    std::uint64_t context_total(std::span<const std::uint32_t> context) const;
    std::uint64_t events() const noexcept { return events_; }

    /// Only the top-order table is stored; lower orders are its marginals.
    void serialize(std::vector<std::uint8_t>& out) const;
    static InterpolatedCounts deserialize(std::span<const std::uint8_t> bytes, int order,
                                          Smoothing smoothing);

private:
    struct Entry {
        Row counts{};
        std::uint64_t total = 0;
    };
    static std::uint64_t key_of(std::span<const std::uint32_t> context);
    const Entry* find(std::span<const std::uint32_t> context) const;

    int order_;
    Smoothing smoothing_;
    std::vector<std::unordered_map<std::uint64_t, Entry>> tables_;
    std::uint64_t events_ = 0;
};

/// Character n-gram over the 27-symbol stream; `order` is the number of
/// context symbols (order 1 is a bigram). Contexts run across word
/// boundaries and start padded with word-end markers. A trained model is
/// frozen; an adaptive model keeps counting the symbols it observes.
class NgramModel final : public models::ProbModel {
public:
    static constexpr int kMaxOrder = 8;

    static NgramModel train(std::string_view corpus, int order, Smoothing smoothing = {});
    static NgramModel adaptive(int order, Smoothing smoothing = {});

    int order() const noexcept { return counts_.order(); }
    bool is_adaptive() const noexcept { return adaptive_; }
    const InterpolatedCounts& counts() const noexcept { return counts_; }

    std::string model_id() const override { return "ngram"; }
    std::size_t alphabet_size() const override { return LetterAlphabet::kSize; }
    void reset() override;
    coding::SymbolDistribution predict() const override;
    void observe(std::uint32_t symbol) override;
    std::vector<std::uint8_t> serialize() const override;
    std::unique_ptr<models::ProbModel> clone() const override {
        return std::make_unique<NgramModel>(*this);
    }
    static std::unique_ptr<models::ProbModel> load(std::span<const std::uint8_t> header);

private:
    NgramModel(InterpolatedCounts counts, bool adaptive);

    InterpolatedCounts counts_;
    InterpolatedCounts initial_;
    bool adaptive_;
    std::vector<std::uint32_t> context_;
};

/// Order-2 letter model with word-local contexts (the first two letters of a
/// word use their own position-specific statistics) and a hard constraint:
/// a word cannot end before it contains a vowel.
class EnhancedLetterModel final : public models::ProbModel {
public:
    static constexpr int kOrder = 2;

    static EnhancedLetterModel train(std::string_view corpus, Smoothing smoothing = {});
    static EnhancedLetterModel adaptive(Smoothing smoothing = {});

    bool has_vowel_emitted() const noexcept { return has_vowel_; }
    std::size_t position() const noexcept { return position_; }
    const InterpolatedCounts& counts() const noexcept { return counts_; }

    std::string model_id() const override { return "enhanced-letter"; }
    std::size_t alphabet_size() const override { return LetterAlphabet::kSize; }
    void reset() override;
    coding::SymbolDistribution predict() const override;
    void observe(std::uint32_t symbol) override;
    std::vector<std::uint8_t> serialize() const override;
    std::unique_ptr<models::ProbModel> clone() const override {
        return std::make_unique<EnhancedLetterModel>(*this);
    }
    static std::unique_ptr<models::ProbModel> load(std::span<const std::uint8_t> header);

private:
    EnhancedLetterModel(InterpolatedCounts counts, bool adaptive);
    std::array<std::uint32_t, kOrder> local_context() const;
    void advance(std::uint32_t symbol);

    InterpolatedCounts counts_;
    InterpolatedCounts initial_;
    bool adaptive_;
    std::vector<std::uint32_t> word_; // letters of the current word
    bool has_vowel_ = false;
    std::size_t position_ = 0;
};

NgramModel train_ngram(std::string_view corpus, int order);

/// Realized codelength in bits of the normalized text under `model`.
double model_codelength(models::ProbModel& model, std::string_view text);

/// Longest word the sampler emits before forcing a word end.
inline constexpr std::size_t kMaxSampledWordLength = 64;

/// Decodes words from the bit source until `count` word ends have been read.
std::vector<std::string> sample_words(models::ProbModel& model, coding::BitSource& bits,
                                      std::size_t count);
std::vector<std::string> sample_words(models::ProbModel& model, const coding::BitString& bits,
                                      std::size_t count);

/// The English word list compiled into the library (one word per line).
std::string_view bundled_word_list();

// ---------------------------------------------------------------------------
// Probabilistic context-free grammar

struct Rule {
    std::string lhs;
    std::vector<std::string> rhs; // symbols, or a single word when lexical
    bool lexical = false;
    double probability = 0.0;
};

class Pcfg {
public:
    /// Parses the line format `LHS -> RHS... @ prob`, with `start SYMBOL`,
    /// quoted words ("mouse") as lexical right-hand sides and `#` comments.
    static Pcfg parse(std::string_view text);

    const std::string& start() const noexcept { return start_; }
    bool is_nonterminal(const std::string& symbol) const { return rules_.contains(symbol); }
    const std::vector<Rule>& rules_for(const std::string& nonterminal) const;
    const coding::CumulativeTable& table_for(const std::string& nonterminal) const;
    std::vector<std::string> nonterminals() const;

private:
    std::string start_;
    std::map<std::string, std::vector<Rule>> rules_;
    std::map<std::string, coding::CumulativeTable> tables_;
};

struct DerivationStep {
    std::string lhs;
    std::size_t rule = 0; // index into rules_for(lhs)

    friend bool operator==(const DerivationStep&, const DerivationStep&) = default;
};

/// Leftmost derivation in preorder; lexical steps choose the words.
struct ParseDerivation {
    std::vector<DerivationStep> steps;

    friend bool operator==(const ParseDerivation&, const ParseDerivation&) = default;
};

/// Replays the derivation from the start symbol and returns the words.
/// Throws DomainError naming the first step that does not fit.
std::vector<std::string> derive_words(const Pcfg& grammar, const ParseDerivation& derivation);

/// Sum of -log2 p(rule) over the steps; lexical steps count only when
/// `include_lexicon` is set.
double pcfg_derivation_cost(const Pcfg& grammar, const ParseDerivation& derivation,
                            bool include_lexicon);

/// Codes every step whose nonterminal has more than one rule.
coding::BitString pcfg_encode(const Pcfg& grammar, const ParseDerivation& derivation);

inline constexpr std::size_t kMaxDerivationDepth = 64;
inline constexpr std::size_t kMaxDerivationSteps = 100000;

/// Reads one derivation. Throws DomainError when the expansion nests deeper
/// than kMaxDerivationDepth or runs past kMaxDerivationSteps.
ParseDerivation pcfg_decode(const Pcfg& grammar, coding::BitSource& bits);
ParseDerivation pcfg_decode(const Pcfg& grammar, const coding::BitString& bits);

} // namespace crm::text
