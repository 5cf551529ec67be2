#include "crm/error.hpp"
#include "crm/text.hpp"
#include "crm/wire.hpp"

namespace crm::text {

using coding::SymbolDistribution;

namespace {

void write_smoothing(wire::ByteWriter& w, const Smoothing& s) {
    w.f64(s.weight);
    w.f64(s.alpha);
}

Smoothing read_smoothing(wire::ByteReader& r) {
    Smoothing s;
    s.weight = r.f64();
    s.alpha = r.f64();
    return s;
}

SymbolDistribution to_distribution(const std::array<double, LetterAlphabet::kSize>& p) {
    return SymbolDistribution::from_weights(p);
}

} // namespace

NgramModel::NgramModel(InterpolatedCounts counts, bool adaptive)
    : counts_(counts), initial_(std::move(counts)), adaptive_(adaptive) {
    reset();
}

NgramModel NgramModel::train(std::string_view corpus, int order, Smoothing smoothing) {
    if (order < 1 || order > kMaxOrder) throw DomainError("n-gram order must be in [1, 8]");
    const auto symbols = LetterAlphabet::normalize(corpus);
    if (symbols.empty()) throw DomainError("corpus has no words after normalization");
    InterpolatedCounts counts(order, smoothing);
    std::vector<std::uint32_t> context(static_cast<std::size_t>(order), LetterAlphabet::kWordEnd);
    for (std::uint32_t s : symbols) {
        counts.add(context, s);
        context.erase(context.begin());
        context.push_back(s);
    }
    return NgramModel(std::move(counts), false);
}

NgramModel NgramModel::adaptive(int order, Smoothing smoothing) {
    if (order < 1 || order > kMaxOrder) throw DomainError("n-gram order must be in [1, 8]");
    return NgramModel(InterpolatedCounts(order, smoothing), true);
}

void NgramModel::reset() {
    if (adaptive_) counts_ = initial_;
    context_.assign(static_cast<std::size_t>(counts_.order()), LetterAlphabet::kWordEnd);
}

SymbolDistribution NgramModel::predict() const { return to_distribution(counts_.probabilities(context_)); }

void NgramModel::observe(std::uint32_t symbol) {
    if (symbol >= LetterAlphabet::kSize) throw DomainError("symbol outside the letter alphabet");
    if (adaptive_) counts_.add(context_, symbol);
    context_.erase(context_.begin());
    context_.push_back(symbol);
}

std::vector<std::uint8_t> NgramModel::serialize() const {
    wire::ByteWriter w;
    w.u8(static_cast<std::uint8_t>(counts_.order()));
    w.u8(adaptive_ ? 1 : 0);
    write_smoothing(w, counts_.smoothing());
    auto out = std::move(w).take();
    if (!adaptive_) counts_.serialize(out);
    return out;
}

std::unique_ptr<models::ProbModel> NgramModel::load(std::span<const std::uint8_t> header) {
    wire::ByteReader r(header);
    const int order = r.u8();
    const bool adaptive = r.u8() != 0;
    const Smoothing smoothing = read_smoothing(r);
    if (order < 1 || order > kMaxOrder) throw ParseError("bad n-gram order", 0);
    if (adaptive) {
        if (!r.at_end()) throw ParseError("trailing bytes in adaptive n-gram header", r.position());
        return std::make_unique<NgramModel>(NgramModel::adaptive(order, smoothing));
    }
    auto counts = InterpolatedCounts::deserialize(r.bytes(r.remaining()), order, smoothing);
    return std::unique_ptr<NgramModel>(new NgramModel(std::move(counts), false));
}

NgramModel train_ngram(std::string_view corpus, int order) { return NgramModel::train(corpus, order); }

EnhancedLetterModel::EnhancedLetterModel(InterpolatedCounts counts, bool adaptive)
    : counts_(counts), initial_(std::move(counts)), adaptive_(adaptive) {
    reset();
}

std::array<std::uint32_t, EnhancedLetterModel::kOrder> EnhancedLetterModel::local_context() const {
    std::array<std::uint32_t, kOrder> ctx;
    ctx.fill(LetterAlphabet::kWordEnd);
    const std::size_t n = std::min<std::size_t>(word_.size(), kOrder);
    for (std::size_t i = 0; i < n; ++i) ctx[kOrder - n + i] = word_[word_.size() - n + i];
    return ctx;
}

void EnhancedLetterModel::advance(std::uint32_t symbol) {
    if (symbol == LetterAlphabet::kWordEnd) {
        word_.clear();
        has_vowel_ = false;
        position_ = 0;
        return;
    }
    word_.push_back(symbol);
    has_vowel_ = has_vowel_ || LetterAlphabet::is_vowel(symbol);
    ++position_;
}

EnhancedLetterModel EnhancedLetterModel::train(std::string_view corpus, Smoothing smoothing) {
    const auto symbols = LetterAlphabet::normalize(corpus);
    if (symbols.empty()) throw DomainError("corpus has no words after normalization");
    EnhancedLetterModel m(InterpolatedCounts(kOrder, smoothing), false);
    InterpolatedCounts counts(kOrder, smoothing);
    for (std::uint32_t s : symbols) {
        counts.add(m.local_context(), s);
        m.advance(s);
    }
    return EnhancedLetterModel(std::move(counts), false);
}

EnhancedLetterModel EnhancedLetterModel::adaptive(Smoothing smoothing) {
    return EnhancedLetterModel(InterpolatedCounts(kOrder, smoothing), true);
}

void EnhancedLetterModel::reset() {
    if (adaptive_) counts_ = initial_;
    word_.clear();
    has_vowel_ = false;
    position_ = 0;
}

SymbolDistribution EnhancedLetterModel::predict() const {
    auto p = counts_.probabilities(local_context());
    if (!has_vowel_) p[LetterAlphabet::kWordEnd] = 0.0;
    return to_distribution(p);
}

void EnhancedLetterModel::observe(std::uint32_t symbol) {
    if (symbol >= LetterAlphabet::kSize) throw DomainError("symbol outside the letter alphabet");
    if (symbol == LetterAlphabet::kWordEnd && !has_vowel_)
        throw DomainError("word end before any vowel has probability zero");
    if (adaptive_) counts_.add(local_context(), symbol);
    advance(symbol);
}

std::vector<std::uint8_t> EnhancedLetterModel::serialize() const {
    wire::ByteWriter w;
    w.u8(adaptive_ ? 1 : 0);
    write_smoothing(w, counts_.smoothing());
    auto out = std::move(w).take();
    if (!adaptive_) counts_.serialize(out);
    return out;
}

std::unique_ptr<models::ProbModel> EnhancedLetterModel::load(std::span<const std::uint8_t> header) {
    wire::ByteReader r(header);
    const bool adaptive = r.u8() != 0;
    const Smoothing smoothing = read_smoothing(r);
    if (adaptive) {
        if (!r.at_end()) throw ParseError("trailing bytes in adaptive letter-model header", r.position());
        return std::make_unique<EnhancedLetterModel>(EnhancedLetterModel::adaptive(smoothing));
    }
    auto counts = InterpolatedCounts::deserialize(r.bytes(r.remaining()), kOrder, smoothing);
    return std::unique_ptr<EnhancedLetterModel>(new EnhancedLetterModel(std::move(counts), false));
}

double model_codelength(models::ProbModel& model, std::string_view text) {
    const auto symbols = LetterAlphabet::normalize(text);
    return models::sequence_codelength(model, symbols, coding::Unit::Bits);
}

std::vector<std::string> sample_words(models::ProbModel& model, coding::BitSource& bits,
                                      std::size_t count) {
    if (model.alphabet_size() != LetterAlphabet::kSize)
        throw DomainError("word sampling needs a letter model");
    std::vector<std::string> words;
    if (count == 0) return words;
    model.reset();
    coding::ArithmeticDecoder decoder(bits);
    std::string word;
    while (words.size() < count) {
        auto symbol = static_cast<std::uint32_t>(decoder.decode(model.predict_table()));
        if (symbol != LetterAlphabet::kWordEnd && word.size() == kMaxSampledWordLength &&
            model.predict()[LetterAlphabet::kWordEnd] > 0.0)
            symbol = LetterAlphabet::kWordEnd;
        model.observe(symbol);
        if (symbol == LetterAlphabet::kWordEnd) {
            words.push_back(std::move(word));
            word.clear();
        } else {
            word.push_back(LetterAlphabet::letter(symbol));
        }
    }
    return words;
}

std::vector<std::string> sample_words(models::ProbModel& model, const coding::BitString& bits,
                                      std::size_t count) {
    coding::BitStringSource source(bits);
    return sample_words(model, source, count);
}

} // namespace crm::text
