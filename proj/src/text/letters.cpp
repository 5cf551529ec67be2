#include "crm/error.hpp"
#include "crm/text.hpp"
#include "crm/wire.hpp"

namespace crm::text {

bool LetterAlphabet::is_letter(char c) noexcept {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

std::uint32_t LetterAlphabet::index_of(char letter) {
    if (letter >= 'a' && letter <= 'z') return static_cast<std::uint32_t>(letter - 'a');
    if (letter >= 'A' && letter <= 'Z') return static_cast<std::uint32_t>(letter - 'A');
    throw DomainError(std::string("not a letter: '") + letter + "'");
}

char LetterAlphabet::letter(std::uint32_t index) {
    if (index >= kWordEnd) throw DomainError("index " + std::to_string(index) + " is not a letter");
    return static_cast<char>('a' + index);
}

bool LetterAlphabet::is_vowel(std::uint32_t index) noexcept {
    switch (index) {
    case 'a' - 'a':
    case 'e' - 'a':
    case 'i' - 'a':
    case 'o' - 'a':
    case 'u' - 'a':
    case 'y' - 'a':
        return true;
    default:
        return false;
    }
}

std::vector<std::uint32_t> LetterAlphabet::normalize(std::string_view text) {
    std::vector<std::uint32_t> out;
    bool in_word = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        const auto byte = static_cast<unsigned char>(c);
        if (is_letter(c)) {
            out.push_back(index_of(c));
            in_word = true;
            continue;
        }
        const bool whitespace = c == ' ' || c == '\n' || c == '\t' || c == '\r' || c == '\f' || c == '\v';
        if (byte >= 0x80 || (byte < 0x20 && !whitespace) || byte == 0x7F)
            throw ParseError("character cannot be normalized to the letter alphabet", i);
        if (in_word) out.push_back(kWordEnd);
        in_word = false;
    }
    if (in_word) out.push_back(kWordEnd);
    return out;
}

std::vector<std::string> LetterAlphabet::words(std::span<const std::uint32_t> symbols) {
    std::vector<std::string> out;
    std::string current;
    for (std::uint32_t s : symbols) {
        if (s == kWordEnd) {
            out.push_back(std::move(current));
            current.clear();
        } else {
            current.push_back(letter(s));
        }
    }
    if (!current.empty()) out.push_back(std::move(current));
    return out;
}

InterpolatedCounts::InterpolatedCounts(int order, Smoothing smoothing)
    : order_(order), smoothing_(smoothing), tables_(static_cast<std::size_t>(order) + 1) {
    if (order < 0) throw DomainError("n-gram order must be nonnegative");
    if (!(smoothing.weight > 0.0 && smoothing.weight < 1.0))
        throw DomainError("interpolation weight must be in (0,1)");
    if (!(smoothing.alpha > 0.0)) throw DomainError("add-alpha constant must be positive");
}

std::uint64_t InterpolatedCounts::key_of(std::span<const std::uint32_t> context) {
    std::uint64_t key = 0;
    for (std::uint32_t s : context) key = key * LetterAlphabet::kSize + s;
    return key;
}

const InterpolatedCounts::Entry* InterpolatedCounts::find(std::span<const std::uint32_t> context) const {
    if (context.size() > static_cast<std::size_t>(order_)) context = context.last(static_cast<std::size_t>(order_));
    const auto& table = tables_[context.size()];
    const auto it = table.find(key_of(context));
    return it == table.end() ? nullptr : &it->second;
}

void InterpolatedCounts::add(std::span<const std::uint32_t> context, std::uint32_t symbol) {
    if (context.size() != static_cast<std::size_t>(order_))
        throw DomainError("context length must equal the model order");
    if (symbol >= LetterAlphabet::kSize) throw DomainError("symbol outside the letter alphabet");
    for (int k = 0; k <= order_; ++k) {
        auto& e = tables_[static_cast<std::size_t>(k)][key_of(context.last(static_cast<std::size_t>(k)))];
        ++e.counts[symbol];
        ++e.total;
    }
    ++events_;
}

std::array<double, LetterAlphabet::kSize>
InterpolatedCounts::probabilities(std::span<const std::uint32_t> context) const {
    constexpr double n = LetterAlphabet::kSize;
    std::array<double, LetterAlphabet::kSize> p{};
    const Entry* base = find(context.first(0));
    const double base_total = base ? static_cast<double>(base->total) : 0.0;
    for (std::size_t s = 0; s < p.size(); ++s)
        p[s] = ((base ? base->counts[s] : 0) + smoothing_.alpha) / (base_total + n * smoothing_.alpha);

    const double w = smoothing_.weight;
    for (int k = 1; k <= order_ && static_cast<std::size_t>(k) <= context.size(); ++k) {
        const Entry* e = find(context.last(static_cast<std::size_t>(k)));
        if (!e || e->total == 0) continue;
        const double total = static_cast<double>(e->total);
        for (std::size_t s = 0; s < p.size(); ++s) p[s] = w * (e->counts[s] / total) + (1.0 - w) * p[s];
    }
    return p;
}

std::uint64_t InterpolatedCounts::count(std::span<const std::uint32_t> context, std::uint32_t symbol) const {
    const Entry* e = find(context);
    return e ? e->counts.at(symbol) : 0;
}

std::uint64_t InterpolatedCounts::context_total(std::span<const std::uint32_t> context) const {
    const Entry* e = find(context);
    return e ? e->total : 0;
}

void InterpolatedCounts::serialize(std::vector<std::uint8_t>& out) const {
    wire::ByteWriter w;
    const auto& top = tables_.back();
    // Sorted keys keep headers byte-identical across runs.
    std::map<std::uint64_t, const Entry*> sorted;
    for (const auto& [key, entry] : top) sorted.emplace(key, &entry);
    w.varint(sorted.size());
    for (const auto& [key, entry] : sorted) {
        w.varint(key);
        std::uint32_t nonzero = 0;
        for (auto c : entry->counts) nonzero += c > 0;
        w.u8(static_cast<std::uint8_t>(nonzero));
        for (std::uint32_t s = 0; s < LetterAlphabet::kSize; ++s) {
            if (entry->counts[s] == 0) continue;
            w.u8(static_cast<std::uint8_t>(s));
            w.varint(entry->counts[s]);
        }
    }
    const auto& bytes = w.data();
    out.insert(out.end(), bytes.begin(), bytes.end());
}

InterpolatedCounts InterpolatedCounts::deserialize(std::span<const std::uint8_t> bytes, int order,
                                                   Smoothing smoothing) {
    InterpolatedCounts c(order, smoothing);
    wire::ByteReader r(bytes);
    const std::uint64_t rows = r.varint();
    std::uint64_t modulus = 1;
    for (int k = 0; k < order; ++k) modulus *= LetterAlphabet::kSize;
    for (std::uint64_t i = 0; i < rows; ++i) {
        const std::size_t at = r.position();
        const std::uint64_t key = r.varint();
        if (key >= modulus) throw ParseError("n-gram context key out of range", at);
        const std::uint8_t nonzero = r.u8();
        for (std::uint8_t j = 0; j < nonzero; ++j) {
            const std::size_t sym_at = r.position();
            const std::uint8_t s = r.u8();
            if (s >= LetterAlphabet::kSize) throw ParseError("n-gram symbol out of range", sym_at);
            const std::uint64_t n = r.varint();
            // Marginalize into every lower order: drop the oldest context symbols.
            std::uint64_t m = modulus;
            for (int k = order; k >= 0; --k) {
                auto& e = c.tables_[static_cast<std::size_t>(k)][key % m];
                e.counts[s] += static_cast<std::uint32_t>(n);
                e.total += n;
                m /= LetterAlphabet::kSize;
            }
            c.events_ += n;
        }
    }
    if (!r.at_end()) throw ParseError("trailing bytes after n-gram counts", r.position());
    return c;
}

} // namespace crm::text
