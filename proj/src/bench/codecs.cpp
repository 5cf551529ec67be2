#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>

#include "crm/bench.hpp"
#include "crm/error.hpp"
#include "crm/image.hpp"
#include "crm/numeric.hpp"
#include "crm/text.hpp"
#include "crm/wire.hpp"

namespace crm::bench {

namespace {

using Bytes = std::vector<std::uint8_t>;
using ByteSpan = std::span<const std::uint8_t>;
using models::EncodedContainer;
using models::ProbModel;

constexpr std::uint64_t kMaxDecodedLength = 1ull << 32;

std::vector<std::pair<std::size_t, std::size_t>> split_lines(ByteSpan bytes) {
    std::vector<std::pair<std::size_t, std::size_t>> lines; // [begin, end)
    std::size_t begin = 0;
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        if (bytes[i] == '\n') {
            lines.emplace_back(begin, i);
            begin = i + 1;
        }
    }
    if (begin < bytes.size()) lines.emplace_back(begin, bytes.size());
    return lines;
}

EncodedContainer make_container(const std::string& id, Bytes header, ByteSpan original,
                                coding::BitString payload) {
    EncodedContainer c;
    c.model_id = id;
    c.model_header = std::move(header);
    c.original_length = original.size();
    c.payload = std::move(payload);
    c.checksum = models::sha256(original);
    return c;
}

void require_model(const EncodedContainer& c, const std::string& id) {
    if (c.model_id != id) throw ParseError("container holds model '" + c.model_id + "', expected '" + id + "'", 0);
    if (c.original_length > kMaxDecodedLength) throw ParseError("declared original length too large", 0);
}

Bytes to_bytes(std::string_view s) { return Bytes(s.begin(), s.end()); }

// ---------------------------------------------------------------------------
// Symbol sequence codecs

using Symbolizer = std::function<std::vector<std::uint32_t>(ByteSpan)>;
using Desymbolizer = std::function<Bytes(std::span<const std::uint32_t>)>;
using ModelMaker = std::function<std::unique_ptr<ProbModel>()>;
using ModelLoader = std::function<std::unique_ptr<ProbModel>(ByteSpan)>;

Codec sequence_codec(std::string id, std::string description, std::vector<DatasetKind> kinds,
                     std::uint64_t program_bits, ModelMaker make, ModelLoader load, Symbolizer to_symbols,
                     Desymbolizer from_symbols) {
    Codec c;
    c.id = id;
    c.description = std::move(description);
    c.kinds = std::move(kinds);
    c.default_program_bits = program_bits;
    c.encode = [id, make, to_symbols](ByteSpan data) {
        const auto symbols = to_symbols(data);
        auto model = make();
        auto header = model->serialize();
        model->reset();
        auto payload = models::encode_sequence(*model, symbols);
        return make_container(id, std::move(header), data, std::move(payload));
    };
    c.decode = [id, load, from_symbols](const EncodedContainer& container) {
        require_model(container, id);
        auto model = load(container.model_header);
        const auto symbols = models::decode_sequence(*model, container.payload,
                                                     static_cast<std::size_t>(container.original_length));
        return from_symbols(symbols);
    };
    return c;
}

std::vector<std::uint32_t> byte_symbols(ByteSpan data) { return {data.begin(), data.end()}; }

Bytes symbol_bytes(std::span<const std::uint32_t> symbols) {
    Bytes out;
    out.reserve(symbols.size());
    for (auto s : symbols) out.push_back(static_cast<std::uint8_t>(s));
    return out;
}

std::string bytes_sample(const ModelMaker& make, std::size_t count, std::uint64_t seed) {
    auto model = make();
    coding::RandomBitSource bits(seed);
    const auto symbols = models::decode_sequence(*model, bits, count);
    const auto b = symbol_bytes(symbols);
    return std::string(b.begin(), b.end());
}

// Lowercase words, each followed by a newline.
std::vector<std::uint32_t> letter_symbols(ByteSpan data, const std::string& id) {
    std::vector<std::uint32_t> out;
    out.reserve(data.size());
    bool in_word = false;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto b = data[i];
        if (b >= 'a' && b <= 'z') {
            out.push_back(static_cast<std::uint32_t>(b - 'a'));
            in_word = true;
        } else if (b == '\n' && in_word) {
            out.push_back(text::LetterAlphabet::kWordEnd);
            in_word = false;
        } else {
            throw RefusedError(id + " codes lowercase words, one per line; byte " + std::to_string(i) +
                               " breaks that form");
        }
    }
    if (in_word) throw RefusedError(id + " needs a newline after the last word");
    return out;
}

Bytes letter_bytes(std::span<const std::uint32_t> symbols) {
    Bytes out;
    out.reserve(symbols.size());
    for (auto s : symbols)
        out.push_back(s == text::LetterAlphabet::kWordEnd ? '\n' : static_cast<std::uint8_t>(text::LetterAlphabet::letter(s)));
    return out;
}

std::string words_sample(ProbModel& model, std::size_t count, std::uint64_t seed) {
    coding::RandomBitSource bits(seed);
    std::string out;
    for (const auto& w : text::sample_words(model, bits, count)) {
        out += w;
        out += '\n';
    }
    return out;
}

Codec letter_codec(std::string id, std::string description, std::uint64_t program_bits, ModelMaker adaptive,
                   ModelLoader load, std::function<std::unique_ptr<ProbModel>()> trained) {
    Codec c = sequence_codec(
        id, std::move(description), {DatasetKind::Text}, program_bits, std::move(adaptive), std::move(load),
        [id](ByteSpan d) { return letter_symbols(d, id); }, letter_bytes);
    c.sample = [trained](std::size_t count, std::uint64_t seed) {
        auto model = trained();
        return words_sample(*model, count, seed);
    };
    return c;
}

// ---------------------------------------------------------------------------
// Bit strings: the line count in the header, then per line an Elias-gamma
// length and the bits under the model.

void put_gamma(coding::ArithmeticEncoder& enc, std::uint64_t v) {
    const int width = static_cast<int>(std::bit_width(v));
    for (int i = 1; i < width; ++i) enc.encode_uniform(0, 2);
    for (int i = width - 1; i >= 0; --i) enc.encode_uniform(static_cast<std::uint32_t>((v >> i) & 1u), 2);
}

std::uint64_t get_gamma(coding::ArithmeticDecoder& dec) {
    int zeros = 0;
    while (dec.decode_uniform(2) == 0)
        if (++zeros > 62) throw ParseError("bit-string length code too long", 0);
    std::uint64_t v = 1;
    for (int i = 0; i < zeros; ++i) v = (v << 1) | dec.decode_uniform(2);
    return v;
}

Codec bit_codec(std::string id, std::string description, std::uint64_t program_bits, ModelMaker make,
                ModelLoader load) {
    Codec c;
    c.id = id;
    c.description = std::move(description);
    c.kinds = {DatasetKind::Bitstrings};
    c.default_program_bits = program_bits;
    c.bit_model = make;
    c.encode = [id, make](ByteSpan data) {
        std::vector<std::string> segments(1);
        for (std::size_t i = 0; i < data.size(); ++i) {
            if (data[i] == '\n') {
                segments.emplace_back();
            } else if (data[i] == '0' || data[i] == '1') {
                segments.back().push_back(static_cast<char>(data[i]));
            } else {
                throw RefusedError(id + " codes lines of 0 and 1; byte " + std::to_string(i) + " is neither");
            }
        }
        auto model = make();
        wire::ByteWriter w;
        w.bytes(model->serialize());
        w.u64(segments.size());
        model->reset();
        coding::ArithmeticEncoder enc;
        for (const auto& s : segments) {
            put_gamma(enc, s.size() + 1);
            for (char ch : s) {
                const std::uint32_t bit = ch == '1';
                enc.encode(model->predict_table(), bit);
                model->observe(bit);
            }
        }
        return make_container(id, std::move(w).take(), data, enc.finish());
    };
    c.decode = [id, load](const EncodedContainer& container) {
        require_model(container, id);
        const ByteSpan h = container.model_header;
        if (h.size() < 8) throw ParseError("bit-string header too short", 0);
        wire::ByteReader tail(h.subspan(h.size() - 8));
        const std::uint64_t segments = tail.u64();
        if (segments == 0 || segments - 1 > container.original_length)
            throw ParseError("bad bit-string line count", h.size() - 8);
        auto model = load(h.first(h.size() - 8));
        coding::BitStringSource src(container.payload);
        coding::ArithmeticDecoder dec(src);
        Bytes out;
        for (std::uint64_t k = 0; k < segments; ++k) {
            if (k > 0) out.push_back('\n');
            const std::uint64_t len = get_gamma(dec) - 1;
            if (out.size() + len > container.original_length) throw ParseError("bit-string overruns the original", 0);
            for (std::uint64_t i = 0; i < len; ++i) {
                const auto bit = dec.decode(model->predict_table());
                model->observe(static_cast<std::uint32_t>(bit));
                out.push_back(bit ? '1' : '0');
            }
        }
        return out;
    };
    c.sample = [make](std::size_t count, std::uint64_t seed) {
        if (count == 0) return std::string();
        auto model = make();
        coding::RandomBitSource bits(seed);
        std::string out;
        for (auto s : models::decode_sequence(*model, bits, count)) out.push_back(s ? '1' : '0');
        out.push_back('\n');
        return out;
    };
    return c;
}

// ---------------------------------------------------------------------------
// Integer codecs: the header starts with the value count.

std::vector<std::uint64_t> canonical_integers(ByteSpan data, const std::string& id) {
    auto values = parse_integers(data);
    const auto rendered = render_integers(values);
    if (!std::equal(rendered.begin(), rendered.end(), data.begin(), data.end()))
        throw RefusedError(id + " needs canonical decimal integers, one per line with a final newline");
    return values;
}

Bytes render_bytes(std::span<const std::uint64_t> values) { return to_bytes(render_integers(values)); }

struct IntegerScheme {
    std::function<std::pair<Bytes, coding::BitString>(std::span<const std::uint64_t>)> encode;
    std::function<std::vector<std::uint64_t>(ByteSpan header, const coding::BitString&, std::size_t n)> decode;
};

Codec integer_codec(std::string id, std::string description, std::uint64_t program_bits, IntegerScheme scheme) {
    Codec c;
    c.id = id;
    c.description = std::move(description);
    c.kinds = {DatasetKind::Integers};
    c.default_program_bits = program_bits;
    c.encode = [id, scheme](ByteSpan data) {
        const auto values = canonical_integers(data, id);
        wire::ByteWriter w;
        w.u64(values.size());
        coding::BitString payload;
        if (!values.empty()) {
            auto [header, bits] = scheme.encode(values);
            w.bytes(header);
            payload = std::move(bits);
        }
        return make_container(id, std::move(w).take(), data, std::move(payload));
    };
    c.decode = [id, scheme](const EncodedContainer& container) {
        require_model(container, id);
        wire::ByteReader r(container.model_header);
        const std::uint64_t n = r.u64();
        if (n > container.original_length / 2) throw ParseError("value count exceeds the original length", 0);
        if (n == 0) return Bytes{};
        const auto values = scheme.decode(r.bytes(r.remaining()), container.payload, static_cast<std::size_t>(n));
        return render_bytes(values);
    };
    return c;
}

constexpr double kGuessLambda = 3.0;

std::vector<Codec> build_codecs() {
    std::vector<Codec> out;
    const std::vector<DatasetKind> any_kind{DatasetKind::Text,  DatasetKind::Integers,    DatasetKind::Reals,
                                            DatasetKind::Image, DatasetKind::FrameTriple, DatasetKind::Bitstrings};

    {
        ModelMaker make = [] { return std::make_unique<models::UniformModel>(256); };
        Codec c = sequence_codec("uniform-byte", "every byte value equally likely", any_kind, 64, make,
                                 models::UniformModel::load, byte_symbols, symbol_bytes);
        c.sample = [make](std::size_t n, std::uint64_t seed) { return bytes_sample(make, n, seed); };
        out.push_back(std::move(c));
    }
    {
        ModelMaker make = [] { return std::make_unique<models::AdaptiveFrequencyModel>(256); };
        Codec c = sequence_codec("order0-byte", "adaptive order-0 byte frequencies", any_kind, 256, make,
                                 models::AdaptiveFrequencyModel::load, byte_symbols, symbol_bytes);
        c.sample = [make](std::size_t n, std::uint64_t seed) { return bytes_sample(make, n, seed); };
        out.push_back(std::move(c));
    }

    const auto words = text::bundled_word_list();
    out.push_back(letter_codec(
        "bigram-letter", "adaptive letter model, one symbol of context", 1024,
        [] { return std::make_unique<text::NgramModel>(text::NgramModel::adaptive(1)); }, text::NgramModel::load,
        [words] { return std::make_unique<text::NgramModel>(text::NgramModel::train(words, 1)); }));
    out.push_back(letter_codec(
        "trigram-letter", "adaptive letter model, two symbols of context", 1024,
        [] { return std::make_unique<text::NgramModel>(text::NgramModel::adaptive(2)); }, text::NgramModel::load,
        [words] { return std::make_unique<text::NgramModel>(text::NgramModel::train(words, 2)); }));
    out.push_back(letter_codec(
        "enhanced-letter", "word-local letter model; words must contain a vowel", 1536,
        [] { return std::make_unique<text::EnhancedLetterModel>(text::EnhancedLetterModel::adaptive()); },
        text::EnhancedLetterModel::load,
        [words] { return std::make_unique<text::EnhancedLetterModel>(text::EnhancedLetterModel::train(words)); }));

    {
        Codec c = integer_codec(
            "geometric-guess3", "geometric with a fixed rate of 3, no header", 128,
            {[](std::span<const std::uint64_t> v) {
                 return std::pair{Bytes{}, numeric::encode_fixed(v, kGuessLambda).payload};
             },
             [](ByteSpan, const coding::BitString& p, std::size_t n) {
                 return numeric::decode_fixed(p, kGuessLambda, n);
             }});
        c.sample = [](std::size_t n, std::uint64_t seed) {
            const auto coder = numeric::geometric_coder(kGuessLambda);
            coding::RandomBitSource bits(seed);
            coding::ArithmeticDecoder dec(bits);
            std::vector<std::uint64_t> values(n);
            for (auto& v : values) v = coder.decode(dec);
            return render_integers(values);
        };
        out.push_back(std::move(c));
    }
    out.push_back(integer_codec(
        "geometric-header", "geometric with the fitted rate in the header", 128,
        {[](std::span<const std::uint64_t> v) {
             auto s = numeric::encode_with_header(v);
             return std::pair{std::move(s.header), std::move(s.payload)};
         },
         [](ByteSpan h, const coding::BitString& p, std::size_t n) { return numeric::decode_with_header(h, p, n); }}));
    out.push_back(integer_codec(
        "geometric-adaptive", "geometric with the rate re-estimated before each value", 192,
        {[](std::span<const std::uint64_t> v) {
             return std::pair{Bytes{}, numeric::encode_online_adaptive(v).first.payload};
         },
         [](ByteSpan, const coding::BitString& p, std::size_t n) { return numeric::decode_online_adaptive(p, n); }}));
    out.push_back(integer_codec(
        "family-select", "best of geometric, poisson, gaussian and laplace", 512,
        {[](std::span<const std::uint64_t> v) {
             auto sel = numeric::select_family(v);
             return std::pair{sel.model.serialize(), std::move(sel.payload)};
         },
         [](ByteSpan h, const coding::BitString& p, std::size_t n) {
             return numeric::decode_family(numeric::FamilyModel::parse(h), p, n);
         }}));

    {
        Codec c;
        c.id = image::kDeltaModelId;
        c.description = "left-neighbour prediction, adaptive residuals";
        c.kinds = {DatasetKind::Image};
        c.default_program_bits = 512;
        c.encode = [](ByteSpan data) {
            const auto img = image::read_pgm(data);
            const auto canonical = image::write_pgm(img);
            if (!std::equal(canonical.begin(), canonical.end(), data.begin(), data.end()))
                throw RefusedError("pixel-delta needs a canonical PGM (P5, single spaces, maxval 255, no comments)");
            return image::delta_encode(img);
        };
        c.decode = [](const EncodedContainer& container) {
            return image::write_pgm(image::delta_decode(container));
        };
        out.push_back(std::move(c));
    }
    {
        Codec c;
        c.id = image::kInterpModelId;
        c.description = "middle frame predicted from its neighbours";
        c.kinds = {DatasetKind::FrameTriple};
        c.default_program_bits = 1024;
        c.encode = [](ByteSpan data) {
            auto frames = image::read_pgm_stream(data);
            if (frames.size() != 3) throw RefusedError("frame-interp needs exactly three frames");
            Bytes canonical;
            for (const auto& f : frames) {
                auto b = image::write_pgm(f);
                canonical.insert(canonical.end(), b.begin(), b.end());
            }
            if (!std::equal(canonical.begin(), canonical.end(), data.begin(), data.end()))
                throw RefusedError("frame-interp needs three canonical PGMs");
            return image::interp_encode({frames[0], frames[1], frames[2]});
        };
        c.decode = [](const EncodedContainer& container) {
            const auto t = image::interp_decode(container);
            Bytes out;
            for (const auto* f : {&t.a, &t.b, &t.c}) {
                auto b = image::write_pgm(*f);
                out.insert(out.end(), b.begin(), b.end());
            }
            return out;
        };
        out.push_back(std::move(c));
    }

    out.push_back(bit_codec("uniform-bit", "fair coin", 32, [] { return std::make_unique<models::UniformModel>(2); },
                            models::UniformModel::load));
    out.push_back(bit_codec(
        "biased-bit", "zeros with probability 0.9", 64,
        [] { return std::make_unique<models::StaticModel>(coding::SymbolDistribution({0.9, 0.1})); },
        models::StaticModel::load));
    out.push_back(bit_codec(
        "adaptive-bit", "adaptive bit frequencies", 96,
        [] { return std::make_unique<models::AdaptiveFrequencyModel>(2, 1, 2); },
        models::AdaptiveFrequencyModel::load));
    return out;
}

} // namespace

std::string kind_name(DatasetKind kind) {
    switch (kind) {
    case DatasetKind::Text: return "text";
    case DatasetKind::Integers: return "integers";
    case DatasetKind::Reals: return "reals";
    case DatasetKind::Image: return "image";
    case DatasetKind::FrameTriple: return "frame-triple";
    case DatasetKind::Bitstrings: return "bitstrings";
    }
    return "unknown";
}

std::optional<DatasetKind> parse_kind(std::string_view name) {
    for (auto k : {DatasetKind::Text, DatasetKind::Integers, DatasetKind::Reals, DatasetKind::Image,
                   DatasetKind::FrameTriple, DatasetKind::Bitstrings})
        if (kind_name(k) == name) return k;
    return std::nullopt;
}

std::vector<std::uint64_t> parse_integers(ByteSpan bytes) {
    std::vector<std::uint64_t> out;
    for (auto [b, e] : split_lines(bytes)) {
        if (b == e) throw ParseError("empty line in integer dataset", b);
        std::uint64_t v = 0;
        const char* first = reinterpret_cast<const char*>(bytes.data()) + b;
        const char* last = reinterpret_cast<const char*>(bytes.data()) + e;
        const auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec == std::errc::result_out_of_range) throw ParseError("integer out of range", b);
        if (ec != std::errc() || ptr != last)
            throw ParseError("expected a nonnegative decimal integer", b + static_cast<std::size_t>(ptr - first));
        out.push_back(v);
    }
    return out;
}

std::string render_integers(std::span<const std::uint64_t> values) {
    std::string out;
    for (auto v : values) {
        out += std::to_string(v);
        out += '\n';
    }
    return out;
}

std::vector<double> parse_reals(ByteSpan bytes) {
    std::vector<double> out;
    for (auto [b, e] : split_lines(bytes)) {
        if (b == e) throw ParseError("empty line in real dataset", b);
        double v = 0;
        const char* first = reinterpret_cast<const char*>(bytes.data()) + b;
        const char* last = reinterpret_cast<const char*>(bytes.data()) + e;
        const auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr != last || !std::isfinite(v))
            throw ParseError("expected a finite real number", b + static_cast<std::size_t>(ptr - first));
        out.push_back(v);
    }
    return out;
}

std::vector<std::string> parse_bitstrings(ByteSpan bytes) {
    std::vector<std::string> out;
    for (auto [b, e] : split_lines(bytes)) {
        std::string line;
        for (std::size_t i = b; i < e; ++i) {
            if (bytes[i] != '0' && bytes[i] != '1') throw ParseError("expected '0' or '1'", i);
            line.push_back(static_cast<char>(bytes[i]));
        }
        out.push_back(std::move(line));
    }
    return out;
}

void validate_dataset(DatasetKind kind, ByteSpan bytes) {
    switch (kind) {
    case DatasetKind::Text: return;
    case DatasetKind::Integers: parse_integers(bytes); return;
    case DatasetKind::Reals: parse_reals(bytes); return;
    case DatasetKind::Image: image::read_pgm(bytes); return;
    case DatasetKind::FrameTriple: {
        const auto frames = image::read_pgm_stream(bytes);
        if (frames.size() != 3)
            throw ParseError("expected three frames, found " + std::to_string(frames.size()), bytes.size());
        for (const auto& f : frames)
            if (f.width() != frames[0].width() || f.height() != frames[0].height())
                throw ParseError("frames differ in size", 0);
        return;
    }
    case DatasetKind::Bitstrings: parse_bitstrings(bytes); return;
    }
}

bool Codec::supports(DatasetKind kind) const {
    return std::find(kinds.begin(), kinds.end(), kind) != kinds.end();
}

const std::vector<Codec>& codecs() {
    static const std::vector<Codec> all = build_codecs();
    return all;
}

const Codec& find_codec(const std::string& id) {
    for (const auto& c : codecs())
        if (c.id == id) return c;
    throw RefusedError("model '" + id + "' is not registered");
}

std::string sample(const std::string& model_id, std::size_t count, std::uint64_t seed) {
    const auto& c = find_codec(model_id);
    if (!c.sampleable()) throw RefusedError("model '" + model_id + "' cannot generate samples");
    return c.sample(count, seed);
}

} // namespace crm::bench
