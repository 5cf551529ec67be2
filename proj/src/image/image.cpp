#include "crm/image.hpp"

#include <cmath>
#include <map>
#include <random>

#include "crm/error.hpp"
#include "crm/wire.hpp"

namespace crm::image {

using coding::BitString;
using coding::CumulativeTable;

GrayImage::GrayImage(std::uint32_t width, std::uint32_t height, std::uint8_t fill)
    : GrayImage(width, height,
                std::vector<std::uint8_t>(static_cast<std::size_t>(width) * height, fill)) {}

GrayImage::GrayImage(std::uint32_t width, std::uint32_t height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
    if (width == 0 || height == 0) throw DomainError("image dimensions must be positive");
    if (pixels_.size() != static_cast<std::size_t>(width) * height)
        throw DomainError("pixel count " + std::to_string(pixels_.size()) + " does not match " +
                          std::to_string(width) + "x" + std::to_string(height));
}

std::size_t GrayImage::index(std::uint32_t x, std::uint32_t y) const {
    if (x >= width_ || y >= height_) throw DomainError("pixel coordinate out of range");
    return static_cast<std::size_t>(y) * width_ + x;
}

// ---------------------------------------------------------------------------

namespace {

class PgmReader {
public:
    PgmReader(std::span<const std::uint8_t> bytes, std::size_t pos) : b_(bytes), pos_(pos) {}

    GrayImage image() {
        const std::size_t start = pos_;
        if (b_.size() - pos_ < 2 || b_[pos_] != 'P' || b_[pos_ + 1] != '5')
            throw ParseError("not a binary PGM (expected P5)", start);
        pos_ += 2;
        const auto w = number("width");
        const auto h = number("height");
        const auto maxval = number("maxval");
        if (maxval != 255) throw ParseError("only maxval 255 is supported", pos_);
        if (pos_ >= b_.size() || !is_space(b_[pos_])) throw ParseError("missing whitespace after maxval", pos_);
        ++pos_;
        if (w == 0 || h == 0 || w > 1u << 16 || h > 1u << 16)
            throw ParseError("unsupported PGM dimensions", start);
        const std::size_t n = static_cast<std::size_t>(w) * h;
        if (b_.size() - pos_ < n) throw ParseError("truncated pixel data", b_.size());
        std::vector<std::uint8_t> px(b_.begin() + static_cast<std::ptrdiff_t>(pos_),
                                     b_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
        pos_ += n;
        return GrayImage(static_cast<std::uint32_t>(w), static_cast<std::uint32_t>(h), std::move(px));
    }

    std::size_t position() const { return pos_; }

private:
    static bool is_space(std::uint8_t c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f'; }

    std::uint64_t number(const char* what) {
        // whitespace and comments before each header field
        while (pos_ < b_.size()) {
            if (is_space(b_[pos_])) {
                ++pos_;
            } else if (b_[pos_] == '#') {
                while (pos_ < b_.size() && b_[pos_] != '\n') ++pos_;
            } else {
                break;
            }
        }
        const std::size_t start = pos_;
        std::uint64_t v = 0;
        while (pos_ < b_.size() && b_[pos_] >= '0' && b_[pos_] <= '9') {
            v = v * 10 + (b_[pos_] - '0');
            if (v > 1u << 20) throw ParseError(std::string("PGM ") + what + " too large", start);
            ++pos_;
        }
        if (pos_ == start) throw ParseError(std::string("expected PGM ") + what, start);
        return v;
    }

    std::span<const std::uint8_t> b_;
    std::size_t pos_;
};

} // namespace

GrayImage read_pgm(std::span<const std::uint8_t> bytes) {
    PgmReader r(bytes, 0);
    auto img = r.image();
    if (r.position() != bytes.size()) throw ParseError("trailing bytes after PGM image", r.position());
    return img;
}

std::vector<GrayImage> read_pgm_stream(std::span<const std::uint8_t> bytes) {
    std::vector<GrayImage> out;
    std::size_t pos = 0;
    while (pos < bytes.size()) {
        PgmReader r(bytes, pos);
        out.push_back(r.image());
        pos = r.position();
    }
    if (out.empty()) throw ParseError("empty PGM stream", 0);
    return out;
}

std::vector<std::uint8_t> write_pgm(const GrayImage& img) {
    const std::string head =
        "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
    std::vector<std::uint8_t> out(head.begin(), head.end());
    out.insert(out.end(), img.pixels().begin(), img.pixels().end());
    return out;
}

GrayImage random_image(std::uint32_t width, std::uint32_t height, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<std::uint8_t> px(static_cast<std::size_t>(width) * height);
    for (auto& p : px) p = static_cast<std::uint8_t>(rng() >> 56);
    return GrayImage(width, height, std::move(px));
}

std::uint8_t left_prediction(const GrayImage& img, std::uint32_t x, std::uint32_t y) {
    if (x > 0) return img.at(x - 1, y);
    if (y > 0) return img.at(0, y - 1);
    return 0;
}

// ---------------------------------------------------------------------------

std::uint64_t DiffHistogram::count(int difference) const {
    if (difference < -255 || difference > 255) throw DomainError("difference out of range");
    return bins_[static_cast<std::size_t>(difference + 255)];
}

void DiffHistogram::add(int difference) {
    if (difference < -255 || difference > 255) throw DomainError("difference out of range");
    ++bins_[static_cast<std::size_t>(difference + 255)];
    ++total_;
}

double DiffHistogram::central_mass(int radius) const {
    if (total_ == 0) return 0.0;
    std::uint64_t c = 0;
    for (int d = -radius; d <= radius; ++d)
        if (d >= -255 && d <= 255) c += count(d);
    return static_cast<double>(c) / static_cast<double>(total_);
}

DiffHistogram diff_histogram(const GrayImage& img) {
    if (img.width() < 2) throw DomainError("diff_histogram: width must be at least 2");
    DiffHistogram h;
    for (std::uint32_t y = 0; y < img.height(); ++y)
        for (std::uint32_t x = 0; x < img.width(); ++x)
            if (x > 0 || y > 0) h.add(int(img.at(x, y)) - int(left_prediction(img, x, y)));
    return h;
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::uint32_t kResidualSymbols = 511;

std::vector<std::uint32_t> delta_symbols(const GrayImage& img) {
    std::vector<std::uint32_t> s;
    s.reserve(img.pixels().size());
    for (std::uint32_t y = 0; y < img.height(); ++y)
        for (std::uint32_t x = 0; x < img.width(); ++x)
            s.push_back(static_cast<std::uint32_t>(int(img.at(x, y)) - int(left_prediction(img, x, y)) + 255));
    return s;
}

BitString delta_payload(const GrayImage& img) {
    models::AdaptiveFrequencyModel model(kResidualSymbols);
    return models::encode_sequence(model, delta_symbols(img));
}

GrayImage delta_reconstruct(coding::BitSource& bits, std::uint32_t w, std::uint32_t h) {
    models::AdaptiveFrequencyModel model(kResidualSymbols);
    const auto symbols = models::decode_sequence(model, bits, static_cast<std::size_t>(w) * h);
    GrayImage img(w, h);
    std::size_t i = 0;
    for (std::uint32_t y = 0; y < h; ++y) {
        for (std::uint32_t x = 0; x < w; ++x, ++i) {
            const int v = int(symbols[i]) - 255 + int(left_prediction(img, x, y));
            if (v < 0 || v > 255) throw DomainError("decoded pixel out of range");
            img.at(x, y) = static_cast<std::uint8_t>(v);
        }
    }
    return img;
}

void check_same_size(const GrayImage& a, const GrayImage& b, const char* what) {
    if (a.width() != b.width() || a.height() != b.height())
        throw DomainError(std::string(what) + ": image dimensions differ");
}

std::vector<std::uint8_t> concat_pgm(const FrameTriple& t) {
    auto out = write_pgm(t.a);
    for (const auto* img : {&t.b, &t.c}) {
        const auto more = write_pgm(*img);
        out.insert(out.end(), more.begin(), more.end());
    }
    return out;
}

std::pair<std::uint32_t, std::uint32_t> read_dims(wire::ByteReader& r) {
    const auto w = r.u32();
    const auto h = r.u32();
    if (w == 0 || h == 0 || w > 1u << 16 || h > 1u << 16) throw ParseError("bad image dimensions", 0);
    return {w, h};
}

} // namespace

models::EncodedContainer delta_encode(const GrayImage& img) {
    models::EncodedContainer c;
    c.model_id = kDeltaModelId;
    wire::ByteWriter w;
    w.u32(img.width());
    w.u32(img.height());
    c.model_header = std::move(w).take();
    const auto pgm = write_pgm(img);
    c.original_length = pgm.size();
    c.checksum = models::sha256(pgm);
    c.payload = delta_payload(img);
    return c;
}

GrayImage delta_decode(const models::EncodedContainer& container) {
    if (container.model_id != kDeltaModelId)
        throw ParseError("container is not a " + std::string(kDeltaModelId) + " container", 5);
    wire::ByteReader r(container.model_header);
    const auto [w, h] = read_dims(r);
    if (!r.at_end()) throw ParseError("trailing header bytes", r.position());
    coding::BitStringSource src(container.payload);
    return delta_reconstruct(src, w, h);
}

// ---------------------------------------------------------------------------

GrayImage interp_predict(const GrayImage& a, const GrayImage& c) {
    check_same_size(a, c, "interp_predict");
    std::vector<std::uint8_t> px(a.pixels().size());
    for (std::size_t i = 0; i < px.size(); ++i)
        px[i] = static_cast<std::uint8_t>((unsigned(a.pixels()[i]) + c.pixels()[i] + 1) / 2);
    return GrayImage(a.width(), a.height(), std::move(px));
}

namespace {

std::uint32_t gradient_squared(const GrayImage& img, std::uint32_t x, std::uint32_t y) {
    auto diff = [](int a, int b) { return a - b; };
    int gx = 0, gy = 0;
    if (img.width() > 1)
        gx = x + 1 < img.width() ? diff(img.at(x + 1, y), img.at(x, y)) : diff(img.at(x, y), img.at(x - 1, y));
    if (img.height() > 1)
        gy = y + 1 < img.height() ? diff(img.at(x, y + 1), img.at(x, y)) : diff(img.at(x, y), img.at(x, y - 1));
    return static_cast<std::uint32_t>(gx * gx + gy * gy);
}

double log_normalizer(double s2) {
    double z = 0.0;
    for (int r = -255; r <= 255; ++r) z += std::exp(-double(r) * r / s2);
    return std::log(z);
}

void check_epsilon(double epsilon) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw DomainError("epsilon must be positive");
}

class ResidualTables {
public:
    explicit ResidualTables(double epsilon) : epsilon_(epsilon) {}
    const CumulativeTable& operator()(std::uint32_t g2) {
        auto it = cache_.find(g2);
        if (it != cache_.end()) return it->second;
        const double s2 = g2 + epsilon_;
        std::vector<double> w(kResidualSymbols);
        for (int r = -255; r <= 255; ++r) w[static_cast<std::size_t>(r + 255)] = std::max(std::exp(-double(r) * r / s2), 1e-300);
        auto table = CumulativeTable::quantize(coding::SymbolDistribution::from_weights(w),
                                               CumulativeTable::kMaxTotal);
        return cache_.emplace(g2, std::move(table)).first->second;
    }

private:
    double epsilon_;
    std::map<std::uint32_t, CumulativeTable> cache_;
};

} // namespace

double interp_residual_term(const GrayImage& b, const GrayImage& b_hat, double epsilon) {
    check_same_size(b, b_hat, "interp_residual_codelength");
    check_epsilon(epsilon);
    double total = 0.0;
    for (std::uint32_t y = 0; y < b.height(); ++y) {
        for (std::uint32_t x = 0; x < b.width(); ++x) {
            const double r = double(b.at(x, y)) - double(b_hat.at(x, y));
            total += r * r / (gradient_squared(b_hat, x, y) + epsilon);
        }
    }
    return total;
}

double interp_residual_codelength(const GrayImage& b, const GrayImage& b_hat, double epsilon,
                                  coding::Unit unit) {
    double total = interp_residual_term(b, b_hat, epsilon);
    std::map<std::uint32_t, double> k;
    for (std::uint32_t y = 0; y < b.height(); ++y) {
        for (std::uint32_t x = 0; x < b.width(); ++x) {
            const auto g2 = gradient_squared(b_hat, x, y);
            auto it = k.find(g2);
            if (it == k.end()) it = k.emplace(g2, log_normalizer(g2 + epsilon)).first;
            total += it->second;
        }
    }
    return coding::from_nats(total, unit);
}

namespace {

void encode_residuals(coding::ArithmeticEncoder& enc, const GrayImage& b, const GrayImage& b_hat,
                      double epsilon) {
    ResidualTables tables(epsilon);
    for (std::uint32_t y = 0; y < b.height(); ++y)
        for (std::uint32_t x = 0; x < b.width(); ++x)
            enc.encode(tables(gradient_squared(b_hat, x, y)),
                       static_cast<std::size_t>(int(b.at(x, y)) - int(b_hat.at(x, y)) + 255));
}

GrayImage decode_residuals(coding::BitSource& bits, const GrayImage& b_hat, double epsilon) {
    coding::ArithmeticDecoder dec(bits);
    ResidualTables tables(epsilon);
    GrayImage b(b_hat.width(), b_hat.height());
    for (std::uint32_t y = 0; y < b.height(); ++y) {
        for (std::uint32_t x = 0; x < b.width(); ++x) {
            const int v = int(dec.decode(tables(gradient_squared(b_hat, x, y)))) - 255 + b_hat.at(x, y);
            if (v < 0 || v > 255) throw DomainError("decoded pixel out of range");
            b.at(x, y) = static_cast<std::uint8_t>(v);
        }
    }
    return b;
}

} // namespace

BitString interp_residual_encode(const GrayImage& b, const GrayImage& b_hat, double epsilon) {
    check_same_size(b, b_hat, "interp_residual_encode");
    check_epsilon(epsilon);
    coding::ArithmeticEncoder enc;
    encode_residuals(enc, b, b_hat, epsilon);
    return enc.finish();
}

GrayImage interp_residual_decode(const BitString& bits, const GrayImage& b_hat, double epsilon) {
    check_epsilon(epsilon);
    coding::BitStringSource src(bits);
    return decode_residuals(src, b_hat, epsilon);
}

models::EncodedContainer interp_encode(const FrameTriple& t, double epsilon,
                                       const FramePredictor& predictor) {
    check_same_size(t.a, t.b, "interp_encode");
    check_same_size(t.a, t.c, "interp_encode");
    check_epsilon(epsilon);
    const auto a_bits = delta_payload(t.a);
    const auto c_bits = delta_payload(t.c);
    const auto b_bits = interp_residual_encode(t.b, predictor(t.a, t.c), epsilon);

    models::EncodedContainer out;
    out.model_id = kInterpModelId;
    wire::ByteWriter w;
    w.u32(t.a.width());
    w.u32(t.a.height());
    w.f64(epsilon);
    w.u64(a_bits.size());
    w.u64(c_bits.size());
    out.model_header = std::move(w).take();
    const auto original = concat_pgm(t);
    out.original_length = original.size();
    out.checksum = models::sha256(original);
    out.payload = a_bits;
    out.payload.append(c_bits);
    out.payload.append(b_bits);
    return out;
}

FrameTriple interp_decode(const models::EncodedContainer& container, const FramePredictor& predictor) {
    if (container.model_id != kInterpModelId)
        throw ParseError("container is not a " + std::string(kInterpModelId) + " container", 5);
    wire::ByteReader r(container.model_header);
    const auto [w, h] = read_dims(r);
    const double epsilon = r.f64();
    const auto a_len = r.u64();
    const auto c_len = r.u64();
    if (!r.at_end()) throw ParseError("trailing header bytes", r.position());
    check_epsilon(epsilon);
    const auto& p = container.payload;
    if (a_len > p.size() || c_len > p.size() - a_len)
        throw ParseError("stream lengths exceed the payload", 0);
    const auto a_bits = p.slice(0, a_len);
    const auto c_bits = p.slice(a_len, c_len);
    const auto b_bits = p.slice(a_len + c_len, p.size() - a_len - c_len);
    coding::BitStringSource sa(a_bits), sc(c_bits);
    auto a = delta_reconstruct(sa, w, h);
    auto c = delta_reconstruct(sc, w, h);
    auto b = interp_residual_decode(b_bits, predictor(a, c), epsilon);
    return {std::move(a), std::move(b), std::move(c)};
}

InterpBreakdown interp_breakdown(const FrameTriple& t, double epsilon, const FramePredictor& predictor) {
    InterpBreakdown r;
    r.a_bits = delta_payload(t.a).size();
    r.c_bits = delta_payload(t.c).size();
    r.b_bits = interp_residual_encode(t.b, predictor(t.a, t.c), epsilon).size();
    r.b_delta_bits = delta_payload(t.b).size();
    return r;
}

} // namespace crm::image
