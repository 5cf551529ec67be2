#pragma once

// Grayscale images: binary PGM I/O, neighbor-difference statistics, the
// left-neighbor delta codec, and the frame-interpolation residual coder.

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "crm/coding.hpp"
#include "crm/models.hpp"

namespace crm::image {

class GrayImage {
public:
    GrayImage(std::uint32_t width, std::uint32_t height, std::uint8_t fill = 0);
    GrayImage(std::uint32_t width, std::uint32_t height, std::vector<std::uint8_t> pixels);

    std::uint32_t width() const noexcept { return width_; }
    std::uint32_t height() const noexcept { return height_; }
    std::uint8_t at(std::uint32_t x, std::uint32_t y) const { return pixels_[index(x, y)]; }
    std::uint8_t& at(std::uint32_t x, std::uint32_t y) { return pixels_[index(x, y)]; }
    std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }

    friend bool operator==(const GrayImage&, const GrayImage&) = default;

private:
    std::size_t index(std::uint32_t x, std::uint32_t y) const;
    std::uint32_t width_, height_;
    std::vector<std::uint8_t> pixels_;
};

/// Binary PGM ("P5", maxval 255). `#` comments are accepted in the header.
GrayImage read_pgm(std::span<const std::uint8_t> bytes);
/// Consecutive P5 images in one byte stream.
std::vector<GrayImage> read_pgm_stream(std::span<const std::uint8_t> bytes);
/// Canonical form: "P5\n<w> <h>\n255\n" followed by the pixels.
std::vector<std::uint8_t> write_pgm(const GrayImage& img);

/// Seeded uniform-random image.
GrayImage random_image(std::uint32_t width, std::uint32_t height, std::uint64_t seed);

/// Left-neighbor prediction; column 0 predicts from the pixel above and the
/// origin from nothing (prediction 0).
std::uint8_t left_prediction(const GrayImage& img, std::uint32_t x, std::uint32_t y);

class DiffHistogram {
public:
    static constexpr int kBins = 511;

    std::uint64_t count(int difference) const;
    std::uint64_t total() const noexcept { return total_; }
    /// Fraction of differences d with |d| <= radius.
    double central_mass(int radius) const;
    void add(int difference);
    const std::array<std::uint64_t, kBins>& bins() const noexcept { return bins_; }

private:
    std::array<std::uint64_t, kBins> bins_{};
    std::uint64_t total_ = 0;
};

/// Differences of every pixel except the origin against left_prediction().
DiffHistogram diff_histogram(const GrayImage& img);

/// Lossless: residuals against left_prediction() coded with an adaptive
/// order-0 model over 511 symbols. The header holds width and height; the
/// original bytes are the canonical PGM form.
models::EncodedContainer delta_encode(const GrayImage& img);
GrayImage delta_decode(const models::EncodedContainer& container);

inline constexpr const char* kDeltaModelId = "pixel-delta";
inline constexpr const char* kInterpModelId = "frame-interp";
inline constexpr double kDefaultEpsilon = 1.0;

struct FrameTriple {
    GrayImage a, b, c;
};

/// Predicted middle frame from its neighbors.
using FramePredictor = std::function<GrayImage(const GrayImage& a, const GrayImage& c)>;

/// Per-pixel (a + c + 1) / 2.
GrayImage interp_predict(const GrayImage& a, const GrayImage& c);

/// Codelength in bits of `b` given the prediction: each residual r = b - b_hat
/// in -255..255 is taken from P(r) proportional to exp(-r^2 / s2) with
/// s2 = |grad b_hat|^2 + epsilon, forward differences (one-sided backward at
/// the last row and column). Per pixel this is r^2 / s2 + ln Z(s2) nats.
double interp_residual_codelength(const GrayImage& b, const GrayImage& b_hat, double epsilon,
                                  coding::Unit unit = coding::Unit::Bits);
/// The residual term alone, sum of r^2 / s2 (nats).
double interp_residual_term(const GrayImage& b, const GrayImage& b_hat, double epsilon);

/// Arithmetic-codes b against b_hat with the same distributions, quantized
/// to 2^16. Returns the bits.
coding::BitString interp_residual_encode(const GrayImage& b, const GrayImage& b_hat, double epsilon);
GrayImage interp_residual_decode(const coding::BitString& bits, const GrayImage& b_hat, double epsilon);

/// A and C delta-coded in full, B against the predictor. Original bytes are
/// the three canonical PGM images concatenated.
models::EncodedContainer interp_encode(const FrameTriple& triple, double epsilon = kDefaultEpsilon,
                                       const FramePredictor& predictor = interp_predict);
FrameTriple interp_decode(const models::EncodedContainer& container,
                          const FramePredictor& predictor = interp_predict);

struct InterpBreakdown {
    std::uint64_t a_bits = 0, c_bits = 0, b_bits = 0;
    /// B coded with the delta codec alone, for comparison.
    std::uint64_t b_delta_bits = 0;
    bool interpolation_helps() const { return b_bits < b_delta_bits; }
};

InterpBreakdown interp_breakdown(const FrameTriple& triple, double epsilon = kDefaultEpsilon,
                                 const FramePredictor& predictor = interp_predict);

} // namespace crm::image
