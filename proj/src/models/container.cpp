#include "crm/error.hpp"
#include "crm/models.hpp"
#include "crm/wire.hpp"

#include <openssl/sha.h>

#include <algorithm>
#include <limits>

namespace crm::models {

namespace {
constexpr std::uint8_t kMagic[4] = {'C', 'R', 'M', '1'};
}

Digest sha256(std::span<const std::uint8_t> data) {
    Digest out{};
    SHA256(data.data(), data.size(), out.data());
    return out;
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string s;
    s.reserve(bytes.size() * 2);
    for (std::uint8_t b : bytes) {
        s.push_back(kDigits[b >> 4]);
        s.push_back(kDigits[b & 0xF]);
    }
    return s;
}

std::vector<std::uint8_t> EncodedContainer::serialize() const {
    if (model_id.size() > std::numeric_limits<std::uint16_t>::max())
        throw DomainError("model id too long for the container");
    if (model_header.size() > std::numeric_limits<std::uint32_t>::max())
        throw DomainError("model header too long for the container");
    wire::ByteWriter w;
    w.bytes(kMagic);
    w.u8(kFormatVersion);
    w.u16(static_cast<std::uint16_t>(model_id.size()));
    w.text(model_id);
    w.u32(static_cast<std::uint32_t>(model_header.size()));
    w.bytes(model_header);
    w.u64(original_length);
    w.u64(payload.size());
    w.bytes(payload.bytes());
    w.bytes(checksum);
    return std::move(w).take();
}

EncodedContainer EncodedContainer::parse(std::span<const std::uint8_t> bytes) {
    wire::ByteReader r(bytes);
    const auto magic = r.bytes(4);
    if (!std::equal(magic.begin(), magic.end(), kMagic)) throw ParseError("bad container magic", 0);
    const std::size_t version_at = r.position();
    if (const auto version = r.u8(); version != kFormatVersion)
        throw ParseError("unsupported container version " + std::to_string(version), version_at);

    EncodedContainer c;
    c.model_id = r.text(r.u16());
    const std::uint32_t header_len = r.u32();
    const auto header = r.bytes(header_len);
    c.model_header.assign(header.begin(), header.end());
    c.original_length = r.u64();
    const std::size_t bits_at = r.position();
    const std::uint64_t payload_bits = r.u64();
    if (payload_bits / 8 > r.remaining()) throw ParseError("payload length exceeds container", bits_at);
    const auto payload = r.bytes((payload_bits + 7) / 8);
    const std::size_t pad_at = r.position() - 1;
    c.payload = coding::BitString::from_bytes({payload.begin(), payload.end()}, payload_bits);
    if (payload_bits % 8 != 0 && payload.back() != c.payload.bytes().back())
        throw ParseError("nonzero payload padding bits", pad_at);
    const auto sum = r.bytes(32);
    std::copy(sum.begin(), sum.end(), c.checksum.begin());
    if (!r.at_end()) throw ParseError("trailing bytes after container", r.position());
    return c;
}

VerificationReport verify_roundtrip(std::span<const std::uint8_t> original,
                                    const EncodedContainer& container,
                                    const ContainerDecoder& decode) {
    VerificationReport report;
    std::vector<std::uint8_t> decoded;
    try {
        decoded = decode(container);
    } catch (const Error& e) {
        report.diagnostic = std::string("decode failed: ") + e.what();
        report.first_mismatch_offset = 0;
        return report;
    }
    report.byte_length = decoded.size();
    report.decoded_checksum = sha256(decoded);

    const auto mismatch = std::mismatch(original.begin(), original.end(), decoded.begin(), decoded.end());
    if (mismatch.first != original.end() || mismatch.second != decoded.end()) {
        report.first_mismatch_offset = static_cast<std::uint64_t>(mismatch.first - original.begin());
        report.diagnostic = "decoded bytes differ from the original";
        return report;
    }
    if (decoded.size() != container.original_length) {
        report.diagnostic = "decoded length disagrees with the container";
        return report;
    }
    if (report.decoded_checksum != container.checksum) {
        report.diagnostic = "container checksum does not match the original";
        return report;
    }
    report.ok = true;
    return report;
}

} // namespace crm::models
