#include "crm/coding.hpp"
#include "crm/error.hpp"

namespace crm::coding {

BitString BitString::from_bytes(std::vector<std::uint8_t> bytes, std::uint64_t length_bits) {
    if ((length_bits + 7) / 8 != bytes.size())
        throw DomainError("bit length " + std::to_string(length_bits) + " does not match " +
                          std::to_string(bytes.size()) + " bytes");
    BitString out;
    out.bytes_ = std::move(bytes);
    out.length_ = length_bits;
    if (const unsigned pad = out.padding_bits(); pad != 0)
        out.bytes_.back() &= static_cast<std::uint8_t>(0xFFu << pad);
    return out;
}

void BitString::push_back(bool bit) {
    if (length_ % 8 == 0) bytes_.push_back(0);
    if (bit) bytes_.back() |= static_cast<std::uint8_t>(0x80u >> (length_ % 8));
    ++length_;
}

void BitString::append(const BitString& other) {
    for (std::uint64_t i = 0; i < other.size(); ++i) push_back(other[i]);
}

bool BitString::operator[](std::uint64_t index) const {
    if (index >= length_) throw DomainError("bit index out of range");
    return (bytes_[index / 8] >> (7 - index % 8)) & 1u;
}

BitString BitString::slice(std::uint64_t offset, std::uint64_t length) const {
    if (offset > length_ || length > length_ - offset) throw DomainError("bit slice out of range");
    BitString out;
    for (std::uint64_t i = 0; i < length; ++i) out.push_back((*this)[offset + i]);
    return out;
}

bool BitStringSource::next_bit() {
    const bool bit = position_ < bits_.size() ? bits_[position_] : false;
    ++position_;
    return bit;
}

bool RandomBitSource::next_bit() {
    if (remaining_ == 0) {
        word_ = engine_();
        remaining_ = 64;
    }
    --remaining_;
    return (word_ >> remaining_) & 1u;
}

BitString random_bits(std::uint64_t length_bits, std::uint64_t seed) {
    RandomBitSource source(seed);
    BitString out;
    for (std::uint64_t i = 0; i < length_bits; ++i) out.push_back(source.next_bit());
    return out;
}

} // namespace crm::coding
