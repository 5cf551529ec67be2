#include "crm/error.hpp"
#include "crm/models.hpp"

#include <limits>

namespace crm::models {

NetScore score_two_part(std::uint64_t model_bits, std::uint64_t payload_bits) {
    constexpr std::uint64_t kCap = static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max());
    if (model_bits > kCap || payload_bits > kCap - model_bits)
        throw DomainError("two-part total overflows 2^63 - 1");
    return NetScore{model_bits, payload_bits, model_bits + payload_bits};
}

Champion compare_champion(const NetScore& incumbent, const NetScore& challenger) {
    if (challenger.total != incumbent.total)
        return challenger.total < incumbent.total ? Champion::Challenger : Champion::Incumbent;
    return challenger.model_bits < incumbent.model_bits ? Champion::Challenger : Champion::Incumbent;
}

} // namespace crm::models
