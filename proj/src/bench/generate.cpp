#include <charconv>
#include <cmath>
#include <random>

#include "crm/bench.hpp"
#include "crm/error.hpp"
#include "crm/numeric.hpp"

namespace crm::bench {

namespace {

void require_params(const std::string& family, std::span<const double> params, std::size_t count) {
    if (params.size() != count)
        throw DomainError(family + " takes " + std::to_string(count) + " parameter" + (count == 1 ? "" : "s") +
                          ", got " + std::to_string(params.size()));
    for (double p : params)
        if (!std::isfinite(p)) throw DomainError(family + ": parameters must be finite");
}

std::string render_real(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

} // namespace

std::string generate_dataset(const std::string& family, std::span<const double> params, std::size_t n,
                             std::uint64_t seed) {
    if (family == "normal") {
        require_params(family, params, 2);
        std::string out;
        for (double v : numeric::sample_normal(params[0], params[1], n, seed)) {
            out += render_real(v);
            out += '\n';
        }
        return out;
    }
    if (family == "bernoulli") {
        require_params(family, params, 1);
        if (!(params[0] >= 0.0 && params[0] <= 1.0)) throw DomainError("bernoulli: p must lie in [0, 1]");
        if (n == 0) return {};
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::string out;
        out.reserve(n + 1);
        for (std::size_t i = 0; i < n; ++i) out.push_back(u(rng) < params[0] ? '1' : '0');
        out.push_back('\n');
        return out;
    }
    const auto f = numeric::parse_family(family);
    if (!f)
        throw DomainError("unknown family '" + family +
                          "' (geometric, poisson, gaussian, laplace, normal, bernoulli)");
    const std::size_t k = *f == numeric::Family::Geometric || *f == numeric::Family::Poisson ? 1 : 2;
    require_params(family, params, k);
    numeric::FamilyModel model{*f, {}};
    for (double p : params) model.params.push_back(static_cast<float>(p));
    return render_integers(numeric::sample_family(model, n, seed));
}

} // namespace crm::bench
