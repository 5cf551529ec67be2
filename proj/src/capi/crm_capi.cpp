#include "crm/crm.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>
#include <vector>

#include "crm/bench.hpp"
#include "crm/bounds.hpp"
#include "crm/coding.hpp"
#include "crm/error.hpp"
#include "crm/numeric.hpp"
#include "json.hpp"

struct crm_workspace {
    crm::bench::Workspace ws;
    std::string home;
};

namespace {

using nlohmann::json;

thread_local std::string g_last_error;

crm_status status_of(crm::ErrorKind kind) {
    switch (kind) {
    case crm::ErrorKind::Domain: return CRM_ERR_DOMAIN;
    case crm::ErrorKind::Encoding: return CRM_ERR_ENCODING;
    case crm::ErrorKind::Parse: return CRM_ERR_PARSE;
    case crm::ErrorKind::Io: return CRM_ERR_IO;
    case crm::ErrorKind::NotFound: return CRM_ERR_NOT_FOUND;
    case crm::ErrorKind::Refused: return CRM_ERR_REFUSED;
    case crm::ErrorKind::Verification: return CRM_ERR_VERIFICATION;
    }
    return CRM_ERR_INTERNAL;
}

template <class F>
crm_status guard(F&& f) {
    g_last_error.clear();
    try {
        return f();
    } catch (const crm::Error& e) {
        g_last_error = e.what();
        return status_of(e.kind());
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return CRM_ERR_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return CRM_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return CRM_ERR_INTERNAL;
    }
}

crm_status invalid(const char* what) {
    g_last_error = what;
    return CRM_ERR_INVALID_ARGUMENT;
}

char* dup_string(const std::string& s) {
    char* p = static_cast<char*>(std::malloc(s.size() + 1));
    if (!p) throw std::bad_alloc();
    std::memcpy(p, s.data(), s.size());
    p[s.size()] = '\0';
    return p;
}

crm::coding::Unit unit_of(crm_unit u) { return u == CRM_UNIT_NATS ? crm::coding::Unit::Nats : crm::coding::Unit::Bits; }

crm::coding::SymbolDistribution dist(const double* p, size_t n) {
    return crm::coding::SymbolDistribution(std::vector<double>(p, p + n));
}

const char* unit_string(crm::bounds::BoundUnit u) {
    switch (u) {
    case crm::bounds::BoundUnit::Samples: return "samples";
    case crm::bounds::BoundUnit::Nats: return "nats";
    case crm::bounds::BoundUnit::Bits: return "bits";
    case crm::bounds::BoundUnit::Probability: return "probability";
    case crm::bounds::BoundUnit::Dimensionless: return "dimensionless";
    }
    return "dimensionless";
}

void fill(crm_bound* out, const crm::bounds::BoundResult& r) {
    out->value = r.value;
    out->unit = unit_string(r.unit);
}

json entry_json(const crm::bench::DatasetEntry& e) {
    return {{"id", e.id},
            {"path", e.path},
            {"checksum", e.checksum},
            {"kind", crm::bench::kind_name(e.kind)},
            {"bytes", e.bytes}};
}

json run_json(const crm::bench::RunReport& r) {
    return {{"dataset", r.dataset},
            {"model", r.model},
            {"seed", r.seed},
            {"model_bits", r.score.model_bits},
            {"payload_bits", r.score.payload_bits},
            {"total", r.score.total},
            {"verified", r.verified},
            {"wall_time", r.wall_time},
            {"tool_version", r.tool_version},
            {"container", r.container},
            {"container_sha256", r.container_sha256},
            {"original_bytes", r.original_bytes},
            {"diagnostic", r.diagnostic}};
}

json verification_json(const crm::models::VerificationReport& v) {
    json j = {{"ok", v.ok},
              {"decoded_sha256", crm::models::to_hex(v.decoded_checksum)},
              {"byte_length", v.byte_length},
              {"diagnostic", v.diagnostic}};
    j["first_mismatch_offset"] = v.first_mismatch_offset ? json(*v.first_mismatch_offset) : json(nullptr);
    return j;
}

} // namespace

extern "C" {

const char* crm_version(void) { return crm::bench::kToolVersion; }

const char* crm_status_name(crm_status status) {
    switch (status) {
    case CRM_OK: return "ok";
    case CRM_ERR_DOMAIN: return "domain error";
    case CRM_ERR_ENCODING: return "encoding error";
    case CRM_ERR_PARSE: return "parse error";
    case CRM_ERR_IO: return "i/o error";
    case CRM_ERR_NOT_FOUND: return "not found";
    case CRM_ERR_REFUSED: return "refused";
    case CRM_ERR_VERIFICATION: return "verification failed";
    case CRM_ERR_INVALID_ARGUMENT: return "invalid argument";
    case CRM_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* crm_last_error(void) { return g_last_error.c_str(); }

void crm_string_free(char* s) { std::free(s); }

crm_status crm_shannon_codelength(double p, double* out_bits) {
    if (!out_bits) return invalid("null output");
    return guard([&] {
        if (!(p > 0.0 && p <= 1.0)) throw crm::DomainError("probability must lie in (0, 1]");
        *out_bits = crm::coding::shannon_codelength(p);
        return CRM_OK;
    });
}

crm_status crm_entropy(const double* p, size_t n, crm_unit unit, double* out) {
    if (!p || !out) return invalid("null argument");
    return guard([&] {
        *out = crm::coding::entropy(dist(p, n), unit_of(unit));
        return CRM_OK;
    });
}

crm_status crm_cross_entropy(const double* p, const double* q, size_t n, crm_unit unit, double* out) {
    if (!p || !q || !out) return invalid("null argument");
    return guard([&] {
        *out = crm::coding::cross_entropy(dist(p, n), dist(q, n), unit_of(unit));
        return CRM_OK;
    });
}

crm_status crm_kl_divergence(const double* p, const double* q, size_t n, crm_unit unit, double* out) {
    if (!p || !q || !out) return invalid("null argument");
    return guard([&] {
        *out = crm::coding::kl_divergence(dist(p, n), dist(q, n), unit_of(unit));
        return CRM_OK;
    });
}

crm_status crm_kraft_sum(const unsigned* lengths, size_t n, double* out) {
    if ((!lengths && n) || !out) return invalid("null argument");
    return guard([&] {
        *out = crm::coding::kraft_sum(std::span<const unsigned>(lengths, n));
        return CRM_OK;
    });
}

crm_status crm_geometric_entropy(double lambda, double* out_nats, double* out_bits) {
    return guard([&] {
        const auto v = crm::numeric::geometric_entropy(lambda);
        if (out_nats) *out_nats = v.nats;
        if (out_bits) *out_bits = v.bits;
        return CRM_OK;
    });
}

crm_status crm_geometric_cross_entropy(double lambda_true, double lambda_guess, double* out_nats, double* out_bits) {
    return guard([&] {
        const auto v = crm::numeric::geometric_cross_entropy(lambda_true, lambda_guess);
        if (out_nats) *out_nats = v.nats;
        if (out_bits) *out_bits = v.bits;
        return CRM_OK;
    });
}

crm_status crm_geometric_kl(double lambda_true, double lambda_guess, double* out_nats, double* out_bits) {
    return guard([&] {
        const auto v = crm::numeric::geometric_kl(lambda_true, lambda_guess);
        if (out_nats) *out_nats = v.nats;
        if (out_bits) *out_bits = v.bits;
        return CRM_OK;
    });
}

crm_status crm_crossover_n(double header_bits, double per_sample_penalty, uint64_t* out) {
    if (!out) return invalid("null output");
    return guard([&] {
        *out = crm::numeric::crossover_n(header_bits, per_sample_penalty);
        return CRM_OK;
    });
}

crm_status crm_bounds_required_samples(double epsilon, double delta, double ln_class_size, crm_bound* out) {
    if (!out) return invalid("null output");
    return guard([&] {
        fill(out, crm::bounds::required_samples(epsilon, delta, crm::bounds::HypothesisClassSpec::from_ln(ln_class_size)));
        return CRM_OK;
    });
}

crm_status crm_bounds_max_class_log_size(double n, double epsilon, double delta, crm_bound* out) {
    if (!out) return invalid("null output");
    return guard([&] {
        fill(out, crm::bounds::max_class_log_size(n, epsilon, delta));
        return CRM_OK;
    });
}

crm_status crm_bounds_rule_class_log_size(uint64_t k, uint64_t e, uint64_t d, crm_bound* out) {
    if (!out) return invalid("null output");
    return guard([&] {
        fill(out, crm::bounds::rule_class_log_size(k, e, d));
        return CRM_OK;
    });
}

crm_status crm_bounds_hidden_worm(double ln_class_size, double epsilon, uint64_t n, crm_bound* out) {
    if (!out) return invalid("null output");
    return guard([&] {
        fill(out, crm::bounds::hidden_worm_bound(crm::bounds::HypothesisClassSpec::from_ln(ln_class_size), epsilon, n));
        return CRM_OK;
    });
}

crm_status crm_bounds_simulate_hidden_worm(uint64_t class_size, double epsilon, uint64_t n, uint64_t trials,
                                           uint64_t seed, unsigned threads, crm_worm_simulation* out) {
    if (!out) return invalid("null output");
    return guard([&] {
        const auto s = crm::bounds::simulate_hidden_worm(class_size, epsilon, n, trials, seed, threads);
        *out = {s.trials, s.worm_trials, s.frequency, s.analytic_bound, s.sigma};
        return CRM_OK;
    });
}

crm_status crm_bounds_compression_view(int found, double ln_class_size, uint64_t n, crm_compression_view* out) {
    if (!out) return invalid("null output");
    return guard([&] {
        const auto v = crm::bounds::compression_view_codelength(found != 0,
                                                                crm::bounds::HypothesisClassSpec::from_ln(ln_class_size), n);
        *out = {v.bits, v.fallback_bits, v.saves ? 1 : 0};
        return CRM_OK;
    });
}

crm_status crm_bounds_compression_risk(double bits_per_sample, double n, double delta, crm_bound* out) {
    if (!out) return invalid("null output");
    return guard([&] {
        fill(out, crm::bounds::compression_generalization_bound(bits_per_sample, n, delta));
        return CRM_OK;
    });
}

crm_status crm_bounds_model_ceiling(double n_labels, double flat_payload_bits, crm_bound* out) {
    if (!out) return invalid("null output");
    return guard([&] {
        fill(out, crm::bounds::model_complexity_ceiling(n_labels, flat_payload_bits));
        return CRM_OK;
    });
}

crm_status crm_bounds_two_part_savings(double model_bits, double payload_bits, double flat_bits, double* out) {
    if (!out) return invalid("null output");
    return guard([&] {
        *out = crm::bounds::two_part_savings(model_bits, payload_bits, flat_bits);
        return CRM_OK;
    });
}

crm_status crm_list_models(char** out_json) {
    if (!out_json) return invalid("null output");
    return guard([&] {
        json arr = json::array();
        for (const auto& c : crm::bench::codecs()) {
            json kinds = json::array();
            for (auto k : c.kinds) kinds.push_back(crm::bench::kind_name(k));
            arr.push_back({{"id", c.id},
                           {"description", c.description},
                           {"kinds", kinds},
                           {"program_bits", c.default_program_bits},
                           {"sampleable", c.sampleable()}});
        }
        *out_json = dup_string(arr.dump(2));
        return CRM_OK;
    });
}

crm_status crm_sample(const char* model_id, uint64_t count, uint64_t seed, char** out, size_t* out_len) {
    if (!model_id || !out) return invalid("null argument");
    return guard([&] {
        const auto s = crm::bench::sample(model_id, static_cast<std::size_t>(count), seed);
        *out = dup_string(s);
        if (out_len) *out_len = s.size();
        return CRM_OK;
    });
}

crm_status crm_generate(const char* family, const double* params, size_t n_params, uint64_t n, uint64_t seed,
                        char** out) {
    if (!family || (!params && n_params) || !out) return invalid("null argument");
    return guard([&] {
        *out = dup_string(crm::bench::generate_dataset(family, std::span<const double>(params, n_params),
                                                       static_cast<std::size_t>(n), seed));
        return CRM_OK;
    });
}

crm_status crm_workspace_open(const char* home, crm_workspace** out) {
    if (!out) return invalid("null output");
    *out = nullptr;
    return guard([&] {
        const auto path = home ? std::filesystem::path(home) : crm::bench::Workspace::default_home();
        *out = new crm_workspace{crm::bench::Workspace(path), path.string()};
        return CRM_OK;
    });
}

void crm_workspace_close(crm_workspace* ws) { delete ws; }

const char* crm_workspace_home(const crm_workspace* ws) { return ws ? ws->home.c_str() : nullptr; }

crm_status crm_register(crm_workspace* ws, const char* path, const char* kind, const char* id, char** out_json) {
    if (!ws || !path || !kind) return invalid("null argument");
    return guard([&] {
        const auto k = crm::bench::parse_kind(kind);
        if (!k) throw crm::RefusedError(std::string("unknown dataset kind '") + kind + "'");
        const auto e = ws->ws.register_dataset(path, *k, id ? std::optional<std::string>(id) : std::nullopt);
        if (out_json) *out_json = dup_string(entry_json(e).dump(2));
        return CRM_OK;
    });
}

crm_status crm_run(crm_workspace* ws, const char* dataset, const char* model, uint64_t seed, char** out_json) {
    if (!ws || !dataset || !model) return invalid("null argument");
    return guard([&] {
        const auto r = ws->ws.run(dataset, model, seed);
        if (out_json) *out_json = dup_string(run_json(r).dump(2));
        if (!r.verified) {
            g_last_error = "round trip failed: " + r.diagnostic;
            return CRM_ERR_VERIFICATION;
        }
        return CRM_OK;
    });
}

crm_status crm_leaderboard(crm_workspace* ws, const char* dataset, char** out_json) {
    if (!ws || !dataset || !out_json) return invalid("null argument");
    return guard([&] {
        json arr = json::array();
        for (const auto& r : ws->ws.leaderboard(dataset)) arr.push_back(run_json(r));
        *out_json = dup_string(arr.dump(2));
        return CRM_OK;
    });
}

crm_status crm_datasets(crm_workspace* ws, char** out_json) {
    if (!ws || !out_json) return invalid("null argument");
    return guard([&] {
        json arr = json::array();
        for (const auto& e : ws->ws.datasets()) arr.push_back(entry_json(e));
        *out_json = dup_string(arr.dump(2));
        return CRM_OK;
    });
}

crm_status crm_report(crm_workspace* ws, const char* format, int include_timing, char** out) {
    if (!ws || !format || !out) return invalid("null argument");
    const std::string f = format;
    if (f != "json" && f != "table") return invalid("format must be json or table");
    return guard([&] {
        *out = dup_string(f == "json" ? ws->ws.report_json(include_timing != 0)
                                      : ws->ws.report_table(include_timing != 0));
        return CRM_OK;
    });
}

crm_status crm_verify_container(crm_workspace* ws, const char* container_path, const char* dataset, char** out_json) {
    if (!ws || !container_path || !dataset) return invalid("null argument");
    return guard([&] {
        const auto v = ws->ws.verify_container(container_path, dataset);
        if (out_json) *out_json = dup_string(verification_json(v).dump(2));
        if (!v.ok) {
            g_last_error = "round trip failed: " + v.diagnostic;
            return CRM_ERR_VERIFICATION;
        }
        return CRM_OK;
    });
}

} // extern "C"
