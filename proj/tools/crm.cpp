// crm: command-line front end over the C interface.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "crm/crm.h"
#include "json.hpp"

using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerification = 1;
constexpr int kExitUsage = 2;

int exit_code(crm_status s) {
    if (s == CRM_OK) return kExitOk;
    if (s == CRM_ERR_VERIFICATION) return kExitVerification;
    return kExitUsage;
}

int fail(crm_status s) {
    std::cerr << "crm: " << crm_status_name(s);
    if (*crm_last_error()) std::cerr << ": " << crm_last_error();
    std::cerr << '\n';
    return exit_code(s);
}

struct Owned {
    char* p = nullptr;
    ~Owned() { crm_string_free(p); }
    std::string str(std::size_t len) const { return p ? std::string(p, len) : std::string(); }
    std::string str() const { return p ? std::string(p) : std::string(); }
};

struct Workspace {
    crm_workspace* ws = nullptr;
    ~Workspace() { crm_workspace_close(ws); }
};

bool write_output(const std::string& path, const std::string& data) {
    if (path.empty() || path == "-") {
        std::fwrite(data.data(), 1, data.size(), stdout);
        return true;
    }
    std::ofstream out(path, std::ios::binary);
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) {
        std::cerr << "crm: cannot write " << path << '\n';
        return false;
    }
    return true;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// A class size given one of three ways.
struct ClassSize {
    std::optional<std::uint64_t> size;
    std::optional<double> ln_size, log2_size;

    void add_options(CLI::App* app) {
        auto* a = app->add_option("--class-size", size, "number of hypotheses |C|");
        auto* b = app->add_option("--ln-class-size", ln_size, "ln |C|");
        auto* c = app->add_option("--log2-class-size", log2_size, "log2 |C|");
        a->excludes(b)->excludes(c);
        b->excludes(c);
    }
    bool given() const { return size || ln_size || log2_size; }
    double ln() const {
        if (size) return std::log(static_cast<double>(*size));
        if (ln_size) return *ln_size;
        return *log2_size * std::log(2.0);
    }
};

struct Runner {
    int code = kExitOk;
    std::string home;
    bool json_out = false;

    crm_status open(Workspace& w) const { return crm_workspace_open(home.empty() ? nullptr : home.c_str(), &w.ws); }
};

void print_bound(const char* name, const crm_bound& b, bool as_json, const json& inputs) {
    if (as_json) {
        json j = {{"quantity", name}, {"value", b.value}, {"unit", b.unit}, {"inputs", inputs}};
        if (std::string(b.unit) == "nats") j["bits"] = b.value / std::log(2.0);
        if (std::string(b.unit) == "bits") j["nats"] = b.value * std::log(2.0);
        std::cout << j.dump(2) << '\n';
        return;
    }
    std::cout << name << " = " << fmt(b.value) << ' ' << b.unit;
    if (std::string(b.unit) == "nats") std::cout << " (" << fmt(b.value / std::log(2.0)) << " bits)";
    std::cout << '\n';
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Compression-rate benchmark: register datasets, score models by two-part codelength, "
                 "and work out generalization bounds."};
    app.set_version_flag("--version", std::string(crm_version()));
    app.require_subcommand(1);

    Runner r;
    app.add_option("--home", r.home, "workspace directory (default: $CRM_HOME, else .crm)");

    // register
    std::string reg_path, reg_kind, reg_id;
    auto* reg = app.add_subcommand("register", "register a dataset file");
    reg->add_option("path", reg_path, "dataset file")->required();
    reg->add_option("--kind", reg_kind, "text, integers, reals, image, frame-triple or bitstrings")
        ->required()
        ->check(CLI::IsMember({"text", "integers", "reals", "image", "frame-triple", "bitstrings"}));
    reg->add_option("--id", reg_id, "dataset id (default: file name without extension)");
    reg->add_flag("--json", r.json_out, "print the entry as JSON");
    reg->callback([&] {
        Workspace w;
        if (auto s = r.open(w); s != CRM_OK) return void(r.code = fail(s));
        Owned out;
        const auto s = crm_register(w.ws, reg_path.c_str(), reg_kind.c_str(), reg_id.empty() ? nullptr : reg_id.c_str(),
                                    &out.p);
        if (s != CRM_OK) return void(r.code = fail(s));
        if (r.json_out) {
            std::cout << out.str() << '\n';
        } else {
            const auto j = json::parse(out.str());
            std::cout << "registered " << j["id"].get<std::string>() << " (" << j["kind"].get<std::string>() << ", "
                      << j["bytes"] << " bytes, sha256 " << j["checksum"].get<std::string>() << ")\n";
        }
    });

    // run
    std::string run_dataset, run_model;
    std::uint64_t run_seed = 0;
    auto* run = app.add_subcommand("run", "encode, decode and verify a dataset under a model");
    run->add_option("--dataset", run_dataset, "dataset id")->required();
    run->add_option("--model", run_model, "model id (see `crm models`)")->required();
    run->add_option("--seed", run_seed, "seed recorded with the run");
    run->add_flag("--json", r.json_out, "print the report as JSON");
    run->callback([&] {
        Workspace w;
        if (auto s = r.open(w); s != CRM_OK) return void(r.code = fail(s));
        Owned out;
        const auto s = crm_run(w.ws, run_dataset.c_str(), run_model.c_str(), run_seed, &out.p);
        if (!out.p) return void(r.code = fail(s));
        if (r.json_out) {
            std::cout << out.str() << '\n';
        } else {
            const auto j = json::parse(out.str());
            std::cout << j["dataset"].get<std::string>() << " / " << j["model"].get<std::string>() << " (seed "
                      << j["seed"] << "): " << j["model_bits"] << " model + " << j["payload_bits"]
                      << " payload = " << j["total"] << " bits, "
                      << (j["verified"].get<bool>() ? "verified" : "NOT verified") << '\n';
            if (!j["verified"].get<bool>()) std::cout << "  " << j["diagnostic"].get<std::string>() << '\n';
        }
        r.code = exit_code(s);
        if (s != CRM_OK && s != CRM_ERR_VERIFICATION) fail(s);
    });

    // leaderboard
    std::string lb_dataset;
    auto* lb = app.add_subcommand("leaderboard", "verified runs of a dataset, champion first");
    lb->add_option("dataset", lb_dataset, "dataset id")->required();
    lb->add_flag("--json", r.json_out, "print JSON");
    lb->callback([&] {
        Workspace w;
        if (auto s = r.open(w); s != CRM_OK) return void(r.code = fail(s));
        Owned out;
        if (auto s = crm_leaderboard(w.ws, lb_dataset.c_str(), &out.p); s != CRM_OK) return void(r.code = fail(s));
        if (r.json_out) {
            std::cout << out.str() << '\n';
            return;
        }
        const auto board = json::parse(out.str());
        if (board.empty()) {
            std::cout << "no verified runs for " << lb_dataset << '\n';
            return;
        }
        std::printf("%4s  %-18s %6s %12s %14s %14s\n", "rank", "model", "seed", "model_bits", "payload_bits", "total");
        int rank = 1;
        for (const auto& e : board)
            std::printf("%4d  %-18s %6llu %12llu %14llu %14llu\n", rank++, e["model"].get<std::string>().c_str(),
                        static_cast<unsigned long long>(e["seed"].get<std::uint64_t>()),
                        static_cast<unsigned long long>(e["model_bits"].get<std::uint64_t>()),
                        static_cast<unsigned long long>(e["payload_bits"].get<std::uint64_t>()),
                        static_cast<unsigned long long>(e["total"].get<std::uint64_t>()));
    });

    // sample
    std::string sm_model, sm_output;
    std::uint64_t sm_count = 0, sm_seed = 0;
    auto* sm = app.add_subcommand("sample", "generate data by decoding seeded random bits");
    sm->add_option("--model", sm_model, "sampleable model id")->required();
    sm->add_option("--count", sm_count, "words, bits, bytes or integers to draw")->required();
    sm->add_option("--seed", sm_seed, "random seed")->required();
    sm->add_option("-o,--output", sm_output, "output file (default: standard output)");
    sm->callback([&] {
        Owned out;
        std::size_t len = 0;
        if (auto s = crm_sample(sm_model.c_str(), sm_count, sm_seed, &out.p, &len); s != CRM_OK)
            return void(r.code = fail(s));
        if (!write_output(sm_output, out.str(len))) r.code = kExitUsage;
    });

    // report
    std::string rp_format = "table";
    bool rp_no_timing = false;
    auto* rp = app.add_subcommand("report", "all runs and leaderboards");
    rp->add_option("--format", rp_format, "json or table")->check(CLI::IsMember({"json", "table"}));
    rp->add_flag("--no-timing", rp_no_timing, "leave out wall times so output is reproducible");
    rp->callback([&] {
        Workspace w;
        if (auto s = r.open(w); s != CRM_OK) return void(r.code = fail(s));
        Owned out;
        if (auto s = crm_report(w.ws, rp_format.c_str(), rp_no_timing ? 0 : 1, &out.p); s != CRM_OK)
            return void(r.code = fail(s));
        std::cout << out.str();
    });

    // verify
    std::string vf_container, vf_dataset;
    auto* vf = app.add_subcommand("verify", "decode a stored container and compare with a dataset");
    vf->add_option("container", vf_container, "container file")->required();
    vf->add_option("--dataset", vf_dataset, "dataset id")->required();
    vf->callback([&] {
        Workspace w;
        if (auto s = r.open(w); s != CRM_OK) return void(r.code = fail(s));
        Owned out;
        const auto s = crm_verify_container(w.ws, vf_container.c_str(), vf_dataset.c_str(), &out.p);
        if (!out.p) return void(r.code = fail(s));
        const auto j = json::parse(out.str());
        if (j["ok"].get<bool>())
            std::cout << "ok: " << j["byte_length"] << " bytes match\n";
        else
            std::cout << "FAILED: " << j["diagnostic"].get<std::string>() << '\n';
        r.code = exit_code(s);
    });

    // models
    auto* md = app.add_subcommand("models", "list the available models");
    md->add_flag("--json", r.json_out, "print JSON");
    md->callback([&] {
        Owned out;
        if (auto s = crm_list_models(&out.p); s != CRM_OK) return void(r.code = fail(s));
        if (r.json_out) {
            std::cout << out.str() << '\n';
            return;
        }
        for (const auto& m : json::parse(out.str())) {
            std::string kinds;
            for (const auto& k : m["kinds"]) kinds += (kinds.empty() ? "" : ",") + k.get<std::string>();
            std::printf("%-18s %-62s %s%s\n", m["id"].get<std::string>().c_str(),
                        m["description"].get<std::string>().c_str(), kinds.c_str(),
                        m["sampleable"].get<bool>() ? " [sample]" : "");
        }
    });

    // gen
    std::string gn_family, gn_output;
    std::vector<double> gn_params;
    std::uint64_t gn_n = 0, gn_seed = 0;
    auto* gn = app.add_subcommand("gen", "write a synthetic dataset");
    gn->add_option("--family", gn_family, "geometric, poisson, gaussian, laplace, normal or bernoulli")->required();
    gn->add_option("--param", gn_params, "family parameter (repeat in order)")->delimiter(',');
    gn->add_option("-n,--n", gn_n, "number of values")->required();
    gn->add_option("--seed", gn_seed, "random seed");
    gn->add_option("-o,--output", gn_output, "output file (default: standard output)");
    gn->callback([&] {
        Owned out;
        if (auto s = crm_generate(gn_family.c_str(), gn_params.data(), gn_params.size(), gn_n, gn_seed, &out.p);
            s != CRM_OK)
            return void(r.code = fail(s));
        if (!write_output(gn_output, out.str())) r.code = kExitUsage;
    });

    // bounds
    auto* bd = app.add_subcommand("bounds", "generalization bound calculators");
    bd->require_subcommand(1);
    bd->add_flag("--json", r.json_out, "print JSON");
    double b_eps = 0, b_delta = 0, b_n = 0, b_rate = 0, b_flat = 0, b_model = 0, b_payload = 0;
    std::uint64_t b_k = 0, b_e = 0, b_d = 0, b_trials = 10000, b_seed = 1, b_samples = 0;
    unsigned b_threads = 0;
    bool b_found = false;
    ClassSize cs;

    auto* bs = bd->add_subcommand("samples", "samples needed so no bad hypothesis survives");
    bs->add_option("--epsilon", b_eps, "error rate")->required();
    bs->add_option("--delta", b_delta, "failure probability")->required();
    cs.add_options(bs);
    bs->callback([&] {
        if (!cs.given()) throw CLI::RequiredError("a class size");
        crm_bound b;
        if (auto s = crm_bounds_required_samples(b_eps, b_delta, cs.ln(), &b); s != CRM_OK) return void(r.code = fail(s));
        print_bound("required_samples", b, r.json_out, {{"epsilon", b_eps}, {"delta", b_delta}, {"ln_class_size", cs.ln()}});
    });

    auto* bm = bd->add_subcommand("max-class", "largest ln|C| a sample supports");
    bm->add_option("--n", b_n, "sample size")->required();
    bm->add_option("--epsilon", b_eps, "error rate")->required();
    bm->add_option("--delta", b_delta, "failure probability")->required();
    bm->callback([&] {
        crm_bound b;
        if (auto s = crm_bounds_max_class_log_size(b_n, b_eps, b_delta, &b); s != CRM_OK) return void(r.code = fail(s));
        print_bound("max_class_log_size", b, r.json_out, {{"n", b_n}, {"epsilon", b_eps}, {"delta", b_delta}});
    });

    auto* br = bd->add_subcommand("rule-class", "ln size of a class of D rules over K keywords and E values");
    br->add_option("--k", b_k, "keywords")->required();
    br->add_option("--e", b_e, "values per rule")->required();
    br->add_option("--d", b_d, "rules")->required();
    br->callback([&] {
        crm_bound b;
        if (auto s = crm_bounds_rule_class_log_size(b_k, b_e, b_d, &b); s != CRM_OK) return void(r.code = fail(s));
        print_bound("rule_class_log_size", b, r.json_out, {{"k", b_k}, {"e", b_e}, {"d", b_d}});
    });

    auto* bw = bd->add_subcommand("worm", "probability some bad hypothesis fits every sample");
    cs.add_options(bw);
    bw->add_option("--epsilon", b_eps, "error rate")->required();
    bw->add_option("--n", b_samples, "sample size")->required();
    bw->callback([&] {
        if (!cs.given()) throw CLI::RequiredError("a class size");
        crm_bound b;
        if (auto s = crm_bounds_hidden_worm(cs.ln(), b_eps, b_samples, &b); s != CRM_OK) return void(r.code = fail(s));
        print_bound("hidden_worm_bound", b, r.json_out, {{"ln_class_size", cs.ln()}, {"epsilon", b_eps}, {"n", b_samples}});
    });

    std::uint64_t sim_size = 0;
    auto* bsim = bd->add_subcommand("simulate", "Monte Carlo check of the worm bound");
    bsim->add_option("--class-size", sim_size, "number of hypotheses")->required();
    bsim->add_option("--epsilon", b_eps, "error rate")->required();
    bsim->add_option("--n", b_samples, "sample size")->required();
    bsim->add_option("--trials", b_trials, "trials (default 10000)");
    bsim->add_option("--seed", b_seed, "random seed (default 1)");
    bsim->add_option("--threads", b_threads, "worker threads (default: all cores)");
    bsim->callback([&] {
        crm_worm_simulation sim;
        if (auto s = crm_bounds_simulate_hidden_worm(sim_size, b_eps, b_samples, b_trials, b_seed, b_threads, &sim);
            s != CRM_OK)
            return void(r.code = fail(s));
        if (r.json_out) {
            std::cout << json{{"trials", sim.trials},
                              {"worm_trials", sim.worm_trials},
                              {"frequency", sim.frequency},
                              {"analytic_bound", sim.analytic_bound},
                              {"sigma", sim.sigma}}
                             .dump(2)
                      << '\n';
        } else {
            std::cout << "worm in " << sim.worm_trials << " of " << sim.trials << " trials: frequency "
                      << fmt(sim.frequency) << ", bound " << fmt(sim.analytic_bound) << " (sigma " << fmt(sim.sigma)
                      << ")\n";
        }
    });

    auto* bc = bd->add_subcommand("compression-view", "bits to send N labels via a consistent hypothesis");
    cs.add_options(bc);
    bc->add_option("--n", b_samples, "labels")->required();
    bc->add_flag("--found", b_found, "a consistent hypothesis was found");
    bc->callback([&] {
        if (!cs.given()) throw CLI::RequiredError("a class size");
        crm_compression_view v;
        if (auto s = crm_bounds_compression_view(b_found ? 1 : 0, cs.ln(), b_samples, &v); s != CRM_OK)
            return void(r.code = fail(s));
        if (r.json_out)
            std::cout << json{{"bits", v.bits}, {"fallback_bits", v.fallback_bits}, {"saves", v.saves != 0}}.dump(2)
                      << '\n';
        else
            std::cout << "codelength = " << fmt(v.bits) << " bits (raw: " << fmt(v.fallback_bits) << " bits)"
                      << (v.saves ? ", saves" : "") << '\n';
    });

    auto* brisk = bd->add_subcommand("risk", "error bound from a compression rate");
    brisk->add_option("--rate", b_rate, "bits per sample")->required();
    brisk->add_option("--n", b_n, "sample size")->required();
    brisk->add_option("--delta", b_delta, "failure probability")->required();
    brisk->callback([&] {
        crm_bound b;
        if (auto s = crm_bounds_compression_risk(b_rate, b_n, b_delta, &b); s != CRM_OK) return void(r.code = fail(s));
        print_bound("compression_generalization_bound", b, r.json_out, {{"rate", b_rate}, {"n", b_n}, {"delta", b_delta}});
    });

    auto* bceil = bd->add_subcommand("ceiling", "largest model worth its bits");
    bceil->add_option("--n", b_n, "labels")->required();
    bceil->add_option("--flat-bits", b_flat, "payload bits without a model")->required();
    bceil->callback([&] {
        crm_bound b;
        if (auto s = crm_bounds_model_ceiling(b_n, b_flat, &b); s != CRM_OK) return void(r.code = fail(s));
        print_bound("model_complexity_ceiling", b, r.json_out, {{"n", b_n}, {"flat_bits", b_flat}});
    });

    auto* bsav = bd->add_subcommand("savings", "flat bits minus model and payload bits");
    bsav->add_option("--model-bits", b_model, "model bits")->required();
    bsav->add_option("--payload-bits", b_payload, "payload bits")->required();
    bsav->add_option("--flat-bits", b_flat, "flat encoding bits")->required();
    bsav->callback([&] {
        double v = 0;
        if (auto s = crm_bounds_two_part_savings(b_model, b_payload, b_flat, &v); s != CRM_OK) return void(r.code = fail(s));
        if (r.json_out)
            std::cout << json{{"quantity", "two_part_savings"}, {"value", v}, {"unit", "bits"}}.dump(2) << '\n';
        else
            std::cout << "two_part_savings = " << fmt(v) << " bits\n";
    });

    // info
    auto* in = app.add_subcommand("info", "information measures");
    in->require_subcommand(1);
    in->add_flag("--json", r.json_out, "print JSON");
    std::vector<double> in_p, in_q;
    std::vector<unsigned> in_lengths;
    std::string in_unit = "bits";
    double in_lambda = 0, in_guess = 0, in_header = 0, in_penalty = 0, in_prob = 0;
    auto add_dist = [&](CLI::App* sub, bool with_q) {
        sub->add_option("--p", in_p, "probabilities, comma separated")->required()->delimiter(',');
        if (with_q) sub->add_option("--q", in_q, "model probabilities, comma separated")->required()->delimiter(',');
        sub->add_option("--unit", in_unit, "bits or nats")->check(CLI::IsMember({"bits", "nats"}));
    };
    auto emit = [&](const char* name, double v, const std::string& unit) {
        if (r.json_out)
            std::cout << json{{"quantity", name}, {"value", v}, {"unit", unit}}.dump(2) << '\n';
        else
            std::cout << name << " = " << fmt(v) << ' ' << unit << '\n';
    };
    auto unit = [&] { return in_unit == "nats" ? CRM_UNIT_NATS : CRM_UNIT_BITS; };

    auto* ie = in->add_subcommand("entropy", "entropy of a distribution");
    add_dist(ie, false);
    ie->callback([&] {
        double v = 0;
        if (auto s = crm_entropy(in_p.data(), in_p.size(), unit(), &v); s != CRM_OK) return void(r.code = fail(s));
        emit("entropy", v, in_unit);
    });
    auto same_size = [&] {
        if (in_p.size() != in_q.size()) throw CLI::ValidationError("--p and --q need the same number of entries");
    };
    auto* ix = in->add_subcommand("cross-entropy", "expected codelength of p under q");
    add_dist(ix, true);
    ix->callback([&] {
        same_size();
        double v = 0;
        if (auto s = crm_cross_entropy(in_p.data(), in_q.data(), in_p.size(), unit(), &v); s != CRM_OK)
            return void(r.code = fail(s));
        emit("cross_entropy", v, in_unit);
    });
    auto* ik = in->add_subcommand("kl", "KL divergence of q from p");
    add_dist(ik, true);
    ik->callback([&] {
        same_size();
        double v = 0;
        if (auto s = crm_kl_divergence(in_p.data(), in_q.data(), in_p.size(), unit(), &v); s != CRM_OK)
            return void(r.code = fail(s));
        emit("kl_divergence", v, in_unit);
    });
    auto* ikr = in->add_subcommand("kraft", "Kraft sum of code lengths");
    ikr->add_option("--lengths", in_lengths, "code lengths, comma separated")->required()->delimiter(',');
    ikr->callback([&] {
        double v = 0;
        if (auto s = crm_kraft_sum(in_lengths.data(), in_lengths.size(), &v); s != CRM_OK) return void(r.code = fail(s));
        if (r.json_out)
            std::cout << json{{"quantity", "kraft_sum"}, {"value", v}, {"feasible", v <= 1.0}}.dump(2) << '\n';
        else
            std::cout << "kraft_sum = " << fmt(v) << (v <= 1.0 ? " (feasible)" : " (no prefix code)") << '\n';
    });
    auto* ish = in->add_subcommand("shannon", "optimal codelength of an outcome");
    ish->add_option("--p", in_prob, "probability")->required();
    ish->callback([&] {
        double v = 0;
        if (auto s = crm_shannon_codelength(in_prob, &v); s != CRM_OK) return void(r.code = fail(s));
        emit("shannon_codelength", v, "bits");
    });
    auto* ig = in->add_subcommand("geometric", "entropy of a geometric source; with --guess, the cost of a wrong rate");
    ig->add_option("--lambda", in_lambda, "true rate")->required();
    ig->add_option("--guess", in_guess, "rate assumed by the coder");
    ig->callback([&] {
        double hn = 0, hb = 0;
        if (auto s = crm_geometric_entropy(in_lambda, &hn, &hb); s != CRM_OK) return void(r.code = fail(s));
        json j = {{"lambda", in_lambda}, {"entropy", {{"nats", hn}, {"bits", hb}}}};
        if (ig->count("--guess")) {
            double xn = 0, xb = 0, kn = 0, kb = 0;
            if (auto s = crm_geometric_cross_entropy(in_lambda, in_guess, &xn, &xb); s != CRM_OK)
                return void(r.code = fail(s));
            if (auto s = crm_geometric_kl(in_lambda, in_guess, &kn, &kb); s != CRM_OK) return void(r.code = fail(s));
            j["guess"] = in_guess;
            j["cross_entropy"] = {{"nats", xn}, {"bits", xb}};
            j["kl"] = {{"nats", kn}, {"bits", kb}};
        }
        if (r.json_out) {
            std::cout << j.dump(2) << '\n';
            return;
        }
        std::cout << "entropy = " << fmt(hn) << " nats = " << fmt(hb) << " bits\n";
        if (j.contains("kl")) {
            std::cout << "cross_entropy = " << fmt(j["cross_entropy"]["nats"]) << " nats = "
                      << fmt(j["cross_entropy"]["bits"]) << " bits\n";
            std::cout << "kl = " << fmt(j["kl"]["nats"]) << " nats = " << fmt(j["kl"]["bits"]) << " bits\n";
        }
    });
    auto* ic = in->add_subcommand("crossover", "sample size past which a header pays for itself");
    ic->add_option("--header-bits", in_header, "header cost")->required();
    ic->add_option("--penalty", in_penalty, "per-sample saving, same unit")->required();
    ic->callback([&] {
        std::uint64_t v = 0;
        if (auto s = crm_crossover_n(in_header, in_penalty, &v); s != CRM_OK) return void(r.code = fail(s));
        if (r.json_out)
            std::cout << json{{"quantity", "crossover_n"}, {"value", v}}.dump(2) << '\n';
        else
            std::cout << "crossover_n = " << v << '\n';
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }
    std::cout.flush();
    return r.code;
}
