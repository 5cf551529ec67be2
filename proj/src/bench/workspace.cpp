#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "crm/bench.hpp"
#include "crm/error.hpp"
#include "json.hpp"

namespace crm::bench {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using Bytes = std::vector<std::uint8_t>;

Bytes read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("cannot read " + path.string());
    return data;
}

void write_file_atomic(const fs::path& path, std::span<const std::uint8_t> data) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
        if (!out) throw IoError("cannot write " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw IoError("cannot replace " + path.string() + ": " + ec.message());
}

std::string hex_digest(std::span<const std::uint8_t> data) {
    const auto d = models::sha256(data);
    return models::to_hex(d);
}

bool valid_id(const std::string& id) {
    if (id.empty() || id.size() > 128 || id[0] == '.') return false;
    return std::all_of(id.begin(), id.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' ||
               c == '_' || c == '.';
    });
}

class RegistryLock {
public:
    explicit RegistryLock(const fs::path& home) {
        std::error_code ec;
        fs::create_directories(home, ec);
        if (ec) throw IoError("cannot create " + home.string() + ": " + ec.message());
        fd_ = ::open((home / "registry.lock").c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
        if (fd_ < 0) throw IoError("cannot open lock in " + home.string());
        ::flock(fd_, LOCK_EX);
    }
    ~RegistryLock() {
        ::flock(fd_, LOCK_UN);
        ::close(fd_);
    }
    RegistryLock(const RegistryLock&) = delete;
    RegistryLock& operator=(const RegistryLock&) = delete;

private:
    int fd_ = -1;
};

json default_registry() {
    json j;
    j["version"] = kRegistryVersion;
    json bits = json::object();
    for (const auto& c : codecs()) bits[c.id] = c.default_program_bits;
    j["program_bits"] = bits;
    j["datasets"] = json::object();
    j["runs"] = json::array();
    return j;
}

fs::path registry_path(const fs::path& home) { return home / "registry.json"; }

json load_registry(const fs::path& home) {
    const auto path = registry_path(home);
    if (!fs::exists(path)) return default_registry();
    const auto bytes = read_file(path);
    json j;
    try {
        j = json::parse(bytes.begin(), bytes.end());
    } catch (const json::parse_error& e) {
        throw ParseError("registry " + path.string() + " is not valid JSON", e.byte);
    }
    if (!j.is_object() || j.value("version", 0) != kRegistryVersion)
        throw RefusedError("registry " + path.string() + " has an unsupported version");
    if (!j.contains("program_bits")) j["program_bits"] = json::object();
    if (!j.contains("datasets")) j["datasets"] = json::object();
    if (!j.contains("runs")) j["runs"] = json::array();
    return j;
}

void save_registry(const fs::path& home, const json& j) {
    const auto text = j.dump(2) + "\n";
    write_file_atomic(registry_path(home), std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

json entry_json(const DatasetEntry& e) {
    return {{"id", e.id}, {"path", e.path}, {"checksum", e.checksum}, {"kind", kind_name(e.kind)}, {"bytes", e.bytes}};
}

DatasetEntry entry_from(const std::string& id, const json& j) {
    DatasetEntry e;
    e.id = id;
    e.path = j.at("path").get<std::string>();
    e.checksum = j.at("checksum").get<std::string>();
    const auto kind = parse_kind(j.at("kind").get<std::string>());
    if (!kind) throw ParseError("registry names an unknown dataset kind", 0);
    e.kind = *kind;
    e.bytes = j.at("bytes").get<std::uint64_t>();
    return e;
}

json run_json(const RunReport& r, bool include_timing) {
    json j = {{"dataset", r.dataset},
              {"model", r.model},
              {"seed", r.seed},
              {"model_bits", r.score.model_bits},
              {"payload_bits", r.score.payload_bits},
              {"total", r.score.total},
              {"verified", r.verified},
              {"tool_version", r.tool_version},
              {"container", r.container},
              {"container_sha256", r.container_sha256},
              {"original_bytes", r.original_bytes},
              {"diagnostic", r.diagnostic}};
    if (include_timing) j["wall_time"] = r.wall_time;
    return j;
}

RunReport run_from(const json& j) {
    RunReport r;
    r.dataset = j.at("dataset").get<std::string>();
    r.model = j.at("model").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.score = {j.at("model_bits").get<std::uint64_t>(), j.at("payload_bits").get<std::uint64_t>(),
               j.at("total").get<std::uint64_t>()};
    r.verified = j.at("verified").get<bool>();
    r.wall_time = j.value("wall_time", 0.0);
    r.tool_version = j.value("tool_version", std::string(kToolVersion));
    r.container = j.value("container", std::string());
    r.container_sha256 = j.value("container_sha256", std::string());
    r.original_bytes = j.value("original_bytes", std::uint64_t{0});
    r.diagnostic = j.value("diagnostic", std::string());
    return r;
}

std::vector<RunReport> ranked(const std::vector<RunReport>& runs, const std::string& dataset) {
    std::vector<RunReport> board;
    for (const auto& r : runs)
        if (r.dataset == dataset && r.verified) board.push_back(r);
    std::stable_sort(board.begin(), board.end(), [](const RunReport& a, const RunReport& b) {
        return models::compare_champion(b.score, a.score) == models::Champion::Challenger;
    });
    return board;
}

DatasetEntry find_entry(const json& reg, const std::string& id) {
    const auto& ds = reg.at("datasets");
    if (!ds.contains(id)) throw NotFoundError("dataset '" + id + "' is not registered");
    return entry_from(id, ds.at(id));
}

Bytes current_content(const DatasetEntry& e) {
    auto data = read_file(e.path);
    const auto now = hex_digest(data);
    if (now != e.checksum)
        throw RefusedError("dataset '" + e.id + "' changed since registration: registered " + e.checksum +
                           ", file now " + now);
    return data;
}

} // namespace

Workspace::Workspace(fs::path home) : home_(std::move(home)) {}

fs::path Workspace::default_home() {
    if (const char* env = std::getenv("CRM_HOME"); env && *env) return env;
    return ".crm";
}

DatasetEntry Workspace::register_dataset(const fs::path& path, DatasetKind kind, std::optional<std::string> id) {
    const auto data = read_file(path);
    validate_dataset(kind, data);

    DatasetEntry entry;
    entry.id = id ? *id : path.stem().string();
    if (!valid_id(entry.id))
        throw RefusedError("dataset id '" + entry.id + "' must use letters, digits, '.', '-' or '_'");
    entry.path = fs::absolute(path).lexically_normal().string();
    entry.checksum = hex_digest(data);
    entry.kind = kind;
    entry.bytes = data.size();

    RegistryLock lock(home_);
    json reg = load_registry(home_);
    auto& datasets = reg["datasets"];
    if (datasets.contains(entry.id)) {
        const auto existing = entry_from(entry.id, datasets.at(entry.id));
        if (existing.checksum != entry.checksum)
            throw RefusedError("dataset '" + entry.id + "' is registered with checksum " + existing.checksum +
                               "; this file has " + entry.checksum);
        if (existing.kind != kind)
            throw RefusedError("dataset '" + entry.id + "' is registered as " + kind_name(existing.kind));
        return existing;
    }
    for (const auto& [other_id, other] : datasets.items()) {
        if (other.at("checksum") == entry.checksum && other.at("kind") != kind_name(kind))
            throw RefusedError("identical content is registered as '" + other_id + "' with kind " +
                               other.at("kind").get<std::string>());
    }
    datasets[entry.id] = entry_json(entry);
    datasets[entry.id].erase("id");
    save_registry(home_, reg);
    return entry;
}

RunReport Workspace::run(const std::string& dataset_id, const std::string& model_id, std::uint64_t seed,
                         const RunOptions& options) {
    const Codec& codec = find_codec(model_id);
    json reg = load_registry(home_);
    const auto entry = find_entry(reg, dataset_id);
    if (!codec.supports(entry.kind))
        throw RefusedError("model '" + model_id + "' does not accept " + kind_name(entry.kind) + " datasets");
    const auto data = current_content(entry);

    RunReport report;
    report.dataset = dataset_id;
    report.model = model_id;
    report.seed = seed;
    report.original_bytes = data.size();

    const auto start = std::chrono::steady_clock::now();
    const auto container = codec.encode(data);
    const auto serialized = container.serialize();

    const fs::path rel = fs::path("containers") / (dataset_id + "__" + model_id + "__" + std::to_string(seed) + ".crm");
    {
        std::error_code ec;
        fs::create_directories(home_ / "containers", ec);
        if (ec) throw IoError("cannot create " + (home_ / "containers").string());
    }
    write_file_atomic(home_ / rel, serialized);
    report.container = rel.generic_string();

    const auto stored = read_file(home_ / rel);
    report.container_sha256 = hex_digest(stored);
    models::EncodedContainer reread;
    models::VerificationReport verification;
    try {
        reread = models::EncodedContainer::parse(stored);
        if (options.tamper) options.tamper(reread);
        verification = models::verify_roundtrip(data, reread, [&codec](const models::EncodedContainer& c) {
            try {
                return codec.decode(c);
            } catch (const Error&) {
                throw;
            } catch (const std::exception& e) {
                throw ParseError(e.what(), 0);
            }
        });
    } catch (const Error& e) {
        verification.ok = false;
        verification.diagnostic = std::string("container unreadable: ") + e.what();
    }
    report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    report.score = models::score_two_part(8 * container.model_header.size() + program_bits_constant(model_id),
                                          container.payload.size());
    report.verified = verification.ok;
    if (!verification.ok) {
        report.diagnostic = verification.diagnostic;
        if (verification.first_mismatch_offset)
            report.diagnostic += "; first mismatch at byte " + std::to_string(*verification.first_mismatch_offset);
    }

    RegistryLock lock(home_);
    reg = load_registry(home_);
    auto& runs = reg["runs"];
    const json j = run_json(report, true);
    bool replaced = false;
    for (auto& r : runs) {
        if (r.at("dataset") == dataset_id && r.at("model") == model_id && r.at("seed") == seed) {
            r = j;
            replaced = true;
            break;
        }
    }
    if (!replaced) runs.push_back(j);
    save_registry(home_, reg);
    return report;
}

std::vector<RunReport> Workspace::leaderboard(const std::string& dataset_id) const {
    const json reg = load_registry(home_);
    find_entry(reg, dataset_id);
    return ranked(runs(), dataset_id);
}

std::vector<DatasetEntry> Workspace::datasets() const {
    const json reg = load_registry(home_);
    std::vector<DatasetEntry> out;
    for (const auto& [id, j] : reg.at("datasets").items()) out.push_back(entry_from(id, j));
    return out;
}

std::vector<RunReport> Workspace::runs() const {
    const json reg = load_registry(home_);
    std::vector<RunReport> out;
    for (const auto& j : reg.at("runs")) out.push_back(run_from(j));
    return out;
}

std::uint64_t Workspace::program_bits_constant(const std::string& model_id) const {
    const json reg = load_registry(home_);
    const auto& bits = reg.at("program_bits");
    if (bits.contains(model_id)) return bits.at(model_id).get<std::uint64_t>();
    return find_codec(model_id).default_program_bits;
}

std::string Workspace::report_json(bool include_timing) const {
    const auto all_datasets = datasets();
    const auto all_runs = runs();
    json j;
    j["tool_version"] = kToolVersion;
    j["datasets"] = json::array();
    for (const auto& d : all_datasets) j["datasets"].push_back(entry_json(d));
    j["runs"] = json::array();
    for (const auto& r : all_runs) j["runs"].push_back(run_json(r, include_timing));
    j["leaderboards"] = json::object();
    for (const auto& d : all_datasets) {
        json board = json::array();
        for (const auto& r : ranked(all_runs, d.id))
            board.push_back({{"model", r.model}, {"seed", r.seed}, {"model_bits", r.score.model_bits},
                             {"payload_bits", r.score.payload_bits}, {"total", r.score.total}});
        j["leaderboards"][d.id] = board;
    }
    return j.dump(2) + "\n";
}

std::string Workspace::report_table(bool include_timing) const {
    const auto all_runs = runs();
    std::ostringstream out;
    char line[512];
    std::snprintf(line, sizeof line, "%-20s %-18s %6s %12s %14s %14s %-8s", "dataset", "model", "seed", "model_bits",
                  "payload_bits", "total", "verified");
    out << line;
    if (include_timing) out << "  wall_time";
    out << '\n';
    if (all_runs.empty()) out << "(no runs)\n";
    for (const auto& r : all_runs) {
        std::snprintf(line, sizeof line, "%-20s %-18s %6llu %12llu %14llu %14llu %-8s", r.dataset.c_str(),
                      r.model.c_str(), static_cast<unsigned long long>(r.seed),
                      static_cast<unsigned long long>(r.score.model_bits),
                      static_cast<unsigned long long>(r.score.payload_bits),
                      static_cast<unsigned long long>(r.score.total), r.verified ? "yes" : "NO");
        out << line;
        if (include_timing) {
            std::snprintf(line, sizeof line, "  %.3fs", r.wall_time);
            out << line;
        }
        out << '\n';
    }
    return out.str();
}

models::VerificationReport Workspace::verify_container(const fs::path& container,
                                                       const std::string& dataset_id) const {
    const json reg = load_registry(home_);
    const auto entry = find_entry(reg, dataset_id);
    const auto data = current_content(entry);
    const auto bytes = read_file(container);
    models::VerificationReport report;
    try {
        const auto c = models::EncodedContainer::parse(bytes);
        const Codec& codec = find_codec(c.model_id);
        return models::verify_roundtrip(data, c, [&codec](const models::EncodedContainer& k) {
            try {
                return codec.decode(k);
            } catch (const Error&) {
                throw;
            } catch (const std::exception& e) {
                throw ParseError(e.what(), 0);
            }
        });
    } catch (const Error& e) {
        report.diagnostic = std::string("container unreadable: ") + e.what();
    }
    return report;
}

} // namespace crm::bench
