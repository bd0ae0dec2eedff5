#include "signet/records.hpp"

#include <fstream>
#include <ostream>

#include "signet/error.hpp"
#include "signet/text.hpp"

namespace signet::records {

bool is_header(const nlohmann::json& record) {
    return record.is_object() && record.contains(kHeaderKey);
}

std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path,
                                       const std::function<void(std::size_t, const std::string&)>& on_error) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::ConfigError, "cannot open " + path.string());
    std::vector<nlohmann::json> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (text::trim(line).empty()) continue;
        auto j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded()) {
            const std::string msg = path.string() + ":" + std::to_string(lineno) + ": invalid JSON";
            if (!on_error) throw Error(Errc::DecodeError, msg);
            on_error(lineno, msg);
            continue;
        }
        if (is_header(j)) continue;
        out.push_back(std::move(j));
    }
    return out;
}

void write_jsonl_line(std::ostream& out, const nlohmann::json& record) {
    out << record.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
}

nlohmann::json make_header(const std::string& subcommand, const nlohmann::json& config, std::uint64_t seed,
                           const std::vector<std::filesystem::path>& inputs) {
    nlohmann::json digests = nlohmann::json::object();
    for (const auto& p : inputs) digests[p.filename().string()] = text::file_sha256_hex(p);
    return nlohmann::json{{kHeaderKey,
                           {{"tool", "signet"},
                            {"subcommand", subcommand},
                            {"config", config},
                            {"seed", seed},
                            {"inputs", digests}}}};
}

}  // namespace signet::records
