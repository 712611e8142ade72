#include "treedyn/report.hpp"

#include <charconv>
#include <fstream>

#include <json.hpp>

#include "treedyn/errors.hpp"

namespace treedyn::report {

std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

Csv::Csv(std::vector<std::string> columns) : columns_(columns.size()) {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) body_.push_back(',');
        body_ += columns[i];
    }
    body_.push_back('\n');
}

void Csv::add_row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_)
        throw contract_violation("Csv: row width does not match the header");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) body_.push_back(',');
        body_ += cells[i];
    }
    body_.push_back('\n');
}

std::string metadata_json(const std::map<std::string, std::string>& config,
                          std::uint64_t seed, int workers) {
    nlohmann::ordered_json j;
    j["tool"] = "treedyn";
    j["version"] = std::string(kToolVersion);
    j["seed"] = seed;
    j["workers"] = workers;
    nlohmann::ordered_json cfg;
    for (const auto& [k, v] : config) cfg[k] = v;
    j["config"] = cfg;
    return j.dump(2) + "\n";
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw config_error("cannot open output file: " + path);
    os << content;
}

} // namespace treedyn::report
