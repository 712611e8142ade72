#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace treedyn::report {

inline constexpr std::string_view kToolVersion = "0.1.0";

/// Shortest round-trip decimal representation (bit-exact reports).
std::string format_double(double v);

/// Minimal CSV builder: fixed column order, LF line endings.
class Csv {
public:
    explicit Csv(std::vector<std::string> columns);
    void add_row(const std::vector<std::string>& cells);
    const std::string& str() const { return body_; }

private:
    std::size_t columns_;
    std::string body_;
};

/// Deterministic JSON metadata block shared by all reports: tool version,
/// resolved configuration, seed, and guard settings. Wall-clock time is
/// reported on stdout only, so report files stay byte-identical across runs.
std::string metadata_json(const std::map<std::string, std::string>& config,
                          std::uint64_t seed, int workers);

void write_file(const std::string& path, const std::string& content);

} // namespace treedyn::report
