#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace spmc::harness {

inline constexpr const char* version_string = "spmc-sim 0.1.0";

/// One experiment's output table: named columns, numeric rows, and `#`
/// metadata lines (config hash, seed, version, per-run summaries). Rendering
/// is fully deterministic; numbers carry 17 significant digits so CSV files
/// reproduce bit-exactly.
struct SweepResult {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::pair<std::string, std::string>> metadata;

    void add_meta(std::string key, std::string value) {
        metadata.emplace_back(std::move(key), std::move(value));
    }
};

inline std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string to_csv(const SweepResult& r) {
    std::string out;
    out += std::string("# ") + version_string + "\n";
    for (const auto& [k, v] : r.metadata) {
        out += "# " + k + ": " + v + "\n";
    }
    for (std::size_t c = 0; c < r.columns.size(); ++c) {
        out += r.columns[c];
        out += (c + 1 < r.columns.size()) ? "," : "\n";
    }
    for (const auto& row : r.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            out += format_number(row[c]);
            out += (c + 1 < row.size()) ? "," : "\n";
        }
    }
    return out;
}

inline void write_csv(const std::string& path, const SweepResult& r) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
    out << to_csv(r);
}

/// FNV-1a over a byte string; used to fingerprint configurations.
inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "0x%016llx", static_cast<unsigned long long>(v));
    return buf;
}

} // namespace spmc::harness
