#pragma once
// Flat-file emission: trajectory time series, field snapshots and residual
// reports as CSV, all with fixed %.17g formatting so identical runs produce
// byte-identical artifacts. Files are written to a temporary name in the
// target directory and renamed into place.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "flowlab/core/errors.hpp"

namespace flowlab {

inline std::string format_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Write content atomically (temp file + rename). Throws IoError.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (!path.parent_path().empty()) {
        fs::create_directories(path.parent_path(), ec);
        if (ec) throw IoError("cannot create directory " + path.parent_path().string());
    }
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out << content;
        if (!out) throw IoError("short write to " + tmp.string());
    }
    fs::rename(tmp, path, ec);
    if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string());
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    std::string to_string() const {
        std::string out;
        for (size_t c = 0; c < header.size(); ++c) {
            out += header[c];
            out += (c + 1 < header.size()) ? ',' : '\n';
        }
        for (const auto& row : rows) {
            for (size_t c = 0; c < row.size(); ++c) {
                out += format_num(row[c]);
                out += (c + 1 < row.size()) ? ',' : '\n';
            }
        }
        return out;
    }
};

inline void write_csv(const std::filesystem::path& path, const CsvTable& table) {
    write_file_atomic(path, table.to_string());
}

} // namespace flowlab
