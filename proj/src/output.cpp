#include "cespin/output.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cespin/errors.hpp"

namespace cespin {

void write_csv(const std::string& path, const std::vector<CsvColumn>& columns) {
    if (columns.empty()) throw ConfigError("write_csv: no columns");
    std::size_t rows = columns.front().values.size();
    for (const auto& c : columns)
        if (c.values.size() != rows)
            throw ConfigError("write_csv: ragged columns");

    if (rows == 0)
        std::fprintf(stderr, "warning: writing header-only table to %s\n",
                     path.c_str());

    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << "# columns: ";
    for (std::size_t j = 0; j < columns.size(); ++j) {
        if (j) out << ", ";
        out << columns[j].name;
    }
    out << "\n";
    char buf[40];
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < columns.size(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", columns[j].values[i]);
            if (j) out << ",";
            out << buf;
        }
        out << "\n";
    }
    if (!out) throw IoError("write failed for '" + path + "'");
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    CsvTable table;
    std::string line;
    bool header_done = false;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.front() == '#') {
            const std::string tag = "# columns:";
            if (!header_done && line.compare(0, tag.size(), tag) == 0) {
                std::stringstream ss(line.substr(tag.size()));
                std::string name;
                while (std::getline(ss, name, ',')) {
                    std::size_t a = name.find_first_not_of(" \t");
                    std::size_t b = name.find_last_not_of(" \t");
                    if (a != std::string::npos)
                        table.column_names.push_back(name.substr(a, b - a + 1));
                }
                table.columns.resize(table.column_names.size());
                header_done = true;
            }
            continue;
        }
        std::stringstream ss(line);
        std::string cell;
        std::size_t col = 0;
        while (std::getline(ss, cell, ',')) {
            if (col >= table.columns.size()) {
                if (!header_done) table.columns.resize(col + 1);
                else throw IoError(path + ":" + std::to_string(lineno) +
                                   ": more cells than header columns");
            }
            std::size_t pos = 0;
            double v;
            try {
                v = std::stod(cell, &pos);
            } catch (const std::exception&) {
                throw IoError(path + ":" + std::to_string(lineno) +
                              ": cannot parse '" + cell + "'");
            }
            table.columns[col].push_back(v);
            ++col;
        }
        if (header_done && col != table.column_names.size())
            throw IoError(path + ":" + std::to_string(lineno) +
                          ": expected " + std::to_string(table.column_names.size()) +
                          " cells, got " + std::to_string(col));
    }
    if (table.column_names.empty() && !table.columns.empty())
        for (std::size_t j = 0; j < table.columns.size(); ++j)
            table.column_names.push_back("col" + std::to_string(j));
    return table;
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::uint64_t fnv1a64_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for hashing");
    std::stringstream ss;
    ss << in.rdbuf();
    return fnv1a64(ss.str());
}

namespace {

std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

} // namespace

void RunManifest::write(const std::string& path) const {
    nlohmann::ordered_json j;
    j["tool_version"] = tool_version;
    j["timestamp"] = timestamp;
    j["config_hash"] = hex64(config_hash);
    j["conventions"] = "README.md#conventions";
    j["units"] = {{"time", "us"}, {"frequency", "MHz"}, {"field", "mT"},
                  {"length", "nm"}};
    auto& outs = j["outputs"];
    outs = nlohmann::ordered_json::array();
    for (const auto& e : outputs)
        outs.push_back({{"path", e.path},
                        {"fnv1a64", hex64(e.checksum)},
                        {"rows", e.rows}});
    for (const auto& [k, v] : extra) j["results"][k] = v;

    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << j.dump(2) << "\n";
    if (!out) throw IoError("write failed for '" + path + "'");
}

std::string tool_version() { return "cespin 1.0.0"; }

} // namespace cespin
