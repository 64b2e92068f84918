#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cespin {

// CSV with a '# columns: name(unit), ...' header and 17-significant-digit
// values (round-trips doubles exactly).
struct CsvColumn {
    std::string name;            // e.g. "time(us)"
    std::vector<double> values;
};

void write_csv(const std::string& path, const std::vector<CsvColumn>& columns);

struct CsvTable {
    std::vector<std::string> column_names;
    std::vector<std::vector<double>> columns;
};
CsvTable read_csv(const std::string& path);

std::uint64_t fnv1a64(const std::string& bytes);
std::uint64_t fnv1a64_file(const std::string& path);

// JSON run manifest: tool version, config hash, per-output checksums, and a
// conventions note.  The timestamp is excluded from all hashes.
struct ManifestEntry {
    std::string path;
    std::uint64_t checksum;
    std::size_t rows;
};

struct RunManifest {
    std::string tool_version;
    std::string timestamp;       // informational only, never hashed
    std::uint64_t config_hash = 0;
    std::vector<ManifestEntry> outputs;
    std::vector<std::pair<std::string, std::string>> extra; // fitted numbers etc.

    void write(const std::string& path) const;
};

std::string tool_version();

} // namespace cespin
