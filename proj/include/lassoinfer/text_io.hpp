#pragma once

#include <cstdint>
#include <map>
#include <string>

#include <Eigen/Dense>

namespace lassoinfer {

// Matrix file: a header line "n p", then n rows of p whitespace-separated
// reals. Blank lines and lines starting with '#' are skipped. Parse errors
// carry the offending line number.
Eigen::MatrixXd read_matrix_file(const std::string& path);
void write_matrix_file(const std::string& path, const Eigen::MatrixXd& m);

// Vector file: one real per line, same comment/blank handling.
Eigen::VectorXd read_vector_file(const std::string& path);
void write_vector_file(const std::string& path, const Eigen::VectorXd& v);

// Key/value configuration with [section] headers and '#' comments.
class ConfigFile {
public:
    static ConfigFile parse_file(const std::string& path);
    static ConfigFile parse_string(const std::string& text, const std::string& origin = "");

    bool has(const std::string& section, const std::string& key) const;
    std::string get_str(const std::string& section, const std::string& key,
                        const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key,
                      double fallback) const;
    int get_int(const std::string& section, const std::string& key, int fallback) const;
    std::uint64_t get_u64(const std::string& section, const std::string& key,
                          std::uint64_t fallback) const;

    // Canonical "section.key = value" lines, sorted; input for the digest.
    std::string canonical_text() const;

private:
    std::map<std::string, std::map<std::string, std::string>> sections_;
};

// FNV-1a 64-bit hash in hex.
std::string digest_hex(const std::string& text);

// Output-file provenance header. Wall-clock timestamps deliberately stay out
// of result files so equal (config, seed) runs stay byte-identical; the CLI
// logs timing to stderr instead.
struct Manifest {
    std::string command;
    std::string config_digest;
    std::uint64_t seed = 0;
    std::string version;
};

std::string manifest_header(const Manifest& m);

// Fixed 6-significant-digit numeric formatting for tables.
std::string format_num(double v);

}  // namespace lassoinfer
