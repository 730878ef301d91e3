#include "lassoinfer/text_io.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "lassoinfer/errors.hpp"

namespace lassoinfer {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

bool skippable(const std::string& line) {
    const std::string t = trim(line);
    return t.empty() || t[0] == '#';
}

[[noreturn]] void parse_fail(const std::string& path, int line_no, const std::string& what) {
    throw InputError(path + ":" + std::to_string(line_no) + ": " + what);
}

double parse_real(const std::string& token, const std::string& path, int line_no) {
    try {
        std::size_t used = 0;
        const double v = std::stod(token, &used);
        if (used != token.size()) parse_fail(path, line_no, "trailing characters in '" + token + "'");
        return v;
    } catch (const InputError&) {
        throw;
    } catch (const std::exception&) {
        parse_fail(path, line_no, "expected a number, found '" + token + "'");
    }
}

std::ifstream open_or_fail(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError(path + ": cannot open for reading");
    return in;
}

}  // namespace

Eigen::MatrixXd read_matrix_file(const std::string& path) {
    std::ifstream in = open_or_fail(path);
    std::string line;
    int line_no = 0;

    long n = -1;
    long p = -1;
    while (std::getline(in, line)) {
        ++line_no;
        if (skippable(line)) continue;
        std::istringstream hs(line);
        if (!(hs >> n >> p) || n < 1 || p < 0) {
            parse_fail(path, line_no, "expected header 'n p' with n >= 1, p >= 0");
        }
        std::string extra;
        if (hs >> extra) parse_fail(path, line_no, "trailing characters after header");
        break;
    }
    if (n < 0) parse_fail(path, line_no, "missing 'n p' header");

    Eigen::MatrixXd m(n, p);
    long row = 0;
    while (row < n && std::getline(in, line)) {
        ++line_no;
        if (skippable(line)) continue;
        std::istringstream ls(line);
        std::string token;
        for (long j = 0; j < p; ++j) {
            if (!(ls >> token)) {
                parse_fail(path, line_no, "row has fewer than " + std::to_string(p) + " values");
            }
            m(row, j) = parse_real(token, path, line_no);
        }
        if (ls >> token) parse_fail(path, line_no, "row has more than " + std::to_string(p) + " values");
        ++row;
    }
    if (row < n) {
        parse_fail(path, line_no, "expected " + std::to_string(n) + " data rows, found " +
                                      std::to_string(row));
    }
    return m;
}

void write_matrix_file(const std::string& path, const Eigen::MatrixXd& m) {
    std::ofstream out(path);
    if (!out) throw InputError(path + ": cannot open for writing");
    out << m.rows() << " " << m.cols() << "\n";
    out.precision(17);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out << " ";
            out << m(i, j);
        }
        out << "\n";
    }
}

Eigen::VectorXd read_vector_file(const std::string& path) {
    std::ifstream in = open_or_fail(path);
    std::string line;
    int line_no = 0;
    std::vector<double> vals;
    while (std::getline(in, line)) {
        ++line_no;
        if (skippable(line)) continue;
        const std::string t = trim(line);
        std::istringstream ls(t);
        std::string token;
        ls >> token;
        std::string extra;
        if (ls >> extra) parse_fail(path, line_no, "expected one value per line");
        vals.push_back(parse_real(token, path, line_no));
    }
    Eigen::VectorXd v(static_cast<Eigen::Index>(vals.size()));
    for (std::size_t i = 0; i < vals.size(); ++i) v[static_cast<Eigen::Index>(i)] = vals[i];
    return v;
}

void write_vector_file(const std::string& path, const Eigen::VectorXd& v) {
    std::ofstream out(path);
    if (!out) throw InputError(path + ": cannot open for writing");
    out.precision(17);
    for (Eigen::Index i = 0; i < v.size(); ++i) out << v[i] << "\n";
}

ConfigFile ConfigFile::parse_file(const std::string& path) {
    std::ifstream in = open_or_fail(path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str(), path);
}

ConfigFile ConfigFile::parse_string(const std::string& text, const std::string& origin) {
    const std::string where = origin.empty() ? "<config>" : origin;
    ConfigFile cfg;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    std::string section;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (t.front() == '[') {
            if (t.back() != ']' || t.size() < 3) {
                throw ConfigError(where + ":" + std::to_string(line_no) +
                                  ": malformed section header");
            }
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(where + ":" + std::to_string(line_no) +
                              ": expected 'key = value'");
        }
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError(where + ":" + std::to_string(line_no) + ": empty key");
        }
        cfg.sections_[section][key] = value;
    }
    return cfg;
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    return s != sections_.end() && s->second.count(key) > 0;
}

std::string ConfigFile::get_str(const std::string& section, const std::string& key,
                                const std::string& fallback) const {
    const auto s = sections_.find(section);
    if (s == sections_.end()) return fallback;
    const auto k = s->second.find(key);
    return k == s->second.end() ? fallback : k->second;
}

double ConfigFile::get_double(const std::string& section, const std::string& key,
                              double fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = get_str(section, key, "");
    try {
        return std::stod(v);
    } catch (const std::exception&) {
        throw ConfigError("config key " + section + "." + key + ": '" + v +
                          "' is not a number");
    }
}

int ConfigFile::get_int(const std::string& section, const std::string& key,
                        int fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = get_str(section, key, "");
    try {
        return std::stoi(v);
    } catch (const std::exception&) {
        throw ConfigError("config key " + section + "." + key + ": '" + v +
                          "' is not an integer");
    }
}

std::uint64_t ConfigFile::get_u64(const std::string& section, const std::string& key,
                                  std::uint64_t fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = get_str(section, key, "");
    try {
        return std::stoull(v);
    } catch (const std::exception&) {
        throw ConfigError("config key " + section + "." + key + ": '" + v +
                          "' is not an unsigned integer");
    }
}

std::string ConfigFile::canonical_text() const {
    std::ostringstream out;
    for (const auto& [section, kv] : sections_) {
        for (const auto& [key, value] : kv) {
            out << section << "." << key << " = " << value << "\n";
        }
    }
    return out.str();
}

std::string digest_hex(const std::string& text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string manifest_header(const Manifest& m) {
    std::ostringstream out;
    out << "# tool: " << m.version << "\n";
    out << "# command: " << m.command << "\n";
    out << "# config_digest: " << m.config_digest << "\n";
    out << "# seed: " << m.seed << "\n";
    return out.str();
}

std::string format_num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

}  // namespace lassoinfer
