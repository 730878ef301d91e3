#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <doctest.h>

#include "lassoinfer/errors.hpp"
#include "lassoinfer/rng.hpp"
#include "lassoinfer/text_io.hpp"

#include "test_util.hpp"

using namespace lassoinfer;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("lassoinfer_test_" + name);
}

void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

}  // namespace

TEST_CASE("matrix file round trip is exact") {
    RngStream rng(41);
    const Eigen::MatrixXd m = test_util::random_matrix(rng, 7, 4);
    const auto path = temp_file("roundtrip.mat");
    write_matrix_file(path.string(), m);
    const Eigen::MatrixXd back = read_matrix_file(path.string());
    REQUIRE(back.rows() == 7);
    REQUIRE(back.cols() == 4);
    CHECK((back - m).cwiseAbs().maxCoeff() == 0.0);
    std::filesystem::remove(path);
}

TEST_CASE("matrix parse errors carry line numbers") {
    const auto path = temp_file("bad.mat");

    write_text(path, "2 2\n1.0 2.0\n3.0\n");
    try {
        read_matrix_file(path.string());
        FAIL("expected an error");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find(":3:") != std::string::npos);
    }

    write_text(path, "# comment\n\nnot_a_header\n");
    CHECK_THROWS_AS(read_matrix_file(path.string()), InputError);

    write_text(path, "2 2\n1 2\n3 oops\n");
    try {
        read_matrix_file(path.string());
        FAIL("expected an error");
    } catch (const InputError& e) {
        const std::string msg = e.what();
        CHECK(msg.find(":3:") != std::string::npos);
        CHECK(msg.find("oops") != std::string::npos);
    }

    CHECK_THROWS_AS(read_matrix_file("/nonexistent/file.mat"), InputError);
    std::filesystem::remove(path);
}

TEST_CASE("vector file parsing") {
    const auto path = temp_file("vec.txt");
    write_text(path, "# noise\n1.5\n\n-2.0\n3e-1\n");
    const Eigen::VectorXd v = read_vector_file(path.string());
    REQUIRE(v.size() == 3);
    CHECK(v[0] == 1.5);
    CHECK(v[1] == -2.0);
    CHECK(v[2] == 0.3);

    write_text(path, "1.0 2.0\n");
    CHECK_THROWS_AS(read_vector_file(path.string()), InputError);
    std::filesystem::remove(path);
}

TEST_CASE("config parsing with sections and typed getters") {
    const ConfigFile cfg = ConfigFile::parse_string(
        "# top comment\n"
        "[scenario]\n"
        "n = 100\n"
        "rho = 0.5\n"
        "seed = 98765432109\n"
        "label = ar1 run\n"
        "[simulate]\n"
        "alpha = 0.05\n");

    CHECK(cfg.get_int("scenario", "n", -1) == 100);
    CHECK(cfg.get_double("scenario", "rho", 0.0) == 0.5);
    CHECK(cfg.get_u64("scenario", "seed", 0) == 98765432109ull);
    CHECK(cfg.get_str("scenario", "label", "") == "ar1 run");
    CHECK(cfg.get_double("simulate", "alpha", 0.0) == 0.05);
    CHECK(cfg.get_int("simulate", "missing", 7) == 7);
    CHECK(cfg.has("scenario", "n"));
    CHECK(!cfg.has("scenario", "zzz"));

    CHECK_THROWS_AS(ConfigFile::parse_string("[oops\nk = v\n"), ConfigError);
    CHECK_THROWS_AS(ConfigFile::parse_string("just a line\n"), ConfigError);
    const ConfigFile bad = ConfigFile::parse_string("[s]\nn = abc\n");
    CHECK_THROWS_AS(bad.get_int("s", "n", 0), ConfigError);
}

TEST_CASE("digest and manifest are deterministic") {
    CHECK(digest_hex("abc") == digest_hex("abc"));
    CHECK(digest_hex("abc") != digest_hex("abd"));

    Manifest m;
    m.command = "simulate --which table1";
    m.config_digest = digest_hex("x");
    m.seed = 42;
    m.version = "lassoinfer test";
    const std::string header = manifest_header(m);
    CHECK(header.find("# command: simulate --which table1") != std::string::npos);
    CHECK(header.find("# seed: 42") != std::string::npos);
    // no wall-clock content: repeated calls are byte-identical
    CHECK(header == manifest_header(m));
}

TEST_CASE("numeric formatting uses six significant digits") {
    CHECK(format_num(0.123456789) == "0.123457");
    CHECK(format_num(1234567.0) == "1.23457e+06");
    CHECK(format_num(1.0) == "1");
    CHECK(format_num(0.05) == "0.05");
}
