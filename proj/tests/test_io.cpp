#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>

#include "specreg/error.hpp"
#include "specreg/io.hpp"
#include "support/oracles.hpp"

using namespace specreg;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "specreg_test_io";
    fs::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_CASE("number formatting round-trips exactly") {
    for (double x : {0.0, 1.0, -2.5, 0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, std::nextafter(1.0, 2.0)})
        CHECK(io::parse_number(io::format_number(x)) == x);
    CHECK(io::format_number(0.1) == "0.1");
    CHECK(io::format_number(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(io::format_number(-std::numeric_limits<double>::infinity()) == "-inf");
    CHECK(io::format_number(std::nan("")) == "nan");
    CHECK(std::isinf(io::parse_number("inf")));
    CHECK(std::isnan(io::parse_number("nan")));
    CHECK_THROWS_AS(io::parse_number("1.0x"), InvalidArgument);
    CHECK_THROWS_AS(io::parse_number(""), InvalidArgument);
}

TEST_CASE("matrix CSV") {
    const DenseMatrix a = oracle::random_matrix(4, 3, 8);
    const auto path = scratch("a.csv");
    io::write_matrix_csv(path, a);
    CHECK(io::read_matrix_csv(path) == a);
    CHECK(io::read_text(path).rfind("4,3\n", 0) == 0);

    io::write_text(path, "2,2\n1,2\n3\n");
    try {
        io::read_matrix_csv(path);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.offset() == 3);
    }
    io::write_text(path, "2,2\n1,2\n");
    CHECK_THROWS_AS(io::read_matrix_csv(path), ParseError);
    io::write_text(path, "1,2\n1,abc\n");
    CHECK_THROWS_AS(io::read_matrix_csv(path), ParseError);
    io::write_text(path, "");
    CHECK_THROWS_AS(io::read_matrix_csv(path), ParseError);
    CHECK_THROWS_AS(io::read_matrix_csv(scratch("missing.csv")), IoError);
}

TEST_CASE("vector and corpus CSV") {
    const auto path = scratch("v.csv");
    const std::vector<double> v{1.5, -2.0, 1e-12};
    io::write_vector_csv(path, v);
    CHECK(io::read_vector_csv(path) == v);
    io::write_text(path, "1 2, 3\n\n4\t5\n");
    CHECK(io::read_vector_csv(path) == std::vector<double>{1, 2, 3, 4, 5});
    io::write_text(path, "\n");
    CHECK_THROWS_AS(io::read_vector_csv(path), ParseError);

    io::write_text(path, "1,2,3\n4,5,6\n");
    const auto corpus = io::read_corpus_csv(path);
    REQUIRE(corpus.size() == 2);
    CHECK(corpus[1] == std::vector<double>{4, 5, 6});
    io::write_text(path, "1,2,3\n4,5\n");
    CHECK_THROWS_AS(io::read_corpus_csv(path), ParseError);
}

TEST_CASE("profile CSV") {
    const auto path = scratch("p.csv");
    const auto p = SpectrumProfile::power_law(0.1, 0.5, 5);
    io::write_profile_csv(path, p);
    CHECK(io::read_text(path).rfind("n,value\n1,", 0) == 0);
    CHECK(io::read_profile_csv(path).values == p.values);
    io::write_text(path, "n,value\n1,0.5\n3,0.2\n");
    CHECK_THROWS_AS(io::read_profile_csv(path), ParseError);
    io::write_text(path, "mode,value\n");
    CHECK_THROWS_AS(io::read_profile_csv(path), ParseError);
}

TEST_CASE("filter CSV and sidecar") {
    const std::vector<double> sigma{1.0, 0.5, 0.25};
    Filter f = fit_adv(sigma, SpectrumProfile::from_values({0.1, 0.0, 0.2}),
                       SpectrumProfile::from_values({1.0, 0.0, 0.5}), 0.5);
    const auto path = scratch("adv.csv");
    io::write_filter(path, f);
    CHECK(fs::exists(scratch("adv.json")));
    const Filter back = io::read_filter(path);
    CHECK(back.sigma == f.sigma);
    CHECK(back.g == f.g);
    CHECK(back.lambda == f.lambda);
    CHECK(back.paradigm == f.paradigm);
    CHECK(back.training_reference == f.training_reference);
    CHECK(back.flagged_modes == std::vector<std::size_t>{2});
    CHECK(io::filter_csv(f).rfind("n,sigma,lambda,g\n", 0) == 0);

    const Filter t = truncated_svd_filter(sigma, 1);
    io::write_filter(scratch("t.csv"), t);
    CHECK(io::read_text(scratch("t.csv")).find(",inf,0\n") != std::string::npos);
    CHECK(std::isinf(io::read_filter(scratch("t.csv")).lambda[2]));

    io::write_text(scratch("bad.csv"), "n,sigma,lambda,g\n1,1,0,1\n1,1,0,1\n");
    CHECK_THROWS_AS(io::read_filter(scratch("bad.csv")), ParseError);
    io::write_text(scratch("bad2.csv"), "n,sigma,lambda,g\n1,1,0,1\n");
    io::write_text(scratch("bad2.json"), "{not json");
    CHECK_THROWS_AS(io::read_filter(scratch("bad2.csv")), ParseError);
}

TEST_CASE("PGM output") {
    const auto path = scratch("img.pgm");
    const std::vector<double> px{0.0, 0.5, 1.0, 2.0, -1.0, 0.25};
    io::write_pgm16(path, 3, 2, px);
    const auto info = io::validate_pgm(path);
    CHECK(info.width == 3);
    CHECK(info.height == 2);
    CHECK(info.maxval == 65535);
    const std::string bytes = io::read_text(path);
    const std::string header = "P5\n3 2\n65535\n";
    REQUIRE(bytes.size() == header.size() + 12);
    auto sample = [&](std::size_t i) {
        return (static_cast<unsigned char>(bytes[header.size() + 2 * i]) << 8) |
               static_cast<unsigned char>(bytes[header.size() + 2 * i + 1]);
    };
    CHECK(sample(0) == 0);
    CHECK(sample(1) == 32768);
    CHECK(sample(2) == 65535);
    CHECK(sample(3) == 65535);  // clipped
    CHECK(sample(4) == 0);

    CHECK_THROWS_AS(io::write_pgm16(path, 2, 2, px), DimensionError);
    io::write_text(path, "P2\n1 1\n255\n0");
    CHECK_THROWS_AS(io::validate_pgm(path), ParseError);
    io::write_text(path, header + "abc");
    CHECK_THROWS_AS(io::validate_pgm(path), ParseError);
}

TEST_CASE("grid CSV") {
    const auto path = scratch("g.csv");
    io::write_grid_csv(path, 2, 2, std::vector<double>{1, 2, 3, 4});
    CHECK(io::read_text(path) == "1,2\n3,4\n");
    CHECK_THROWS_AS(io::write_grid_csv(path, 3, 2, std::vector<double>{1, 2}), DimensionError);
}

TEST_CASE("FNV-1a hashes") {
    CHECK(io::fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(io::fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(io::fnv1a64("foobar") == 0x85944171f73967e8ULL);
    const auto path = scratch("h.txt");
    io::write_text(path, "foobar");
    CHECK(io::file_hash(path) == "85944171f73967e8");
}
