#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "specreg/dense_matrix.hpp"
#include "specreg/learners.hpp"
#include "specreg/stochastics.hpp"

namespace specreg::io {

/// Shortest round-trip decimal form of x ("inf", "-inf", "nan" for the
/// non-finite values). Locale independent, so CSV output is byte-stable.
std::string format_number(double x);

/// Parses a number written by format_number. Throws InvalidArgument.
double parse_number(std::string_view text);

/// Matrix CSV: first line "rows,cols", then one line per row.
void write_matrix_csv(const std::filesystem::path& path, const DenseMatrix& a);
DenseMatrix read_matrix_csv(const std::filesystem::path& path);

/// Whitespace / comma separated values, any line layout.
Vector read_vector_csv(const std::filesystem::path& path);
/// One value per line.
void write_vector_csv(const std::filesystem::path& path, std::span<const double> v);

/// One sample per line, comma separated.
std::vector<Vector> read_corpus_csv(const std::filesystem::path& path);

/// Columns n,value (1-based n).
void write_profile_csv(const std::filesystem::path& path, const SpectrumProfile& profile);
SpectrumProfile read_profile_csv(const std::filesystem::path& path);

/// Columns n,sigma,lambda,g. The JSON sidecar (same stem, .json) carries the
/// paradigm, training reference and flagged modes.
void write_filter(const std::filesystem::path& csv_path, const Filter& f);
std::string filter_csv(const Filter& f);
std::string filter_sidecar_json(const Filter& f);
/// Reads the CSV and, when present, the sidecar.
Filter read_filter(const std::filesystem::path& csv_path);

/// Image as CSV: `height` lines of `width` comma-separated values.
void write_grid_csv(const std::filesystem::path& path, std::size_t width, std::size_t height,
                    std::span<const double> pixels);

/// Binary PGM (P5), 16-bit big-endian samples with maxval 65535. Values are
/// clipped to [lo, hi] and mapped linearly onto [0, 65535].
void write_pgm16(const std::filesystem::path& path, std::size_t width, std::size_t height,
                 std::span<const double> pixels, double lo = 0.0, double hi = 1.0);

struct PgmInfo {
    std::size_t width = 0;
    std::size_t height = 0;
    unsigned maxval = 0;
};
/// Checks the header and payload length. Throws ParseError.
PgmInfo validate_pgm(const std::filesystem::path& path);

void write_text(const std::filesystem::path& path, std::string_view text);
std::string read_text(const std::filesystem::path& path);

std::uint64_t fnv1a64(std::string_view bytes);
/// 16 lowercase hex digits of the FNV-1a hash of the file contents.
std::string file_hash(const std::filesystem::path& path);

}  // namespace specreg::io
