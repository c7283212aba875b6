#include "specreg/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "specreg/error.hpp"

namespace specreg::io {

namespace fs = std::filesystem;

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

double parse_number(std::string_view text) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r'))
        text.remove_suffix(1);
    if (text == "inf" || text == "+inf") return std::numeric_limits<double>::infinity();
    if (text == "-inf") return -std::numeric_limits<double>::infinity();
    if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || text.empty())
        throw InvalidArgument("not a number: '" + std::string(text) + "'");
    return v;
}

void write_text(const fs::path& path, std::string_view text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        if (nl == std::string_view::npos) break;
        text.remove_prefix(nl + 1);
    }
    return lines;
}

bool blank(std::string_view line) {
    return std::all_of(line.begin(), line.end(), [](char c) { return c == ' ' || c == '\t'; });
}

std::vector<double> parse_fields(std::string_view line, std::size_t line_no) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= line.size()) {
        const auto comma = line.find(',', pos);
        const auto field = line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
        try {
            out.push_back(parse_number(field));
        } catch (const InvalidArgument& e) {
            throw ParseError(e.what(), line_no);
        }
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

std::size_t parse_count(double v, std::size_t line_no, const char* what) {
    if (!(v >= 1.0) || v != std::floor(v) || v > 1e9)
        throw ParseError(std::string(what) + " must be a positive integer", line_no);
    return static_cast<std::size_t>(v);
}

}  // namespace

void write_matrix_csv(const fs::path& path, const DenseMatrix& a) {
    std::string s = std::to_string(a.rows()) + "," + std::to_string(a.cols()) + "\n";
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            if (j) s += ',';
            s += format_number(a(i, j));
        }
        s += '\n';
    }
    write_text(path, s);
}

DenseMatrix read_matrix_csv(const fs::path& path) {
    const std::string text = read_text(path);
    const auto lines = split_lines(text);
    std::size_t idx = 0;
    while (idx < lines.size() && blank(lines[idx])) ++idx;
    if (idx == lines.size()) throw ParseError("matrix CSV is empty", 1);
    const auto header = parse_fields(lines[idx], idx + 1);
    if (header.size() != 2) throw ParseError("matrix CSV header must be 'rows,cols'", idx + 1);
    const std::size_t rows = parse_count(header[0], idx + 1, "rows");
    const std::size_t cols = parse_count(header[1], idx + 1, "cols");
    DenseMatrix a(rows, cols);
    std::size_t r = 0;
    for (++idx; idx < lines.size(); ++idx) {
        if (blank(lines[idx])) continue;
        if (r == rows) throw ParseError("more than " + std::to_string(rows) + " matrix rows", idx + 1);
        const auto vals = parse_fields(lines[idx], idx + 1);
        if (vals.size() != cols)
            throw ParseError("expected " + std::to_string(cols) + " columns, found " + std::to_string(vals.size()),
                             idx + 1);
        for (std::size_t j = 0; j < cols; ++j) a(r, j) = vals[j];
        ++r;
    }
    if (r != rows)
        throw ParseError("expected " + std::to_string(rows) + " matrix rows, found " + std::to_string(r),
                         lines.size());
    return a;
}

Vector read_vector_csv(const fs::path& path) {
    const std::string text = read_text(path);
    Vector v;
    std::size_t line_no = 1;
    std::string token;
    auto flush = [&]() {
        if (token.empty()) return;
        try {
            v.push_back(parse_number(token));
        } catch (const InvalidArgument& e) {
            throw ParseError(e.what(), line_no);
        }
        token.clear();
    };
    for (char c : text) {
        if (c == ',' || c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            flush();
            if (c == '\n') ++line_no;
        } else {
            token += c;
        }
    }
    flush();
    if (v.empty()) throw ParseError("vector file holds no values", 1);
    return v;
}

void write_vector_csv(const fs::path& path, std::span<const double> v) {
    std::string s;
    for (double x : v) s += format_number(x) + "\n";
    write_text(path, s);
}

std::vector<Vector> read_corpus_csv(const fs::path& path) {
    const std::string text = read_text(path);
    const auto lines = split_lines(text);
    std::vector<Vector> corpus;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (blank(lines[i])) continue;
        corpus.push_back(parse_fields(lines[i], i + 1));
        if (corpus.back().size() != corpus.front().size())
            throw ParseError("corpus rows have different lengths", i + 1);
    }
    if (corpus.empty()) throw ParseError("corpus file holds no samples", 1);
    return corpus;
}

void write_profile_csv(const fs::path& path, const SpectrumProfile& profile) {
    std::string s = "n,value\n";
    for (std::size_t n = 0; n < profile.size(); ++n)
        s += std::to_string(n + 1) + "," + format_number(profile[n]) + "\n";
    write_text(path, s);
}

SpectrumProfile read_profile_csv(const fs::path& path) {
    const std::string text = read_text(path);
    const auto lines = split_lines(text);
    if (lines.empty() || lines[0] != "n,value") throw ParseError("profile CSV must start with 'n,value'", 1);
    std::vector<double> values;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (blank(lines[i])) continue;
        const auto f = parse_fields(lines[i], i + 1);
        if (f.size() != 2 || f[0] != static_cast<double>(values.size() + 1))
            throw ParseError("expected 'n,value' with consecutive n", i + 1);
        values.push_back(f[1]);
    }
    try {
        return SpectrumProfile::from_values(std::move(values));
    } catch (const InvalidArgument& e) {
        throw ParseError(e.what(), 1);
    }
}

std::string filter_csv(const Filter& f) {
    std::string s = "n,sigma,lambda,g\n";
    for (std::size_t n = 0; n < f.size(); ++n)
        s += std::to_string(n + 1) + "," + format_number(f.sigma[n]) + "," + format_number(f.lambda[n]) + "," +
             format_number(f.g[n]) + "\n";
    return s;
}

std::string filter_sidecar_json(const Filter& f) {
    nlohmann::json j;
    j["paradigm"] = f.paradigm.name();
    j["training_reference"] = f.training_reference;
    j["n_modes"] = f.size();
    j["flagged_modes"] = f.flagged_modes;
    return j.dump(2) + "\n";
}

void write_filter(const fs::path& csv_path, const Filter& f) {
    write_text(csv_path, filter_csv(f));
    fs::path sidecar = csv_path;
    sidecar.replace_extension(".json");
    write_text(sidecar, filter_sidecar_json(f));
}

Filter read_filter(const fs::path& csv_path) {
    const std::string text = read_text(csv_path);
    const auto lines = split_lines(text);
    if (lines.empty() || lines[0] != "n,sigma,lambda,g")
        throw ParseError("filter CSV must start with 'n,sigma,lambda,g'", 1);
    Filter f;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (blank(lines[i])) continue;
        const auto v = parse_fields(lines[i], i + 1);
        if (v.size() != 4 || v[0] != static_cast<double>(f.sigma.size() + 1))
            throw ParseError("expected 'n,sigma,lambda,g' with consecutive n", i + 1);
        f.sigma.push_back(v[1]);
        f.lambda.push_back(v[2]);
        f.g.push_back(v[3]);
    }
    if (f.sigma.empty()) throw ParseError("filter CSV holds no modes", 1);
    fs::path sidecar = csv_path;
    sidecar.replace_extension(".json");
    if (fs::exists(sidecar)) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(read_text(sidecar));
            f.paradigm = parse_paradigm(j.at("paradigm").get<std::string>());
            f.training_reference = j.value("training_reference", "");
            f.flagged_modes = j.value("flagged_modes", std::vector<std::size_t>{});
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("filter sidecar: ") + e.what(), 0);
        }
    }
    return f;
}

void write_grid_csv(const fs::path& path, std::size_t width, std::size_t height, std::span<const double> pixels) {
    if (pixels.size() != width * height) throw DimensionError("grid: pixel count does not match width*height");
    std::string s;
    for (std::size_t r = 0; r < height; ++r) {
        for (std::size_t c = 0; c < width; ++c) {
            if (c) s += ',';
            s += format_number(pixels[r * width + c]);
        }
        s += '\n';
    }
    write_text(path, s);
}

void write_pgm16(const fs::path& path, std::size_t width, std::size_t height, std::span<const double> pixels,
                 double lo, double hi) {
    if (pixels.size() != width * height) throw DimensionError("pgm: pixel count does not match width*height");
    if (!(hi > lo)) throw InvalidArgument("pgm: display range must satisfy hi > lo");
    std::string s = "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n65535\n";
    s.reserve(s.size() + 2 * pixels.size());
    for (double p : pixels) {
        double t = std::isnan(p) ? 0.0 : (std::clamp(p, lo, hi) - lo) / (hi - lo);
        const auto q = static_cast<std::uint16_t>(std::lround(t * 65535.0));
        s += static_cast<char>(q >> 8);
        s += static_cast<char>(q & 0xff);
    }
    write_text(path, s);
}

PgmInfo validate_pgm(const fs::path& path) {
    const std::string data = read_text(path);
    std::size_t pos = 0;
    auto skip_space = [&]() {
        while (pos < data.size()) {
            if (data[pos] == '#') {
                while (pos < data.size() && data[pos] != '\n') ++pos;
            } else if (std::isspace(static_cast<unsigned char>(data[pos]))) {
                ++pos;
            } else {
                break;
            }
        }
    };
    auto read_int = [&](const char* what) {
        skip_space();
        const std::size_t start = pos;
        unsigned long long v = 0;
        while (pos < data.size() && data[pos] >= '0' && data[pos] <= '9') v = v * 10 + (data[pos++] - '0');
        if (pos == start) throw ParseError(std::string("pgm: missing ") + what, start);
        return v;
    };
    if (data.size() < 2 || data[0] != 'P' || data[1] != '5') throw ParseError("pgm: magic is not P5", 0);
    pos = 2;
    PgmInfo info;
    info.width = read_int("width");
    info.height = read_int("height");
    const auto maxval = read_int("maxval");
    if (maxval == 0 || maxval > 65535) throw ParseError("pgm: maxval out of range", pos);
    info.maxval = static_cast<unsigned>(maxval);
    if (pos >= data.size() || !std::isspace(static_cast<unsigned char>(data[pos])))
        throw ParseError("pgm: header must end with one whitespace byte", pos);
    ++pos;
    const std::size_t bytes_per = info.maxval > 255 ? 2 : 1;
    const std::size_t expected = info.width * info.height * bytes_per;
    if (data.size() - pos != expected)
        throw ParseError("pgm: payload has " + std::to_string(data.size() - pos) + " bytes, expected " +
                             std::to_string(expected),
                         pos);
    return info;
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string file_hash(const fs::path& path) {
    const std::uint64_t h = fnv1a64(read_text(path));
    static constexpr char digits[] = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) s[static_cast<std::size_t>(15 - i)] = digits[(h >> (4 * i)) & 0xf];
    return s;
}

}  // namespace specreg::io
