#include "specreg/singular_system.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <string>

#include "specreg/error.hpp"

namespace specreg {

SingularSystem::SingularSystem(std::vector<double> sigma, std::size_t dim_x, std::vector<double> u,
                               std::size_t dim_y, std::vector<double> v)
    : sigma_(std::move(sigma)), dim_x_(dim_x), u_(std::move(u)), dim_y_(dim_y), v_(std::move(v)) {
    if (u_.size() != dim_x_ * sigma_.size() || v_.size() != dim_y_ * sigma_.size())
        throw DimensionError("singular system: basis sizes do not match n_modes");
    if (sigma_.empty()) throw EmptySpectrumError();
    for (std::size_t n = 0; n < sigma_.size(); ++n) {
        if (!(sigma_[n] > 0.0) || !std::isfinite(sigma_[n]))
            throw InvalidArgument("singular system: sigma_" + std::to_string(n + 1) +
                                  " is not strictly positive");
        if (n > 0 && sigma_[n] > sigma_[n - 1])
            throw InvalidArgument("singular system: sigma is not non-increasing at mode " +
                                  std::to_string(n + 1));
    }
}

SingularSystem SingularSystem::transposed() const {
    return SingularSystem(sigma_, dim_y_, v_, dim_x_, u_);
}

namespace {

// One-sided Jacobi on the columns of `work` (m rows, n columns, column-major).
// On return the columns are mutually orthogonal and `rot` holds the
// accumulated orthogonal factor, so that input * rot = work.
void jacobi_orthogonalize(std::vector<double>& work, std::size_t m, std::size_t n,
                          std::vector<double>& rot, const SvdOptions& opt, double frob) {
    rot.assign(n * n, 0.0);
    for (std::size_t j = 0; j < n; ++j) rot[j * n + j] = 1.0;

    const double eps = std::numeric_limits<double>::epsilon();
    const double negligible = (eps * frob) * (eps * frob);

    for (int sweep = 0; sweep < opt.max_sweeps; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            double* bp = work.data() + p * m;
            for (std::size_t q = p + 1; q < n; ++q) {
                double* bq = work.data() + q * m;
                double alpha = 0.0, beta = 0.0, gamma = 0.0;
                for (std::size_t i = 0; i < m; ++i) {
                    alpha += bp[i] * bp[i];
                    beta += bq[i] * bq[i];
                    gamma += bp[i] * bq[i];
                }
                if (alpha <= negligible || beta <= negligible) continue;
                if (std::abs(gamma) <= opt.convergence_tol * std::sqrt(alpha) * std::sqrt(beta))
                    continue;
                rotated = true;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t =
                    std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t i = 0; i < m; ++i) {
                    const double xp = bp[i], xq = bq[i];
                    bp[i] = c * xp - s * xq;
                    bq[i] = s * xp + c * xq;
                }
                double* rp = rot.data() + p * n;
                double* rq = rot.data() + q * n;
                for (std::size_t i = 0; i < n; ++i) {
                    const double xp = rp[i], xq = rq[i];
                    rp[i] = c * xp - s * xq;
                    rq[i] = s * xp + c * xq;
                }
            }
        }
        if (!rotated) return;
    }
    throw NumericalError("one-sided Jacobi did not converge in " + std::to_string(opt.max_sweeps) +
                         " sweeps");
}

void fix_sign(std::span<double> u, std::span<double> v) {
    for (double e : u) {
        if (std::abs(e) > 1e-8) {
            if (e < 0.0) {
                for (double& x : u) x = -x;
                for (double& x : v) x = -x;
            }
            return;
        }
    }
}

}  // namespace

SingularSystem compute_svd(const DenseMatrix& a, double rank_tol) {
    SvdOptions opt;
    opt.rank_tol = rank_tol;
    return compute_svd(a, opt);
}

SingularSystem compute_svd(const DenseMatrix& a, const SvdOptions& opt) {
    if (a.empty()) throw InvalidArgument("compute_svd: empty matrix");
    if (!(opt.rank_tol >= 0.0)) throw InvalidArgument("compute_svd: rank_tol must be >= 0");
    const std::size_t rows = a.rows(), cols = a.cols();
    if (std::min(rows, cols) > kMaxGramDim || rows * cols > kMaxGramDim * kMaxGramDim)
        throw ResourceError("compute_svd: " + std::to_string(rows) + " x " + std::to_string(cols) +
                            " exceeds the supported workspace (Gram dimension <= " +
                            std::to_string(kMaxGramDim) + ")");
    a.require_finite();

    // Work on whichever orientation has fewer columns.
    const bool transpose = rows < cols;
    const std::size_t m = transpose ? cols : rows;  // column length
    const std::size_t n = transpose ? rows : cols;  // number of columns
    std::vector<double> work(m * n);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) {
            if (transpose)
                work[r * m + c] = a(r, c);
            else
                work[c * m + r] = a(r, c);
        }

    const double frob = a.frobenius_norm();
    if (frob == 0.0) throw EmptySpectrumError();

    std::vector<double> rot;
    jacobi_orthogonalize(work, m, n, rot, opt, frob);

    std::vector<double> norms(n);
    for (std::size_t j = 0; j < n; ++j) norms[j] = norm2({work.data() + j * m, m});
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return norms[i] > norms[j]; });

    const double sigma1 = norms[order[0]];
    const double floor_tol =
        std::max(opt.rank_tol, static_cast<double>(std::max(rows, cols)) *
                                   std::numeric_limits<double>::epsilon());
    std::size_t kept = 0;
    while (kept < n && norms[order[kept]] > floor_tol * sigma1) ++kept;
    if (kept == 0 || sigma1 == 0.0) throw EmptySpectrumError();

    // Non-transposed: work columns are sigma v (in Y), rot columns are u (in X).
    const std::size_t dim_x = cols, dim_y = rows;
    std::vector<double> sigma(kept), u(dim_x * kept), v(dim_y * kept);
    for (std::size_t k = 0; k < kept; ++k) {
        const std::size_t j = order[k];
        sigma[k] = norms[j];
        const double* left = work.data() + j * m;
        const double* right = rot.data() + j * n;
        double* uk = u.data() + k * dim_x;
        double* vk = v.data() + k * dim_y;
        if (!transpose) {
            for (std::size_t i = 0; i < dim_y; ++i) vk[i] = left[i] / sigma[k];
            std::copy(right, right + dim_x, uk);
        } else {
            for (std::size_t i = 0; i < dim_x; ++i) uk[i] = left[i] / sigma[k];
            std::copy(right, right + dim_y, vk);
        }
        fix_sign({uk, dim_x}, {vk, dim_y});
    }
    return SingularSystem(std::move(sigma), dim_x, std::move(u), dim_y, std::move(v));
}

Vector x_coefficients(const SingularSystem& sys, std::span<const double> x) {
    if (x.size() != sys.dim_x())
        throw DimensionError("vector in X has length " + std::to_string(x.size()) + ", expected " +
                             std::to_string(sys.dim_x()));
    Vector c(sys.n_modes());
    for (std::size_t n = 0; n < c.size(); ++n) c[n] = dot(x, sys.u(n));
    return c;
}

Vector y_coefficients(const SingularSystem& sys, std::span<const double> y) {
    if (y.size() != sys.dim_y())
        throw DimensionError("vector in Y has length " + std::to_string(y.size()) + ", expected " +
                             std::to_string(sys.dim_y()));
    Vector c(sys.n_modes());
    for (std::size_t n = 0; n < c.size(); ++n) c[n] = dot(y, sys.v(n));
    return c;
}

Vector synthesize_x(const SingularSystem& sys, std::span<const double> coeffs) {
    if (coeffs.size() != sys.n_modes()) throw DimensionError("coefficient count != n_modes");
    Vector x(sys.dim_x(), 0.0);
    for (std::size_t n = 0; n < coeffs.size(); ++n)
        if (coeffs[n] != 0.0) axpy(coeffs[n], sys.u(n), x);
    return x;
}

Vector synthesize_y(const SingularSystem& sys, std::span<const double> coeffs) {
    if (coeffs.size() != sys.n_modes()) throw DimensionError("coefficient count != n_modes");
    Vector y(sys.dim_y(), 0.0);
    for (std::size_t n = 0; n < coeffs.size(); ++n)
        if (coeffs[n] != 0.0) axpy(coeffs[n], sys.v(n), y);
    return y;
}

Vector apply_forward(const SingularSystem& sys, std::span<const double> x) {
    Vector c = x_coefficients(sys, x);
    for (std::size_t n = 0; n < c.size(); ++n) c[n] *= sys.sigma(n);
    return synthesize_y(sys, c);
}

Vector project_row_space(const SingularSystem& sys, std::span<const double> x) {
    return synthesize_x(sys, x_coefficients(sys, x));
}

DenseMatrix reconstruct_matrix(const SingularSystem& sys) {
    DenseMatrix a(sys.dim_y(), sys.dim_x());
    for (std::size_t n = 0; n < sys.n_modes(); ++n) {
        const auto u = sys.u(n);
        const auto v = sys.v(n);
        const double s = sys.sigma(n);
        for (std::size_t r = 0; r < sys.dim_y(); ++r) {
            const double sv = s * v[r];
            if (sv == 0.0) continue;
            for (std::size_t c = 0; c < sys.dim_x(); ++c) a(r, c) += sv * u[c];
        }
    }
    return a;
}

// ---------------------------------------------------------------------------
// Binary container
//
//   offset  size  field
//        0     8  magic "SPECSVD\0"
//        8     4  version (u32, currently 1)
//       12     4  reserved, zero
//       16     8  n_modes (u64)
//       24     8  dim_x (u64)
//       32     8  dim_y (u64)
//       40   ...  sigma[n_modes], U column-major, V column-major (f64)
//
// All integers and floats are little-endian.

namespace {

constexpr char kMagic[8] = {'S', 'P', 'E', 'C', 'S', 'V', 'D', '\0'};
constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kHeaderSize = 40;

void put_u64(std::vector<unsigned char>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

void put_f64s(std::vector<unsigned char>& out, std::span<const double> xs) {
    for (double x : xs) put_u64(out, std::bit_cast<std::uint64_t>(x));
}

class Reader {
public:
    explicit Reader(std::span<const unsigned char> bytes) : bytes_(bytes) {}

    std::size_t offset() const { return pos_; }

    void need(std::size_t n, const char* what) const {
        if (bytes_.size() - pos_ < n)
            throw ParseError(std::string("truncated file while reading ") + what, bytes_.size());
    }

    std::uint64_t u64(const char* what) {
        need(8, what);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
        pos_ += 8;
        return v;
    }

    std::uint32_t u32(const char* what) {
        need(4, what);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
        pos_ += 4;
        return v;
    }

    std::vector<double> f64s(std::size_t count, const char* what) {
        need(count * 8, what);
        std::vector<double> out(count);
        for (auto& x : out) x = std::bit_cast<double>(u64(what));
        return out;
    }

    std::span<const unsigned char> take(std::size_t n, const char* what) {
        need(n, what);
        auto s = bytes_.subspan(pos_, n);
        pos_ += n;
        return s;
    }

private:
    std::span<const unsigned char> bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

std::vector<unsigned char> encode_system(const SingularSystem& sys) {
    std::vector<unsigned char> out;
    out.reserve(kHeaderSize + 8 * sys.n_modes() * (1 + sys.dim_x() + sys.dim_y()));
    for (char c : kMagic) out.push_back(static_cast<unsigned char>(c));
    put_u32(out, kVersion);
    put_u32(out, 0);
    put_u64(out, sys.n_modes());
    put_u64(out, sys.dim_x());
    put_u64(out, sys.dim_y());
    put_f64s(out, sys.sigma());
    put_f64s(out, sys.x_basis().data);
    put_f64s(out, sys.y_basis().data);
    return out;
}

SingularSystem decode_system(std::span<const unsigned char> bytes) {
    Reader r(bytes);
    const auto magic = r.take(sizeof kMagic, "magic");
    if (!std::equal(magic.begin(), magic.end(), std::begin(kMagic),
                    [](unsigned char a, char b) { return a == static_cast<unsigned char>(b); }))
        throw ParseError("bad magic: not a singular-system file", 0);
    const std::size_t version_at = r.offset();
    const std::uint32_t version = r.u32("version");
    if (version != kVersion) throw UnsupportedVersionError(version, version_at);
    r.u32("reserved");
    const std::uint64_t n_modes = r.u64("n_modes");
    const std::uint64_t dim_x = r.u64("dim_x");
    const std::uint64_t dim_y = r.u64("dim_y");

    constexpr std::uint64_t kLimit = std::uint64_t{1} << 32;
    if (n_modes == 0 || n_modes >= kLimit || dim_x >= kLimit || dim_y >= kLimit ||
        n_modes > std::min(dim_x, dim_y))
        throw ParseError("implausible dimensions in header", 16);
    const std::uint64_t payload = 8 * n_modes * (1 + dim_x + dim_y);
    if (bytes.size() - kHeaderSize < payload)
        throw ParseError("truncated file: payload shorter than header declares", bytes.size());
    if (bytes.size() - kHeaderSize > payload)
        throw ParseError("trailing bytes after payload", kHeaderSize + payload);

    auto sigma = r.f64s(n_modes, "sigma");
    auto u = r.f64s(n_modes * dim_x, "U");
    auto v = r.f64s(n_modes * dim_y, "V");
    try {
        return SingularSystem(std::move(sigma), dim_x, std::move(u), dim_y, std::move(v));
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        throw ParseError(std::string("invalid singular system: ") + e.what(), kHeaderSize);
    }
}

void save_system(const SingularSystem& sys, const std::filesystem::path& path) {
    const auto bytes = encode_system(sys);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

SingularSystem load_system(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    return decode_system(bytes);
}

}  // namespace specreg
