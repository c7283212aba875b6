#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "specreg/dense_matrix.hpp"
#include "specreg/singular_system.hpp"

namespace specreg {

/// diag(n^-decay), n = 1..size.
struct DiagonalSpec {
    double decay = 1.0;
    std::size_t size = 64;
};

/// Circulant matrix of `kernel` acting on periodic signals of length `length`:
/// (A x)_i = sum_j kernel_j x_{(i - j) mod length}.
struct ConvolutionSpec {
    std::vector<double> kernel{1.0};
    std::size_t length = 64;
};

/// Parallel-beam projector for a side x side image on the square
/// [-side/2, side/2]^2 with unit pixels. Angles k*pi/angles, k < angles.
/// Detector offsets are bin centres spanning the image diagonal.
/// detectors == 0 selects ceil(sqrt(2) * side).
struct RadonSpec {
    std::size_t side = 16;
    std::size_t angles = 24;
    std::size_t detectors = 0;

    std::size_t detector_count() const;
};

using OperatorSpec = std::variant<DiagonalSpec, ConvolutionSpec, RadonSpec>;

std::string operator_kind(const OperatorSpec& spec);

/// Largest radon2d image (side^2) accepted by build_operator.
inline constexpr std::size_t kMaxRadonPixels = 4096;

DenseMatrix build_operator(const OperatorSpec& spec);

/// Unit direction and offset of radon row `r` (angle-major ordering).
struct Ray {
    double theta;
    double offset;
};
Ray radon_ray(const RadonSpec& spec, std::size_t row);

/// Length of the chord of ray `ray` through the image square.
double chord_length(const RadonSpec& spec, const Ray& ray);

struct Phantom {
    std::size_t side = 0;
    std::vector<double> pixels;  // row-major, row 0 at the top
    std::string generator = "ellipses-v1";
    std::uint64_t seed = 0;
};

/// Superposition of 3 to 8 random ellipses with random intensities, clipped
/// to [0, 1]. Deterministic per seed.
Phantom generate_phantom(std::size_t side, std::uint64_t seed);

struct CorpusOptions {
    /// Coefficient decay c_n^2 = n^-q for the analytic kinds. Must exceed 1.
    double q = 2.0;
};

/// Training-data corpus in X.
///
/// radon2d: flattened phantoms with seeds derived from (seed, i).
/// diagonal / convolution1d: x = sum_n c_n xi_n u_n with xi_n standard normal
/// and c_n^2 = n^-q over the modes of `sys`.
std::vector<Vector> sample_data_corpus(const OperatorSpec& spec, const SingularSystem& sys,
                                       std::size_t count, std::uint64_t seed,
                                       const CorpusOptions& options = {});

}  // namespace specreg
