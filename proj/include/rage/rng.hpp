#pragma once

#include <complex>
#include <cstdint>

namespace rage {

/// Seedable 64-bit generator (xoshiro256**) shared by every stochastic
/// routine in the library. All distributions are derived from next_u64()
/// with fixed arithmetic, so streams are bit-reproducible across platforms;
/// std:: distributions are avoided on purpose.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();

    /// Uniform double in [0, 1).
    double uniform();
    double uniform(double lo, double hi);

    /// Uniform integer in [0, n).
    int uniform_int(int n);

    /// Gaussian via Box-Muller. The spare sample is discarded to keep the
    /// state a pure function of the draw count.
    double gaussian(double mean, double sigma);

    /// Real and imaginary parts independently uniform on [-1, 1].
    std::complex<double> uniform_complex();

private:
    std::uint64_t state_[4];
};

}  // namespace rage
