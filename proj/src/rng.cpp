#include "rage/rng.hpp"

#include <cmath>

namespace rage {

namespace {

// splitmix64, used only to expand the seed into the xoshiro state.
std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

}  // namespace

Rng::Rng(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& w : state_) {
        w = splitmix64(s);
    }
}

std::uint64_t Rng::next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double Rng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform();
}

int Rng::uniform_int(int n) {
    return static_cast<int>(next_u64() % static_cast<std::uint64_t>(n));
}

double Rng::gaussian(double mean, double sigma) {
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) {
        u1 = uniform();
    }
    const double r = std::sqrt(-2.0 * std::log(u1));
    return mean + sigma * r * std::cos(2.0 * M_PI * u2);
}

std::complex<double> Rng::uniform_complex() {
    const double re = uniform(-1.0, 1.0);
    const double im = uniform(-1.0, 1.0);
    return {re, im};
}

}  // namespace rage
