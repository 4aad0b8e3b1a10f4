#include <ddc/rng.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ddc {
namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// splitmix64 finalizer
std::uint64_t mix(std::uint64_t z) {
    z += kGolden;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed) : key_(mix(seed ^ 0x5dd1e4c5a2d7f3b9ULL)) {}

RngStream RngStream::child(std::uint64_t id) const {
    RngStream s;
    s.key_ = mix(key_ ^ mix(id * kGolden + 0x632be59bd9b4e019ULL));
    return s;
}

std::uint64_t RngStream::child_seed(std::uint64_t id) const { return child(id).key_; }

std::uint64_t RngStream::next_u64() { return mix(key_ + ++counter_ * kGolden); }

double RngStream::next_uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::next_gaussian() {
    double u1 = next_uniform();
    double u2 = next_uniform();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Vec RngStream::uniform_vector(int dim) {
    if (dim < 0) throw std::invalid_argument("uniform_vector: negative dimension");
    Vec v(dim);
    for (int i = 0; i < dim; ++i) v(i) = next_uniform();
    return v;
}

Vec RngStream::gaussian_vector(int dim) {
    if (dim < 0) throw std::invalid_argument("gaussian_vector: negative dimension");
    Vec v(dim);
    for (int i = 0; i < dim; ++i) v(i) = next_gaussian();
    return v;
}

}  // namespace ddc
