#pragma once

#include <ddc/types.hpp>

#include <cstdint>

namespace ddc {

/// Counter-based splittable random stream.
///
/// Every draw is a pure function of (key, counter); child streams derive a
/// fresh key from (key, id). Streams created from the same seed and the same
/// chain of child ids reproduce bit-identical sequences regardless of
/// evaluation order across threads.
class RngStream {
  public:
    RngStream() = default;
    explicit RngStream(std::uint64_t seed);

    /// Independent stream keyed by (this stream, id).
    RngStream child(std::uint64_t id) const;
    /// Key of child(id); handy for seeding value-type consumers.
    std::uint64_t child_seed(std::uint64_t id) const;

    std::uint64_t next_u64();
    /// Uniform on [0, 1) with 53-bit resolution.
    double next_uniform();
    /// Standard normal (Box-Muller; one value per call).
    double next_gaussian();

    Vec uniform_vector(int dim);
    Vec gaussian_vector(int dim);

  private:
    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
};

}  // namespace ddc
