#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace sns {

/// Sobol' low-discrepancy sequence with direction numbers loaded from a
/// Joe-Kuo "new-joe-kuo-6" table (rows: d s a m_1..m_s; dimension 1 is
/// the built-in van der Corput sequence).  Points are produced in
/// Gray-code order, matching the published generator bit for bit.
class SobolStream {
  public:
    SobolStream(int dimension, const std::string& direction_file);

    int dimension() const { return dim_; }
    std::uint64_t index() const { return index_; }

    /// i-th point of the sequence (random access; point(0) is the origin).
    void point(std::uint64_t i, std::span<double> out) const;
    std::vector<double> point(std::uint64_t i) const;

    /// Sequential access starting from the current index.
    std::vector<double> next();

    static constexpr std::uint64_t max_index() { return std::uint64_t{1} << 32; }

  private:
    int dim_;
    std::uint64_t index_ = 0;
    std::vector<std::uint32_t> v_;  // v_[j*32 + (b-1)] = direction integer b of dim j+1
};

}  // namespace sns
