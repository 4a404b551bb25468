#include "sns/sobol.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sns {

namespace {
constexpr int kBits = 32;
}

SobolStream::SobolStream(int dimension, const std::string& direction_file) : dim_(dimension) {
    if (dim_ < 1) throw std::invalid_argument("SobolStream: dimension must be >= 1");
    v_.assign(static_cast<std::size_t>(dim_) * kBits, 0u);

    // dimension 1: v_b = 2^(32-b)
    for (int b = 1; b <= kBits; ++b) v_[b - 1] = 1u << (kBits - b);
    if (dim_ == 1) return;

    std::ifstream in(direction_file);
    if (!in)
        throw std::runtime_error("SobolStream: cannot open direction file '" + direction_file +
                                 "'");
    std::string header;
    std::getline(in, header);  // "d s a m_i"

    int loaded = 1;
    std::string line;
    while (loaded < dim_ && std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        unsigned d = 0, s = 0, a = 0;
        if (!(row >> d >> s >> a)) continue;
        if (static_cast<int>(d) != loaded + 1)
            throw std::runtime_error("SobolStream: direction file rows out of order at d = " +
                                     std::to_string(d));
        std::vector<std::uint32_t> m(s + 1, 0);
        for (unsigned i = 1; i <= s; ++i)
            if (!(row >> m[i]))
                throw std::runtime_error("SobolStream: truncated row for d = " +
                                         std::to_string(d));
        std::uint32_t* V = &v_[static_cast<std::size_t>(loaded) * kBits] - 1;  // 1-based
        if (static_cast<int>(s) >= kBits) {
            for (int b = 1; b <= kBits; ++b) V[b] = m[b] << (kBits - b);
        } else {
            for (unsigned b = 1; b <= s; ++b) V[b] = m[b] << (kBits - b);
            for (int b = static_cast<int>(s) + 1; b <= kBits; ++b) {
                V[b] = V[b - s] ^ (V[b - s] >> s);
                for (unsigned k = 1; k <= s - 1; ++k)
                    V[b] ^= ((a >> (s - 1 - k)) & 1u) * V[b - k];
            }
        }
        ++loaded;
    }
    if (loaded < dim_)
        throw std::invalid_argument("SobolStream: requested dimension " + std::to_string(dim_) +
                                    " exceeds direction table size (" + std::to_string(loaded) +
                                    ")");
}

void SobolStream::point(std::uint64_t i, std::span<double> out) const {
    if (i >= max_index()) throw std::invalid_argument("SobolStream: index must be < 2^32");
    if (out.size() != static_cast<std::size_t>(dim_))
        throw std::invalid_argument("SobolStream: output span size mismatch");
    const std::uint32_t g = static_cast<std::uint32_t>(i ^ (i >> 1));
    for (int j = 0; j < dim_; ++j) {
        std::uint32_t x = 0;
        std::uint32_t gg = g;
        const std::uint32_t* V = &v_[static_cast<std::size_t>(j) * kBits];
        int b = 0;
        while (gg) {
            if (gg & 1u) x ^= V[b];
            gg >>= 1;
            ++b;
        }
        out[j] = static_cast<double>(x) * 0x1p-32;
    }
}

std::vector<double> SobolStream::point(std::uint64_t i) const {
    std::vector<double> out(dim_);
    point(i, out);
    return out;
}

std::vector<double> SobolStream::next() { return point(index_++); }

}  // namespace sns
