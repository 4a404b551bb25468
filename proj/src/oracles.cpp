#include "sns/oracles.hpp"

#include <complex>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "sns/rng.hpp"

namespace sns::oracles {

SpectralField random_field(int degree, std::uint64_t seed, double scale) {
    SpectralField w(degree);
    std::uint64_t state = seed;
    for (int k2 = -degree; k2 <= degree; ++k2)
        for (int k1 = -degree; k1 <= degree; ++k1) {
            if (k1 == 0 && k2 == 0) continue;
            const double u = 2.0 * splitmix_uniform(state) - 1.0;
            w.set(k1, k2, scale * u / (1.0 + k1 * k1 + k2 * k2));
        }
    return w;
}

SpectralField nonlinear_direct_convolution(const SpectralField& w) {
    const int N = w.degree();
    const double s = 0.22507907903927651;  // (2 pi^2)^(-1/2)
    using cd = std::complex<double>;

    // exponential coefficients over the full square, c(-k) = conj(c(k))
    const int side = 2 * N + 1;
    std::vector<cd> c(static_cast<std::size_t>(side) * side, cd(0.0, 0.0));
    auto idx = [&](int k1, int k2) {
        return static_cast<std::size_t>(k1 + N) + static_cast<std::size_t>(side) * (k2 + N);
    };
    for (int k2 = -N; k2 <= N; ++k2)
        for (int k1 = -N; k1 <= N; ++k1) {
            if (k1 == 0 && k2 == 0) continue;
            const WaveIndex k{k1, k2};
            if (k.positive()) {
                const double a = w(k1, k2);
                const double b = w(-k1, -k2);
                c[idx(k1, k2)] = 0.5 * s * cd(b, -a);
                c[idx(-k1, -k2)] = 0.5 * s * cd(b, a);
            }
        }

    // B(k) = sum_{p+q=k} (p1 q2 - p2 q1)/|p|^2 c(p) c(q)
    std::vector<cd> out(c.size(), cd(0.0, 0.0));
    for (int p2 = -N; p2 <= N; ++p2)
        for (int p1 = -N; p1 <= N; ++p1) {
            if (p1 == 0 && p2 == 0) continue;
            const cd cp = c[idx(p1, p2)];
            if (cp == cd(0.0, 0.0)) continue;
            const double invp = 1.0 / (p1 * p1 + p2 * p2);
            for (int q2 = -N; q2 <= N; ++q2)
                for (int q1 = -N; q1 <= N; ++q1) {
                    if (q1 == 0 && q2 == 0) continue;
                    const int k1 = p1 + q1;
                    const int k2 = p2 + q2;
                    if (std::abs(k1) > N || std::abs(k2) > N || (k1 == 0 && k2 == 0)) continue;
                    const double wedge = p1 * q2 - p2 * q1;
                    if (wedge == 0.0) continue;
                    out[idx(k1, k2)] += wedge * invp * cp * c[idx(q1, q2)];
                }
        }

    SpectralField b(N);
    for (int k2 = -N; k2 <= N; ++k2)
        for (int k1 = -N; k1 <= N; ++k1) {
            if (k1 == 0 && k2 == 0) continue;
            const WaveIndex k{k1, k2};
            if (k.positive()) {
                const cd v = out[idx(k1, k2)];
                b.set(k1, k2, -2.0 * v.imag() / s);
                b.set(-k1, -k2, 2.0 * v.real() / s);
            }
        }
    return b;
}

ReferenceSobol::ReferenceSobol(int dimension, const std::string& direction_file)
    : dim_(dimension), x_(dimension, 0u), v_(dimension) {
    constexpr int L = 32;
    // dimension 1: m_b = 1 for all b
    v_[0].assign(L + 1, 0u);
    for (int b = 1; b <= L; ++b) v_[0][b] = 1u << (32 - b);

    std::ifstream in(direction_file);
    if (!in) throw std::runtime_error("ReferenceSobol: cannot open '" + direction_file + "'");
    std::string line;
    std::getline(in, line);
    for (int j = 1; j < dim_; ++j) {
        if (!std::getline(in, line))
            throw std::runtime_error("ReferenceSobol: direction table too small");
        std::istringstream row(line);
        unsigned d, s, a;
        row >> d >> s >> a;
        std::vector<std::uint32_t> m(s + 1);
        for (unsigned i = 1; i <= s; ++i) row >> m[i];
        auto& V = v_[j];
        V.assign(L + 1, 0u);
        if (static_cast<int>(s) >= L) {
            for (int b = 1; b <= L; ++b) V[b] = m[b] << (32 - b);
        } else {
            for (unsigned b = 1; b <= s; ++b) V[b] = m[b] << (32 - b);
            for (int b = static_cast<int>(s) + 1; b <= L; ++b) {
                V[b] = V[b - s] ^ (V[b - s] >> s);
                for (unsigned k = 1; k <= s - 1; ++k)
                    V[b] ^= ((a >> (s - 1 - k)) & 1u) * V[b - k];
            }
        }
    }
}

std::vector<double> ReferenceSobol::next() {
    std::vector<double> out(dim_);
    if (produced_ == 0) {
        ++produced_;
        return out;  // point 0 is the origin
    }
    // c = 1-based index of the rightmost zero bit of (i-1), i = produced_
    std::uint64_t value = produced_ - 1;
    int c = 1;
    while (value & 1u) {
        value >>= 1;
        ++c;
    }
    for (int j = 0; j < dim_; ++j) {
        x_[j] ^= v_[j][c];
        out[j] = static_cast<double>(x_[j]) * 0x1p-32;
    }
    ++produced_;
    return out;
}

}  // namespace sns::oracles
