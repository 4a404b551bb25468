#include "sns/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <cstring>
#include <map>
#include <mutex>
#include <stdexcept>

namespace sns {

namespace {

// FFTW plan creation/destruction is not thread-safe.
std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}

constexpr double kBasisScale = 0.22507907903927651;  // (2 pi^2)^(-1/2)

}  // namespace

int dealiased_grid_size(int degree) {
    if (degree < 1) throw std::invalid_argument("dealiased_grid_size: degree must be >= 1");
    const int need = 3 * degree + 1;
    int best = -1;
    for (long p2 = 2; p2 <= 4L * need; p2 *= 2) {
        long g = p2;
        while (g < need) g *= 3;
        if (best < 0 || g < best) best = static_cast<int>(g);
    }
    return best;
}

struct SpectralWorkspace::Impl {
    int N, G, H;            // H = G/2 + 1 (stored complex columns)
    double* ra;             // real scratch grids
    double* rb;
    double* rc;
    fftw_complex* base;     // spectral coefficients of the input field
    fftw_complex* scratch;  // derived coefficients, consumed by c2r
    fftw_plan fwd;          // rc -> scratch
    fftw_plan bwd;          // scratch -> ra

    explicit Impl(int degree) : N(degree), G(dealiased_grid_size(degree)), H(G / 2 + 1) {
        std::lock_guard<std::mutex> lock(plan_mutex());
        ra = fftw_alloc_real(static_cast<std::size_t>(G) * G);
        rb = fftw_alloc_real(static_cast<std::size_t>(G) * G);
        rc = fftw_alloc_real(static_cast<std::size_t>(G) * G);
        base = fftw_alloc_complex(static_cast<std::size_t>(G) * H);
        scratch = fftw_alloc_complex(static_cast<std::size_t>(G) * H);
        // FFTW_ESTIMATE keeps planning deterministic, so repeated runs are
        // bit-identical.
        fwd = fftw_plan_dft_r2c_2d(G, G, rc, scratch, FFTW_ESTIMATE);
        bwd = fftw_plan_dft_c2r_2d(G, G, scratch, ra, FFTW_ESTIMATE);
    }

    ~Impl() {
        std::lock_guard<std::mutex> lock(plan_mutex());
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
        fftw_free(ra);
        fftw_free(rb);
        fftw_free(rc);
        fftw_free(base);
        fftw_free(scratch);
    }

    std::size_t cidx(int p0, int p1) const {
        return static_cast<std::size_t>(p0) * H + static_cast<std::size_t>(p1);
    }

    // Real pair (a = sine coeff at +k, b = cosine coeff at -k) maps to the
    // exponential coefficient c(+k) = (b - i a) / (2 sqrt(2 pi^2)).
    void build_complex(const SpectralField& w, fftw_complex* out) const {
        std::memset(out, 0, sizeof(fftw_complex) * G * H);
        const double s = 0.5 * kBasisScale;
        for (int k2 = 0; k2 <= N; ++k2) {
            const int k1lo = (k2 == 0) ? 1 : -N;
            for (int k1 = k1lo; k1 <= N; ++k1) {
                const double a = w(k1, k2);
                const double b = w(-k1, -k2);
                if (a == 0.0 && b == 0.0) continue;
                const double re = s * b;
                const double im = -s * a;
                if (k2 > 0) {
                    const int p0 = (k1 >= 0) ? k1 : k1 + G;
                    out[cidx(p0, k2)][0] = re;
                    out[cidx(p0, k2)][1] = im;
                } else {
                    out[cidx(k1, 0)][0] = re;
                    out[cidx(k1, 0)][1] = im;
                    out[cidx(G - k1, 0)][0] = re;
                    out[cidx(G - k1, 0)][1] = -im;
                }
            }
        }
    }

    // out(k) = m(k1,k2) * in(k) over the occupied block, zero elsewhere.
    template <class Mult>
    void derive(const fftw_complex* in, fftw_complex* out, Mult m) const {
        std::memset(out, 0, sizeof(fftw_complex) * G * H);
        for (int k2 = 0; k2 <= N; ++k2) {
            for (int k1 = -N; k1 <= N; ++k1) {
                if (k1 == 0 && k2 == 0) continue;
                const int p0 = (k1 >= 0) ? k1 : k1 + G;
                const std::size_t i = cidx(p0, k2);
                const std::complex<double> c(in[i][0], in[i][1]);
                const std::complex<double> r = m(k1, k2) * c;
                out[i][0] = r.real();
                out[i][1] = r.imag();
            }
            if (k2 == 0) {
                // row 0 also stores the conjugate entries at p0 = G - k1
                for (int k1 = 1; k1 <= N; ++k1) {
                    const std::size_t i = cidx(G - k1, 0);
                    const std::complex<double> c(in[i][0], in[i][1]);
                    const std::complex<double> r = m(-k1, 0) * c;
                    out[i][0] = r.real();
                    out[i][1] = r.imag();
                }
            }
        }
    }

    void c2r(fftw_complex* in, double* out) { fftw_execute_dft_c2r(bwd, in, out); }
    void r2c(double* in, fftw_complex* out) { fftw_execute_dft_r2c(fwd, in, out); }

    void read_back(const fftw_complex* c, double scale, SpectralField& out) const {
        const double f = 2.0 * scale / kBasisScale;
        for (int k2 = 0; k2 <= N; ++k2) {
            const int k1lo = (k2 == 0) ? 1 : -N;
            for (int k1 = k1lo; k1 <= N; ++k1) {
                const int p0 = (k1 >= 0) ? k1 : k1 + G;
                const std::size_t i = cidx(p0, k2);
                out.set(k1, k2, -f * c[i][1]);
                out.set(-k1, -k2, f * c[i][0]);
            }
        }
    }
};

SpectralWorkspace::SpectralWorkspace(int degree)
    : impl_(std::make_unique<Impl>(degree)), degree_(degree), grid_(impl_->G) {}

SpectralWorkspace::~SpectralWorkspace() = default;

PhysicalGrid SpectralWorkspace::to_grid(const SpectralField& w) {
    if (w.degree() != degree_)
        throw std::invalid_argument("SpectralWorkspace::to_grid: degree mismatch");
    auto& im = *impl_;
    im.build_complex(w, im.scratch);
    im.c2r(im.scratch, im.ra);
    PhysicalGrid g;
    g.size = grid_;
    g.values.assign(im.ra, im.ra + static_cast<std::size_t>(grid_) * grid_);
    return g;
}

SpectralField SpectralWorkspace::from_grid(const PhysicalGrid& g) {
    if (g.size != grid_)
        throw std::invalid_argument("SpectralWorkspace::from_grid: grid size mismatch");
    auto& im = *impl_;
    std::memcpy(im.rc, g.values.data(), sizeof(double) * g.values.size());
    im.r2c(im.rc, im.scratch);
    SpectralField out(degree_);
    im.read_back(im.scratch, 1.0 / (static_cast<double>(grid_) * grid_), out);
    return out;
}

SpectralField SpectralWorkspace::nonlinear_term(const SpectralField& w) {
    if (w.degree() != degree_)
        throw std::invalid_argument("SpectralWorkspace::nonlinear_term: degree mismatch");
    auto& im = *impl_;
    const std::size_t npts = static_cast<std::size_t>(grid_) * grid_;
    using cd = std::complex<double>;
    const cd I(0.0, 1.0);

    im.build_complex(w, im.base);
    // u1 = d2 psi, psi = laplacian^{-1} w
    im.derive(im.base, im.scratch, [&](int k1, int k2) {
        return -I * (static_cast<double>(k2) / (k1 * k1 + k2 * k2));
    });
    im.c2r(im.scratch, im.ra);
    im.derive(im.base, im.scratch, [&](int k1, int k2) {
        (void)k2;
        return I * static_cast<double>(k1);
    });
    im.c2r(im.scratch, im.rb);
    for (std::size_t i = 0; i < npts; ++i) im.rc[i] = im.ra[i] * im.rb[i];

    // u2 = -d1 psi
    im.derive(im.base, im.scratch, [&](int k1, int k2) {
        return I * (static_cast<double>(k1) / (k1 * k1 + k2 * k2));
    });
    im.c2r(im.scratch, im.ra);
    im.derive(im.base, im.scratch, [&](int k1, int k2) {
        (void)k1;
        return I * static_cast<double>(k2);
    });
    im.c2r(im.scratch, im.rb);
    for (std::size_t i = 0; i < npts; ++i) im.rc[i] += im.ra[i] * im.rb[i];

    im.r2c(im.rc, im.scratch);
    SpectralField out(degree_);
    // B = -(u.grad)w, so negate the transform of (u.grad)w
    im.read_back(im.scratch, -1.0 / static_cast<double>(npts), out);
    return out;
}

double SpectralWorkspace::max_speed(const SpectralField& w) {
    if (w.degree() != degree_)
        throw std::invalid_argument("SpectralWorkspace::max_speed: degree mismatch");
    auto& im = *impl_;
    const std::size_t npts = static_cast<std::size_t>(grid_) * grid_;
    using cd = std::complex<double>;
    const cd I(0.0, 1.0);

    im.build_complex(w, im.base);
    im.derive(im.base, im.scratch, [&](int k1, int k2) {
        return -I * (static_cast<double>(k2) / (k1 * k1 + k2 * k2));
    });
    im.c2r(im.scratch, im.ra);
    im.derive(im.base, im.scratch, [&](int k1, int k2) {
        return I * (static_cast<double>(k1) / (k1 * k1 + k2 * k2));
    });
    im.c2r(im.scratch, im.rb);
    double m2 = 0.0;
    for (std::size_t i = 0; i < npts; ++i) {
        const double s2 = im.ra[i] * im.ra[i] + im.rb[i] * im.rb[i];
        if (s2 > m2) m2 = s2;
    }
    return std::sqrt(m2);
}

SpectralWorkspace& workspace_for(int degree) {
    thread_local std::map<int, std::unique_ptr<SpectralWorkspace>> cache;
    auto& slot = cache[degree];
    if (!slot) slot = std::make_unique<SpectralWorkspace>(degree);
    return *slot;
}

}  // namespace sns
