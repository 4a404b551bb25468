#include "sns/cubature.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "sns/errors.hpp"
#include "sns/grid.hpp"
#include "sns/reduce.hpp"
#include "sns/rng.hpp"
#include "sns/spectral_ops.hpp"

namespace sns {

namespace {

constexpr int kMaxMomentDegree = 5;
constexpr double kMomentTol = 1e-12;
constexpr double kRk4ImaginaryStability = 2.8;

int word_degree(std::span<const int> w) {
    int deg = static_cast<int>(w.size());
    for (int a : w)
        if (a == 0) ++deg;
    return deg;
}

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

}  // namespace

CubatureFormula degree3_formula(int dim) {
    if (dim < 1) throw std::invalid_argument("degree3_formula: dim must be >= 1");
    CubatureFormula f;
    f.dim = dim;
    f.order = 3;
    f.horizon = 1.0;
    const double z = std::sqrt(static_cast<double>(dim));
    for (int j = 0; j < dim; ++j) {
        for (int sign : {+1, -1}) {
            CubaturePath p;
            p.dim = dim;
            p.time = {0.0, 1.0};
            p.values.assign(2 * static_cast<std::size_t>(dim), 0.0);
            p.values[static_cast<std::size_t>(dim) + j] = sign * z;
            f.paths.push_back(std::move(p));
            f.weights.push_back(1.0 / (2.0 * dim));
        }
    }
    return f;
}

CubatureFormula scale_formula(const CubatureFormula& f, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("scale_formula: dt must be > 0");
    CubatureFormula out = f;
    out.horizon = f.horizon * dt;
    const double root = std::sqrt(dt);
    for (CubaturePath& p : out.paths) {
        for (double& t : p.time) t *= dt;
        for (double& v : p.values) v *= root;
    }
    return out;
}

double brownian_expected_iterated(std::span<const int> w) {
    if (word_degree(w) > kMaxMomentDegree)
        throw std::invalid_argument("brownian_expected_iterated: degree > 5 unsupported");
    // The expected signature of Brownian motion with time is
    // exp(e_0 + 1/2 sum_j e_j e_j): a word contributes iff it splits into
    // blocks that are either a single 0 or an adjacent equal pair.
    int i = 0;
    int blocks = 0;
    int pairs = 0;
    const int n = static_cast<int>(w.size());
    while (i < n) {
        if (w[i] == 0) {
            ++i;
            ++blocks;
        } else if (i + 1 < n && w[i + 1] == w[i]) {
            i += 2;
            ++blocks;
            ++pairs;
        } else {
            return 0.0;
        }
    }
    return std::pow(0.5, pairs) / factorial(blocks);
}

double iterated_path_integral(const CubaturePath& path, std::span<const int> w) {
    if (word_degree(w) > kMaxMomentDegree)
        throw std::invalid_argument("iterated_path_integral: degree > 5 unsupported");
    for (int a : w)
        if (a < 0 || a > path.dim)
            throw std::invalid_argument("iterated_path_integral: letter outside {0..d}");
    const int k = static_cast<int>(w.size());
    // Chen: the signature of a concatenation is the product of segment
    // signatures, and a linear segment with increment v has coefficient
    // prod(v)/k! on each word.  Track coefficients of the prefixes of w.
    std::vector<double> c(static_cast<std::size_t>(k) + 1, 0.0);
    c[0] = 1.0;
    std::vector<double> inc(static_cast<std::size_t>(path.dim) + 1, 0.0);
    for (int l = 0; l + 1 < path.breakpoints(); ++l) {
        for (int j = 0; j <= path.dim; ++j) inc[j] = path.omega(j, l + 1) - path.omega(j, l);
        for (int p = k; p >= 1; --p) {
            double add = 0.0;
            double prod = 1.0;
            for (int q = p - 1; q >= 0; --q) {
                prod *= inc[w[q]];
                add += c[q] * prod / factorial(p - q);
            }
            c[p] += add;
        }
    }
    return c[k];
}

namespace {

void enumerate_words(int dim, int order, const std::function<void(std::span<const int>)>& fn) {
    std::vector<int> word;
    const std::function<void(int)> rec = [&](int degree_left) {
        fn(word);
        if (static_cast<int>(word.size()) >= order) return;
        for (int a = 0; a <= dim; ++a) {
            const int cost = (a == 0) ? 2 : 1;
            if (cost > degree_left) continue;
            word.push_back(a);
            rec(degree_left - cost);
            word.pop_back();
        }
    };
    rec(order);
}

}  // namespace

ValidationReport validate_formula(const CubatureFormula& f) { return validate_formula(f, f.order); }

ValidationReport validate_formula(const CubatureFormula& f, int order) {
    if (order > kMaxMomentDegree)
        throw std::invalid_argument("validate_formula: reference moments available up to 5");
    ValidationReport rep;
    rep.order = order;
    enumerate_words(f.dim, order, [&](std::span<const int> w) {
        double got = 0.0;
        for (int i = 0; i < f.size(); ++i)
            got += f.weights[i] * iterated_path_integral(f.paths[i], w);
        const double scale = std::pow(f.horizon, 0.5 * word_degree(w));
        const double expected = brownian_expected_iterated(w) * scale;
        ++rep.checked;
        if (std::abs(got - expected) > kMomentTol) {
            rep.mismatches.push_back({std::vector<int>(w.begin(), w.end()), got, expected});
        }
    });
    rep.pass = rep.mismatches.empty();
    return rep;
}

bool is_symmetric(const CubatureFormula& f) {
    const int M = f.size();
    std::vector<bool> used(M, false);
    const double tol = 1e-12;
    for (int i = 0; i < M; ++i) {
        if (used[i]) continue;
        auto ei = f.paths[i].endpoint();
        bool self = true;
        for (double v : ei)
            if (std::abs(v) > tol) self = false;
        if (self) {
            used[i] = true;
            continue;
        }
        int partner = -1;
        for (int j = 0; j < M; ++j) {
            if (used[j] || j == i) continue;
            if (std::abs(f.weights[i] - f.weights[j]) > tol) continue;
            auto ej = f.paths[j].endpoint();
            bool neg = true;
            for (int c = 0; c < f.dim; ++c)
                if (std::abs(ei[c] + ej[c]) > tol) neg = false;
            if (neg) {
                partner = j;
                break;
            }
        }
        if (partner < 0) return false;
        used[i] = used[partner] = true;
    }
    return true;
}

CubatureFormula symmetrize(const CubatureFormula& f) {
    CubatureFormula out;
    out.dim = f.dim;
    out.order = f.order;
    out.horizon = f.horizon;
    for (int i = 0; i < f.size(); ++i) {
        CubaturePath refl = f.paths[i];
        for (double& v : refl.values) v = -v;
        out.paths.push_back(f.paths[i]);
        out.weights.push_back(0.5 * f.weights[i]);
        out.paths.push_back(std::move(refl));
        out.weights.push_back(0.5 * f.weights[i]);
    }
    return out;
}

CubatureFormula load_formula(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("load_formula: cannot open '" + file + "'");
    CubatureFormula f;
    std::string line;
    int npaths = -1;
    auto next_tokens = [&](std::istringstream& row) {
        while (std::getline(in, line)) {
            const auto pos = line.find_first_not_of(" \t\r");
            if (pos == std::string::npos || line[pos] == '#') continue;
            row.clear();
            row.str(line);
            return true;
        }
        return false;
    };
    std::istringstream row;
    auto expect_kv = [&](const std::string& key) {
        if (!next_tokens(row)) throw std::runtime_error("load_formula: unexpected end of file");
        std::string k;
        long v;
        if (!(row >> k >> v) || k != key)
            throw std::runtime_error("load_formula: expected '" + key + " <value>', got '" +
                                     line + "'");
        return v;
    };
    f.dim = static_cast<int>(expect_kv("d"));
    f.order = static_cast<int>(expect_kv("m"));
    npaths = static_cast<int>(expect_kv("paths"));
    if (f.dim < 1 || npaths < 1 || f.order < 1)
        throw std::runtime_error("load_formula: invalid header values");
    for (int i = 0; i < npaths; ++i) {
        if (!next_tokens(row)) throw std::runtime_error("load_formula: missing path record");
        std::string tag;
        double weight;
        int L;
        if (!(row >> tag >> weight >> L) || tag != "path")
            throw std::runtime_error("load_formula: expected 'path <weight> <breakpoints>'");
        if (!(weight > 0.0) || L < 2)
            throw std::runtime_error("load_formula: path " + std::to_string(i) +
                                     ": weight must be > 0 and breakpoints >= 2");
        CubaturePath p;
        p.dim = f.dim;
        p.time.resize(L);
        p.values.resize(static_cast<std::size_t>(L) * f.dim);
        for (int l = 0; l < L; ++l) {
            if (!next_tokens(row)) throw std::runtime_error("load_formula: missing breakpoint row");
            if (!(row >> p.time[l]))
                throw std::runtime_error("load_formula: bad breakpoint time");
            for (int c = 0; c < f.dim; ++c)
                if (!(row >> p.values[static_cast<std::size_t>(l) * f.dim + c]))
                    throw std::runtime_error("load_formula: breakpoint row needs d values");
        }
        if (std::abs(p.time.front()) > 1e-12 || std::abs(p.time.back() - 1.0) > 1e-12)
            throw std::runtime_error("load_formula: breakpoints must run from 0 to 1");
        for (int l = 0; l + 1 < L; ++l)
            if (!(p.time[l + 1] > p.time[l]))
                throw std::runtime_error("load_formula: breakpoints must increase");
        for (int c = 0; c < f.dim; ++c)
            if (std::abs(p.values[c]) > 1e-12)
                throw std::runtime_error("load_formula: omega(0) must vanish");
        f.paths.push_back(std::move(p));
        f.weights.push_back(weight);
    }
    return f;
}

void save_formula(const CubatureFormula& f, const std::string& file) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("save_formula: cannot open '" + file + "'");
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    out << "d " << f.dim << "\nm " << f.order << "\npaths " << f.size() << "\n";
    for (int i = 0; i < f.size(); ++i) {
        const CubaturePath& p = f.paths[i];
        out << "path " << num(f.weights[i]) << " " << p.breakpoints() << "\n";
        for (int l = 0; l < p.breakpoints(); ++l) {
            out << num(p.time[l]);
            for (int c = 0; c < f.dim; ++c)
                out << " " << num(p.values[static_cast<std::size_t>(l) * f.dim + c]);
            out << "\n";
        }
    }
}

// Integrates dw/ds = nu Lap w + pi_N B(Kw,w) + g along one dt-scaled path.
// The forcing slope is constant on each linear segment.
SpectralField cubature_branch_step(const SpectralField& w0, double dt, const CubaturePath& path,
                                   const FlowConfig& cfg, const ForcingConfig& forcing,
                                   int branch_index) {
    SpectralField w = w0;
    SpectralWorkspace& ws = workspace_for(w.degree());
    const int N = w.degree();
    const double root_dt = std::sqrt(dt);

    for (int l = 0; l + 1 < path.breakpoints(); ++l) {
        const double sa = path.time[l] * dt;
        const double sb = path.time[l + 1] * dt;
        const double span = sb - sa;
        if (!(span > 0.0)) continue;

        SpectralField g(N);
        for (int j = 0; j < forcing.dimension(); ++j) {
            const double dwj = path.omega(j + 1, l + 1) - path.omega(j + 1, l);
            g.add(forcing.modes[j].k.k1, forcing.modes[j].k.k2,
                  forcing.modes[j].amplitude * root_dt * dwj / span);
        }
        auto rhs = [&](const SpectralField& v) {
            SpectralField r = ws.nonlinear_term(v);
            for (int k2 = -N; k2 <= N; ++k2)
                for (int k1 = -N; k1 <= N; ++k1) {
                    if (k1 == 0 && k2 == 0) continue;
                    r.add(k1, k2, -cfg.nu * (k1 * k1 + k2 * k2) * v(k1, k2));
                }
            r += g;
            return r;
        };

        int substeps = 1;
        const double advect = cfg.degree * ws.max_speed(w);
        if (advect > 0.0) {
            const double hmax = kRk4ImaginaryStability * cfg.cfl_safety / advect;
            substeps = std::max(1, static_cast<int>(std::ceil(span / hmax)));
        }
        const double h = span / substeps;
        SpectralField acc(N), tmp(N);
        for (int s = 0; s < substeps; ++s) {
            SpectralField k = rhs(w);
            acc = w;
            acc.axpy(h / 6.0, k);
            tmp = w;
            tmp.axpy(0.5 * h, k);
            k = rhs(tmp);
            acc.axpy(h / 3.0, k);
            tmp = w;
            tmp.axpy(0.5 * h, k);
            k = rhs(tmp);
            acc.axpy(h / 3.0, k);
            tmp = w;
            tmp.axpy(h, k);
            k = rhs(tmp);
            acc.axpy(h / 6.0, k);
            w = acc;
            if (!w.finite())
                throw BlowUpError("cubature branch " + std::to_string(branch_index) +
                                      ": non-finite state in segment " + std::to_string(l + 1) +
                                      " substep " + std::to_string(s + 1),
                                  s + 1);
        }
    }
    return w;
}

std::vector<WeightedState> cubature_weak_step(const SpectralField& w, double dt,
                                              const CubatureFormula& formula,
                                              const FlowConfig& cfg,
                                              const ForcingConfig& forcing) {
    if (!(dt > 0.0)) throw std::invalid_argument("cubature_weak_step: dt must be > 0");
    if (formula.dim != forcing.dimension())
        throw std::invalid_argument("cubature_weak_step: formula dimension " +
                                    std::to_string(formula.dim) + " != forcing dimension " +
                                    std::to_string(forcing.dimension()));
    if (!is_symmetric(formula))
        throw std::invalid_argument("cubature_weak_step: formula must be symmetric");
    std::vector<WeightedState> out;
    out.reserve(formula.size());
    for (int i = 0; i < formula.size(); ++i)
        out.push_back({formula.weights[i],
                       cubature_branch_step(w, dt, formula.paths[i], cfg, forcing, i)});
    return out;
}

double cubature_estimate(const SpectralField& w0, double horizon, int steps,
                         const CubatureFormula& formula,
                         const std::function<double(const SpectralField&)>& functional,
                         const FlowConfig& cfg, const ForcingConfig& forcing,
                         const CubatureEstimateOptions& opts) {
    if (opts.budget < 1) throw std::invalid_argument("cubature_estimate: budget must be >= 1");
    if (steps < 1) throw std::invalid_argument("cubature_estimate: steps must be >= 1");
    if (!is_symmetric(formula))
        throw std::invalid_argument("cubature_estimate: formula must be symmetric");
    if (!opts.skip_validation) {
        const ValidationReport rep = validate_formula(formula);
        if (!rep.pass)
            throw std::invalid_argument("cubature_estimate: formula fails moment validation (" +
                                        std::to_string(rep.mismatches.size()) + " mismatches)");
    }

    const double dt = horizon / steps;
    const int M = formula.size();

    // full tree when M^steps fits the budget
    double tree = 1.0;
    bool full = !opts.force_sampling;
    for (int s = 0; s < steps && full; ++s) {
        tree *= M;
        if (tree > static_cast<double>(opts.budget)) full = false;
    }

    if (full) {
        double acc = 0.0;
        const std::function<void(const SpectralField&, int, double)> expand =
            [&](const SpectralField& w, int depth, double weight) {
                if (depth == steps) {
                    acc += weight * functional(w);
                    return;
                }
                for (int i = 0; i < M; ++i)
                    expand(cubature_branch_step(w, dt, formula.paths[i], cfg, forcing, i),
                           depth + 1, weight * formula.weights[i]);
            };
        expand(w0, 0, 1.0);
        return acc;
    }

    // weight-proportional branch sampling, averaged over `budget` trajectories
    std::vector<double> cumw(M);
    double c = 0.0;
    for (int i = 0; i < M; ++i) {
        c += formula.weights[i];
        cumw[i] = c;
    }
    const std::uint64_t n = opts.budget;
    std::vector<double> values(n, 0.0);
    const int workers = std::max(1, opts.workers);
    std::atomic<std::uint64_t> cursor{0};
    std::atomic<bool> failed{false};
    std::string error_msg;
    std::mutex error_mutex;

    auto run = [&]() {
        constexpr std::uint64_t kChunk = 16;
        while (!failed.load(std::memory_order_relaxed)) {
            const std::uint64_t begin = cursor.fetch_add(kChunk);
            if (begin >= n) break;
            const std::uint64_t end = std::min(begin + kChunk, n);
            for (std::uint64_t t = begin; t < end; ++t) {
                try {
                    std::uint64_t state = opts.seed ^ (0x9e3779b97f4a7c15ull * (t + 1));
                    SpectralField w = w0;
                    for (int s = 0; s < steps; ++s) {
                        const double u = splitmix_uniform(state);
                        int pick = static_cast<int>(
                            std::lower_bound(cumw.begin(), cumw.end(), u * c) - cumw.begin());
                        if (pick >= M) pick = M - 1;
                        w = cubature_branch_step(w, dt, formula.paths[pick], cfg, forcing, pick);
                    }
                    values[t] = functional(w);
                } catch (const std::exception& e) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    failed = true;
                    if (error_msg.empty())
                        error_msg = std::string(e.what()) + " [cubature trajectory " +
                                    std::to_string(t) + "]";
                    return;
                }
            }
        }
    };

    if (workers == 1) {
        run();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < workers; ++i) pool.emplace_back(run);
        for (auto& th : pool) th.join();
    }
    if (failed) throw std::runtime_error(error_msg);

    return pairwise_sum(values) / static_cast<double>(n);
}

}  // namespace sns
