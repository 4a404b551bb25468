#include "sns/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "sns/cubature.hpp"
#include "sns/errors.hpp"
#include "sns/reduce.hpp"
#include "sns/rng.hpp"
#include "sns/sobol.hpp"

#ifndef SNS_DIRECTION_FILE_DEFAULT
#define SNS_DIRECTION_FILE_DEFAULT "data/new-joe-kuo-6.4200"
#endif

namespace sns {

namespace {

constexpr double kInvSqrt2 = 0.7071067811865476;

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_short(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::vector<double> evaluate_functionals(const SpectralField& w, const FunctionalSpec& fs) {
    std::vector<double> out;
    out.reserve(fs.count());
    for (double s : fs.norm_exponents) out.push_back(sobolev_norm(w, s));
    if (fs.psi_eta) {
        const double n0 = sobolev_norm(w, 0.0);
        out.push_back(std::exp(*fs.psi_eta * n0 * n0));
    }
    return out;
}

ForcingConfig effective_forcing(const ExperimentConfig& cfg) {
    const double scale =
        (cfg.forcing_convention == ForcingInterpretation::pair) ? kInvSqrt2 : 1.0;
    ForcingConfig f;
    f.modes.reserve(cfg.forcing.size());
    for (const ForcedMode& m : cfg.forcing) f.modes.push_back({m.k, m.amplitude * scale});
    return f;
}

void check_config(const ExperimentConfig& cfg) {
    if (cfg.degree < 1) throw std::invalid_argument("ExperimentConfig: N must be >= 1");
    if (cfg.steps < 1) throw std::invalid_argument("ExperimentConfig: n must be >= 1");
    if (!(cfg.horizon > 0.0)) throw std::invalid_argument("ExperimentConfig: T must be > 0");
    if (cfg.paths < 1) throw std::invalid_argument("ExperimentConfig: K must be >= 1");
    for (const ForcedMode& m : cfg.forcing)
        if (m.k.zero() || m.k.degree() > cfg.degree)
            throw std::invalid_argument("ExperimentConfig: forced mode (" +
                                        std::to_string(m.k.k1) + "," + std::to_string(m.k.k2) +
                                        ") outside H_" + std::to_string(cfg.degree));
    if (cfg.reference &&
        static_cast<int>(cfg.reference->size()) != cfg.functionals.count())
        throw std::invalid_argument(
            "ExperimentConfig: reference must supply one value per functional");
}

// Runs fn(path_index) for every index in [0, count) on `workers` threads.
// Per-path outputs land in caller-owned slots, so scheduling cannot change
// the result.  The first exception aborts the pool and is rethrown.
template <class Fn>
void parallel_paths(std::uint64_t count, int workers, Fn&& fn) {
    std::atomic<std::uint64_t> cursor{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto body = [&]() {
        constexpr std::uint64_t kChunk = 8;
        while (!failed.load(std::memory_order_relaxed)) {
            const std::uint64_t begin = cursor.fetch_add(kChunk);
            if (begin >= count) return;
            const std::uint64_t end = std::min(begin + kChunk, count);
            for (std::uint64_t k = begin; k < end; ++k) {
                try {
                    fn(k);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    failed = true;
                    return;
                }
            }
        }
    };
    if (workers <= 1) {
        body();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int i = 0; i < workers; ++i) pool.emplace_back(body);
        for (auto& t : pool) t.join();
    }
    if (error) std::rethrow_exception(error);
}

}  // namespace

std::vector<std::string> FunctionalSpec::names() const {
    std::vector<std::string> out;
    for (double s : norm_exponents) {
        if (s == 0.0) {
            out.push_back("norm_0");
        } else {
            char buf[32];
            std::snprintf(buf, sizeof buf, "norm_%s%g", s < 0 ? "m" : "p", std::abs(s));
            out.push_back(buf);
        }
    }
    if (psi_eta) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "psi_%g", *psi_eta);
        out.push_back(buf);
    }
    return out;
}

std::vector<ForcedMode> ExperimentConfig::default_forcing() {
    return {{{1, 0}, 1.0}, {{-1, 0}, 1.0}, {{1, 1}, 1.0}, {{-1, -1}, 1.0}};
}

std::string default_direction_file() { return SNS_DIRECTION_FILE_DEFAULT; }

std::string scheme_name(EstimatorScheme s) {
    switch (s) {
        case EstimatorScheme::strang: return "strang";
        case EstimatorScheme::lie: return "lie";
        case EstimatorScheme::swss: return "swss";
        case EstimatorScheme::cubature3: return "cubature3";
    }
    return "?";
}

EstimatorScheme scheme_from_name(const std::string& name) {
    if (name == "strang") return EstimatorScheme::strang;
    if (name == "lie") return EstimatorScheme::lie;
    if (name == "swss") return EstimatorScheme::swss;
    if (name == "cubature3") return EstimatorScheme::cubature3;
    throw std::invalid_argument("unknown scheme '" + name + "'");
}

std::string axis_name(StudyAxis a) {
    switch (a) {
        case StudyAxis::timesteps: return "timesteps";
        case StudyAxis::modes: return "modes";
        case StudyAxis::paths: return "paths";
    }
    return "?";
}

StudyAxis axis_from_name(const std::string& name) {
    if (name == "timesteps") return StudyAxis::timesteps;
    if (name == "modes") return StudyAxis::modes;
    if (name == "paths") return StudyAxis::paths;
    throw std::invalid_argument("unknown study axis '" + name + "'");
}

EstimateResult run_estimate(const ExperimentConfig& cfg) {
    check_config(cfg);
    const auto t0 = std::chrono::steady_clock::now();

    const int d = static_cast<int>(cfg.forcing.size());
    const int F = cfg.functionals.count();
    const std::uint64_t K = cfg.paths;
    const int workers =
        cfg.workers > 0 ? cfg.workers
                        : std::max(1u, std::thread::hardware_concurrency());

    const FlowConfig flow{cfg.nu, cfg.epsilon, cfg.degree, cfg.cfl_safety};
    const ForcingConfig forcing = effective_forcing(cfg);
    const SpectralField w0(cfg.degree);

    std::vector<std::vector<double>> columns(F, std::vector<double>(K, 0.0));
    std::string metadata = "scheme=" + scheme_name(cfg.scheme) +
                           ";substep_rule=N*max|Kw|*h<=2.8*" + format_short(cfg.cfl_safety);

    if (cfg.scheme == EstimatorScheme::cubature3) {
        const CubatureFormula formula = degree3_formula(d);
        const ValidationReport rep = validate_formula(formula);
        if (!rep.pass) throw std::runtime_error("run_estimate: degree-3 formula failed validation");
        const double dt = cfg.horizon / cfg.steps;
        metadata += ";cubature=degree3,sampled,seed=" + std::to_string(cfg.cubature_seed);
        std::vector<double> cumw(formula.size());
        double csum = 0.0;
        for (int i = 0; i < formula.size(); ++i) {
            csum += formula.weights[i];
            cumw[i] = csum;
        }
        parallel_paths(K, workers, [&](std::uint64_t k) {
            std::uint64_t state = cfg.cubature_seed ^ (0x9e3779b97f4a7c15ull * (k + 1));
            SpectralField w = w0;
            for (int s = 0; s < cfg.steps; ++s) {
                const double u = splitmix_uniform(state);
                int pick = static_cast<int>(
                    std::lower_bound(cumw.begin(), cumw.end(), u * csum) - cumw.begin());
                if (pick >= formula.size()) pick = formula.size() - 1;
                try {
                    w = cubature_branch_step(w, dt, formula.paths[pick], flow, forcing, pick);
                } catch (const BlowUpError& e) {
                    throw BlowUpError("path " + std::to_string(k) + " step " +
                                          std::to_string(s + 1) + ": " + e.what(),
                                      s + 1, static_cast<long>(k));
                }
            }
            const std::vector<double> vals = evaluate_functionals(w, cfg.functionals);
            for (int f = 0; f < F; ++f) columns[f][k] = vals[f];
        });
    } else {
        const std::string dir_file =
            cfg.direction_file.empty() ? default_direction_file() : cfg.direction_file;
        const SobolStream stream(cfg.steps * d + 1, dir_file);
        metadata += std::string(";qmc_layout=") +
                    (cfg.qmc_construction == DrawConstruction::bridge ? "bridge"
                                                                      : "step-major") +
                    ",skip-zero-point,bernoulli=last;D=" + std::to_string(cfg.steps * d + 1);
        SchemeSpec spec;
        spec.kind = cfg.scheme == EstimatorScheme::strang  ? SchemeKind::strang
                    : cfg.scheme == EstimatorScheme::lie   ? SchemeKind::lie
                                                           : SchemeKind::swss;
        spec.steps = cfg.steps;
        spec.horizon = cfg.horizon;
        spec.redraw_per_step = cfg.swss_redraw_per_step;
        parallel_paths(K, workers, [&](std::uint64_t k) {
            const PathDraws draws = path_draws(stream, k, cfg.steps, d, cfg.qmc_construction);
            SpectralField w(cfg.degree);
            try {
                w = scheme_trajectory(w0, spec, draws, flow, forcing);
            } catch (const BlowUpError& e) {
                throw BlowUpError("path " + std::to_string(k) + ": " + e.what(), e.step(),
                                  static_cast<long>(k));
            }
            const std::vector<double> vals = evaluate_functionals(w, cfg.functionals);
            for (int f = 0; f < F; ++f) columns[f][k] = vals[f];
        });
    }

    EstimateResult res;
    res.functional_names = cfg.functionals.names();
    res.estimates.resize(F);
    for (int f = 0; f < F; ++f)
        res.estimates[f] = pairwise_sum(columns[f]) / static_cast<double>(K);
    res.paths = K;
    res.metadata = metadata;
    if (cfg.reference) {
        std::vector<double> rel(F);
        for (int f = 0; f < F; ++f)
            rel[f] = std::abs(res.estimates[f] - (*cfg.reference)[f]) /
                     std::abs((*cfg.reference)[f]);
        res.relative_errors = rel;
    }
    res.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

StudyResult convergence_study(const ExperimentConfig& cfg, StudyAxis axis,
                              const std::vector<std::uint64_t>& grid) {
    if (grid.empty()) throw std::invalid_argument("convergence_study: empty grid");
    if (!std::is_sorted(grid.begin(), grid.end()))
        throw std::invalid_argument("convergence_study: grid must be sorted ascending");

    StudyResult study;
    study.axis = axis;
    study.base = cfg;
    study.functional_names = cfg.functionals.names();
    study.axis_values = grid;

    for (std::uint64_t v : grid) {
        ExperimentConfig run = cfg;
        switch (axis) {
            case StudyAxis::timesteps: run.steps = static_cast<int>(v); break;
            case StudyAxis::modes: run.degree = static_cast<int>(v); break;
            case StudyAxis::paths: run.paths = v; break;
        }
        study.results.push_back(run_estimate(run));
    }

    const int F = cfg.functionals.count();
    const std::vector<double> reference =
        cfg.reference ? *cfg.reference : study.results.back().estimates;
    for (const EstimateResult& r : study.results) {
        std::vector<double> rel(F);
        for (int f = 0; f < F; ++f)
            rel[f] = std::abs(r.estimates[f] - reference[f]) / std::abs(reference[f]);
        study.relative_errors.push_back(std::move(rel));
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < study.results.size(); ++i) {
        std::vector<double> ratio(F, nan);
        if (i > 0) {
            for (int f = 0; f < F; ++f) {
                const double prev = study.relative_errors[i - 1][f];
                const double cur = study.relative_errors[i][f];
                if (prev > 0.0 && cur > 0.0) ratio[f] = std::log2(prev / cur);
            }
        }
        study.log2_ratios.push_back(std::move(ratio));
    }
    return study;
}

namespace {

void write_csv_rows(std::ofstream& out, const ExperimentConfig& base, StudyAxis axis,
                    bool with_axis, const std::vector<std::string>& names,
                    const std::vector<std::uint64_t>& axis_values,
                    const std::vector<EstimateResult>& results,
                    const std::vector<std::vector<double>>* rel_errors,
                    const std::vector<std::vector<double>>* ratios) {
    if (with_axis) out << axis_name(axis) << ",";
    for (const auto& n : names) out << n << "_est,";
    for (const auto& n : names) out << n << "_relerr,";
    if (ratios)
        for (const auto& n : names) out << n << "_log2ratio,";
    out << "nu,epsilon,N,n,T,K,scheme,forcing_convention,workers,wall_seconds,metadata\n";

    for (std::size_t i = 0; i < results.size(); ++i) {
        ExperimentConfig run = base;
        if (with_axis) {
            switch (axis) {
                case StudyAxis::timesteps: run.steps = static_cast<int>(axis_values[i]); break;
                case StudyAxis::modes: run.degree = static_cast<int>(axis_values[i]); break;
                case StudyAxis::paths: run.paths = axis_values[i]; break;
            }
            out << axis_values[i] << ",";
        }
        const EstimateResult& r = results[i];
        for (double v : r.estimates) out << format_double(v) << ",";
        const int F = static_cast<int>(names.size());
        for (int f = 0; f < F; ++f) {
            if (rel_errors) {
                out << format_double((*rel_errors)[i][f]) << ",";
            } else if (r.relative_errors) {
                out << format_double((*r.relative_errors)[f]) << ",";
            } else {
                out << "nan,";
            }
        }
        if (ratios)
            for (int f = 0; f < F; ++f) out << format_double((*ratios)[i][f]) << ",";
        out << format_double(run.nu) << "," << format_double(run.epsilon) << "," << run.degree
            << "," << run.steps << "," << format_double(run.horizon) << "," << run.paths << ","
            << scheme_name(run.scheme) << ","
            << (run.forcing_convention == ForcingInterpretation::pair ? "pair" : "orthonormal")
            << "," << run.workers << "," << format_double(r.wall_seconds) << "," << r.metadata
            << "\n";
    }
}

std::ofstream open_csv(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("emit_csv: cannot open '" + path + "' for writing");
    return out;
}

}  // namespace

void emit_csv(const StudyResult& study, const std::string& path) {
    std::ofstream out = open_csv(path);
    write_csv_rows(out, study.base, study.axis, true, study.functional_names, study.axis_values,
                   study.results, &study.relative_errors, &study.log2_ratios);
    if (!out) throw std::runtime_error("emit_csv: write to '" + path + "' failed");
}

void emit_csv(const ExperimentConfig& cfg, const EstimateResult& r, const std::string& path) {
    std::ofstream out = open_csv(path);
    write_csv_rows(out, cfg, StudyAxis::timesteps, false, r.functional_names, {}, {r}, nullptr,
                   nullptr);
    if (!out) throw std::runtime_error("emit_csv: write to '" + path + "' failed");
}

}  // namespace sns
