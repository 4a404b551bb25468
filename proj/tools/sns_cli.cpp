// Command-line front end: QMC path-ensemble estimates of vorticity
// functionals, convergence studies, cubature file validation, and the
// built-in self test.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sns/cubature.hpp"
#include "sns/errors.hpp"
#include "sns/harness.hpp"
#include "sns/selftest.hpp"

namespace {

using nlohmann::json;

sns::ExperimentConfig config_from_json(const json& j) {
    sns::ExperimentConfig cfg;
    if (j.contains("nu")) cfg.nu = j["nu"].get<double>();
    if (j.contains("epsilon")) cfg.epsilon = j["epsilon"].get<double>();
    if (j.contains("N")) cfg.degree = j["N"].get<int>();
    if (j.contains("n")) cfg.steps = j["n"].get<int>();
    if (j.contains("T")) cfg.horizon = j["T"].get<double>();
    if (j.contains("K")) cfg.paths = j["K"].get<std::uint64_t>();
    if (j.contains("scheme")) cfg.scheme = sns::scheme_from_name(j["scheme"].get<std::string>());
    if (j.contains("forcing")) {
        cfg.forcing.clear();
        for (const auto& m : j["forcing"]) {
            sns::ForcedMode fm;
            fm.k = {m["k"][0].get<int>(), m["k"][1].get<int>()};
            fm.amplitude = m.value("q", 1.0);
            cfg.forcing.push_back(fm);
        }
    }
    if (j.contains("forcing_convention")) {
        const std::string c = j["forcing_convention"].get<std::string>();
        if (c == "pair")
            cfg.forcing_convention = sns::ForcingInterpretation::pair;
        else if (c == "orthonormal")
            cfg.forcing_convention = sns::ForcingInterpretation::orthonormal;
        else
            throw std::invalid_argument("forcing_convention must be 'pair' or 'orthonormal'");
    }
    if (j.contains("functionals")) {
        const auto& f = j["functionals"];
        if (f.contains("norm_exponents"))
            cfg.functionals.norm_exponents = f["norm_exponents"].get<std::vector<double>>();
        if (f.contains("psi_eta") && !f["psi_eta"].is_null())
            cfg.functionals.psi_eta = f["psi_eta"].get<double>();
    }
    if (j.contains("reference") && !j["reference"].is_null())
        cfg.reference = j["reference"].get<std::vector<double>>();
    if (j.contains("output")) cfg.output_path = j["output"].get<std::string>();
    if (j.contains("workers")) cfg.workers = j["workers"].get<int>();
    if (j.contains("cfl_safety")) cfg.cfl_safety = j["cfl_safety"].get<double>();
    if (j.contains("direction_file")) cfg.direction_file = j["direction_file"].get<std::string>();
    if (j.contains("swss_redraw_per_step"))
        cfg.swss_redraw_per_step = j["swss_redraw_per_step"].get<bool>();
    if (j.contains("qmc_construction")) {
        const std::string c = j["qmc_construction"].get<std::string>();
        if (c == "bridge")
            cfg.qmc_construction = sns::DrawConstruction::bridge;
        else if (c == "increments")
            cfg.qmc_construction = sns::DrawConstruction::increments;
        else
            throw std::invalid_argument("qmc_construction must be 'bridge' or 'increments'");
    }
    return cfg;
}

void print_result(const sns::ExperimentConfig& cfg, const sns::EstimateResult& r) {
    std::printf("scheme=%s N=%d n=%d T=%g K=%llu\n", sns::scheme_name(cfg.scheme).c_str(),
                cfg.degree, cfg.steps, cfg.horizon, static_cast<unsigned long long>(r.paths));
    for (std::size_t f = 0; f < r.estimates.size(); ++f) {
        std::printf("  %-12s = %.15g", r.functional_names[f].c_str(), r.estimates[f]);
        if (r.relative_errors) std::printf("   (rel err %.3e)", (*r.relative_errors)[f]);
        std::printf("\n");
    }
    std::printf("  wall: %.2f s   [%s]\n", r.wall_seconds, r.metadata.c_str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Weak-approximation experiments for 2D stochastic vorticity dynamics"};
    app.require_subcommand(1);

    std::string config_path;
    std::string scheme;
    std::string output;
    std::string direction_file;
    std::string reference_csv;
    std::string qmc_construction;
    double nu = -1.0, epsilon = -1.0, horizon = -1.0, cfl = -1.0, psi_eta = -1.0;
    long long N = -1, n = -1, K = -1, workers = -1;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON config file (flags take precedence)");
        cmd->add_option("--nu", nu, "viscosity");
        cmd->add_option("--epsilon", epsilon, "split fraction in (0,1]");
        cmd->add_option("--N", N, "truncation degree");
        cmd->add_option("--n", n, "time steps");
        cmd->add_option("--T", horizon, "time horizon");
        cmd->add_option("--K", K, "number of QMC paths");
        cmd->add_option("--scheme", scheme, "strang | lie | swss | cubature3");
        cmd->add_option("--workers", workers, "worker threads (0 = all cores)");
        cmd->add_option("--out", output, "CSV output path");
        cmd->add_option("--cfl-safety", cfl, "CFL safety factor in (0,1]");
        cmd->add_option("--psi-eta", psi_eta, "also estimate E[exp(eta ||w||^2)]");
        cmd->add_option("--reference", reference_csv,
                        "comma-separated reference values, one per functional");
        cmd->add_option("--directions", direction_file, "Joe-Kuo direction number file");
        cmd->add_option("--qmc", qmc_construction, "bridge | increments");
    };

    CLI::App* estimate = app.add_subcommand("estimate", "QMC estimate of the functionals");
    add_common(estimate);

    CLI::App* study = app.add_subcommand("study", "convergence study along one axis");
    add_common(study);
    std::string axis;
    std::string grid_csv;
    study->add_option("--axis", axis, "timesteps | modes | paths")->required();
    study->add_option("--grid", grid_csv, "comma-separated ascending grid values")->required();

    CLI::App* validate = app.add_subcommand("validate-cubature", "check a cubature formula file");
    std::string formula_file;
    int validate_order = 0;
    validate->add_option("file", formula_file, "formula file")->required();
    validate->add_option("--order", validate_order, "validate at this order instead");

    CLI::App* selftest = app.add_subcommand("selftest", "run the built-in property checks");
    selftest->add_option("--directions", direction_file, "Joe-Kuo direction number file");
    selftest->add_option("--workers", workers, "worker threads");

    CLI11_PARSE(app, argc, argv);

    try {
        if (selftest->parsed()) {
            sns::PropertySuiteOptions opts;
            opts.direction_file = direction_file;
            opts.workers = workers > 0 ? static_cast<int>(workers) : 0;
            const auto results = sns::run_property_suite(opts);
            for (const auto& r : results)
                std::printf("[%s] %-28s %s (%.2f s)\n", r.pass ? "PASS" : "FAIL", r.name.c_str(),
                            r.detail.c_str(), r.seconds);
            return sns::all_pass(results) ? 0 : 2;
        }

        if (validate->parsed()) {
            const sns::CubatureFormula f = sns::load_formula(formula_file);
            const sns::ValidationReport rep = validate_order > 0
                                                  ? sns::validate_formula(f, validate_order)
                                                  : sns::validate_formula(f);
            std::printf("formula: d=%d m=%d paths=%d symmetric=%s\n", f.dim, f.order, f.size(),
                        sns::is_symmetric(f) ? "yes" : "no");
            std::printf("moments checked: %d at order %d\n", rep.checked, rep.order);
            for (const auto& mm : rep.mismatches) {
                std::string w = "(";
                for (std::size_t i = 0; i < mm.multi_index.size(); ++i)
                    w += (i ? "," : "") + std::to_string(mm.multi_index[i]);
                w += ")";
                std::printf("  mismatch %-16s got %.15g expected %.15g\n", w.c_str(), mm.got,
                            mm.expected);
            }
            std::printf(rep.pass ? "VALID\n" : "INVALID\n");
            return rep.pass ? 0 : 2;
        }

        sns::ExperimentConfig cfg;
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw std::runtime_error("cannot open config file '" + config_path + "'");
            cfg = config_from_json(json::parse(in));
        }
        if (nu >= 0.0) cfg.nu = nu;
        if (epsilon > 0.0) cfg.epsilon = epsilon;
        if (N > 0) cfg.degree = static_cast<int>(N);
        if (n > 0) cfg.steps = static_cast<int>(n);
        if (horizon > 0.0) cfg.horizon = horizon;
        if (K > 0) cfg.paths = static_cast<std::uint64_t>(K);
        if (!scheme.empty()) cfg.scheme = sns::scheme_from_name(scheme);
        if (workers >= 0) cfg.workers = static_cast<int>(workers);
        if (!output.empty()) cfg.output_path = output;
        if (cfl > 0.0) cfg.cfl_safety = cfl;
        if (psi_eta > 0.0) cfg.functionals.psi_eta = psi_eta;
        if (!direction_file.empty()) cfg.direction_file = direction_file;
        if (!qmc_construction.empty()) {
            if (qmc_construction == "bridge")
                cfg.qmc_construction = sns::DrawConstruction::bridge;
            else if (qmc_construction == "increments")
                cfg.qmc_construction = sns::DrawConstruction::increments;
            else
                throw std::invalid_argument("--qmc must be 'bridge' or 'increments'");
        }
        if (!reference_csv.empty()) {
            std::vector<double> ref;
            std::stringstream ss(reference_csv);
            std::string tok;
            while (std::getline(ss, tok, ',')) ref.push_back(std::stod(tok));
            cfg.reference = ref;
        }

        if (estimate->parsed()) {
            const sns::EstimateResult r = sns::run_estimate(cfg);
            print_result(cfg, r);
            if (!cfg.output_path.empty()) {
                sns::emit_csv(cfg, r, cfg.output_path);
                std::printf("wrote %s\n", cfg.output_path.c_str());
            }
            return 0;
        }

        if (study->parsed()) {
            std::vector<std::uint64_t> grid;
            std::stringstream ss(grid_csv);
            std::string tok;
            while (std::getline(ss, tok, ',')) grid.push_back(std::stoull(tok));
            const sns::StudyResult res =
                sns::convergence_study(cfg, sns::axis_from_name(axis), grid);
            for (std::size_t i = 0; i < res.results.size(); ++i) {
                std::printf("%s = %llu\n", axis.c_str(),
                            static_cast<unsigned long long>(res.axis_values[i]));
                for (std::size_t f = 0; f < res.functional_names.size(); ++f)
                    std::printf("  %-12s = %.15g   rel err %.3e   log2 ratio %.2f\n",
                                res.functional_names[f].c_str(), res.results[i].estimates[f],
                                res.relative_errors[i][f], res.log2_ratios[i][f]);
            }
            if (!cfg.output_path.empty()) {
                sns::emit_csv(res, cfg.output_path);
                std::printf("wrote %s\n", cfg.output_path.c_str());
            }
            return 0;
        }
    } catch (const sns::BlowUpError& e) {
        std::fprintf(stderr, "blow-up: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
