// zipscan command line: cluster detection on user data (detect), power
// studies on the hex benchmark map (simulate), and type I error studies
// (null-study). Reports embed the fully resolved configuration so any run
// can be replayed from its output alone.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "zipscan/detector.hpp"
#include "zipscan/errors.hpp"
#include "zipscan/inference.hpp"
#include "zipscan/io.hpp"
#include "zipscan/parallel.hpp"
#include "zipscan/scenarios.hpp"
#include "zipscan/simulate.hpp"
#include "zipscan/zones.hpp"

namespace {

// Exit codes, also documented in the README and --help text.
constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;     // bad flags or malformed input files
constexpr int kExitData = 3;      // input violates the data contract
constexpr int kExitDegenerate = 4;  // statistic undefined on this input

using nlohmann::ordered_json;

struct CommonOptions {
    std::optional<std::uint64_t> seed;
    double alpha = 0.05;
    int replicas = 999;
    int workers = 0;
    double max_pop_fraction = 0.5;
    double em_tol = 1e-8;
    int em_max_iter = 500;
    bool em_separate_null = false;
    bool strict_paper_bootstrap = false;
};

void add_common(CLI::App* cmd, CommonOptions& opt) {
    cmd->add_option("--seed", opt.seed, "RNG seed (default: drawn from the system)");
    cmd->add_option("--alpha", opt.alpha, "significance level")->check(CLI::Range(1e-9, 0.999999));
    cmd->add_option("--replicas,--b", opt.replicas, "Monte Carlo replicas B")->check(CLI::Range(19, 100000000));
    cmd->add_option("--workers", opt.workers, "worker threads (0 = all cores)");
    cmd->add_option("--max-pop-fraction", opt.max_pop_fraction,
                    "largest zone population as a fraction of the total");
    cmd->add_option("--em-tol", opt.em_tol, "EM convergence tolerance on the posteriors");
    cmd->add_option("--em-max-iter", opt.em_max_iter, "EM iteration cap");
    cmd->add_flag("--em-separate-null", opt.em_separate_null,
                  "score zip-em zones against a separate null-model EM fit");
    cmd->add_flag("--strict-paper-bootstrap", opt.strict_paper_bootstrap,
                  "distribute round(total population) events per null replica instead of the "
                  "observed case total");
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& seed) {
    if (seed) return *seed;
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

zipscan::ScanConfig scan_config_of(const CommonOptions& opt) {
    zipscan::ScanConfig cfg;
    cfg.em.tol = opt.em_tol;
    cfg.em.max_iter = opt.em_max_iter;
    cfg.null_mode = opt.em_separate_null ? zipscan::NullModelMode::separate_null_em
                                         : zipscan::NullModelMode::per_zone_delta;
    return cfg;
}

ordered_json config_json(const CommonOptions& opt, std::uint64_t seed) {
    ordered_json j;
    j["seed"] = seed;
    j["alpha"] = opt.alpha;
    j["replicas"] = opt.replicas;
    j["workers"] = opt.workers == 0 ? zipscan::default_workers() : opt.workers;
    j["max_pop_fraction"] = opt.max_pop_fraction;
    j["em_tol"] = opt.em_tol;
    j["em_max_iter"] = opt.em_max_iter;
    j["em_separate_null"] = opt.em_separate_null;
    j["strict_paper_bootstrap"] = opt.strict_paper_bootstrap;
    return j;
}

std::vector<zipscan::Method> parse_methods(const std::vector<std::string>& names) {
    if (names.empty()) throw CLI::ValidationError("--methods", "at least one method is required");
    std::vector<zipscan::Method> methods;
    for (const std::string& name : names) {
        const zipscan::Method m = zipscan::method_from_string(name);
        for (zipscan::Method seen : methods) {
            if (seen == m) throw CLI::ValidationError("--methods", "duplicate method " + name);
        }
        methods.push_back(m);
    }
    return methods;
}

int run_detect(const std::string& input, const std::string& method_name,
               const std::string& out_path, const std::string& replica_log,
               const CommonOptions& opt) {
    const zipscan::Method method = zipscan::method_from_string(method_name);
    const std::uint64_t seed = resolve_seed(opt.seed);

    const zipscan::Dataset dataset = zipscan::load_region_csv(input);
    if (method == zipscan::Method::zip && !dataset.cases.structural_zero) {
        throw zipscan::DataError(input + ": the zip method requires a structural_zero column");
    }
    const zipscan::ZoneFamily family(dataset.map, opt.max_pop_fraction);

    zipscan::NullReplicaConfig mc;
    mc.replicas = opt.replicas;
    mc.seed = seed;
    mc.alpha = opt.alpha;
    mc.workers = opt.workers;
    mc.total_cases_rule = opt.strict_paper_bootstrap ? zipscan::TotalCasesRule::population_total
                                                     : zipscan::TotalCasesRule::observed_cases;

    const zipscan::ScanOutcome outcome =
        zipscan::significance(family, dataset.cases, method, mc, scan_config_of(opt));

    ordered_json report;
    report["command"] = "detect";
    report["input"] = input;
    report["method"] = zipscan::to_string(method);

    ordered_json zone;
    zone["center"] = dataset.map.region(outcome.best_zone.center).id;
    std::vector<std::string> ids;
    for (int i : outcome.best_zone.members) ids.push_back(dataset.map.region(i).id);
    zone["regions"] = ids;
    zone["population"] = outcome.best_zone.pop_inside;
    zone["cases"] = outcome.best_zone.cases_inside;
    report["best_zone"] = zone;

    report["lambda"] = outcome.lambda();
    report["log_lambda"] = outcome.log_lambda;
    report["p_value"] = *outcome.p_value;
    report["lambda_star"] = std::exp(outcome.replicas->log_lambda_star);
    report["log_lambda_star"] = outcome.replicas->log_lambda_star;
    report["rejected"] = *outcome.rejected;

    ordered_json fit;
    fit["p_hat"] = outcome.fit.p_hat;
    fit["theta0_hat"] = outcome.fit.theta0_hat;
    if (outcome.fit.thetaZ_hat) fit["thetaZ_hat"] = *outcome.fit.thetaZ_hat;
    if (!outcome.fit.delta_hat.empty()) {
        ordered_json posteriors;
        for (std::size_t i = 0; i < outcome.fit.delta_hat.size(); ++i) {
            if (outcome.fit.delta_hat[i] > 0.0) {
                posteriors[dataset.map.region(static_cast<int>(i)).id] = outcome.fit.delta_hat[i];
            }
        }
        fit["structural_zero_posteriors"] = posteriors;
    }
    report["fit"] = fit;

    if (method == zipscan::Method::zip_em) {
        ordered_json em;
        em["zones_fitted"] = outcome.em.zones_fitted;
        em["zones_nonconverged"] = outcome.em.zones_nonconverged;
        em["total_iterations"] = outcome.em.total_iterations;
        report["em_diagnostics"] = em;
    }

    ordered_json cfg = config_json(opt, seed);
    cfg["method"] = zipscan::to_string(method);
    cfg["input"] = input;
    cfg["out"] = out_path;
    report["config"] = cfg;

    std::ofstream out(out_path);
    if (!out) throw zipscan::DataError("cannot write " + out_path);
    out << report.dump(2) << "\n";
    out.close();

    if (!replica_log.empty()) zipscan::write_replica_log_csv(replica_log, *outcome.replicas);

    std::cout << out_path << "\n";
    return kExitOk;
}

int run_simulate(const std::vector<std::string>& scenario_names,
                 const std::vector<std::string>& method_names, int studies,
                 const std::string& out_path, const CommonOptions& opt) {
    const std::vector<zipscan::Method> methods = parse_methods(method_names);
    const std::uint64_t seed = resolve_seed(opt.seed);

    const zipscan::RegionMap map = zipscan::build_hex_map(seed);
    const zipscan::ZoneFamily family(map, opt.max_pop_fraction);

    zipscan::StudySettings settings;
    settings.studies = studies;
    settings.replicas = opt.replicas;
    settings.alpha = opt.alpha;
    settings.seed = seed;
    settings.workers = opt.workers;
    settings.em = scan_config_of(opt).em;
    settings.null_mode = scan_config_of(opt).null_mode;

    std::vector<zipscan::StudyReport> reports;
    for (const std::string& name : scenario_names) {
        const bool builtin = [&] {
            for (const std::string& b : zipscan::builtin_scenario_names()) {
                if (b == name) return true;
            }
            return false;
        }();
        const zipscan::Scenario scenario = builtin ? zipscan::builtin_scenario(name, map)
                                                   : zipscan::load_scenario_json(name, map);
        std::cerr << "scenario " << scenario.name << ": N=" << studies << " B=" << opt.replicas
                  << " methods=" << method_names.size() << "\n";
        reports.push_back(zipscan::power_study(family, scenario, methods, settings));
    }

    ordered_json cfg = config_json(opt, seed);
    cfg["studies"] = studies;
    cfg["scenarios"] = scenario_names;
    zipscan::write_study_csv(out_path, reports, "config: " + cfg.dump());
    std::cout << out_path << "\n";
    return kExitOk;
}

int run_null_study(const std::vector<std::string>& method_names, int studies,
                   int structural_zeros, long long cases, const std::string& out_path,
                   const CommonOptions& opt) {
    const std::vector<zipscan::Method> methods = parse_methods(method_names);
    const std::uint64_t seed = resolve_seed(opt.seed);

    const zipscan::RegionMap map = zipscan::build_hex_map(seed);
    const zipscan::ZoneFamily family(map, opt.max_pop_fraction);

    zipscan::StudySettings settings;
    settings.studies = studies;
    settings.replicas = opt.replicas;
    settings.alpha = opt.alpha;
    settings.seed = seed;
    settings.workers = opt.workers;
    settings.em = scan_config_of(opt).em;
    settings.null_mode = scan_config_of(opt).null_mode;

    const std::vector<zipscan::TypeIResult> results =
        zipscan::type_i_study(family, methods, settings, structural_zeros, cases);

    ordered_json cfg = config_json(opt, seed);
    cfg["studies"] = studies;
    cfg["structural_zeros"] = structural_zeros;
    cfg["cases"] = cases;
    zipscan::write_type_i_csv(out_path, results, studies, opt.replicas, opt.alpha, seed,
                              "config: " + cfg.dump());
    std::cout << out_path << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spatial scan statistics for zero-inflated Poisson count data"};
    app.require_subcommand(1);
    app.footer("Exit codes: 0 ok, 2 usage error, 3 invalid input data, 4 degenerate statistic.");

    // detect
    CommonOptions detect_opt;
    std::string detect_input, detect_method = "poisson";
    std::string detect_out = "detect_report.json", detect_replica_log;
    CLI::App* detect = app.add_subcommand("detect", "find the most likely cluster in a region CSV");
    detect->add_option("--input", detect_input, "region CSV: id,x,y,population,cases[,structural_zero]")
        ->required();
    detect->add_option("--method", detect_method, "poisson | zip | zip-em")->required();
    detect->add_option("--out", detect_out, "JSON report path");
    detect->add_option("--replica-log", detect_replica_log,
                       "optional CSV of replica statistics (replica_index,lambda,structural_zero_count)");
    add_common(detect, detect_opt);

    // simulate
    CommonOptions sim_opt;
    std::vector<std::string> sim_scenarios;
    std::vector<std::string> sim_methods = {"poisson", "zip", "zip-em"};
    int sim_studies = 1000;
    std::string sim_out = "study.csv";
    CLI::App* sim = app.add_subcommand("simulate", "power studies on the hex benchmark map");
    sim->add_option("--scenario,--scenarios", sim_scenarios,
                    "built-in scenario names (A0,A,B,C,D,A1..A4) or scenario JSON paths")
        ->required()
        ->delimiter(',');
    sim->add_option("--methods,--method", sim_methods, "methods to compare on identical draws")
        ->delimiter(',');
    sim->add_option("--studies,--n", sim_studies, "alternative data sets per scenario N")
        ->check(CLI::Range(1, 100000000));
    sim->add_option("--out", sim_out, "study CSV path");
    add_common(sim, sim_opt);

    // null-study
    CommonOptions null_opt;
    std::vector<std::string> null_methods = {"poisson", "zip", "zip-em"};
    int null_studies = 1000;
    int null_zeros = 15;
    long long null_cases = 507;
    std::string null_out = "null_study.csv";
    CLI::App* nul = app.add_subcommand("null-study", "type I error study on the hex benchmark map");
    nul->add_option("--methods,--method", null_methods, "methods to evaluate")->delimiter(',');
    nul->add_option("--studies,--n", null_studies, "null data sets N")->check(CLI::Range(1, 100000000));
    nul->add_option("--structural-zeros", null_zeros, "structural zero regions per draw");
    nul->add_option("--cases", null_cases, "cases per draw");
    nul->add_option("--out", null_out, "type I CSV path");
    add_common(nul, null_opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (detect->parsed()) {
            return run_detect(detect_input, detect_method, detect_out, detect_replica_log, detect_opt);
        }
        if (sim->parsed()) {
            return run_simulate(sim_scenarios, sim_methods, sim_studies, sim_out, sim_opt);
        }
        return run_null_study(null_methods, null_studies, null_zeros, null_cases, null_out, null_opt);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const zipscan::DegenerateDataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDegenerate;
    } catch (const zipscan::DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
