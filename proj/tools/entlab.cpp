// Command-line front end: theorem verification sweeps, the sharpness
// constructions, and counterexample minimization.
//
// exit codes: 0 = all asserted inequalities pass, 1 = violation found
// (minimized counterexample in the report), 2 = input error.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "entlab/sharpness.hpp"
#include "entlab/verify.hpp"

namespace {

int write_output(const nlohmann::json& report, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << report.dump(2) << "\n";
    } else {
        std::ofstream os(out_path);
        if (!os) {
            std::cerr << "cannot write " << out_path << "\n";
            return 2;
        }
        os << report.dump(2) << "\n";
    }
    return 0;
}

entlab::SweepConfig load_config(const std::string& config_path,
                                const entlab::SweepConfig& flags,
                                const std::vector<std::string>& set_flags) {
    if (config_path.empty()) return flags;
    std::ifstream is(config_path);
    if (!is) throw entlab::InputError("cannot read config " + config_path);
    nlohmann::json j = nlohmann::json::parse(is);
    entlab::SweepConfig cfg = entlab::SweepConfig::from_json(j);
    // explicit flags win over the config file
    for (const std::string& name : set_flags) {
        if (name == "--seed") cfg.seed = flags.seed;
        if (name == "--trials") cfg.trials = flags.trials;
        if (name == "--depth-max") cfg.depth_max = flags.depth_max;
        if (name == "--alpha") cfg.alpha_preset = flags.alpha_preset;
        if (name == "--young") cfg.young_preset = flags.young_preset;
        if (name == "--variant") cfg.variant = flags.variant;
        if (name == "--tolerance") cfg.tolerance = flags.tolerance;
        if (name == "--jobs") cfg.jobs = flags.jobs;
        if (name == "--serial") cfg.serial = flags.serial;
    }
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"verification laboratory for two-weight entropy-bump inequalities"};
    app.require_subcommand(1);

    entlab::SweepConfig cfg;
    std::string out_path, csv_path, config_path;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--seed", cfg.seed, "master seed");
        cmd->add_option("--trials", cfg.trials, "sweep size");
        cmd->add_option("--depth-max", cfg.depth_max, "maximum model depth");
        cmd->add_option("--alpha", cfg.alpha_preset, "penalty preset");
        cmd->add_option("--young", cfg.young_preset, "Young function preset");
        cmd->add_option("--variant", cfg.variant, "u* variant: maximal|lorentz");
        cmd->add_option("--tolerance", cfg.tolerance, "slack tolerance");
        cmd->add_option("--jobs", cfg.jobs, "worker threads (0 = all)");
        cmd->add_flag("--serial", cfg.serial, "serial reference sweeps");
        cmd->add_option("--config", config_path, "JSON config mirroring the flags");
        cmd->add_option("--out", out_path, "report path (stdout when empty)");
    };

    std::string theorem;
    CLI::App* verify = app.add_subcommand("verify", "run a theorem verifier");
    verify->add_option("theorem", theorem, "theorem id")->required();
    add_common(verify);

    std::string construction = "fundamental_psi", psi_name = "psi:llogl",
                alpha_name = "alpha:const";
    std::vector<double> cutoffs{1e3, 1e6, 1e9, 1e12};
    CLI::App* sharp = app.add_subcommand("sharpness", "continuum counterexamples");
    sharp->add_option("construction", construction,
                      "fundamental_psi|entropy_alpha|general_p");
    sharp->add_option("--psi", psi_name, "psi preset");
    sharp->add_option("--alpha", alpha_name, "penalty preset (entropy_alpha)");
    double p_exponent = 2.0;
    sharp->add_option("--exponent", p_exponent, "p for general_p");
    sharp->add_option("--cutoffs", cutoffs, "partial-integral cutoffs");
    sharp->add_option("--csv", csv_path, "CSV output of (X, partial, bump) rows");
    sharp->add_option("--out", out_path, "report path");

    std::string report_path;
    CLI::App* minimize = app.add_subcommand("minimize", "shrink a failing instance");
    minimize->add_option("report", report_path, "report or instance JSON")->required();
    minimize->add_option("--tolerance", cfg.tolerance, "re-evaluation tolerance");
    minimize->add_option("--out", out_path, "output path");

    CLI::App* list = app.add_subcommand("list", "list theorem ids");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (list->parsed()) {
            for (const auto& id : entlab::verifier_ids()) std::cout << id << "\n";
            return 0;
        }
        if (verify->parsed()) {
            entlab::SweepConfig effective =
                load_config(config_path, cfg, [&] {
                    std::vector<std::string> set;
                    for (const auto* opt : verify->get_options())
                        if (opt->count() > 0) set.push_back(opt->get_name());
                    return set;
                }());
            entlab::VerifyResult res = entlab::run_verifier(theorem, effective);
            int rc = write_output(res.report, out_path);
            if (rc != 0) return rc;
            return res.pass ? 0 : 1;
        }
        if (sharp->parsed()) {
            nlohmann::json report;
            entlab::ContinuumWeightPair pair;
            entlab::BumpUniformity bumps;
            if (construction == "fundamental_psi") {
                pair = entlab::make_fundamental_pair(entlab::psi_rule_preset(psi_name));
                bumps = entlab::bump_uniformity(pair);
            } else if (construction == "general_p") {
                pair = entlab::make_general_p_pair(entlab::psi_rule_preset(psi_name),
                                                   p_exponent);
                bumps = entlab::bump_uniformity(pair);
            } else if (construction == "entropy_alpha") {
                entlab::EntropySharpnessReport er = entlab::entropy_sharpness(
                    entlab::PenaltyFn::preset(alpha_name),
                    entlab::PenaltyFn::preset("alpha:t"), cutoffs);
                report["bump_sup"] = er.bump_sup;
                report["bump_sup_doubled"] = er.bump_sup_doubled;
                report["divergent"] = er.divergence.divergent;
                report["converged"] = er.divergence.converged;
                nlohmann::json rows = nlohmann::json::array();
                for (const auto& w : er.divergence.ladder)
                    rows.push_back({{"X", w.cutoff},
                                    {"lower_partial", w.lower_partial},
                                    {"exact_partial", w.exact_partial}});
                report["ladder"] = rows;
                if (!csv_path.empty()) {
                    std::ofstream os(csv_path);
                    os << "X,partial,bump_sup\n";
                    for (const auto& w : er.divergence.ladder)
                        os << w.cutoff << "," << w.lower_partial << "," << er.bump_sup
                           << "\n";
                }
                int rc = write_output(report, out_path);
                return rc != 0 ? rc : 0;
            } else {
                std::cerr << "unknown construction " << construction << "\n";
                return 2;
            }
            entlab::DivergenceVerdict verdict =
                entlab::classify_divergence(pair, cutoffs);
            report["construction"] = construction;
            report["psi"] = psi_name;
            report["bump_observed"] = bumps.b_observed;
            report["bump_stability"] = bumps.stability;
            report["divergent"] = verdict.divergent;
            report["converged"] = verdict.converged;
            report["tail_bracket"] = verdict.tail_bracket;
            nlohmann::json rows = nlohmann::json::array();
            for (const auto& w : verdict.ladder)
                rows.push_back({{"X", w.cutoff},
                                {"lower_partial", w.lower_partial},
                                {"exact_partial", w.exact_partial}});
            report["ladder"] = rows;
            if (!csv_path.empty()) {
                std::ofstream os(csv_path);
                if (!os) {
                    std::cerr << "cannot write " << csv_path << "\n";
                    return 2;
                }
                os << "X,partial,bump_sup\n";
                for (const auto& w : verdict.ladder)
                    os << w.cutoff << "," << w.lower_partial << ","
                       << bumps.b_observed << "\n";
            }
            return write_output(report, out_path);
        }
        if (minimize->parsed()) {
            std::ifstream is(report_path);
            if (!is) {
                std::cerr << "cannot read " << report_path << "\n";
                return 2;
            }
            nlohmann::json j = nlohmann::json::parse(is);
            nlohmann::json instance =
                j.contains("counterexample") ? j.at("counterexample") : j;
            if (!instance.contains("theorem")) {
                std::cerr << "no failing instance in the report\n";
                return 2;
            }
            entlab::MinimizeResult res = entlab::minimize_instance(
                instance.at("theorem").get<std::string>(), instance, cfg.tolerance);
            nlohmann::json report{{"still_fails", res.still_fails},
                                  {"tolerance_artifact", res.tolerance_artifact},
                                  {"rounds", res.rounds},
                                  {"atoms_before", res.atoms_before},
                                  {"atoms_after", res.atoms_after},
                                  {"instance", res.instance}};
            return write_output(report, out_path);
        }
    } catch (const entlab::InputError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
    return 2;
}
