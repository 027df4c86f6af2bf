#pragma once

#include <cstdlib>
#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "effortrank/config.hpp"
#include "effortrank/error.hpp"
#include "effortrank/minor_chaos.hpp"
#include "effortrank/runner.hpp"
#include "effortrank/summary.hpp"
#include "effortrank/synthetic.hpp"
#include "effortrank/text.hpp"

namespace effortrank::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitRuntime = 2;

inline constexpr const char* kDefaultLearners =
    "lr,nb,knn,c50,cart,rf,ubag_c50,ubag_cart,ubag_rf,ubst_c50,ubst_cart,ubst_rf";
inline constexpr const char* kDefaultStrategies = "prob,label_loc,cbs_plus,prob_loc,ea_z,manual_up";

namespace detail {

// Flag values are kept as text and applied through the configuration keys,
// so command line and config files share one parser.
struct FlagSet {
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option*> options;

    void add(CLI::App& app, const std::string& flag, const std::string& key, const std::string& help,
             const std::string& shown_default) {
        auto* opt = app.add_option("--" + flag, values[key], help);
        if (!shown_default.empty()) opt->default_str(shown_default);
        options[key] = opt;
    }

    KeyValues given() const {
        KeyValues kv;
        for (const auto& [key, opt] : options)
            if (opt->count() > 0) kv[key] = values.at(key);
        return kv;
    }
};

inline void add_run_flags(CLI::App& app, FlagSet& f) {
    f.add(app, "manifest", "manifest", "Pair manifest: source,train,test per row", "");
    f.add(app, "data-dir", "data_dir", "Dataset root holding <source>/<name>.csv", "data");
    f.add(app, "sources", "sources", "Column profiles per data source (built-in when omitted)", "");
    f.add(app, "learners", "learners", "Comma-separated learner tags", kDefaultLearners);
    f.add(app, "strategies", "strategies", "Comma-separated ranking strategies", kDefaultStrategies);
    f.add(app, "zeta", "zeta", "EA-Z lift zeta in (0,1)", "0.05");
    f.add(app, "threshold", "threshold", "Probability threshold for label_loc and cbs_plus", "0.5");
    f.add(app, "budget", "budget", "Effort budget for recall", "0.2");
    f.add(app, "seed", "seed", "Master seed (falls back to EFFORTRANK_SEED)", "1");
    f.add(app, "repetitions", "repetitions", "Repetitions per (pair, learner)", "1");
    f.add(app, "jobs", "jobs", "Worker threads", "1");
    f.add(app, "out", "out", "Output directory", "");
    f.add(app, "k", "k", "Neighbours for knn", "8");
    f.add(app, "ir", "ir", "Majority:minority ratio kept by under-sampling ensembles", "1");
    f.add(app, "rf-trees", "rf_trees", "Trees in a standalone random forest", "200");
    f.add(app, "ensemble-rf-trees", "ensemble_rf_trees", "Trees per forest inside ensembles", "50");
    f.add(app, "bags", "bags", "UnderBagging members", "10");
    f.add(app, "rounds", "rounds", "RUSBoost rounds", "10");
    f.add(app, "external-dir", "external_dir", "Directory of precomputed probabilities for svm, jrip, ext:<name>", "external");
}

inline RunConfig resolve_config(const std::string& config_file, const FlagSet& flags) {
    RunConfig cfg;
    cfg.data_dir = "data";
    cfg.learners = text::split_list(kDefaultLearners, ',');
    cfg.strategies = parse_strategy_list(kDefaultStrategies);
    KeyValues from_file;
    if (!config_file.empty()) {
        from_file = load_key_values(config_file);
        apply_key_values(cfg, from_file);
    }
    const auto given = flags.given();
    apply_key_values(cfg, given);
    if (!given.contains("seed") && !from_file.contains("seed")) {
        if (const char* env = std::getenv("EFFORTRANK_SEED"); env && *env)
            apply_key_values(cfg, {{"seed", env}});
    }
    if (cfg.manifest.empty()) throw ConfigError("missing required option --manifest");
    if (cfg.out.empty()) throw ConfigError("missing required option --out");
    cfg.validate();
    return cfg;
}

inline void write_run_outputs(const RunConfig& cfg, const ResultTable& rt, std::ostream& out) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out);
    text::write_file((fs::path(cfg.out) / "config.txt").string(), to_text(cfg));
    write_result_table(rt, (fs::path(cfg.out) / "results.csv").string());
    write_report(summarize(rt, {.reference_zeta = cfg.zeta}), rt, cfg.out);
    out << "wrote " << rt.rows.size() << " result rows (" << rt.errored() << " not ok) to " << cfg.out << "\n";
}

inline void print_minor_chaos(std::ostream& out, double zeta) {
    const auto f = minor_chaos::fixture();
    double total = 0.0;
    for (double e : f.efforts) total += e;
    out << "Minor Chaos fixture (" << f.names.size() << " modules, total effort " << text::format_double(total)
        << ", 20% budget = " << text::format_double(0.2 * total) << ")\n";
    out << "module      effort  defective  p(before)  p(after)\n";
    using effortrank::detail::pad;
    for (std::size_t i = 0; i < f.names.size(); ++i)
        out << pad(f.names[i], 12) << pad(text::format_double(f.efforts[i]), 8)
            << pad(f.defective[i] ? "yes" : "no", 11) << pad(text::format_double(f.probs_before[i]), 11)
            << text::format_double(f.probs_after[i]) << "\n";
    out << "\n";
    for (const auto& w : minor_chaos::walkthrough(zeta)) {
        std::string order;
        for (std::size_t i : w.ranking.order) order += (order.empty() ? "" : " ") + f.names[i];
        out << to_string(w.strategy) << " " << w.variant << ": ranking [" << order << "]\n";
        out << "  score(candidate) = " << text::format_double(w.scores[f.candidate])
            << ", score(big) = " << text::format_double(w.scores[f.big_module]) << "\n";
        out << "  " << to_string(w.strategy) << " " << w.variant << " recall@20% = " << text::format_fixed(w.recall20, 4)
            << "  popt = " << text::format_fixed(w.popt, 4) << "\n";
    }
}

} // namespace detail

// Exit status: 0 success, 1 configuration error, 2 runtime failure.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Effort-aware defect prediction: ranking strategies, experiments and reports", "effortrank"};
    app.require_subcommand(1);

    detail::FlagSet run_flags, sweep_flags;
    std::string run_config, sweep_config;
    auto* run_cmd = app.add_subcommand("run", "Run the pair x learner x strategy matrix");
    run_cmd->add_option("--config", run_config, "Key-value configuration file; flags override it");
    detail::add_run_flags(*run_cmd, run_flags);

    auto* sweep_cmd = app.add_subcommand("sweep-zeta", "Run the matrix with EA-Z at every zeta of a grid");
    sweep_cmd->add_option("--config", sweep_config, "Key-value configuration file; flags override it");
    detail::add_run_flags(*sweep_cmd, sweep_flags);
    std::string grid = "0.005,0.01,0.02,0.05,0.1";
    sweep_cmd->add_option("--grid", grid, "Comma-separated zeta values, strictly increasing")->capture_default_str();

    SyntheticSpec synth;
    std::size_t synth_pairs = 1;
    double skew_max = 0.0;
    std::string synth_out;
    auto* synth_cmd = app.add_subcommand("synth", "Write synthetic train/test pairs and their manifest");
    synth_cmd->add_option("--n", synth.n, "Modules per dataset (>= 20)")->capture_default_str();
    synth_cmd->add_option("--defect-rate", synth.defect_rate, "Expected defective share in (0, 0.5]")->capture_default_str();
    synth_cmd->add_option("--loc-skew", synth.loc_skew, "Effort skewness (first pair)")->capture_default_str();
    synth_cmd->add_option("--loc-skew-max", skew_max, "Effort skewness of the last pair (defaults to --loc-skew)");
    synth_cmd->add_option("--noise", synth.noise, "Measurement noise on risk metrics")->capture_default_str();
    synth_cmd->add_option("--seed", synth.seed, "Generator seed")->capture_default_str();
    synth_cmd->add_option("--pairs", synth_pairs, "Number of pairs")->capture_default_str();
    synth_cmd->add_option("--out", synth_out, "Output directory")->required();

    std::string results_path, stats_out;
    double reference_zeta = kDefaultZeta;
    auto* stats_cmd = app.add_subcommand("stats", "Summarize an existing results.csv");
    stats_cmd->add_option("--results", results_path, "Result table written by run")->required();
    stats_cmd->add_option("--out", stats_out, "Directory for the report (printed only when omitted)");
    stats_cmd->add_option("--zeta", reference_zeta, "EA-Z zeta reported in the main tables")->capture_default_str();

    double demo_zeta = kDefaultZeta;
    auto* demo_cmd = app.add_subcommand("minor-chaos-demo", "Walk through the Minor Chaos example");
    demo_cmd->add_option("--zeta", demo_zeta, "EA-Z lift zeta")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (run_cmd->parsed()) {
            const auto cfg = detail::resolve_config(run_config, run_flags);
            detail::write_run_outputs(cfg, run_experiment(cfg), out);
        } else if (sweep_cmd->parsed()) {
            auto cfg = detail::resolve_config(sweep_config, sweep_flags);
            cfg = with_zeta_grid(cfg, parse_double_list("grid", grid));
            cfg.validate();
            detail::write_run_outputs(cfg, run_experiment(cfg), out);
        } else if (synth_cmd->parsed()) {
            namespace fs = std::filesystem;
            SyntheticBenchmarkSpec b{.pairs = synth_pairs, .skew_min = synth.loc_skew,
                                     .skew_max = skew_max > 0.0 ? skew_max : synth.loc_skew, .base = synth};
            std::string manifest = "source,train,test\n";
            fs::create_directories(fs::path(synth_out) / "SYNTH");
            for (const auto& spec : benchmark_specs(b)) {
                const auto [train, test] = generate_synthetic_pair(spec);
                write_dataset(train, (fs::path(synth_out) / "SYNTH" / (train.name() + ".csv")).string());
                write_dataset(test, (fs::path(synth_out) / "SYNTH" / (test.name() + ".csv")).string());
                manifest += "SYNTH," + train.name() + "," + test.name() + "\n";
            }
            text::write_file((fs::path(synth_out) / "manifest.csv").string(), manifest);
            out << "wrote " << synth_pairs << " synthetic pair(s) to " << synth_out << "\n";
        } else if (stats_cmd->parsed()) {
            const auto rt = read_result_table(results_path);
            const auto s = summarize(rt, {.reference_zeta = reference_zeta});
            if (!stats_out.empty()) write_report(s, rt, stats_out);
            out << render_summary(s);
        } else if (demo_cmd->parsed()) {
            if (!(demo_zeta > 0.0 && demo_zeta < 1.0)) throw ConfigError("zeta must lie in (0,1)");
            detail::print_minor_chaos(out, demo_zeta);
        }
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}

} // namespace effortrank::cli
