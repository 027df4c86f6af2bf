#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "effortrank/catalog.hpp"
#include "effortrank/config.hpp"
#include "effortrank/dataset.hpp"
#include "effortrank/error.hpp"
#include "effortrank/learners/train.hpp"
#include "effortrank/metrics.hpp"
#include "effortrank/random.hpp"
#include "effortrank/strategies.hpp"
#include "effortrank/synthetic.hpp"
#include "effortrank/text.hpp"

namespace effortrank {

inline constexpr const char* kStatusOk = "ok";
inline constexpr const char* kStatusNoDefect = "no_defect";

struct EvalResult {
    std::string source;
    std::string pair;
    std::string learner;
    Strategy strategy = Strategy::Prob;
    int rep = 0;
    std::optional<double> zeta; // EA-Z rows only
    std::optional<double> recall20;
    std::optional<double> popt;
    std::optional<double> ifa;
    std::string status = kStatusOk;

    bool ok() const { return status == kStatusOk; }

    auto key() const { return std::tuple(pair, learner, strategy, rep, zeta.value_or(-1.0)); }
};

struct ResultTable {
    std::vector<EvalResult> rows;

    std::size_t errored() const {
        return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(),
                                                      [](const EvalResult& r) { return !r.ok(); }));
    }

    void check_unique_keys() const {
        std::set<decltype(rows.front().key())> seen;
        for (const auto& r : rows)
            if (!seen.insert(r.key()).second)
                throw DomainError("duplicate result key: " + r.pair + " / " + r.learner + " / " +
                                  std::string(to_string(r.strategy)));
    }
};

inline constexpr const char* kResultHeader =
    "source,pair,learner,strategy,rep,zeta,recall20,popt,ifa,status";

namespace detail {

inline std::string opt_text(const std::optional<double>& v) {
    return v ? text::format_double(*v) : "NA";
}

inline std::optional<double> opt_parse(const std::string& s, std::size_t row) {
    if (s == "NA") return std::nullopt;
    auto v = text::parse_double(s);
    if (!v) throw ParseError("bad number '" + s + "' in result table", row);
    return v;
}

inline std::string clean_status(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n' || c == '\r' || c == '"') c = ';';
    return s;
}

} // namespace detail

inline std::string to_csv(const ResultTable& t) {
    std::string out = std::string(kResultHeader) + "\n";
    for (const auto& r : t.rows) {
        out += r.source + "," + r.pair + "," + r.learner + "," + std::string(to_string(r.strategy)) + "," +
               std::to_string(r.rep) + "," + detail::opt_text(r.zeta) + "," + detail::opt_text(r.recall20) +
               "," + detail::opt_text(r.popt) + "," + detail::opt_text(r.ifa) + "," +
               detail::clean_status(r.status) + "\n";
    }
    return out;
}

inline void write_result_table(const ResultTable& t, const std::string& path) {
    text::write_file(path, to_csv(t));
}

inline ResultTable read_result_table(const std::string& path) {
    const auto lines = text::read_lines(path);
    if (lines.empty() || text::trim(lines[0]) != kResultHeader)
        throw ParseError("result table header must be '" + std::string(kResultHeader) + "'", 0);
    ResultTable t;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (text::trim(lines[i]).empty()) continue;
        const auto f = text::split_fields(lines[i], ',');
        if (f.size() != 10) throw ParseError("result rows need 10 fields", i);
        EvalResult r;
        r.source = f[0];
        r.pair = f[1];
        r.learner = f[2];
        r.strategy = parse_strategy(f[3]);
        const auto rep = text::parse_double(f[4]);
        if (!rep || *rep < 0 || *rep != static_cast<double>(static_cast<int>(*rep)))
            throw ParseError("bad repetition index '" + f[4] + "'", i);
        r.rep = static_cast<int>(*rep);
        r.zeta = detail::opt_parse(f[5], i);
        r.recall20 = detail::opt_parse(f[6], i);
        r.popt = detail::opt_parse(f[7], i);
        r.ifa = detail::opt_parse(f[8], i);
        r.status = f[9];
        t.rows.push_back(std::move(r));
    }
    t.check_unique_keys();
    return t;
}

// Fills the three indicators of `r` for one ranking of the test set.
inline void evaluate_into(EvalResult& r, const RankedList& ranking, const std::vector<bool>& actuals,
                          std::span<const double> efforts, double budget) {
    r.ifa = static_cast<double>(ifa(ranking, actuals));
    if (std::find(actuals.begin(), actuals.end(), true) == actuals.end()) {
        r.status = kStatusNoDefect;
        return;
    }
    r.recall20 = recall_at(ranking, actuals, efforts, budget);
    try {
        r.popt = popt(ranking, actuals, efforts);
    } catch (const DomainError& e) {
        r.status = std::string("error: popt ") + e.what();
    }
}

struct PreparedPair {
    ManifestPair pair;
    Dataset train;
    Dataset test;
};

namespace detail {

struct Cell {
    std::size_t pair;
    std::size_t learner;
    int rep;
};

inline std::vector<EvalResult> run_cell(const RunConfig& cfg, const PreparedPair& p,
                                        const std::string& learner_tag,
                                        const learners::LearnerSpec& spec, int rep) {
    const auto& test = p.test;
    const auto efforts = test.efforts();
    const auto actuals = test.labels();

    std::vector<double> probs;
    std::string failure;
    const bool needs_model = std::any_of(cfg.strategies.begin(), cfg.strategies.end(),
                                         [](Strategy s) { return s != Strategy::ManualUp; });
    if (needs_model) {
        try {
            const auto seed = cell_seed(cfg.seed, p.pair.tag(), learner_tag, static_cast<std::uint64_t>(rep));
            const auto model = learners::train(spec, p.train, seed);
            probs = learners::predict_proba(model, test);
        } catch (const Error& e) {
            failure = e.what();
        }
    }

    std::vector<EvalResult> out;
    for (Strategy s : cfg.strategies) {
        const auto zetas = s == Strategy::EaZ ? cfg.effective_zetas() : std::vector<double>{0.0};
        for (double z : zetas) {
            EvalResult r;
            r.source = p.pair.source;
            r.pair = p.pair.tag();
            r.learner = learner_tag;
            r.strategy = s;
            r.rep = rep;
            if (s == Strategy::EaZ) r.zeta = z;
            if (s != Strategy::ManualUp && !failure.empty()) {
                r.status = "error: " + failure;
            } else {
                try {
                    const auto scored = score(s, probs.empty() ? std::vector<double>(efforts.size(), 0.0) : probs,
                                              efforts, {.threshold = cfg.threshold, .zeta = s == Strategy::EaZ ? z : cfg.zeta});
                    evaluate_into(r, rank(scored), actuals, efforts, cfg.budget);
                } catch (const Error& e) {
                    r.recall20.reset();
                    r.popt.reset();
                    r.ifa.reset();
                    r.status = std::string("error: ") + e.what();
                }
            }
            out.push_back(std::move(r));
        }
    }
    return out;
}

} // namespace detail

// Loads and preprocesses every dataset of the manifest. Any dataset that
// cannot be found aborts the run before training starts.
inline std::vector<PreparedPair> prepare_pairs(const ExperimentManifest& m, const DatasetCatalog& catalog) {
    std::vector<std::string> missing;
    for (const auto& p : m.pairs)
        for (const auto* name : {&p.train, &p.test})
            if (!catalog.locate(p.source, *name)) {
                const auto entry = p.source + "/" + *name;
                if (std::find(missing.begin(), missing.end(), entry) == missing.end()) missing.push_back(entry);
            }
    if (!missing.empty())
        throw ConfigError("unresolvable dataset(s): " + text::join(missing, ", "));

    std::map<std::pair<std::string, std::string>, Dataset> cache;
    const auto get = [&](const std::string& source, const std::string& name) -> const Dataset& {
        auto it = cache.find({source, name});
        if (it == cache.end()) it = cache.emplace(std::pair{source, name}, catalog.prepared(source, name)).first;
        return it->second;
    };
    std::vector<PreparedPair> out;
    out.reserve(m.pairs.size());
    for (const auto& p : m.pairs) out.push_back({p, get(p.source, p.train), get(p.source, p.test)});
    return out;
}

// Runs the pair x learner x repetition matrix, every strategy per cell. Row
// order follows the manifest, then learners, repetitions, strategies and
// zeta values as configured, whatever the worker count.
inline ResultTable run_experiment(const RunConfig& cfg, const ExperimentManifest& manifest,
                                  const DatasetCatalog& catalog) {
    cfg.validate();
    std::vector<learners::LearnerSpec> specs;
    for (const auto& tag : cfg.learners) specs.push_back(learners::make_learner_spec(tag, cfg.zoo));
    const auto pairs = prepare_pairs(manifest, catalog);

    std::vector<detail::Cell> cells;
    for (std::size_t p = 0; p < pairs.size(); ++p)
        for (std::size_t l = 0; l < specs.size(); ++l)
            for (int r = 0; r < cfg.repetitions; ++r) cells.push_back({p, l, r});

    std::vector<std::vector<EvalResult>> results(cells.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr fatal;
    std::mutex fatal_mutex;
    const auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            try {
                const auto& c = cells[i];
                results[i] = detail::run_cell(cfg, pairs[c.pair], cfg.learners[c.learner], specs[c.learner], c.rep);
            } catch (...) {
                std::lock_guard lock(fatal_mutex);
                if (!fatal) fatal = std::current_exception();
                next.store(cells.size());
            }
        }
    };
    const auto jobs = static_cast<std::size_t>(std::max(1, cfg.jobs));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        for (std::size_t t = 0; t < std::min(jobs, cells.size()); ++t) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }
    if (fatal) std::rethrow_exception(fatal);

    ResultTable table;
    for (auto& chunk : results)
        for (auto& r : chunk) table.rows.push_back(std::move(r));
    table.check_unique_keys();
    return table;
}

inline ResultTable run_experiment(const RunConfig& cfg) {
    if (cfg.manifest.empty()) throw ConfigError("no manifest given (--manifest)");
    const auto manifest = load_manifest(cfg.manifest);
    const auto profiles = cfg.sources.empty() ? default_source_profiles() : load_source_profiles(cfg.sources);
    return run_experiment(cfg, manifest, DirectoryCatalog(cfg.data_dir, profiles));
}

inline const std::vector<double>& default_zeta_grid() {
    static const std::vector<double> grid = {0.005, 0.01, 0.02, 0.05, 0.1};
    return grid;
}

// EA-Z is evaluated at every grid value; other strategies once per cell.
inline RunConfig with_zeta_grid(RunConfig cfg, std::vector<double> grid) {
    if (grid.empty()) throw ConfigError("zeta grid must not be empty");
    cfg.zeta_grid = std::move(grid);
    if (std::find(cfg.strategies.begin(), cfg.strategies.end(), Strategy::EaZ) == cfg.strategies.end())
        cfg.strategies.push_back(Strategy::EaZ);
    return cfg;
}

inline ResultTable sweep_zeta(const RunConfig& cfg, const ExperimentManifest& manifest,
                              const DatasetCatalog& catalog) {
    return run_experiment(with_zeta_grid(cfg, cfg.zeta_grid.empty() ? default_zeta_grid() : cfg.zeta_grid),
                          manifest, catalog);
}

struct SyntheticCorpus {
    ExperimentManifest manifest;
    MemoryCatalog catalog;
};

// Generated pairs registered under the "SYNTH" source.
inline SyntheticCorpus synthetic_corpus(const std::vector<SyntheticSpec>& specs) {
    SyntheticCorpus c;
    for (const auto& spec : specs) {
        auto [train, test] = generate_synthetic_pair(spec);
        c.manifest.pairs.push_back({"SYNTH", train.name(), test.name()});
        c.catalog.add("SYNTH", std::move(train));
        c.catalog.add("SYNTH", std::move(test));
    }
    return c;
}

} // namespace effortrank
