#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iterator>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "effortrank/error.hpp"
#include "effortrank/runner.hpp"
#include "effortrank/stats.hpp"
#include "effortrank/strategies.hpp"
#include "effortrank/text.hpp"

namespace effortrank {

enum class Indicator { Recall20, Popt, Ifa };

inline constexpr Indicator kIndicators[] = {Indicator::Recall20, Indicator::Popt, Indicator::Ifa};

inline std::string_view to_string(Indicator i) {
    switch (i) {
    case Indicator::Recall20: return "recall20";
    case Indicator::Popt: return "popt";
    case Indicator::Ifa: return "ifa";
    }
    return "?";
}

inline bool higher_is_better(Indicator i) { return i != Indicator::Ifa; }

inline std::optional<double> value_of(const EvalResult& r, Indicator i) {
    switch (i) {
    case Indicator::Recall20: return r.recall20;
    case Indicator::Popt: return r.popt;
    case Indicator::Ifa: return r.ifa;
    }
    return std::nullopt;
}

struct SummaryOptions {
    double reference_zeta = kDefaultZeta;
    double draw_epsilon = 0.0;
    stats::FdrMethod fdr = stats::FdrMethod::BenjaminiHochberg;
    std::size_t exact_limit = 12;
    double ifa_tolerance = 10.0;
};

struct IndicatorMeans {
    std::size_t cells = 0;
    std::optional<double> recall20, popt, ifa;
    std::optional<double> ifa_within_tolerance; // share of rows with IFA <= tolerance
};

struct Comparison {
    Indicator indicator = Indicator::Recall20;
    std::string rival;
    std::size_t cells = 0;
    stats::WinDrawLoss wdl; // from EA-Z's point of view
    std::optional<double> p_raw, p_adjusted, z;
    std::optional<stats::EffectSize> effect;
    std::string note;
};

struct TradeoffRow {
    std::string method;
    std::size_t cells = 0;
    double recall20 = 0.0;
    double ifa = 0.0;
    std::optional<stats::WinDrawLoss> vs_manual_up; // on Recall@20%
};

struct Summary {
    std::size_t rows = 0;
    std::size_t errored = 0;
    std::size_t no_defect = 0;
    std::optional<double> reference_zeta;        // zeta of the EA-Z rows used below
    std::vector<std::string> strategies;         // labels in table order
    std::map<std::string, IndicatorMeans> by_strategy;
    std::vector<std::string> learners;
    std::map<std::pair<std::string, std::string>, IndicatorMeans> by_learner; // (learner, strategy)
    std::vector<Comparison> comparisons;
    std::map<Indicator, stats::SKGrouping> sk;
    std::size_t sk_cells = 0;
    std::vector<TradeoffRow> tradeoff;
    std::vector<std::pair<double, IndicatorMeans>> zeta_sweep;
    std::vector<std::string> notes;
};

namespace detail {

inline IndicatorMeans mean_of(const std::vector<const EvalResult*>& rows, double tolerance) {
    IndicatorMeans m;
    m.cells = rows.size();
    for (Indicator ind : kIndicators) {
        double s = 0.0;
        std::size_t n = 0;
        for (const auto* r : rows)
            if (auto v = value_of(*r, ind)) {
                s += *v;
                ++n;
            }
        if (n == 0) continue;
        const double mean = s / static_cast<double>(n);
        if (ind == Indicator::Recall20) m.recall20 = mean;
        if (ind == Indicator::Popt) m.popt = mean;
        if (ind == Indicator::Ifa) m.ifa = mean;
    }
    std::size_t within = 0, with_ifa = 0;
    for (const auto* r : rows)
        if (r->ifa && r->status != kStatusNoDefect) {
            ++with_ifa;
            if (*r->ifa <= tolerance) ++within;
        }
    if (with_ifa > 0) m.ifa_within_tolerance = static_cast<double>(within) / static_cast<double>(with_ifa);
    return m;
}

struct CellKey {
    std::string pair, learner;
    int rep;
    auto operator<=>(const CellKey&) const = default;
};

} // namespace detail

// Label used for a row in the summary: the strategy name; EA-Z rows at
// other than the reference zeta are only reported in the sweep table.
inline Summary summarize(const ResultTable& rt, const SummaryOptions& opts = {}) {
    if (rt.rows.empty()) throw DomainError("cannot summarize an empty result table");
    Summary s;
    s.rows = rt.rows.size();
    for (const auto& r : rt.rows) {
        if (r.status == kStatusNoDefect) ++s.no_defect;
        else if (!r.ok()) ++s.errored;
    }

    std::set<double> zetas;
    for (const auto& r : rt.rows)
        if (r.strategy == Strategy::EaZ && r.zeta) zetas.insert(*r.zeta);
    if (!zetas.empty()) {
        double best = *zetas.begin();
        for (double z : zetas)
            if (std::abs(z - opts.reference_zeta) < std::abs(best - opts.reference_zeta)) best = z;
        s.reference_zeta = best;
    }
    const auto in_main = [&](const EvalResult& r) {
        return r.strategy != Strategy::EaZ || !r.zeta || !s.reference_zeta || *r.zeta == *s.reference_zeta;
    };

    for (Strategy st : kAllStrategies)
        if (std::any_of(rt.rows.begin(), rt.rows.end(), [&](const EvalResult& r) { return r.strategy == st; }))
            s.strategies.emplace_back(to_string(st));
    for (const auto& r : rt.rows)
        if (std::find(s.learners.begin(), s.learners.end(), r.learner) == s.learners.end())
            s.learners.push_back(r.learner);

    // Means per strategy and per (learner, strategy).
    std::map<std::string, std::vector<const EvalResult*>> per_strategy;
    std::map<std::pair<std::string, std::string>, std::vector<const EvalResult*>> per_learner;
    for (const auto& r : rt.rows) {
        if (!in_main(r)) continue;
        const std::string st(to_string(r.strategy));
        per_strategy[st].push_back(&r);
        per_learner[{r.learner, st}].push_back(&r);
    }
    for (const auto& [st, rows] : per_strategy) s.by_strategy[st] = detail::mean_of(rows, opts.ifa_tolerance);
    for (const auto& [key, rows] : per_learner) s.by_learner[key] = detail::mean_of(rows, opts.ifa_tolerance);

    // Lookup of ok rows by cell.
    std::map<std::string, std::map<detail::CellKey, const EvalResult*>> cell_rows;
    for (const auto& r : rt.rows)
        if (r.ok() && in_main(r)) cell_rows[std::string(to_string(r.strategy))][{r.pair, r.learner, r.rep}] = &r;

    // EA-Z against every other strategy, one observation per (pair, learner, rep).
    if (cell_rows.contains("ea_z")) {
        for (Indicator ind : kIndicators) {
            std::vector<std::size_t> tested;
            for (const auto& rival : s.strategies) {
                if (rival == "ea_z") continue;
                Comparison c;
                c.indicator = ind;
                c.rival = rival;
                std::vector<double> a, b;
                if (auto it = cell_rows.find(rival); it != cell_rows.end()) {
                    for (const auto& [key, ez] : cell_rows["ea_z"]) {
                        auto jt = it->second.find(key);
                        if (jt == it->second.end()) continue;
                        const auto va = value_of(*ez, ind), vb = value_of(*jt->second, ind);
                        if (!va || !vb) continue;
                        a.push_back(*va);
                        b.push_back(*vb);
                    }
                }
                c.cells = a.size();
                if (higher_is_better(ind)) c.wdl = stats::wdl(a, b, opts.draw_epsilon);
                else {
                    std::vector<double> na(a.size()), nb(b.size());
                    std::transform(a.begin(), a.end(), na.begin(), [](double v) { return -v; });
                    std::transform(b.begin(), b.end(), nb.begin(), [](double v) { return -v; });
                    c.wdl = stats::wdl(na, nb, opts.draw_epsilon);
                }
                if (!a.empty()) {
                    try {
                        const auto w = stats::wilcoxon_signed_rank(a, b, {.alternative = stats::Alternative::TwoSided,
                                                                          .exact_limit = opts.exact_limit});
                        c.p_raw = w.p;
                        c.z = w.z;
                        c.effect = stats::effect_size_r(w.z, 2 * a.size());
                        tested.push_back(s.comparisons.size());
                    } catch (const DomainError& e) {
                        c.note = e.what();
                    }
                } else {
                    c.note = "no paired cells";
                }
                s.comparisons.push_back(std::move(c));
            }
            std::vector<double> raw;
            for (std::size_t i : tested) raw.push_back(*s.comparisons[i].p_raw);
            const auto adj = stats::fdr_adjust(raw, opts.fdr);
            for (std::size_t k = 0; k < tested.size(); ++k) s.comparisons[tested[k]].p_adjusted = adj[k];
        }
    }

    // Method-level comparison: EA-Z and CBS+ with each learner, plus ManualUp.
    std::map<std::string, std::map<std::pair<std::string, int>, const EvalResult*>> methods;
    for (const auto& [st, cells] : cell_rows) {
        if (st != "ea_z" && st != "cbs_plus" && st != "manual_up") continue;
        for (const auto& [key, r] : cells) {
            const std::string name = st == "manual_up" ? st : st + "+" + key.learner;
            auto& slot = methods[name][{key.pair, key.rep}];
            if (!slot) slot = r;
        }
    }
    if (methods.size() >= 2) {
        std::set<std::pair<std::string, int>> common;
        bool first = true;
        for (const auto& [name, cells] : methods) {
            std::set<std::pair<std::string, int>> keys;
            for (const auto& [k, r] : cells) keys.insert(k);
            if (first) common = std::move(keys);
            else {
                std::set<std::pair<std::string, int>> both;
                std::set_intersection(common.begin(), common.end(), keys.begin(), keys.end(),
                                      std::inserter(both, both.begin()));
                common = std::move(both);
            }
            first = false;
        }
        s.sk_cells = common.size();
        if (!common.empty()) {
            for (Indicator ind : kIndicators) {
                std::map<std::string, std::vector<double>> samples;
                bool complete = true;
                for (const auto& [name, cells] : methods) {
                    auto& v = samples[name];
                    for (const auto& k : common) {
                        auto val = value_of(*cells.at(k), ind);
                        if (!val) complete = false;
                        else v.push_back(*val);
                    }
                }
                if (complete) s.sk[ind] = stats::scott_knott_esd(samples);
            }
        } else {
            s.notes.push_back("method grouping skipped: no cell has every method available");
        }

        if (methods.contains("manual_up")) {
            const auto& mu = methods["manual_up"];
            for (const auto& [name, cells] : methods) {
                TradeoffRow t;
                t.method = name;
                std::vector<double> a, b;
                double rs = 0.0, is = 0.0;
                std::size_t rn = 0, in = 0;
                for (const auto& [k, r] : cells) {
                    if (r->recall20) { rs += *r->recall20; ++rn; }
                    if (r->ifa) { is += *r->ifa; ++in; }
                    auto jt = mu.find(k);
                    if (jt != mu.end() && r->recall20 && jt->second->recall20) {
                        a.push_back(*r->recall20);
                        b.push_back(*jt->second->recall20);
                    }
                }
                t.cells = cells.size();
                t.recall20 = rn ? rs / static_cast<double>(rn) : 0.0;
                t.ifa = in ? is / static_cast<double>(in) : 0.0;
                if (name != "manual_up") t.vs_manual_up = stats::wdl(a, b, opts.draw_epsilon);
                s.tradeoff.push_back(std::move(t));
            }
            std::stable_sort(s.tradeoff.begin(), s.tradeoff.end(), [](const TradeoffRow& x, const TradeoffRow& y) {
                if (x.method == "manual_up" || y.method == "manual_up") return x.method == "manual_up" && y.method != "manual_up";
                return x.recall20 > y.recall20;
            });
        }
    }

    if (zetas.size() > 1) {
        for (double z : zetas) {
            std::vector<const EvalResult*> rows;
            for (const auto& r : rt.rows)
                if (r.strategy == Strategy::EaZ && r.zeta && *r.zeta == z) rows.push_back(&r);
            s.zeta_sweep.emplace_back(z, detail::mean_of(rows, opts.ifa_tolerance));
        }
    }
    return s;
}

// ------------------------------------------------------------------ report

struct PublishedRow {
    const char* strategy;
    double recall20, popt, ifa;
};

// Averages over 16 learners x 61 pairs as published with the method.
inline constexpr PublishedRow kPublishedMeans[] = {
    {"ea_z", 0.605, 0.813, 14.198},   {"prob", 0.153, 0.389, 1.853},
    {"label_loc", 0.37, 0.549, 6.337}, {"cbs_plus", 0.389, 0.602, 6.497},
    {"prob_loc", 0.587, 0.791, 13.25},
};

namespace detail {

inline std::string fixed_or_na(const std::optional<double>& v, int digits = 3) {
    return v ? text::format_fixed(*v, digits) : "NA";
}

inline std::string pad(const std::string& s, std::size_t w) {
    return s.size() >= w ? s + " " : s + std::string(w - s.size(), ' ');
}

inline std::string p_text(const std::optional<double>& p) {
    if (!p) return "n/a";
    if (*p < 0.001) return "<0.001";
    return text::format_fixed(*p, 3);
}

inline std::string wdl_text(const stats::WinDrawLoss& w) {
    return std::to_string(w.wins) + "/" + std::to_string(w.draws) + "/" + std::to_string(w.losses);
}

} // namespace detail

inline std::string render_summary(const Summary& s) {
    using detail::pad;
    std::string o;
    o += "Rows: " + std::to_string(s.rows) + "  errored: " + std::to_string(s.errored) +
         "  no-defect test sets: " + std::to_string(s.no_defect) + "\n";
    if (s.reference_zeta) o += "EA-Z zeta: " + text::format_double(*s.reference_zeta) + "\n";
    o += "\n";

    for (Indicator ind : kIndicators) {
        o += "== Average " + std::string(to_string(ind)) + " and comparison with EA-Z ==\n";
        o += pad("method", 16);
        for (const auto& st : s.strategies) o += pad(st, 14);
        o += "\n" + pad("average", 16);
        for (const auto& st : s.strategies) {
            const auto& m = s.by_strategy.at(st);
            o += pad(detail::fixed_or_na(ind == Indicator::Recall20 ? m.recall20
                                         : ind == Indicator::Popt   ? m.popt
                                                                    : m.ifa),
                     14);
        }
        o += "\n" + pad("published", 16);
        for (const auto& st : s.strategies) {
            std::string cell = "-";
            for (const auto& p : kPublishedMeans)
                if (st == p.strategy)
                    cell = text::format_double(ind == Indicator::Recall20 ? p.recall20
                                               : ind == Indicator::Popt   ? p.popt
                                                                          : p.ifa);
            o += pad(cell, 14);
        }
        const auto row = [&](const std::string& label, auto&& fn) {
            o += "\n" + pad(label, 16);
            for (const auto& st : s.strategies) {
                std::string cell = "-";
                for (const auto& c : s.comparisons)
                    if (c.indicator == ind && c.rival == st) cell = fn(c);
                o += pad(cell, 14);
            }
        };
        row("W/D/L", [](const Comparison& c) { return detail::wdl_text(c.wdl); });
        row("p (adjusted)", [](const Comparison& c) { return c.p_adjusted ? detail::p_text(c.p_adjusted) : "n/a"; });
        row("effect size r", [](const Comparison& c) {
            return c.effect ? text::format_fixed(c.effect->r, 3) : std::string("n/a");
        });
        row("interpretation", [](const Comparison& c) {
            return c.effect ? std::string(stats::to_string(c.effect->magnitude)) : std::string("n/a");
        });
        o += "\n\n";
    }

    o += "== Share of rankings with IFA <= 10 ==\n";
    for (const auto& st : s.strategies)
        o += pad(st, 16) + detail::fixed_or_na(s.by_strategy.at(st).ifa_within_tolerance) + "\n";
    o += "\n";

    if (!s.learners.empty()) {
        o += "== Average recall20 per learner ==\n" + pad("learner", 16);
        for (const auto& st : s.strategies) o += pad(st, 14);
        o += "\n";
        for (const auto& l : s.learners) {
            o += pad(l, 16);
            for (const auto& st : s.strategies) {
                auto it = s.by_learner.find({l, st});
                o += pad(it == s.by_learner.end() ? "-" : detail::fixed_or_na(it->second.recall20), 14);
            }
            o += "\n";
        }
        o += "\n";
    }

    for (const auto& [ind, g] : s.sk) {
        o += "== Scott-Knott ESD groups on " + std::string(to_string(ind)) + " (" +
             std::to_string(s.sk_cells) + " cells, group 1 = highest mean) ==\n";
        for (std::size_t i = 0; i < g.methods.size(); ++i)
            o += pad(std::to_string(g.groups[i]), 4) + pad(g.methods[i], 24) + text::format_fixed(g.means[i], 3) + "\n";
        o += "\n";
    }

    if (!s.tradeoff.empty()) {
        o += "== Trade-off between recall20 and IFA ==\n";
        o += pad("method", 24) + pad("recall20", 10) + pad("W/D/L vs manual_up", 20) + "IFA\n";
        for (const auto& t : s.tradeoff)
            o += pad(t.method, 24) + pad(text::format_fixed(t.recall20, 3), 10) +
                 pad(t.vs_manual_up ? detail::wdl_text(*t.vs_manual_up) : "-", 20) + text::format_fixed(t.ifa, 3) + "\n";
        o += "published: manual_up 0.629 / IFA 21.213, cbs_plus+rf 0.355 (7/1/53) / 4.049, "
             "ea_z+rf 0.626 (29/5/27) / 10.623, ea_z+ubag_svm 0.637 (35/10/16) / 13.820\n\n";
    }

    if (!s.zeta_sweep.empty()) {
        o += "== EA-Z zeta sweep ==\n" + pad("zeta", 10) + pad("recall20", 10) + pad("popt", 10) + "ifa\n";
        for (const auto& [z, m] : s.zeta_sweep)
            o += pad(text::format_double(z), 10) + pad(detail::fixed_or_na(m.recall20), 10) +
                 pad(detail::fixed_or_na(m.popt), 10) + detail::fixed_or_na(m.ifa) + "\n";
        o += "\n";
    }
    for (const auto& n : s.notes) o += "note: " + n + "\n";
    return o;
}

// summary.txt plus machine-readable tables and box-plot feeds under `dir`.
inline void write_report(const Summary& s, const ResultTable& rt, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(fs::path(dir) / "boxplot");
    const auto path = [&](const std::string& f) { return (fs::path(dir) / f).string(); };
    text::write_file(path("summary.txt"), render_summary(s));

    std::string means = "strategy,cells,recall20,popt,ifa,ifa_le_10\n";
    for (const auto& st : s.strategies) {
        const auto& m = s.by_strategy.at(st);
        means += st + "," + std::to_string(m.cells) + "," + detail::opt_text(m.recall20) + "," +
                 detail::opt_text(m.popt) + "," + detail::opt_text(m.ifa) + "," +
                 detail::opt_text(m.ifa_within_tolerance) + "\n";
    }
    text::write_file(path("means_by_strategy.csv"), means);

    std::string by_learner = "learner,strategy,cells,recall20,popt,ifa\n";
    for (const auto& [key, m] : s.by_learner)
        by_learner += key.first + "," + key.second + "," + std::to_string(m.cells) + "," +
                      detail::opt_text(m.recall20) + "," + detail::opt_text(m.popt) + "," + detail::opt_text(m.ifa) + "\n";
    text::write_file(path("means_by_learner.csv"), by_learner);

    std::string comps = "indicator,baseline,rival,cells,wins,draws,losses,p_raw,p_adjusted,z,effect_r,magnitude,note\n";
    for (const auto& c : s.comparisons)
        comps += std::string(to_string(c.indicator)) + ",ea_z," + c.rival + "," + std::to_string(c.cells) + "," +
                 std::to_string(c.wdl.wins) + "," + std::to_string(c.wdl.draws) + "," + std::to_string(c.wdl.losses) +
                 "," + detail::opt_text(c.p_raw) + "," + detail::opt_text(c.p_adjusted) + "," + detail::opt_text(c.z) +
                 "," + (c.effect ? text::format_double(c.effect->r) : "NA") + "," +
                 (c.effect ? std::string(stats::to_string(c.effect->magnitude)) : "NA") + "," +
                 detail::clean_status(c.note) + "\n";
    text::write_file(path("comparisons.csv"), comps);

    for (const auto& [ind, g] : s.sk) {
        std::string out = "method,mean,group\n";
        for (std::size_t i = 0; i < g.methods.size(); ++i)
            out += g.methods[i] + "," + text::format_double(g.means[i]) + "," + std::to_string(g.groups[i]) + "\n";
        text::write_file(path("sk_" + std::string(to_string(ind)) + ".csv"), out);
    }

    if (!s.tradeoff.empty()) {
        std::string out = "method,cells,recall20,ifa,wins,draws,losses\n";
        for (const auto& t : s.tradeoff)
            out += t.method + "," + std::to_string(t.cells) + "," + text::format_double(t.recall20) + "," +
                   text::format_double(t.ifa) + "," +
                   (t.vs_manual_up ? std::to_string(t.vs_manual_up->wins) + "," + std::to_string(t.vs_manual_up->draws) +
                                         "," + std::to_string(t.vs_manual_up->losses)
                                   : std::string("NA,NA,NA")) +
                   "\n";
        text::write_file(path("tradeoff.csv"), out);
    }

    if (!s.zeta_sweep.empty()) {
        std::string out = "zeta,cells,recall20,popt,ifa\n";
        for (const auto& [z, m] : s.zeta_sweep)
            out += text::format_double(z) + "," + std::to_string(m.cells) + "," + detail::opt_text(m.recall20) + "," +
                   detail::opt_text(m.popt) + "," + detail::opt_text(m.ifa) + "\n";
        text::write_file(path("zeta_sweep.csv"), out);
    }

    // One file per (indicator, data source): strategy,value rows.
    std::map<std::string, std::map<Indicator, std::string>> feeds;
    for (const auto& r : rt.rows) {
        if (!r.ok()) continue;
        if (r.strategy == Strategy::EaZ && r.zeta && s.reference_zeta && *r.zeta != *s.reference_zeta) continue;
        for (Indicator ind : kIndicators)
            if (auto v = value_of(r, ind))
                feeds[r.source][ind] += std::string(to_string(r.strategy)) + "," + text::format_double(*v) + "\n";
    }
    for (const auto& [source, by_ind] : feeds)
        for (const auto& [ind, body] : by_ind)
            text::write_file(path("boxplot/" + std::string(to_string(ind)) + "_" + source + ".csv"),
                             "strategy,value\n" + body);
}

} // namespace effortrank
