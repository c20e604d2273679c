#pragma once

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include <json.hpp>

#include "aapack/experiment.hpp"
#include "aapack/mixloss.hpp"

namespace aapack {

using nlohmann::json;

inline constexpr const char* kReportSchema = "aapack.report";
inline constexpr int kReportVersion = 1;

enum class ReportFormat { json, csv, table };

inline ReportFormat report_format_from_string(std::string_view s) {
    if (s == "json") return ReportFormat::json;
    if (s == "csv") return ReportFormat::csv;
    if (s == "table") return ReportFormat::table;
    throw DomainError("unknown report format '" + std::string(s) + "'");
}

/// Shortest decimal that reads back to the same double.
inline std::string format_real(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

namespace detail {

// JSON has no infinities; they travel as the strings "inf", "-inf", "nan".
inline json real(double x) {
    if (std::isfinite(x)) return x;
    return format_real(x);
}

inline double real(const json& j) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") return kInf;
        if (s == "-inf") return -kInf;
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
        throw DataError("report: bad number '" + s + "'");
    }
    return j.get<double>();
}

inline json reals(std::span<const double> xs) {
    json a = json::array();
    for (double x : xs) a.push_back(real(x));
    return a;
}

inline std::vector<double> reals_from(const json& j) {
    std::vector<double> v;
    for (const auto& x : j) v.push_back(real(x));
    return v;
}

}  // namespace detail

inline json to_json(const GameSpec& g) {
    return {{"lower", g.lower}, {"upper", g.upper}, {"eta", g.eta}, {"c", g.c_admissible},
            {"loss_scale", g.loss_scale}};
}

inline GameSpec game_from_json(const json& j) {
    GameSpec g;
    g.lower = j.at("lower").get<double>();
    g.upper = j.at("upper").get<double>();
    g.eta = j.at("eta").get<double>();
    g.c_admissible = j.at("c").get<double>();
    g.loss_scale = j.at("loss_scale").get<double>();
    return g;
}

inline json to_json(const TrialRecord& r) {
    return {{"trial", r.trial_index},
            {"pack_size", r.pack_size},
            {"learner_preds", detail::reals(r.learner_preds)},
            {"learner_pack_loss", detail::real(r.learner_pack_loss)},
            {"expert_pack_losses", detail::reals(r.expert_pack_losses)},
            {"cumulative_loss", detail::real(r.cumulative_loss)},
            {"cumulative_average_loss", detail::real(r.cumulative_average_loss)},
            {"expert_cumulative_losses", detail::reals(r.expert_cumulative_losses)},
            {"expert_cumulative_average_losses", detail::reals(r.expert_cumulative_average_losses)}};
}

inline TrialRecord record_from_json(const json& j) {
    TrialRecord r;
    r.trial_index = j.at("trial").get<std::size_t>();
    r.pack_size = j.at("pack_size").get<std::size_t>();
    r.learner_preds = detail::reals_from(j.at("learner_preds"));
    r.learner_pack_loss = detail::real(j.at("learner_pack_loss"));
    r.expert_pack_losses = detail::reals_from(j.at("expert_pack_losses"));
    r.cumulative_loss = detail::real(j.at("cumulative_loss"));
    r.cumulative_average_loss = detail::real(j.at("cumulative_average_loss"));
    r.expert_cumulative_losses = detail::reals_from(j.at("expert_cumulative_losses"));
    r.expert_cumulative_average_losses = detail::reals_from(j.at("expert_cumulative_average_losses"));
    return r;
}

inline json to_json(const BoundReport& b) {
    json experts = json::array();
    for (const auto& e : b.experts)
        experts.push_back({{"expert", e.expert},
                           {"learner_loss", detail::real(e.learner_loss)},
                           {"expert_loss", detail::real(e.expert_loss)},
                           {"bound", detail::real(e.bound)},
                           {"slack", detail::real(e.slack)}});
    return {{"guarantee", to_string(b.guarantee)},
            {"metric", to_string(b.metric)},
            {"c", b.c},
            {"eta", b.eta},
            {"k", b.k},
            {"k_min", b.k_min},
            {"prior", detail::reals(b.prior)},
            {"experts", experts},
            {"min_slack", detail::real(b.min_slack)},
            {"violations", b.violations},
            {"prefixes_checked", b.prefixes_checked},
            {"passed", b.passed()}};
}

inline BoundReport bound_report_from_json(const json& j) {
    BoundReport b;
    b.guarantee = guarantee_from_string(j.at("guarantee").get<std::string>());
    b.metric = j.at("metric").get<std::string>() == "average" ? Metric::average : Metric::plain;
    b.c = j.at("c").get<double>();
    b.eta = j.at("eta").get<double>();
    b.k = j.at("k").get<std::size_t>();
    b.k_min = j.at("k_min").get<std::size_t>();
    b.prior = detail::reals_from(j.at("prior"));
    for (const auto& e : j.at("experts"))
        b.experts.push_back({e.at("expert").get<std::size_t>(), detail::real(e.at("learner_loss")),
                             detail::real(e.at("expert_loss")), detail::real(e.at("bound")),
                             detail::real(e.at("slack"))});
    b.min_slack = detail::real(j.at("min_slack"));
    b.violations = j.at("violations").get<std::size_t>();
    b.prefixes_checked = j.at("prefixes_checked").get<std::size_t>();
    return b;
}

inline json to_json(const ShuffleSummary& s) {
    return {{"seed", s.seed},
            {"losses", detail::reals(s.losses)},
            {"mean", detail::real(s.mean)},
            {"min", detail::real(s.min)},
            {"max", detail::real(s.max)},
            {"delay_bound", detail::real(s.delay_bound)},
            {"bound_violations", s.bound_violations}};
}

inline ShuffleSummary shuffle_from_json(const json& j) {
    ShuffleSummary s;
    s.seed = j.at("seed").get<std::uint64_t>();
    s.losses = detail::reals_from(j.at("losses"));
    s.mean = detail::real(j.at("mean"));
    s.min = detail::real(j.at("min"));
    s.max = detail::real(j.at("max"));
    s.delay_bound = detail::real(j.at("delay_bound"));
    s.bound_violations = j.at("bound_violations").get<std::size_t>();
    return s;
}

inline json to_json(const ExperimentResult& r) {
    json runs = json::array();
    for (const auto& run : r.runs) {
        json records = json::array();
        for (const auto& rec : run.records) records.push_back(to_json(rec));
        json audits = json::array();
        for (const auto& a : run.audits) audits.push_back(to_json(a));
        runs.push_back({{"algorithm", to_string(run.algorithm)},
                        {"declared_k", run.declared_k},
                        {"pool_size", run.pool_size},
                        {"total_loss", detail::real(run.total_loss)},
                        {"total_average_loss", detail::real(run.total_average_loss)},
                        {"records", records},
                        {"audits", audits}});
    }
    return {{"schema", kReportSchema},
            {"version", kReportVersion},
            {"game", to_json(r.game)},
            {"experts", r.experts},
            {"trials", r.trials},
            {"items", r.items},
            {"prior", detail::reals(r.prior)},
            {"runs", runs},
            {"shuffle", r.shuffle ? to_json(*r.shuffle) : json(nullptr)},
            {"audits_passed", r.audits_passed()}};
}

inline ExperimentResult experiment_from_json(const json& j) {
    if (j.value("schema", "") != kReportSchema) throw DataError("report: unknown schema");
    if (j.value("version", 0) != kReportVersion)
        throw DataError("report: unsupported version " + std::to_string(j.value("version", 0)));
    ExperimentResult r;
    r.game = game_from_json(j.at("game"));
    r.experts = j.at("experts").get<std::size_t>();
    r.trials = j.at("trials").get<std::size_t>();
    r.items = j.at("items").get<std::size_t>();
    r.prior = detail::reals_from(j.at("prior"));
    for (const auto& jr : j.at("runs")) {
        AlgorithmRun run;
        run.algorithm = algorithm_from_string(jr.at("algorithm").get<std::string>());
        run.declared_k = jr.at("declared_k").get<std::size_t>();
        run.pool_size = jr.at("pool_size").get<std::size_t>();
        run.total_loss = detail::real(jr.at("total_loss"));
        run.total_average_loss = detail::real(jr.at("total_average_loss"));
        for (const auto& rec : jr.at("records")) run.records.push_back(record_from_json(rec));
        for (const auto& a : jr.at("audits")) run.audits.push_back(bound_report_from_json(a));
        r.runs.push_back(std::move(run));
    }
    if (!j.at("shuffle").is_null()) r.shuffle = shuffle_from_json(j.at("shuffle"));
    return r;
}

/// Per-trial cumulative plain losses, one column per algorithm.
inline std::string to_csv(const ExperimentResult& r) {
    std::ostringstream os;
    os << "trial,pack_size";
    for (const auto& run : r.runs) os << ',' << to_string(run.algorithm);
    os << '\n';
    if (r.runs.empty()) return os.str();
    const auto& first = r.runs.front().records;
    for (std::size_t t = 0; t < first.size(); ++t) {
        os << first[t].trial_index << ',' << first[t].pack_size;
        for (const auto& run : r.runs) os << ',' << format_real(run.records.at(t).cumulative_loss);
        os << '\n';
    }
    return os.str();
}

struct TableOptions {
    double scale = 1.0;  // displayed losses are divided by this
};

/// Total-loss summary, one row per algorithm.
inline std::string to_table(const ExperimentResult& r, const TableOptions& opt = {}) {
    std::ostringstream os;
    os << std::left << std::setw(22) << "algorithm" << std::right << std::setw(18) << "total loss"
       << std::setw(18) << "average loss" << "  bounds\n";
    os << std::setprecision(6) << std::fixed;
    auto row = [&](const std::string& name, double total, std::optional<double> avg, const std::string& status) {
        os << std::left << std::setw(22) << name << std::right << std::setw(18) << total / opt.scale;
        if (avg)
            os << std::setw(18) << *avg / opt.scale;
        else
            os << std::setw(18) << "-";
        os << "  " << status << '\n';
    };
    for (const auto& run : r.runs)
        row(std::string(to_string(run.algorithm)), run.total_loss, run.total_average_loss,
            run.audits_passed() ? "pass" : "FAIL");
    if (r.shuffle) {
        const auto& s = *r.shuffle;
        row("parallel (shuffled)", s.mean, std::nullopt, s.bound_violations == 0 ? "pass" : "FAIL");
        os << "  " << s.losses.size() << " shuffles, seed " << s.seed << ", min " << s.min / opt.scale
           << ", max " << s.max / opt.scale << '\n';
    }
    if (opt.scale != 1.0) os << "  (losses divided by " << std::defaultfloat << opt.scale << ")\n";
    return os.str();
}

inline std::string emit_report(const ExperimentResult& r, ReportFormat f, const TableOptions& opt = {}) {
    switch (f) {
        case ReportFormat::json: return to_json(r).dump(2) + "\n";
        case ReportFormat::csv: return to_csv(r);
        case ReportFormat::table: return to_table(r, opt);
    }
    return {};
}

inline void write_report(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out.flush()) throw DataError("error writing '" + path.string() + "'");
}

inline json to_json(const mixloss::MixLossGame& g) {
    json trials = json::array();
    for (const auto& t : g.trials) {
        json dists = json::array();
        for (const auto& d : t.learner_distributions) dists.push_back(detail::reals(d));
        json losses = json::array();
        for (std::size_t k = 0; k < t.nature_losses.rows(); ++k) losses.push_back(detail::reals(t.nature_losses.row(k)));
        trials.push_back({{"pack_size", t.pack_size},
                          {"learner_distributions", dists},
                          {"nature_losses", losses},
                          {"learner_loss", detail::real(t.learner_loss)},
                          {"expert_pack_losses", detail::reals(t.expert_pack_losses)},
                          {"regret_increment", detail::real(t.regret_increment())}});
    }
    return {{"schema", "aapack.mixloss"},
            {"version", kReportVersion},
            {"learner", g.learner},
            {"nature", g.nature},
            {"experts", g.experts},
            {"trials", trials},
            {"total_loss", detail::real(g.total_loss)},
            {"expert_losses", detail::reals(g.expert_losses)},
            {"regret", detail::real(g.regret)}};
}

}  // namespace aapack
