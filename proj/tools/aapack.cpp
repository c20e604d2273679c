// aapack command-line tool: run, synth, adversary, audit.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "aapack/aapack.hpp"

namespace {

using namespace aapack;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitAudit = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep))
        if (!item.empty()) out.push_back(item);
    return out;
}

// "e1..e12" expands to e1, e2, ..., e12; other items pass through.
std::vector<std::string> expand_columns(const std::string& spec) {
    std::vector<std::string> out;
    for (const auto& item : split(spec, ',')) {
        const auto dots = item.find("..");
        if (dots == std::string::npos) {
            out.push_back(item);
            continue;
        }
        const std::string lo = item.substr(0, dots), hi = item.substr(dots + 2);
        auto digits = [](const std::string& s) {
            std::size_t i = s.size();
            while (i > 0 && std::isdigit(static_cast<unsigned char>(s[i - 1]))) --i;
            return i;
        };
        const std::size_t a = digits(lo), b = digits(hi);
        if (a == lo.size() || b == hi.size() || lo.substr(0, a) != hi.substr(0, b))
            throw UsageError("bad column range '" + item + "' (expected like e1..e12)");
        const int from = std::stoi(lo.substr(a)), to = std::stoi(hi.substr(b));
        if (from > to) throw UsageError("bad column range '" + item + "'");
        for (int i = from; i <= to; ++i) out.push_back(lo.substr(0, a) + std::to_string(i));
    }
    if (out.empty()) throw UsageError("no expert columns given");
    return out;
}

std::vector<double> parse_reals(const std::string& s, const char* what) {
    std::vector<double> out;
    for (const auto& item : split(s, ',')) {
        const auto v = detail::parse_real(item);
        if (!v) throw UsageError(std::string(what) + ": not a number '" + item + "'");
        out.push_back(*v);
    }
    return out;
}

std::vector<std::size_t> parse_sizes(const std::string& s) {
    std::vector<std::size_t> out;
    for (const auto& item : split(s, ',')) {
        const auto v = detail::parse_int(item);
        if (!v || *v < 1) throw UsageError("--packs: pack sizes must be positive integers, got '" + item + "'");
        out.push_back(static_cast<std::size_t>(*v));
    }
    if (out.empty()) throw UsageError("--packs: need at least one pack size");
    return out;
}

// Options shared by the experiment-running subcommands.
struct CommonOptions {
    std::optional<double> lower, upper;
    std::optional<double> eta;
    double c = 1.0;
    std::string prior = "uniform";
    std::string algorithms = "all";
    std::optional<std::size_t> declared_k;
    std::size_t shuffles = 0;
    std::uint64_t seed = 0;
    std::string format = "table";
    std::string out;
    double scale = 1.0;
    bool every_prefix = false;
};

struct DataOptions {
    std::string path;
    std::string timestamp_col = "date";
    std::string year_col;
    std::string target;
    std::string experts;
    std::string order_col;
    std::size_t calibration_packs = 0;
};

struct SynthOptions {
    std::size_t experts = 3;
    std::size_t trials = 50;
    std::size_t min_pack = 1;
    std::size_t max_pack = 7;
    std::size_t drift = 0;
    double noise = 0.05;
    std::string emit_csv;
};

struct AdversaryOptions {
    std::size_t experts = 2;
    std::string packs = "3,3,3";
    std::string learner = "uniform";
    std::string format = "table";
    std::string out;
};

void add_common(CLI::App* app, CommonOptions& o, bool with_interval) {
    if (with_interval) {
        app->add_option("--lower", o.lower, "Lower end A of the outcome interval");
        app->add_option("--upper", o.upper, "Upper end B of the outcome interval");
    }
    app->add_option("--eta", o.eta, "Learning rate (default 2/(B-A)^2)");
    app->add_option("--c", o.c, "Admissible constant C (>= 1)");
    app->add_option("--prior", o.prior, "'uniform' or comma-separated expert weights");
    app->add_option("--algorithms", o.algorithms,
                    "'all' or comma list of aa, aap-e, aap-max, aap-incremental, aap-current, parallel");
    app->add_option("--k", o.declared_k, "Declared pack size for aap-e / aap-max (default: largest pack)");
    app->add_option("--shuffles", o.shuffles, "Parallel Copies runs over shuffled packs (0 = none)");
    app->add_option("--seed", o.seed, "Seed for every random choice");
    app->add_option("--format", o.format, "table, csv or json")->check(CLI::IsMember({"table", "csv", "json"}));
    app->add_option("--out", o.out, "Write the report here instead of stdout");
    app->add_option("--scale", o.scale, "Divide losses by this in table output")->check(CLI::PositiveNumber);
    app->add_flag("--every-prefix", o.every_prefix, "Audit bounds at every trial, not only the last");
}

void add_data(CLI::App* app, DataOptions& d) {
    app->add_option("--data", d.path, "Input CSV")->required();
    app->add_option("--timestamp-col", d.timestamp_col, "Timestamp column (YYYY-MM[-DD], or month 1..12 with --year-col)");
    app->add_option("--year-col", d.year_col, "Year column; makes --timestamp-col a month number");
    app->add_option("--target", d.target, "Outcome column")->required();
    app->add_option("--experts", d.experts, "Expert columns: comma list, ranges like e1..e12 allowed")->required();
    app->add_option("--order-col", d.order_col, "Column ordering rows within a month");
    app->add_option("--calibration-packs", d.calibration_packs,
                    "Fix [A,B] from the first n months and drop them (alternative to --lower/--upper)");
}

std::vector<Algorithm> select_algorithms(const std::string& spec, const PackStream& stream) {
    if (spec == "all") return all_algorithms(stream);
    std::vector<Algorithm> out;
    for (const auto& name : split(spec, ',')) out.push_back(algorithm_from_string(name));
    if (out.empty()) throw UsageError("--algorithms: nothing selected");
    return out;
}

std::vector<double> select_prior(const std::string& spec, std::size_t experts) {
    if (spec == "uniform") return uniform_prior(experts);
    auto p = parse_reals(spec, "--prior");
    if (p.size() != experts)
        throw UsageError("--prior has " + std::to_string(p.size()) + " weights for " + std::to_string(experts) +
                         " experts");
    validate_probability_vector(p, "--prior");
    return p;
}

GameSpec make_game(double lower, double upper, const CommonOptions& o) {
    GameSpec g = GameSpec::square(lower, upper);
    g.c_admissible = o.c;
    if (o.eta) g.eta = *o.eta;
    g.validate();
    if (!g.within_mixable_rate())
        std::cerr << "warning: eta " << g.eta << " exceeds the maximal mixable rate "
                  << max_mixable_eta(lower, upper) << " for [" << lower << ", " << upper
                  << "]; guarantees need C >= " << g.eta / max_mixable_eta(lower, upper) << "\n";
    return g;
}

void emit(const std::string& text, const std::string& out) {
    if (out.empty())
        std::cout << text;
    else
        write_report(out, text);
}

ExperimentResult experiment(const PackStream& stream, const GameSpec& game, const CommonOptions& o) {
    ExperimentConfig cfg;
    cfg.algorithms = select_algorithms(o.algorithms, stream);
    cfg.prior = select_prior(o.prior, stream.experts);
    cfg.declared_k = o.declared_k;
    cfg.audit_every_prefix = o.every_prefix;
    if (o.shuffles > 0) cfg.shuffle = ShuffleRequest{o.shuffles, o.seed};
    return run_experiment(stream, game, cfg);
}

LoadedDataset load(const DataOptions& d, const CommonOptions& o) {
    DatasetSpec spec;
    spec.path = d.path;
    spec.timestamp_column = d.timestamp_col;
    spec.target_column = d.target;
    spec.expert_columns = expand_columns(d.experts);
    if (!d.order_col.empty()) spec.order_column = d.order_col;
    if (!d.year_col.empty()) spec.year_column = d.year_col;
    const bool explicit_bounds = o.lower || o.upper;
    if (explicit_bounds && d.calibration_packs > 0)
        throw UsageError("give either --lower/--upper or --calibration-packs, not both");
    if (d.calibration_packs > 0) {
        spec.clip = ClipPolicy::calibration(d.calibration_packs);
    } else {
        if (!o.lower || !o.upper) throw UsageError("need --lower and --upper, or --calibration-packs");
        spec.clip = ClipPolicy::bounds(*o.lower, *o.upper);
    }
    return load_pack_csv(spec);
}

void write_stream_csv(const PackStream& s, const std::string& path) {
    std::ostringstream os;
    os << "date,target";
    for (std::size_t n = 0; n < s.experts; ++n) os << ",e" << n + 1;
    os << '\n';
    for (std::size_t t = 0; t < s.packs.size(); ++t) {
        const std::string month = detail::month_label(2000 * 12 + static_cast<int>(t));
        const auto& p = s.packs[t];
        for (std::size_t k = 0; k < p.size(); ++k) {
            os << month << ',' << format_real(p.outcomes[k]);
            for (double x : p.item(k)) os << ',' << format_real(x);
            os << '\n';
        }
    }
    write_report(path, os.str());
}

std::unique_ptr<mixloss::Learner> make_learner(const std::string& name, std::size_t experts) {
    if (name == "uniform") return std::make_unique<mixloss::UniformLearner>(experts);
    if (name == "exp-weights") return std::make_unique<mixloss::ExponentialWeightsLearner>(experts, false);
    if (name == "exp-weights-incremental")
        return std::make_unique<mixloss::ExponentialWeightsLearner>(experts, true);
    throw UsageError("--learner: unknown learner '" + name + "'");
}

int run_adversary(const AdversaryOptions& a) {
    if (a.experts < 1) throw UsageError("--experts must be at least 1");
    const auto sizes = parse_sizes(a.packs);
    auto learner = make_learner(a.learner, a.experts);
    mixloss::AdversaryNature nature;
    const auto game = mixloss::run_mixloss_game(*learner, nature, sizes);
    double forced = 0.0;
    for (std::size_t k : sizes) forced += static_cast<double>(k) * std::log(static_cast<double>(a.experts));
    if (a.format == "json") {
        auto j = to_json(game);
        j["forced_regret"] = detail::real(forced);
        emit(j.dump(2) + "\n", a.out);
    } else {
        std::ostringstream os;
        os << "learner " << game.learner << " vs " << game.nature << ", N = " << a.experts << ", packs " << a.packs
           << "\n";
        os << "  learner mix loss  " << format_real(game.total_loss) << "\n";
        os << "  best expert loss  "
           << format_real(*std::min_element(game.expert_losses.begin(), game.expert_losses.end())) << "\n";
        os << "  regret            " << format_real(game.regret) << "\n";
        os << "  sum K_t ln N      " << format_real(forced) << "\n";
        emit(os.str(), a.out);
    }
    return kExitOk;
}

// Re-audit the records stored in a JSON report.
ExperimentResult reaudit(const std::string& path, bool every_prefix) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path + ": " + e.what());
    }
    ExperimentResult r = experiment_from_json(j);
    for (auto& run : r.runs) {
        AuditParams ap;
        ap.c = r.game.c_admissible;
        ap.eta = r.game.eta;
        ap.prior = r.prior;
        if (run.algorithm == Algorithm::aa) ap.declared_k = 1;
        if (run.declared_k > 0) ap.declared_k = run.declared_k;
        run.audits.clear();
        for (Guarantee g : guarantees_for(run.algorithm))
            run.audits.push_back(audit_run(run.records, g, ap, {every_prefix, kAccumTol}));
    }
    return r;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Aggregating Algorithm for packs: experiments, bounds and the mix-loss adversary"};
    app.require_subcommand(1);

    CommonOptions run_o, synth_o, audit_o;
    DataOptions run_d, audit_d;
    SynthOptions synth;
    AdversaryOptions adv;
    std::string audit_report;

    auto* run = app.add_subcommand("run", "Run algorithms over a timestamped CSV");
    add_data(run, run_d);
    add_common(run, run_o, true);

    auto* syn = app.add_subcommand("synth", "Run algorithms over a synthetic drifting stream on [0,1]");
    syn->add_option("--experts", synth.experts, "Number of experts")->check(CLI::PositiveNumber);
    syn->add_option("--trials", synth.trials, "Number of packs");
    syn->add_option("--min-pack", synth.min_pack, "Smallest pack size")->check(CLI::PositiveNumber);
    syn->add_option("--max-pack", synth.max_pack, "Largest pack size")->check(CLI::PositiveNumber);
    syn->add_option("--drift", synth.drift, "Best expert changes every this many packs (0 = never)");
    syn->add_option("--noise", synth.noise, "Gaussian noise on expert predictions")->check(CLI::NonNegativeNumber);
    syn->add_option("--emit-csv", synth.emit_csv, "Also write the generated stream as a CSV");
    add_common(syn, synth_o, false);

    auto* advc = app.add_subcommand("adversary", "Mix-loss game against the lower-bound adversary");
    advc->add_option("--experts", adv.experts, "Number of experts")->check(CLI::PositiveNumber);
    advc->add_option("--packs", adv.packs, "Comma-separated pack sizes");
    advc->add_option("--learner", adv.learner, "uniform, exp-weights or exp-weights-incremental");
    advc->add_option("--format", adv.format, "table or json")->check(CLI::IsMember({"table", "json"}));
    advc->add_option("--out", adv.out, "Write the report here instead of stdout");

    auto* aud = app.add_subcommand("audit", "Audit bounds at every prefix; exit 2 on any violation");
    aud->add_option("--report", audit_report, "Re-audit the runs stored in a JSON report");
    aud->add_option("--data", audit_d.path, "Input CSV");
    aud->add_option("--timestamp-col", audit_d.timestamp_col, "Timestamp column");
    aud->add_option("--year-col", audit_d.year_col, "Year column");
    aud->add_option("--target", audit_d.target, "Outcome column");
    aud->add_option("--experts", audit_d.experts, "Expert columns");
    aud->add_option("--order-col", audit_d.order_col, "Column ordering rows within a month");
    aud->add_option("--calibration-packs", audit_d.calibration_packs, "Calibration months");
    add_common(aud, audit_o, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*run) {
            const auto d = load(run_d, run_o);
            const auto game = make_game(d.game.lower, d.game.upper, run_o);
            const auto r = experiment(d.stream, game, run_o);
            emit(emit_report(r, report_format_from_string(run_o.format), {run_o.scale}), run_o.out);
            return kExitOk;
        }
        if (*syn) {
            SyntheticConfig sc;
            sc.experts = synth.experts;
            sc.trials = synth.trials;
            sc.min_pack = synth.min_pack;
            sc.max_pack = synth.max_pack;
            sc.drift_period = synth.drift;
            sc.noise = synth.noise;
            sc.seed = synth_o.seed;
            const auto stream = generate_synthetic_stream(sc);
            if (!synth.emit_csv.empty()) write_stream_csv(stream, synth.emit_csv);
            const auto game = make_game(0.0, 1.0, synth_o);
            const auto r = experiment(stream, game, synth_o);
            emit(emit_report(r, report_format_from_string(synth_o.format), {synth_o.scale}), synth_o.out);
            return kExitOk;
        }
        if (*advc) return run_adversary(adv);
        if (*aud) {
            ExperimentResult r;
            if (!audit_report.empty()) {
                if (!audit_d.path.empty()) throw UsageError("give either --report or --data, not both");
                r = reaudit(audit_report, true);
            } else {
                if (audit_d.path.empty()) throw UsageError("audit needs --report or --data");
                if (audit_d.target.empty() || audit_d.experts.empty())
                    throw UsageError("audit --data needs --target and --experts");
                audit_o.every_prefix = true;
                const auto d = load(audit_d, audit_o);
                const auto game = make_game(d.game.lower, d.game.upper, audit_o);
                r = experiment(d.stream, game, audit_o);
            }
            emit(emit_report(r, report_format_from_string(audit_o.format), {audit_o.scale}), audit_o.out);
            if (!r.audits_passed()) {
                std::cerr << "bound audit FAILED\n";
                return kExitAudit;
            }
            return kExitOk;
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
