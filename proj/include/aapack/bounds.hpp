#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aapack/aap.hpp"
#include "aapack/errors.hpp"
#include "aapack/numeric.hpp"

namespace aapack {

/// Learners the library can run.
enum class Algorithm { aa, aap_equal, aap_max, aap_incremental, aap_current, parallel };

/// Loss guarantees. AAP-current has two: its native bound on average loss and
/// the looser plain-loss bound with factor K_max / K_min.
enum class Guarantee {
    aa,
    aap_equal,
    aap_max,
    aap_incremental,
    aap_current_average,
    aap_current_plain,
    parallel,
};

inline std::string_view to_string(Algorithm a) {
    switch (a) {
        case Algorithm::aa: return "aa";
        case Algorithm::aap_equal: return "aap-e";
        case Algorithm::aap_max: return "aap-max";
        case Algorithm::aap_incremental: return "aap-incremental";
        case Algorithm::aap_current: return "aap-current";
        case Algorithm::parallel: return "parallel";
    }
    return "?";
}

inline std::string_view to_string(Guarantee g) {
    switch (g) {
        case Guarantee::aa: return "aa";
        case Guarantee::aap_equal: return "aap-e";
        case Guarantee::aap_max: return "aap-max";
        case Guarantee::aap_incremental: return "aap-incremental";
        case Guarantee::aap_current_average: return "aap-current-average";
        case Guarantee::aap_current_plain: return "aap-current-plain";
        case Guarantee::parallel: return "parallel";
    }
    return "?";
}

inline Algorithm algorithm_from_string(std::string_view s) {
    for (auto a : {Algorithm::aa, Algorithm::aap_equal, Algorithm::aap_max, Algorithm::aap_incremental,
                   Algorithm::aap_current, Algorithm::parallel})
        if (to_string(a) == s) return a;
    if (s == "aap-m") return Algorithm::aap_max;
    throw DomainError("unknown algorithm '" + std::string(s) + "'");
}

inline Guarantee guarantee_from_string(std::string_view s) {
    for (auto g : {Guarantee::aa, Guarantee::aap_equal, Guarantee::aap_max, Guarantee::aap_incremental,
                   Guarantee::aap_current_average, Guarantee::aap_current_plain, Guarantee::parallel})
        if (to_string(g) == s) return g;
    throw DomainError("unknown guarantee '" + std::string(s) + "'");
}

/// Guarantees that apply to a run of `a`.
inline std::vector<Guarantee> guarantees_for(Algorithm a) {
    switch (a) {
        case Algorithm::aa: return {Guarantee::aa};
        case Algorithm::aap_equal: return {Guarantee::aap_equal};
        case Algorithm::aap_max: return {Guarantee::aap_max};
        case Algorithm::aap_incremental: return {Guarantee::aap_incremental};
        case Algorithm::aap_current:
            return {Guarantee::aap_current_average, Guarantee::aap_current_plain};
        case Algorithm::parallel: return {Guarantee::parallel};
    }
    return {};
}

struct BoundParams {
    double c = 1.0;
    double eta = 2.0;
    double prior_weight = 1.0;
    std::optional<std::size_t> k;      // AAP-e, AAP-max, AAP-incremental
    std::optional<std::size_t> k_max;  // AAP-current plain
    std::optional<std::size_t> k_min;  // AAP-current plain
    std::optional<std::size_t> d;      // Parallel Copies
};

/// Right-hand side of the loss guarantee for one expert with loss
/// `expert_loss` (plain or average, matching the guarantee).
///
///   aa, aap-current-average   C L + (C/eta) ln(1/p)
///   aap-e, aap-max, aap-inc   C L + (C K/eta) ln(1/p)
///   aap-current-plain         (K_max/K_min) C L + (C K_max/eta) ln(1/p)
///   parallel                  C L + (C D/eta) ln(1/p)
///
/// A zero prior weight gives +inf.
inline double theoretical_bound(Guarantee g, double expert_loss, const BoundParams& p) {
    if (!(p.c > 0.0)) throw DomainError("bound: C must be positive");
    if (!(p.eta > 0.0)) throw DomainError("bound: eta must be positive");
    if (!(p.prior_weight >= 0.0 && p.prior_weight <= 1.0))
        throw DomainError("bound: prior weight must lie in [0, 1]");
    if (!(expert_loss >= 0.0)) throw DomainError("bound: expert loss must be nonnegative");
    const double log_inv_p = -std::log(p.prior_weight);
    auto need = [&](const std::optional<std::size_t>& v, const char* name) {
        if (!v || *v < 1)
            throw DomainError(std::string("bound: ") + std::string(to_string(g)) + " needs " + name);
        return static_cast<double>(*v);
    };
    switch (g) {
        case Guarantee::aa:
        case Guarantee::aap_current_average:
            return p.c * expert_loss + p.c / p.eta * log_inv_p;
        case Guarantee::aap_equal:
        case Guarantee::aap_max:
        case Guarantee::aap_incremental:
            return p.c * expert_loss + p.c * need(p.k, "K") / p.eta * log_inv_p;
        case Guarantee::aap_current_plain: {
            const double kmax = need(p.k_max, "K_max");
            const double kmin = need(p.k_min, "K_min");
            if (kmin > kmax) throw DomainError("bound: K_min exceeds K_max");
            return kmax / kmin * p.c * expert_loss + p.c * kmax / p.eta * log_inv_p;
        }
        case Guarantee::parallel:
            return p.c * expert_loss + p.c * need(p.d, "D") / p.eta * log_inv_p;
    }
    return kInf;
}

enum class Metric { plain, average };

inline std::string_view to_string(Metric m) { return m == Metric::plain ? "plain" : "average"; }

inline Metric native_metric(Guarantee g) {
    return g == Guarantee::aap_current_average ? Metric::average : Metric::plain;
}

struct ExpertAudit {
    std::size_t expert = 0;
    double learner_loss = 0.0;
    double expert_loss = 0.0;
    double bound = 0.0;
    double slack = 0.0;

    bool operator==(const ExpertAudit&) const = default;
};

/// Audit of one run against one guarantee. `experts` describes the final
/// trial; `min_slack` and `violations` cover every audited prefix.
struct BoundReport {
    Guarantee guarantee = Guarantee::aa;
    Metric metric = Metric::plain;
    double c = 1.0;
    double eta = 2.0;
    std::size_t k = 0;      // K, K_max or D in force at the final trial (0 if unused)
    std::size_t k_min = 0;  // AAP-current plain only
    std::vector<double> prior;
    std::vector<ExpertAudit> experts;
    double min_slack = kInf;
    std::size_t violations = 0;
    std::size_t prefixes_checked = 0;

    bool passed() const { return violations == 0; }
    bool operator==(const BoundReport&) const = default;
};

struct AuditParams {
    double c = 1.0;
    double eta = 2.0;
    std::vector<double> prior;
    std::optional<std::size_t> declared_k;  // required for AAP-e and AAP-max
};

struct AuditOptions {
    bool every_prefix = false;
    double tolerance = kAccumTol;  // relative to max(1, |bound|)
};

inline bool slack_violates(double slack, double bound, double tolerance) {
    const double scale = std::isfinite(bound) ? std::max(1.0, std::abs(bound)) : 1.0;
    return slack < -tolerance * scale;
}

/// Check a completed run against guarantee `g` for every expert.
inline BoundReport audit_run(std::span<const TrialRecord> records, Guarantee g,
                             const AuditParams& params, const AuditOptions& options = {}) {
    BoundReport rep;
    rep.guarantee = g;
    rep.metric = native_metric(g);
    rep.c = params.c;
    rep.eta = params.eta;
    rep.prior = params.prior;
    if (records.empty()) return rep;

    const std::size_t n_experts = records.front().expert_cumulative_losses.size();
    if (params.prior.size() != n_experts) throw DomainError("audit: prior length does not match records");
    if ((g == Guarantee::aap_equal || g == Guarantee::aap_max) && !params.declared_k)
        throw DomainError("audit: " + std::string(to_string(g)) + " needs the declared K");

    std::size_t kmax = 0;
    std::size_t kmin = records.front().pack_size;
    auto audit_prefix = [&](const TrialRecord& r, bool keep) {
        BoundParams bp;
        bp.c = params.c;
        bp.eta = params.eta;
        switch (g) {
            case Guarantee::aa:
            case Guarantee::aap_current_average: break;
            case Guarantee::aap_equal:
            case Guarantee::aap_max: bp.k = params.declared_k; break;
            case Guarantee::aap_incremental: bp.k = kmax; break;
            case Guarantee::aap_current_plain:
                bp.k_max = kmax;
                bp.k_min = kmin;
                break;
            case Guarantee::parallel: bp.d = kmax; break;
        }
        const bool avg = rep.metric == Metric::average;
        const double learner = avg ? r.cumulative_average_loss : r.cumulative_loss;
        for (std::size_t n = 0; n < n_experts; ++n) {
            bp.prior_weight = params.prior[n];
            const double expert = avg ? r.expert_cumulative_average_losses[n] : r.expert_cumulative_losses[n];
            const double bound = theoretical_bound(g, expert, bp);
            const double slack = bound - learner;
            rep.min_slack = std::min(rep.min_slack, slack);
            if (slack_violates(slack, bound, options.tolerance)) ++rep.violations;
            if (keep) rep.experts.push_back({n, learner, expert, bound, slack});
        }
        ++rep.prefixes_checked;
        rep.k = bp.k.value_or(bp.k_max.value_or(bp.d.value_or(0)));
        rep.k_min = bp.k_min.value_or(0);
    };

    for (std::size_t t = 0; t < records.size(); ++t) {
        kmax = std::max(kmax, records[t].pack_size);
        kmin = std::min(kmin, records[t].pack_size);
        const bool last = t + 1 == records.size();
        if (options.every_prefix || last) audit_prefix(records[t], last);
    }
    return rep;
}

}  // namespace aapack
