#pragma once

#include <cstdint>
#include <iomanip>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "srslab/approximation.hpp"
#include "srslab/estimators.hpp"
#include "srslab/io.hpp"
#include "srslab/simulation.hpp"

namespace srslab {

enum class ParamPolicy { Explicit, OptimalPublished, OptimalQuadratic };

inline const char* to_string(ParamPolicy p) {
    switch (p) {
        case ParamPolicy::Explicit: return "explicit";
        case ParamPolicy::OptimalPublished: return "optimal/published-formula";
        case ParamPolicy::OptimalQuadratic: return "optimal/quadratic-solve";
    }
    return "?";
}

/// Which second-order formula columns to produce.
enum class ReportMode { AsPublished, Rederived, Both };

struct EstimatorSelection {
    Family family = Family::T1;
    ParamPolicy policy = ParamPolicy::OptimalQuadratic;
    std::optional<EstimatorSpec> explicit_spec;
};

struct RunConfig {
    std::optional<std::string> data_path;
    std::optional<std::string> fixture_path;
    int n = 0;  // required in data mode
    std::vector<EstimatorSelection> estimators;
    ReportMode mode = ReportMode::Rederived;
    std::uint64_t budget = 2'000'000;
    std::uint64_t reps = 100'000;
    std::optional<std::uint64_t> seed;
    int workers = 1;
    OptimExtras extras;
};

struct ReportCell {
    double value = 0.0;
    std::string provenance;
};

struct ReportRow {
    Family family = Family::T1;
    EstimatorSpec spec;
    std::string params_desc;
    std::optional<ReportCell> first_order_mse;
    std::optional<ReportCell> first_order_bias;
    std::optional<ReportCell> second_order_rederived;
    std::optional<ReportCell> second_order_published;
    std::optional<ReportCell> oracle_mse;
    std::optional<ReportCell> oracle_bias;
    std::vector<std::string> warnings;
};

struct MseReport {
    int N = 0;
    int n = 0;
    Means means;
    std::string v_provenance;
    std::vector<ReportRow> rows;
    std::vector<std::string> warnings;
    VTable v;  // the table every approximation column was computed from
};

namespace detail {

inline std::string describe_params(const EstimatorSpec& spec) {
    std::ostringstream os;
    os << std::setprecision(6);
    if (const auto* t1 = std::get_if<PowerRatioSpec>(&spec))
        os << "alpha1=" << t1->alpha1 << " alpha2=" << t1->alpha2;
    else if (const auto* t2 = std::get_if<WeightedRatioSpec>(&spec))
        os << "lambda1=" << t2->lambda1 << " lambda2=" << t2->lambda2;
    else if (const auto* t3 = std::get_if<CombinedRatioSpec>(&spec))
        os << "w1=" << t3->w1 << " w2=" << t3->w2 << " alpha=" << t3->alpha;
    else if (const auto* t4 = std::get_if<ExpRatioSpec>(&spec))
        os << "beta1=" << t4->beta1 << " beta2=" << t4->beta2;
    else {
        const auto& t5 = std::get<DualTransformSpec>(spec);
        os << "k1=" << t5.k1 << " k2=" << t5.k2 << " delta1=" << t5.delta1
           << " delta2=" << t5.delta2 << " c=" << t5.c << " d=" << t5.d;
    }
    return os.str();
}

inline std::string provenance_summary(const VTable& v) {
    std::set<std::string> kinds;
    for (const auto& [idx, e] : v.entries) kinds.insert(to_string(e.provenance));
    std::string out;
    for (const auto& k : kinds) out += (out.empty() ? "" : "+") + k;
    return out.empty() ? "empty" : out;
}

/// Best-effort fills for the symbols the printed second-order formulas
/// never define. These are documented guesses, flagged in the report.
inline PublishedGapConstants best_effort_gaps(const EstimatorSpec& spec,
                                              const Means& means,
                                              std::vector<std::string>& warnings) {
    PublishedGapConstants g;
    if (const auto* t3 = std::get_if<CombinedRatioSpec>(&spec)) {
        const double a = t3->alpha;
        const double denom = t3->w1 * means.x + t3->w2 * means.z;
        g.t3_a1 = a * (a + 1) / 2;
        g.t3_a2 = a * (a + 1) * (a + 2) / 6;
        g.t3_theta = denom == 0.0 ? 0.0 : 1.0 / denom;
        warnings.push_back(
            "t3 as-published column uses guessed values for the undefined A1, A2, theta "
            "(alpha-series constants and the weight normalizer); see docs/errata.md E11");
    } else if (const auto* t4 = std::get_if<ExpRatioSpec>(&spec)) {
        g.t4_s = t4->beta1 * t4->beta2;
        warnings.push_back(
            "t4 as-published column uses the placeholder S = beta1*beta2 for the "
            "undefined symbol S; see docs/errata.md E12");
    } else if (const auto* t5 = std::get_if<DualTransformSpec>(&spec)) {
        const double d1 = t5->delta1, d2 = t5->delta2, eta = t5->eta1();
        g.t5_m2 = d1 * (d1 - 1) * (d1 - 2) / 6 * eta * eta * eta;
        g.t5_n2 = d2 * (d2 - 1) * (d2 - 2) / 6;
        warnings.push_back(
            "t5 as-published column uses binomial-series values for the undefined "
            "M2, N2; see docs/errata.md E13");
    }
    return g;
}

}  // namespace detail

inline MseReport run_report(const RunConfig& cfg) {
    if (cfg.data_path.has_value() == cfg.fixture_path.has_value())
        throw ConfigError("exactly one of data path or fixture path must be given");
    if (cfg.estimators.empty()) throw ConfigError("no estimator selected");

    MseReport report;
    std::optional<Population> pop;
    bool oracle_available = false;

    if (cfg.data_path) {
        if (cfg.n < 1) throw ConfigError("n must be >= 1");
        pop.emplace(load_population(*cfg.data_path));
        if (cfg.n > pop->size())
            throw ConfigError("n exceeds population size N = " + std::to_string(pop->size()));
        report.N = pop->size();
        report.n = cfg.n;
        report.means = pop->means();
        const bool needs_mc = binomial_count(pop->size(), cfg.n) > cfg.budget;
        if (needs_mc && !cfg.seed)
            throw ConfigError("seed required: C(N,n) exceeds the enumeration budget, "
                              "Monte Carlo will run");
        VExactOptions opt;
        opt.enumeration_budget = cfg.budget;
        opt.mc_replications = cfg.reps;
        opt.seed = cfg.seed.value_or(1);
        report.v = build_v_table(*pop, cfg.n, VPolicy::ClosedFormWhereListed, opt);
        oracle_available = true;
    } else {
        VFixture fx = load_v_fixture(*cfg.fixture_path);
        report.v = fx.table;
        report.warnings = fx.warnings;
        if (!fx.ybar)
            throw ConfigError("fixture mode needs a Ybar line (MSE scales with Ybar^2)");
        report.means = Means{*fx.ybar, fx.xbar.value_or(0.0), fx.zbar.value_or(0.0)};
        report.n = report.v.n;
    }
    report.v_provenance = detail::provenance_summary(report.v);

    for (const auto& sel : cfg.estimators) {
        ReportRow row;
        row.family = sel.family;

        // resolve parameters
        try {
            if (sel.policy == ParamPolicy::Explicit) {
                if (!sel.explicit_spec)
                    throw ConfigError("explicit parameter policy without parameters for " +
                                      std::string(to_string(sel.family)));
                row.spec = *sel.explicit_spec;
                require_valid(row.spec);
            } else {
                const OptMethod method = sel.policy == ParamPolicy::OptimalPublished
                                             ? OptMethod::PublishedFormula
                                             : OptMethod::QuadraticSolve;
                OptimalResult r =
                    optimal_parameters(sel.family, report.v, report.means, method, cfg.extras);
                row.spec = r.spec;
                for (auto& w : r.warnings) row.warnings.push_back(std::move(w));
            }
        } catch (const NumericError& e) {
            row.warnings.push_back(std::string("[approximation] parameter resolution failed: ") +
                                   e.what());
            report.rows.push_back(std::move(row));
            continue;
        }
        row.params_desc = detail::describe_params(row.spec) + " (" + to_string(sel.policy) + ")";

        const std::string vp = report.v_provenance;
        try {
            row.first_order_mse =
                ReportCell{first_order_mse(row.spec, report.v, report.means), vp};
        } catch (const NumericError& e) {
            row.warnings.push_back(std::string("[approximation] first-order MSE: ") + e.what());
        }
        try {
            row.first_order_bias = ReportCell{
                first_order_bias(row.spec, report.v, report.means, FormulaMode::Rederived), vp};
        } catch (const NumericError& e) {
            row.warnings.push_back(std::string("[approximation] first-order bias: ") + e.what());
        }

        if (cfg.mode == ReportMode::Rederived || cfg.mode == ReportMode::Both) {
            try {
                row.second_order_rederived = ReportCell{
                    second_order_mse(row.spec, report.v, report.means, FormulaMode::Rederived),
                    vp + "/re-derived"};
            } catch (const NumericError& e) {
                row.warnings.push_back(std::string("[approximation] second-order (re-derived): ") +
                                       e.what());
            }
        }
        if (cfg.mode == ReportMode::AsPublished || cfg.mode == ReportMode::Both) {
            try {
                const PublishedGapConstants gaps =
                    detail::best_effort_gaps(row.spec, report.means, row.warnings);
                row.second_order_published = ReportCell{
                    second_order_mse(row.spec, report.v, report.means,
                                     FormulaMode::AsPublished, gaps),
                    vp + "/as-published"};
            } catch (const NumericError& e) {
                row.warnings.push_back(std::string("[approximation] second-order (as-published): ") +
                                       e.what());
            }
        }

        if (oracle_available) {
            try {
                const std::uint64_t count = binomial_count(pop->size(), cfg.n);
                SimResult sim;
                if (count <= cfg.budget) {
                    sim = enumerate_exact(*pop, row.spec, cfg.n, cfg.budget);
                } else {
                    sim = monte_carlo(*pop, row.spec, cfg.n, cfg.reps, *cfg.seed, cfg.workers);
                }
                const char* tag = to_string(sim.method);
                row.oracle_mse = ReportCell{sim.mse, tag};
                row.oracle_bias = ReportCell{sim.bias, tag};
                if (sim.failures > 0)
                    row.warnings.push_back("[simulation] " + std::to_string(sim.failures) +
                                           " Monte Carlo replicates failed and were excluded");
            } catch (const NumericError& e) {
                row.warnings.push_back(std::string("[simulation] oracle: ") + e.what());
            }
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

inline void render_text(const MseReport& report, std::ostream& out) {
    out << "population: N=" << report.N << " n=" << report.n
        << "  means: Ybar=" << report.means.y << " Xbar=" << report.means.x
        << " Zbar=" << report.means.z << '\n';
    out << "V table provenance: " << report.v_provenance << "\n\n";

    auto cell = [](const std::optional<ReportCell>& c) {
        if (!c) return std::string("-");
        std::ostringstream os;
        os << std::setprecision(9) << c->value << " [" << c->provenance << "]";
        return os.str();
    };

    for (const auto& row : report.rows) {
        out << to_string(row.family) << "  " << row.params_desc << '\n';
        out << "  first-order MSE:   " << cell(row.first_order_mse) << '\n';
        out << "  first-order bias:  " << cell(row.first_order_bias) << '\n';
        if (row.second_order_rederived)
            out << "  second-order MSE:  " << cell(row.second_order_rederived) << '\n';
        if (row.second_order_published)
            out << "  second-order MSE:  " << cell(row.second_order_published) << '\n';
        if (row.oracle_mse) out << "  exact MSE:         " << cell(row.oracle_mse) << '\n';
        if (row.oracle_bias) out << "  exact bias:        " << cell(row.oracle_bias) << '\n';
        for (const auto& w : row.warnings) out << "  warning: " << w << '\n';
        out << '\n';
    }
    for (const auto& w : report.warnings) out << "warning: " << w << '\n';
}

/// One record per report cell: estimator, metric, mode, value, provenance.
inline void write_records(const MseReport& report, std::ostream& out) {
    auto emit = [&](Family f, const char* metric, const char* mode,
                    const std::optional<ReportCell>& c) {
        if (!c) return;
        const auto old = out.precision(17);
        out << to_string(f) << '\t' << metric << '\t' << mode << '\t' << c->value << '\t'
            << c->provenance << '\n';
        out.precision(old);
    };
    for (const auto& row : report.rows) {
        emit(row.family, "mse", "first-order", row.first_order_mse);
        emit(row.family, "bias", "first-order", row.first_order_bias);
        emit(row.family, "mse", "second-order/re-derived", row.second_order_rederived);
        emit(row.family, "mse", "second-order/as-published", row.second_order_published);
        emit(row.family, "mse", "exact", row.oracle_mse);
        emit(row.family, "bias", "exact", row.oracle_bias);
    }
}

}  // namespace srslab
