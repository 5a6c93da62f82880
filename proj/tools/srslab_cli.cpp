// Command-line front end: loads a population CSV or a literal V fixture,
// evaluates the selected estimator families, and renders the MSE report.
//
// Exit codes: 0 success, 2 input-format error, 3 numerical/singularity
// error, 4 configuration error.

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "srslab/io.hpp"
#include "srslab/report.hpp"

namespace {

using namespace srslab;

Family parse_family(const std::string& s) {
    if (s == "t1") return Family::T1;
    if (s == "t2") return Family::T2;
    if (s == "t3") return Family::T3;
    if (s == "t4") return Family::T4;
    if (s == "t5") return Family::T5;
    throw ConfigError("unknown estimator '" + s + "' (expected t1..t5)");
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep))
        if (!item.empty()) out.push_back(item);
    return out;
}

double parse_num(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("cannot parse number '" + s + "' for " + what);
    }
}

EstimatorSpec parse_explicit_spec(Family family, const std::string& kvlist,
                                  const OptimExtras& extras) {
    std::map<std::string, double> kv;
    for (const auto& pair : split(kvlist, ',')) {
        const auto eq = pair.find('=');
        if (eq == std::string::npos)
            throw ConfigError("bad parameter assignment '" + pair + "'");
        kv[pair.substr(0, eq)] = parse_num(pair.substr(eq + 1), pair);
    }
    auto get = [&](const char* key, double fallback) {
        auto it = kv.find(key);
        return it == kv.end() ? fallback : it->second;
    };
    switch (family) {
        case Family::T1:
            return PowerRatioSpec{get("alpha1", 0.0), get("alpha2", 0.0)};
        case Family::T2: {
            const double l1 = get("lambda1", 0.5);
            return WeightedRatioSpec{l1, get("lambda2", 1.0 - l1)};
        }
        case Family::T3: {
            const double w1 = get("w1", 0.5);
            return CombinedRatioSpec{w1, get("w2", 1.0 - w1), get("alpha", extras.t3_alpha)};
        }
        case Family::T4:
            return ExpRatioSpec{get("beta1", 0.0), get("beta2", 0.0)};
        case Family::T5: {
            DualTransformSpec t5;
            t5.k1 = get("k1", 0.5);
            t5.k2 = get("k2", 1.0 - t5.k1);
            t5.delta1 = static_cast<int>(get("delta1", extras.t5_delta1));
            t5.delta2 = static_cast<int>(get("delta2", extras.t5_delta2));
            t5.c = get("c", extras.t5_c);
            t5.d = get("d", extras.t5_d);
            return t5;
        }
    }
    throw ConfigError("unreachable family");
}

/// Flat key = value config file; `#` starts a comment.
std::map<std::string, std::string> load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::map<std::string, std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line = line.substr(0, hash);
        line = srslab::detail::strip(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line without '=': '" + line + "'");
        out[srslab::detail::strip(line.substr(0, eq))] =
            srslab::detail::strip(line.substr(eq + 1));
    }
    return out;
}

int run(int argc, char** argv) {
    CLI::App app{"Finite-population sampling-estimation laboratory"};

    std::string data_path, fixture_path, estimators = "t1,t2,t3,t4,t5";
    std::string params = "quadratic", mode = "re-derived", out_path, dump_v_path;
    std::string config_path;
    int n = 0, workers = 1;
    std::uint64_t reps = 100000, budget = 2000000;
    std::optional<std::uint64_t> seed;
    double t3_alpha = 1.0, t5_c = 2.0, t5_d = 1.0;
    int t5_delta1 = 1, t5_delta2 = 1;

    app.add_option("--config", config_path, "flat key=value config file (flags override)");
    app.add_option("--data", data_path, "population CSV (header y,x,z)");
    app.add_option("--fixture", fixture_path, "literal V-value fixture file");
    app.add_option("--n", n, "sample size");
    app.add_option("--estimators", estimators, "comma list from t1..t5");
    app.add_option("--params", params,
                   "quadratic | published | explicit:t1:alpha1=..,..;t5:k1=..,..");
    app.add_option("--mode", mode, "re-derived | as-published | both");
    app.add_option("--reps", reps, "Monte Carlo replications");
    app.add_option("--seed", seed, "Monte Carlo seed");
    app.add_option("--budget", budget, "enumeration budget (number of subsets)");
    app.add_option("--workers", workers, "Monte Carlo worker threads");
    app.add_option("--out", out_path, "write line-delimited report records here");
    app.add_option("--dump-v", dump_v_path, "write the V table records here");
    app.add_option("--t3-alpha", t3_alpha, "fixed exponent for t3");
    app.add_option("--t5-delta1", t5_delta1, "t5 delta1 in {-1,0,1}");
    app.add_option("--t5-delta2", t5_delta2, "t5 delta2 in {-1,0,1}");
    app.add_option("--t5-c", t5_c, "t5 scalar c");
    app.add_option("--t5-d", t5_d, "t5 scalar d");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 4;
    }

    if (!config_path.empty()) {
        const auto cfgfile = load_config_file(config_path);
        auto apply_str = [&](const char* key, const char* flag, std::string& target) {
            if (auto it = cfgfile.find(key); it != cfgfile.end() && app.count(flag) == 0)
                target = it->second;
        };
        apply_str("data", "--data", data_path);
        apply_str("fixture", "--fixture", fixture_path);
        apply_str("estimators", "--estimators", estimators);
        apply_str("params", "--params", params);
        apply_str("mode", "--mode", mode);
        apply_str("out", "--out", out_path);
        auto apply_num = [&](const char* key, const char* flag, auto& target) {
            if (auto it = cfgfile.find(key); it != cfgfile.end() && app.count(flag) == 0)
                target = static_cast<std::decay_t<decltype(target)>>(
                    parse_num(it->second, key));
        };
        apply_num("n", "--n", n);
        apply_num("reps", "--reps", reps);
        apply_num("budget", "--budget", budget);
        apply_num("workers", "--workers", workers);
        apply_num("t3-alpha", "--t3-alpha", t3_alpha);
        apply_num("t5-delta1", "--t5-delta1", t5_delta1);
        apply_num("t5-delta2", "--t5-delta2", t5_delta2);
        apply_num("t5-c", "--t5-c", t5_c);
        apply_num("t5-d", "--t5-d", t5_d);
        if (auto it = cfgfile.find("seed"); it != cfgfile.end() && app.count("--seed") == 0)
            seed = static_cast<std::uint64_t>(parse_num(it->second, "seed"));
    }

    RunConfig cfg;
    if (!data_path.empty()) cfg.data_path = data_path;
    if (!fixture_path.empty()) cfg.fixture_path = fixture_path;
    cfg.n = n;
    cfg.reps = reps;
    cfg.budget = budget;
    cfg.seed = seed;
    cfg.workers = workers;
    cfg.extras.t3_alpha = t3_alpha;
    cfg.extras.t5_delta1 = t5_delta1;
    cfg.extras.t5_delta2 = t5_delta2;
    cfg.extras.t5_c = t5_c;
    cfg.extras.t5_d = t5_d;

    if (mode == "re-derived") cfg.mode = ReportMode::Rederived;
    else if (mode == "as-published") cfg.mode = ReportMode::AsPublished;
    else if (mode == "both") cfg.mode = ReportMode::Both;
    else throw ConfigError("unknown mode '" + mode + "'");

    ParamPolicy policy = ParamPolicy::OptimalQuadratic;
    std::map<Family, EstimatorSpec> explicit_specs;
    if (params == "quadratic") policy = ParamPolicy::OptimalQuadratic;
    else if (params == "published") policy = ParamPolicy::OptimalPublished;
    else if (params.rfind("explicit:", 0) == 0) {
        policy = ParamPolicy::Explicit;
        for (const auto& block : split(params.substr(9), ';')) {
            const auto colon = block.find(':');
            if (colon == std::string::npos)
                throw ConfigError("bad explicit parameter block '" + block + "'");
            const Family f = parse_family(block.substr(0, colon));
            explicit_specs.emplace(f,
                                   parse_explicit_spec(f, block.substr(colon + 1), cfg.extras));
        }
    } else {
        throw ConfigError("unknown --params value '" + params + "'");
    }

    for (const auto& name : split(estimators, ',')) {
        EstimatorSelection sel;
        sel.family = parse_family(name);
        sel.policy = policy;
        if (policy == ParamPolicy::Explicit) {
            auto it = explicit_specs.find(sel.family);
            if (it == explicit_specs.end())
                throw ConfigError("explicit parameters missing for " + name);
            sel.explicit_spec = it->second;
        }
        cfg.estimators.push_back(sel);
    }

    const MseReport report = run_report(cfg);
    render_text(report, std::cout);

    if (!out_path.empty()) {
        std::ofstream out(out_path);
        if (!out) throw InputError("cannot open output file: " + out_path);
        write_records(report, out);
    }
    if (!dump_v_path.empty()) {
        std::ofstream out(dump_v_path);
        if (!out) throw InputError("cannot open output file: " + dump_v_path);
        write_v_table_records(out, report.v);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const srslab::InputError& e) {
        std::cerr << "{\"error\":\"input\",\"message\":\"" << e.what() << "\"}\n";
        return 2;
    } catch (const srslab::NumericError& e) {
        std::cerr << "{\"error\":\"numeric\",\"message\":\"" << e.what() << "\"}\n";
        return 3;
    } catch (const srslab::ConfigError& e) {
        std::cerr << "{\"error\":\"config\",\"message\":\"" << e.what() << "\"}\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "{\"error\":\"internal\",\"message\":\"" << e.what() << "\"}\n";
        return 3;
    }
}
