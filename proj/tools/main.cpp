#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tietime/montecarlo.hpp"
#include "tietime/process.hpp"
#include "tietime/series.hpp"
#include "tietime/solver.hpp"
#include "tietime/verify.hpp"

namespace {

using nlohmann::json;
using namespace tietime;

constexpr int kExitOk = 0;
constexpr int kExitVerificationFailure = 1;
constexpr int kExitBadConfig = 2;

struct OutputOptions {
    std::string out_path;  // empty: stdout
    bool no_meta = false;
};

void emit(const json& body, const OutputOptions& opts, const std::string& command) {
    json doc = body;
    if (!opts.no_meta) {
        doc["meta"] = {{"tool", "tietime"}, {"command", command}};
    }
    if (opts.out_path.empty()) {
        std::cout << doc.dump(2) << "\n";
    } else {
        std::ofstream f(opts.out_path);
        if (!f) throw std::runtime_error("cannot open output file " + opts.out_path);
        f << doc.dump(2) << "\n";
    }
}

json summary_to_json(const EstimateSummary& s) {
    json j{{"trials", s.trials},
           {"truncated", s.truncated},
           {"mean", s.mean},
           {"mom_ci_low", s.mom_ci_low},
           {"mom_ci_high", s.mom_ci_high},
           {"block_count", s.block_count},
           {"horizon", s.horizon},
           {"biased_low", s.biased_low}};
    if (!s.warning.empty()) j["warning"] = s.warning;
    return j;
}

void write_samples_csv(const std::string& path, const std::vector<StoppingSample>& samples) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open samples file " + path);
    f << "trial,T,absorbed,hit_index\n";
    for (std::size_t t = 0; t < samples.size(); ++t) {
        f << t << ',' << samples[t].steps << ',' << (samples[t].absorbed ? 1 : 0) << ',';
        if (samples[t].hit_index) f << *samples[t].hit_index;
        f << '\n';
    }
}

json report_to_json(const DriftReport& rep) {
    json failures = json::array();
    for (const auto& fl : rep.failures) {
        json item{{"state", fl.state},
                  {"expected", rational_to_string(fl.expected)},
                  {"actual", rational_to_string(fl.actual)},
                  {"what", fl.what}};
        if (fl.pair_index > 0) item["pair_index"] = fl.pair_index;
        if (fl.time >= 0) item["time"] = fl.time;
        failures.push_back(item);
    }
    json j{{"suite", rep.suite},
           {"m", rep.m},
           {"grid", rep.grid_hi},
           {"states_checked", rep.states_checked},
           {"failures", failures}};
    if (!rep.case_counts.empty()) j["case_counts"] = rep.case_counts;
    if (rep.max_slack_mismatch != 0) {
        j["max_slack_mismatch"] = rational_to_string(rep.max_slack_mismatch);
    }
    return j;
}

json family_to_json(const LinearFamilyResult& r) {
    json j{{"status", r.status == LinearFamilyResult::Status::solved ? "solved" : "inconsistent"},
           {"nullity", r.nullity},
           {"equations", r.equations},
           {"unknowns", r.unknowns},
           {"residual_norm", r.residual_norm}};
    if (r.solution) {
        json coeffs = json::array();
        for (const auto& [e, c] : r.solution->coeffs()) {
            coeffs.push_back({{"exponents", e}, {"coeff", rational_to_string(c)}});
        }
        j["solution"] = coeffs;
        j["gamma"] = rational_to_string(*r.gamma);
    }
    if (!r.certificate.empty()) {
        json cert = json::array();
        for (std::size_t i = 0; i < r.certificate.size(); ++i) {
            if (r.certificate[i] != 0) {
                cert.push_back({{"equation", i}, {"coeff", rational_to_string(r.certificate[i])}});
            }
        }
        j["certificate"] = cert;
    }
    return j;
}

GapState state_from(int m, const std::vector<std::int64_t>& gaps) {
    if (static_cast<int>(gaps.size()) != m - 1) {
        throw CLI::ValidationError("gaps", "expected m-1 gap values");
    }
    return GapState{m, gaps};
}

// Loads --config JSON and splices its fields in front of the remaining
// command line, so explicit flags override the file. Unknown fields are
// rejected here by checking against the subcommand's option names later
// (CLI11 errors on unknown long options).
std::vector<std::string> splice_config(const std::vector<std::string>& args) {
    std::string config_path;
    std::vector<std::string> rest;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw std::runtime_error("--config needs a path");
            config_path = args[++i];
        } else if (args[i].rfind("--config=", 0) == 0) {
            config_path = args[i].substr(9);
        } else {
            rest.push_back(args[i]);
        }
    }
    if (config_path.empty()) return rest;

    std::ifstream f(config_path);
    if (!f) throw std::runtime_error("cannot open config file " + config_path);
    json cfg = json::parse(f);
    if (!cfg.is_object() || !cfg.contains("command")) {
        throw std::runtime_error("config must be an object with a \"command\" field");
    }
    std::vector<std::string> merged;
    merged.push_back(cfg.at("command").get<std::string>());
    if (cfg.contains("subcommand")) merged.push_back(cfg.at("subcommand").get<std::string>());
    for (const auto& [key, value] : cfg.items()) {
        if (key == "command" || key == "subcommand") continue;
        merged.push_back("--" + key);
        if (value.is_boolean()) {
            if (!value.get<bool>()) merged.pop_back();
            continue;
        }
        if (value.is_array()) {
            std::ostringstream list;
            for (std::size_t i = 0; i < value.size(); ++i) {
                if (i) list << ',';
                if (value[i].is_string()) list << value[i].get<std::string>();
                else list << value[i].dump();
            }
            merged.push_back(list.str());
        } else if (value.is_string()) {
            merged.push_back(value.get<std::string>());
        } else {
            merged.push_back(value.dump());
        }
    }
    // user-provided tokens last: the first token must remain the subcommand
    for (std::size_t i = 0; i < rest.size(); ++i) {
        if (i == 0 && !rest[i].empty() && rest[i][0] != '-') continue;  // duplicate command
        merged.push_back(rest[i]);
    }
    return merged;
}

struct CommaInt64List {
    std::vector<std::int64_t> values;
};

std::vector<std::int64_t> parse_int_list(const std::string& text) {
    std::vector<std::int64_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(std::stoll(item));
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"simulation, exact solving and formal verification of tie times in "
                 "m-team random competitions"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    OutputOptions output;

    // shared state filled by the subcommands
    int m = 3;
    std::string gaps_text = "1,1", thresholds_text = "100,1000,10000";
    std::string nlist_text = "100,1000,10000", far_text = "1,2,5,10,20", sums_text = "1,2,5";
    std::uint64_t trials = 100000, seed = 1, horizon = 100000000, count = 1000000;
    int blocks = 24, workers = 1, pair = 1, nmax = 10;
    std::int64_t radius = 60, grid = 30, fixed_a = 1, fixed_b = 1;
    double tol = 1e-10, hill_fraction = 0.01, relax = 1.0;
    std::uint64_t max_sweeps = 4000000;
    std::string policy_text = "zero", method_text = "gauss_seidel", suite = "all";
    std::string samples_path, csv_path, series_file, gamma_text = "0", normalize_text = "1";
    std::string family_text = "f";
    int k_vars = 3, degree = 6, commute_trials = 100;

    auto add_output = [&](CLI::App* cmd) {
        cmd->add_option("--out", output.out_path, "write the summary JSON here instead of stdout");
        cmd->add_flag("--no-meta", output.no_meta, "omit the meta block (stable output for diffs)");
    };
    auto add_state = [&](CLI::App* cmd) {
        cmd->add_option("--m", m, "team count")->required();
        cmd->add_option("--gaps", gaps_text, "comma-separated initial gaps (m-1 values)")->required();
    };
    auto add_mc = [&](CLI::App* cmd) {
        cmd->add_option("--trials", trials, "number of trials");
        cmd->add_option("--seed", seed, "base seed; every winner is a pure function of it")->required();
        cmd->add_option("--horizon", horizon, "step cap per trial (truncations are reported)");
        cmd->add_option("--blocks", blocks, "median-of-means block count");
        cmd->add_option("--workers", workers, "worker threads (does not change the output)");
    };

    auto* c_simulate = app.add_subcommand("simulate", "sample raw tie times");
    add_state(c_simulate);
    add_mc(c_simulate);
    c_simulate->add_option("--pair", pair, "watch only the pair (i, i+1); 0 = all gaps")
        ->default_val(0);
    c_simulate->add_option("--samples", samples_path, "per-trial CSV path");
    add_output(c_simulate);

    auto* c_estimate = app.add_subcommand("estimate", "estimate the expected tie time");
    add_state(c_estimate);
    add_mc(c_estimate);
    c_estimate->add_option("--samples", samples_path, "per-trial CSV path");
    add_output(c_estimate);

    auto* c_pair = app.add_subcommand("estimate-pair", "estimate the pair tie time");
    add_state(c_pair);
    add_mc(c_pair);
    c_pair->add_option("--i", pair, "pair index (1..m-2)")->required();
    c_pair->add_option("--samples", samples_path, "per-trial CSV path");
    add_output(c_pair);

    auto* c_limit = app.add_subcommand("limit-check",
                                       "estimates as the non-adjacent gaps grow");
    c_limit->add_option("--m", m, "team count")->required();
    c_limit->add_option("--i", pair, "pair index (1..m-2)")->required();
    c_limit->add_option("--pair-a", fixed_a, "fixed gap a_i")->required();
    c_limit->add_option("--pair-b", fixed_b, "fixed gap a_{i+1}")->required();
    c_limit->add_option("--far", far_text, "comma-separated values for the other gaps");
    add_mc(c_limit);
    add_output(c_limit);

    auto* c_tail = app.add_subcommand("tail", "survival curve and tail index");
    add_state(c_tail);
    add_mc(c_tail);
    c_tail->add_option("--thresholds", thresholds_text, "comma-separated n values");
    c_tail->add_option("--hill-fraction", hill_fraction, "top fraction for the tail index");
    add_output(c_tail);

    auto* c_stopped = app.add_subcommand("stopped-product",
                                         "decay of the gap product at truncated stopping times");
    add_state(c_stopped);
    add_mc(c_stopped);
    c_stopped->add_option("--n-list", nlist_text, "comma-separated truncation points");
    add_output(c_stopped);

    auto* c_waiting = app.add_subcommand("gap-waiting",
                                         "waiting times between moves of a fixed pair");
    c_waiting->add_option("--m", m, "team count")->required();
    c_waiting->add_option("--count", count, "number of waiting times");
    c_waiting->add_option("--sums", sums_text, "comma-separated group sizes for sum moments");
    c_waiting->add_option("--seed", seed, "seed")->required();
    add_output(c_waiting);

    auto* c_solve = app.add_subcommand("solve", "lattice solve of the expected tie time");
    add_state(c_solve);
    c_solve->add_option("--radius", radius, "per-coordinate cap of the lattice");
    c_solve->add_option("--policy", policy_text, "zero | upper_bound | closed_form");
    c_solve->add_option("--method", method_text, "gauss_seidel | direct_banded | exact_rational");
    c_solve->add_option("--tol", tol, "max residual target");
    c_solve->add_option("--relax", relax, "relaxation factor for the sweeps");
    c_solve->add_option("--max-sweeps", max_sweeps, "iteration cap");
    add_output(c_solve);

    auto* c_bracket = app.add_subcommand("bracket", "zero/upper-bound sandwich of the value");
    add_state(c_bracket);
    c_bracket->add_option("--radius", radius, "per-coordinate cap of the lattice");
    c_bracket->add_option("--tol", tol, "max residual target");
    c_bracket->add_option("--method", method_text, "gauss_seidel | direct_banded");
    c_bracket->add_option("--max-sweeps", max_sweeps, "iteration cap");
    c_bracket->add_option("--csv", csv_path, "export the grid as a1,..,tau_lower,tau_upper");
    add_output(c_bracket);

    auto* c_second = app.add_subcommand("second-moment",
                                        "lower bound for the second moment on the lattice");
    add_state(c_second);
    c_second->add_option("--radius", radius, "per-coordinate cap of the lattice");
    c_second->add_option("--tol", tol, "max residual target");
    c_second->add_option("--method", method_text, "gauss_seidel | direct_banded");
    c_second->add_option("--max-sweeps", max_sweeps, "iteration cap");
    add_output(c_second);

    auto* c_verify = app.add_subcommand("verify", "exact identity checks on a grid");
    c_verify->add_option("--suite", suite, "pairs | min | phi | moments | H | time2 | all");
    c_verify->add_option("--m", m, "team count")->required();
    c_verify->add_option("--grid", grid, "per-coordinate grid bound");
    c_verify->add_option("--nmax", nmax, "time horizon for the time2 suite");
    add_output(c_verify);

    auto* c_series = app.add_subcommand("series", "generating-sequence calculus");
    c_series->require_subcommand(1);
    auto* s_search = c_series->add_subcommand("search", "solve the coefficient family");
    s_search->add_option("--k", k_vars, "number of reciprocal variables");
    s_search->add_option("--degree", degree, "ansatz total degree");
    s_search->add_option("--normalize", normalize_text,
                         "constant-term value (0 drops the normalization)");
    s_search->add_option("--family", family_text, "f | gamma");
    add_output(s_search);
    auto* s_residual = c_series->add_subcommand("residual", "residual of a series file");
    s_residual->add_option("--file", series_file, "JSON series file")->required();
    s_residual->add_option("--gamma", gamma_text, "compensator, as p/q");
    s_residual->add_option("--degree", degree, "certified degree");
    add_output(s_residual);
    auto* s_commute = c_series->add_subcommand("commute-check",
                                               "substitution commutativity on random series");
    s_commute->add_option("--vars", k_vars, "variable count");
    s_commute->add_option("--degree", degree, "degree cap");
    s_commute->add_option("--trials", commute_trials, "random series count");
    s_commute->add_option("--seed", seed, "seed");
    add_output(s_commute);

    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        args = splice_config(args);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitBadConfig;
    }
    std::reverse(args.begin(), args.end());  // CLI11's vector parse wants reversed args
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << "invalid configuration: " << e.what() << "\n";
        return kExitBadConfig;
    }

    try {
        McOptions mc{trials, seed, horizon, blocks, workers};
        SolveOptions sopts;
        sopts.tol = tol;
        sopts.max_sweeps = max_sweeps;
        sopts.relax = relax;
        if (method_text == "gauss_seidel") sopts.method = SolveMethod::gauss_seidel;
        else if (method_text == "direct_banded") sopts.method = SolveMethod::direct_banded;
        else if (method_text == "exact_rational") sopts.method = SolveMethod::exact_rational;
        else throw CLI::ValidationError("method", "unknown method " + method_text);

        if (c_simulate->parsed() || c_estimate->parsed()) {
            const auto state = state_from(m, parse_int_list(gaps_text));
            const int watch = c_simulate->parsed() ? pair : 0;
            const auto samples = run_trials(state, watch, mc);
            if (!samples_path.empty()) write_samples_csv(samples_path, samples);
            auto summary = summarize_samples(samples, mc);
            if (state.m == 2 && watch == 0) {
                summary.warning =
                    "two teams: the tie time has infinite mean; this truncated estimate "
                    "is meaningless, use the tail diagnostics instead";
            }
            if (!summary.warning.empty()) std::cerr << "warning: " << summary.warning << "\n";
            json j = summary_to_json(summary);
            j["m"] = m;
            j["gaps"] = state.gaps;
            j["seed"] = seed;
            emit(j, output, app.get_subcommands().front()->get_name());
            return kExitOk;
        }
        if (c_pair->parsed()) {
            const auto state = state_from(m, parse_int_list(gaps_text));
            if (!samples_path.empty()) {
                write_samples_csv(samples_path, run_trials(state, pair, mc));
            }
            const auto result = estimate_pair_tie_time(state, pair, mc);
            json j = summary_to_json(result.estimate);
            j["m"] = m;
            j["gaps"] = state.gaps;
            j["pair_index"] = pair;
            j["reference"] = result.reference;
            j["consistent_with_reference"] = result.consistent;
            emit(j, output, "estimate-pair");
            return kExitOk;
        }
        if (c_limit->parsed()) {
            const auto table =
                check_limit_trend(m, pair, {fixed_a, fixed_b}, parse_int_list(far_text), mc);
            json rows = json::array();
            for (const auto& row : table.rows) {
                json r = summary_to_json(row.estimate);
                r["far_value"] = row.far_value;
                rows.push_back(r);
            }
            emit({{"m", m}, {"pair_index", pair}, {"limit", table.limit_value}, {"rows", rows}},
                 output, "limit-check");
            return kExitOk;
        }
        if (c_tail->parsed()) {
            const auto state = state_from(m, parse_int_list(gaps_text));
            std::vector<std::uint64_t> th;
            for (auto v : parse_int_list(thresholds_text)) th.push_back(v);
            const auto curve = estimate_tail(state, th, mc, hill_fraction);
            json j{{"m", m},
                   {"gaps", state.gaps},
                   {"thresholds", curve.thresholds},
                   {"survival", curve.survival},
                   {"hill_fraction", curve.hill_fraction}};
            if (curve.hill_index) j["hill_index"] = *curve.hill_index;
            if (!curve.diagnostic.empty()) j["diagnostic"] = curve.diagnostic;
            json kcurve = json::array();
            for (const auto& [k, a] : curve.hill_curve) kcurve.push_back({{"k", k}, {"alpha", a}});
            j["hill_curve"] = kcurve;
            emit(j, output, "tail");
            return kExitOk;
        }
        if (c_stopped->parsed()) {
            const auto state = state_from(m, parse_int_list(gaps_text));
            std::vector<std::uint64_t> ns;
            for (auto v : parse_int_list(nlist_text)) ns.push_back(v);
            const auto points = estimate_stopped_product(state, ns, mc);
            json rows = json::array();
            for (const auto& p : points) {
                rows.push_back({{"n", p.n},
                                {"estimate", p.estimate},
                                {"survival", p.survival},
                                {"holder_bound", p.holder_bound}});
            }
            emit({{"m", m}, {"gaps", state.gaps}, {"trials", trials}, {"rows", rows}}, output,
                 "stopped-product");
            return kExitOk;
        }
        if (c_waiting->parsed()) {
            std::vector<int> sums;
            for (auto v : parse_int_list(sums_text)) sums.push_back(static_cast<int>(v));
            const auto w = estimate_gap_waiting(m, sums, count, seed);
            json moments = json::object();
            for (const auto& [n, v] : w.sum_second_moment) moments[std::to_string(n)] = v;
            emit({{"m", m},
                  {"count", w.count},
                  {"mean", w.mean},
                  {"mean_reference", static_cast<double>(m) / 3.0},
                  {"sum_second_moment", moments}},
                 output, "gap-waiting");
            return kExitOk;
        }
        if (c_solve->parsed()) {
            const auto gaps = parse_int_list(gaps_text);
            state_from(m, gaps);
            SolverGrid sg{m, radius, BoundaryPolicy::zero, {}};
            if (policy_text == "zero") sg.policy = BoundaryPolicy::zero;
            else if (policy_text == "upper_bound") sg.policy = BoundaryPolicy::upper_bound;
            else if (policy_text == "closed_form") sg.policy = BoundaryPolicy::closed_form;
            else throw CLI::ValidationError("policy", "unknown policy " + policy_text);
            const auto res = solve_expected_time(sg, sopts);
            json j{{"m", m},
                   {"gaps", gaps},
                   {"radius", radius},
                   {"policy", policy_text},
                   {"method", method_text},
                   {"tol", tol},
                   {"value", res.value_at(gaps)},
                   {"residual", res.residual},
                   {"iterations", res.iterations}};
            if (!res.exact.empty()) {
                j["exact_value"] = rational_to_string(res.exact[res.index_of(gaps)]);
            }
            emit(j, output, "solve");
            return kExitOk;
        }
        if (c_bracket->parsed()) {
            const auto gaps = parse_int_list(gaps_text);
            state_from(m, gaps);
            const auto br = bracket_expected_time(m, gaps, radius, sopts);
            if (!csv_path.empty()) {
                std::ofstream f(csv_path);
                if (!f) throw std::runtime_error("cannot open csv file " + csv_path);
                for (int d = 1; d < m; ++d) f << 'a' << d << ',';
                f << "tau_lower,tau_upper\n";
                for (std::size_t i = 0; i < br.lower.values.size(); ++i) {
                    for (const auto c : br.lower.state_of(i)) f << c << ',';
                    f << br.lower.values[i] << ',' << br.upper.values[i] << '\n';
                }
            }
            emit({{"m", m},
                  {"gaps", gaps},
                  {"radius", radius},
                  {"tol", tol},
                  {"lower", br.lower_value},
                  {"upper", br.upper_value},
                  {"residual_lower", br.lower.residual},
                  {"residual_upper", br.upper.residual},
                  {"iterations_lower", br.lower.iterations},
                  {"iterations_upper", br.upper.iterations}},
                 output, "bracket");
            return kExitOk;
        }
        if (c_second->parsed()) {
            const auto gaps = parse_int_list(gaps_text);
            state_from(m, gaps);
            SolverGrid sg{m, radius, BoundaryPolicy::zero, {}};
            const auto tau = solve_expected_time(sg, sopts);
            const auto smom = solve_second_moment(sg, tau, sopts);
            emit({{"m", m},
                  {"gaps", gaps},
                  {"radius", radius},
                  {"tol", tol},
                  {"expected_time_lower", tau.value_at(gaps)},
                  {"second_moment_lower", smom.value_at(gaps)},
                  {"residual", smom.residual},
                  {"iterations", tau.iterations + smom.iterations}},
                 output, "second-moment");
            return kExitOk;
        }
        if (c_verify->parsed()) {
            std::vector<DriftReport> reports;
            const bool all = suite == "all";
            if (all || suite == "pairs") reports.push_back(verify_pair_martingales(m, grid));
            if (all || suite == "min") reports.push_back(verify_min_supermartingale(m, grid));
            if (all || suite == "phi") reports.push_back(verify_phi_supermartingale(grid));
            if (all || suite == "moments") reports.push_back(verify_moment_identities(m, grid));
            if (all || suite == "H") reports.push_back(verify_quartic_drift(m, grid));
            if (all || suite == "time2") {
                reports.push_back(verify_time_squared_martingale(m, grid, nmax));
            }
            if (reports.empty()) throw CLI::ValidationError("suite", "unknown suite " + suite);
            json body = json::array();
            bool failed = false;
            for (const auto& r : reports) {
                body.push_back(report_to_json(r));
                failed = failed || !r.ok();
            }
            emit({{"suites", body}, {"failed", failed}}, output, "verify");
            return failed ? kExitVerificationFailure : kExitOk;
        }
        if (s_search->parsed()) {
            const Rational c = rational_from_string(normalize_text);
            LinearFamilyResult result;
            if (family_text == "f") {
                result = solve_generator_family(k_vars, degree, c);
            } else if (family_text == "gamma") {
                result = solve_pole_family(degree, c);
            } else {
                throw CLI::ValidationError("family", "unknown family " + family_text);
            }
            json j = family_to_json(result);
            j["k"] = family_text == "gamma" ? 3 : k_vars;
            j["degree"] = degree;
            j["family"] = family_text;
            j["normalize"] = rational_to_string(c);
            emit(j, output, "series search");
            return kExitOk;
        }
        if (s_residual->parsed()) {
            std::ifstream f(series_file);
            if (!f) throw std::runtime_error("cannot open series file " + series_file);
            std::stringstream buf;
            buf << f.rdbuf();
            const auto series = series_from_json(buf.str(), degree + 2);
            const auto res = generator_residual(series, rational_from_string(gamma_text));
            json nonzero = json::array();
            for (const auto& [e, cv] : res.coeffs()) {
                nonzero.push_back({{"exponents", e}, {"coeff", rational_to_string(cv)}});
                if (nonzero.size() >= 64) break;
            }
            emit({{"file", series_file},
                  {"gamma", gamma_text},
                  {"degree", degree},
                  {"zero", res.is_zero()},
                  {"nonzero_coefficients", nonzero}},
                 output, "series residual");
            return kExitOk;
        }
        if (s_commute->parsed()) {
            bool all_ok = true;
            std::uint64_t ctr = 0;
            for (int t = 0; t < commute_trials && all_ok; ++t) {
                MultiSeries f(k_vars, degree);
                // sparse random series with small rational coefficients
                for (int term = 0; term < 12; ++term) {
                    std::vector<int> e(k_vars, 0);
                    int budget = degree;
                    for (int v_i = 0; v_i < k_vars; ++v_i) {
                        e[v_i] = static_cast<int>(mix64(seed ^ ++ctr) % (budget + 1));
                        budget -= e[v_i];
                    }
                    const long num = static_cast<long>(mix64(seed ^ ++ctr) % 19) - 9;
                    const long den = 1 + static_cast<long>(mix64(seed ^ ++ctr) % 6);
                    f.add_coefficient(e, make_rational(num, den));
                }
                for (int s1 = 0; s1 < 2 && all_ok; ++s1) {
                    for (int s2 = 0; s2 < 2 && all_ok; ++s2) {
                        for (int a = 1; a <= k_vars && all_ok; ++a) {
                            for (int b = a + 1; b <= k_vars && all_ok; ++b) {
                                all_ok = check_commutativity(
                                    s1 ? Sign::plus : Sign::minus, a,
                                    s2 ? Sign::plus : Sign::minus, b, f);
                            }
                        }
                    }
                }
            }
            emit({{"vars", k_vars},
                  {"degree", degree},
                  {"trials", commute_trials},
                  {"all_commute", all_ok}},
                 output, "series commute-check");
            return all_ok ? kExitOk : kExitVerificationFailure;
        }
        std::cerr << "no subcommand executed\n";
        return kExitBadConfig;
    } catch (const CLI::ValidationError& e) {
        std::cerr << "invalid configuration: " << e.what() << "\n";
        return kExitBadConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid configuration: " << e.what() << "\n";
        return kExitBadConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitVerificationFailure;
    }
}
