// Copyright 2026 The tlcu Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file
 * Command-line front end. `run_cli` is kept separate from `main` so tests can
 * drive it in-process with captured streams.
 *
 * Exit codes: 0 success, 1 invalid input (flags, files, Hamiltonians, caps),
 * 2 internal invariant violation.
 */

#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <tlcu/tlcu.hpp>

namespace tlcu::cli {

using nlohmann::ordered_json;

struct RunConfig {
    std::string mode;
    std::string hamiltonian_path;
    std::string time_dependent_path;
    double time = 0.0;
    double epsilon = 1e-3;
    std::string initial_state = "0";
    std::uint64_t seed = 7;
    std::string output_path;
    int trials = 20;
    bool oracle = true;
    bool timing = false;
    std::string ancilla_mode = "auto";
    std::optional<int> dense_cap;
    std::optional<int> k_cap;
    std::optional<std::size_t> m_budget;
    std::vector<double> epsilon_list;
    std::string format;
    std::uint64_t c_prep = ResourceConstants{}.c_prep;
    std::uint64_t c_toffoli = ResourceConstants{}.c_toffoli;
};

namespace detail {

inline std::string read_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("cannot read file '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline Limits limits_for(const RunConfig &config) {
    Limits limits = default_limits();
    if (config.dense_cap) {
        if (*config.dense_cap < 1 || *config.dense_cap > 30) {
            throw ValidationError("--dense-cap must lie in [1, 30]");
        }
        limits.dense_qubit_cap = *config.dense_cap;
    }
    if (config.k_cap) {
        if (*config.k_cap < 0) {
            throw ValidationError("--k-cap must be nonnegative");
        }
        limits.max_order = *config.k_cap;
    }
    if (config.m_budget) {
        limits.table_budget = *config.m_budget;
    }
    return limits;
}

inline EngineOptions engine_options(const RunConfig &config) {
    EngineOptions options;
    options.limits = limits_for(config);
    if (config.ancilla_mode == "full") {
        options.mode = AncillaMode::full;
    } else if (config.ancilla_mode == "merged") {
        options.mode = AncillaMode::merged;
    } else {
        options.mode = AncillaMode::automatic;
    }
    return options;
}

inline void require_time(double t) {
    if (!(t >= 0.0) || !std::isfinite(t)) {
        throw ValidationError("time must be nonnegative");
    }
}

/// Basis index, "plus", "random" (seeded) or a file of "re [im]" lines.
inline StateVector initial_state(const std::string &source, std::size_t dim, std::uint64_t seed) {
    if (source == "plus") {
        return StateVector::Constant(static_cast<Eigen::Index>(dim),
                                     1.0 / std::sqrt(static_cast<double>(dim)));
    }
    if (source == "random") {
        std::mt19937_64 rng(seed);
        return random_unit_state(dim, rng);
    }
    if (!source.empty() && source.find_first_not_of("0123456789") == std::string::npos) {
        std::size_t index = 0;
        try {
            index = std::stoull(source);
        } catch (const std::exception &) {
            throw ValidationError("basis index '" + source + "' is out of range");
        }
        if (index >= dim) {
            throw ValidationError("basis index " + source + " is out of range for dimension " +
                                  std::to_string(dim));
        }
        StateVector psi = StateVector::Zero(static_cast<Eigen::Index>(dim));
        psi(static_cast<Eigen::Index>(index)) = 1.0;
        return psi;
    }
    std::istringstream in(read_file(source));
    std::vector<cplx> amps;
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto tokens = tlcu::detail::split_ws(tlcu::detail::strip_comment(raw));
        if (tokens.empty()) {
            continue;
        }
        if (tokens.size() > 2) {
            throw ValidationError("state file line " + std::to_string(line_no) +
                                  ": expected 're [im]'");
        }
        const double re = tlcu::detail::parse_real(tokens[0], line_no);
        const double im = tokens.size() == 2 ? tlcu::detail::parse_real(tokens[1], line_no) : 0.0;
        amps.emplace_back(re, im);
    }
    if (amps.size() != dim) {
        throw ValidationError("state file has " + std::to_string(amps.size()) +
                              " amplitudes, expected " + std::to_string(dim));
    }
    StateVector psi(static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < dim; ++i) {
        psi(static_cast<Eigen::Index>(i)) = amps[i];
    }
    if (std::abs(psi.norm() - 1.0) > 1e-10) {
        throw ValidationError("state must have unit norm");
    }
    return psi;
}

inline ordered_json state_json(const StateVector &psi) {
    ordered_json out = ordered_json::array();
    for (Eigen::Index i = 0; i < psi.size(); ++i) {
        out.push_back({psi(i).real(), psi(i).imag()});
    }
    return out;
}

inline ordered_json segment_json(const SegmentReport &rep) {
    return {{"index", rep.segment_index},
            {"seg_time", rep.seg_time},
            {"s", rep.s},
            {"K", rep.K},
            {"ancilla_dim", rep.ancilla_dim},
            {"corrected", rep.corrected},
            {"flag_angle", rep.flag_angle},
            {"kept_probability", rep.kept_probability},
            {"oaa_identity_residual", rep.oaa_identity_residual},
            {"post_projection_norm_deficit", rep.post_projection_norm_deficit},
            {"error_budget", rep.error_budget},
            {"deficit_constant", rep.deficit_constant},
            {"deficit_within_bound", rep.deficit_within_bound}};
}

inline void plan_fields(ordered_json &report, const std::optional<SegmentPlan> &plan,
                        std::size_t terms_per_slot) {
    if (!plan) {
        report["r"] = 0;
        report["K"] = 0;
        report["final_K"] = 0;
        report["full_segments"] = 0;
        report["seg_time"] = 0.0;
        report["final_seg_time"] = 0.0;
        report["s"] = 1.0;
        report["final_s"] = 1.0;
        report["m"] = 1;
        return;
    }
    report["r"] = plan->r;
    report["K"] = plan->K;
    report["final_K"] = plan->final_K;
    report["full_segments"] = plan->full_segments;
    report["seg_time"] = plan->seg_time;
    report["final_seg_time"] = plan->final_seg_time;
    report["s"] = plan->s;
    report["final_s"] = plan->final_s;
    const std::size_t m = geometric_count(terms_per_slot, plan->K);
    if (m == std::numeric_limits<std::size_t>::max()) {
        report["m"] = nullptr;
    } else {
        report["m"] = m;
    }
}

inline void result_fields(ordered_json &report, const EvolutionResult &result, bool timing) {
    ordered_json s_list = ordered_json::array();
    ordered_json segments = ordered_json::array();
    for (const auto &rep : result.reports) {
        s_list.push_back(rep.s);
        segments.push_back(segment_json(rep));
    }
    report["s_per_segment"] = s_list;
    report["segments"] = segments;
    report["total_trace_distance_bound"] = result.total_trace_distance_bound;
    report["final_state"] = state_json(result.final_state);
    report["wall_time"] = timing ? ordered_json(result.wall_time.count()) : ordered_json(nullptr);
}

inline ordered_json common_header(const RunConfig &config, const std::string &path, int qubits,
                                  std::size_t terms) {
    return {{"mode", config.mode},    {"hamiltonian", path},       {"n", qubits},
            {"L", terms},             {"time", config.time},       {"epsilon", config.epsilon},
            {"state", config.initial_state}, {"seed", config.seed}};
}

inline ordered_json simulate(const RunConfig &config) {
    require_time(config.time);
    const EngineOptions options = engine_options(config);
    const auto h = parse_hamiltonian(read_file(config.hamiltonian_path));
    require_dense_cap(h.qubits(), options.limits);
    const StateVector psi0 = initial_state(config.initial_state, h.dimension(), config.seed);

    ordered_json report = common_header(config, config.hamiltonian_path, h.qubits(), h.term_count());
    report["ancilla_mode"] = config.ancilla_mode;
    report["alpha_sum"] = h.alpha_sum();
    const EvolutionResult result = run_evolution(h, config.time, config.epsilon, psi0, options);
    plan_fields(report, result.plan, h.term_count());
    result_fields(report, result, config.timing);
    if (config.oracle) {
        const StateVector exact =
            expm_hermitian(build_dense(h, options.limits), config.time, options.limits).matrix *
            psi0;
        report["trace_distance_to_oracle"] = trace_distance(result.final_state, exact);
    } else {
        report["trace_distance_to_oracle"] = nullptr;
    }
    return report;
}

inline ordered_json simulate_td(const RunConfig &config) {
    require_time(config.time);
    const EngineOptions options = engine_options(config);
    const auto hd = parse_time_dependent(read_file(config.time_dependent_path));
    require_dense_cap(hd.qubits(), options.limits);
    const StateVector psi0 = initial_state(config.initial_state, hd.dimension(), config.seed);

    ordered_json report =
        common_header(config, config.time_dependent_path, hd.qubits(), hd.term_count());
    report["ancilla_mode"] = config.ancilla_mode;
    report["h_prime"] = hd.h_prime(config.time);
    report["weight_bound"] = config.time > 0.0 ? hd.weight_bound(config.time) : hd.weight_sum_at(0.0);
    const EvolutionResult result =
        run_evolution_td(hd, config.time, config.epsilon, psi0, options);
    report["M"] = result.slices;
    plan_fields(report, result.plan, hd.term_count() * result.slices);
    result_fields(report, result, config.timing);
    if (config.oracle) {
        StateVector exact = psi0;
        if (config.time > 0.0) {
            const auto prop = time_ordered_exact(
                [&](double tau) { return hd.dense_at(tau, options.limits); }, config.time, 8,
                options.limits);
            exact = prop.matrix * psi0;
            report["oracle_steps"] = prop.steps;
        }
        report["trace_distance_to_oracle"] = trace_distance(result.final_state, exact);
    } else {
        report["trace_distance_to_oracle"] = nullptr;
    }
    return report;
}

inline ordered_json estimate_json(const ResourceEstimate &e) {
    return {{"K", e.K},
            {"r", e.r},
            {"L", e.L},
            {"n", e.n},
            {"M", e.M},
            {"ancilla_qubits", e.ancilla_qubits},
            {"b_gates_per_segment", e.b_gates_per_segment},
            {"selectV_gates_per_segment", e.selectV_gates_per_segment},
            {"total_gates", e.total_gates}};
}

inline ResourceConstants constants_for(const RunConfig &config) {
    return {config.c_prep, config.c_toffoli};
}

inline ordered_json estimate(const RunConfig &config) {
    const Limits limits = limits_for(config);
    const ResourceConstants constants = constants_for(config);
    ResourceEstimate e;
    std::string path;
    if (!config.time_dependent_path.empty()) {
        path = config.time_dependent_path;
        const auto hd = parse_time_dependent(read_file(path));
        e = estimate_resources(hd, config.time, config.epsilon, constants, limits);
    } else {
        path = config.hamiltonian_path;
        const auto h = parse_hamiltonian(read_file(path));
        e = estimate_resources(h, config.time, config.epsilon, constants, limits);
    }
    ordered_json report = {{"mode", config.mode},
                           {"hamiltonian", path},
                           {"time", config.time},
                           {"epsilon", config.epsilon}};
    report.update(estimate_json(e));
    report["constants"] = {{"c_prep", e.constants.c_prep}, {"c_toffoli", e.constants.c_toffoli}};
    report["asymptotic_labels"] = e.asymptotic_labels;
    return report;
}

inline ordered_json verify_oaa(const RunConfig &config) {
    const EngineOptions options = engine_options(config);
    const auto h = parse_hamiltonian(read_file(config.hamiltonian_path));
    require_dense_cap(h.qubits(), options.limits);
    if (config.trials < 1) {
        throw ValidationError("--trials must be at least 1");
    }
    const SegmentPlan plan = plan_segments(h, config.time, config.epsilon, options.limits);

    ordered_json tables = ordered_json::array();
    double worst = 0.0;
    auto check = [&](const std::string &kind, double seg_time, int order) {
        tlcu::detail::with_taylor_sum(h, seg_time, order, options, [&](const auto &u) {
            const double residual =
                verify_oaa_identity(u, PrepareUnitary(u), config.trials, config.seed,
                                    options.limits);
            worst = std::max(worst, residual);
            tables.push_back({{"segment", kind},
                              {"seg_time", seg_time},
                              {"K", order},
                              {"ancilla_dim", u.size()},
                              {"s", u.s()},
                              {"max_identity_residual", residual}});
        });
    };
    if (plan.full_segments > 0) {
        check("full", plan.seg_time, plan.K);
    }
    if (!plan.final_is_full()) {
        check("final", plan.final_seg_time, plan.final_K);
    }
    ordered_json report = {{"mode", config.mode},
                           {"hamiltonian", config.hamiltonian_path},
                           {"n", h.qubits()},
                           {"L", h.term_count()},
                           {"time", config.time},
                           {"epsilon", config.epsilon},
                           {"seed", config.seed},
                           {"trials", config.trials},
                           {"ancilla_mode", config.ancilla_mode},
                           {"r", plan.r},
                           {"K", plan.K},
                           {"tables", tables},
                           {"max_identity_residual", worst}};
    return report;
}

inline std::string format_double(double v) {
    std::ostringstream out;
    out << std::setprecision(17) << v;
    return out.str();
}

inline std::string sweep_csv(const std::vector<SweepRow> &rows) {
    std::ostringstream out;
    out << "epsilon,K,r,L,n,M,ancilla_qubits,b_gates_per_segment,selectV_gates_per_segment,"
           "total_gates,K_ratio_eps_squared,gate_ratio_eps_squared\n";
    for (const auto &row : rows) {
        const auto &e = row.estimate;
        out << format_double(e.epsilon) << ',' << e.K << ',' << e.r << ',' << e.L << ',' << e.n
            << ',' << e.M << ',' << e.ancilla_qubits << ',' << e.b_gates_per_segment << ','
            << e.selectV_gates_per_segment << ',' << e.total_gates << ','
            << (row.order_ratio_squared ? format_double(*row.order_ratio_squared) : "") << ','
            << (row.gate_ratio_squared ? format_double(*row.gate_ratio_squared) : "") << '\n';
    }
    return out.str();
}

inline ordered_json sweep_json(const RunConfig &config, const std::vector<SweepRow> &rows) {
    ordered_json list = ordered_json::array();
    for (const auto &row : rows) {
        ordered_json item = {{"epsilon", row.estimate.epsilon}};
        item.update(estimate_json(row.estimate));
        item["K_ratio_eps_squared"] =
            row.order_ratio_squared ? ordered_json(*row.order_ratio_squared) : ordered_json(nullptr);
        item["gate_ratio_eps_squared"] =
            row.gate_ratio_squared ? ordered_json(*row.gate_ratio_squared) : ordered_json(nullptr);
        list.push_back(item);
    }
    return {{"mode", config.mode},
            {"hamiltonian", config.hamiltonian_path},
            {"time", config.time},
            {"constants", {{"c_prep", config.c_prep}, {"c_toffoli", config.c_toffoli}}},
            {"rows", list}};
}

inline void emit(const RunConfig &config, const std::string &text, std::ostream &out) {
    if (config.output_path.empty()) {
        out << text;
        return;
    }
    std::ofstream file(config.output_path);
    if (!file) {
        throw ValidationError("cannot write '" + config.output_path + "'");
    }
    file << text;
}

} // namespace detail

inline int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    RunConfig config;
    CLI::App app{"Hamiltonian simulation by truncated Taylor series with oblivious amplitude "
                 "amplification"};
    app.require_subcommand(1);

    auto add_io = [&](CLI::App *sub) {
        sub->add_option("--out", config.output_path, "Write the report here instead of stdout");
        sub->add_option("--dense-cap", config.dense_cap, "Qubit cap for dense matrices");
        sub->add_option("--k-cap", config.k_cap, "Hard cap on the truncation order K");
        sub->add_option("--m-budget", config.m_budget, "Maximum coefficient table size m");
    };
    auto add_problem = [&](CLI::App *sub, bool time_required) {
        auto *t = sub->add_option("--time", config.time, "Evolution time t");
        if (time_required) {
            t->required();
        }
        sub->add_option("--eps", config.epsilon, "Error budget epsilon")->required();
    };
    auto add_engine = [&](CLI::App *sub) {
        sub->add_option("--mode", config.ancilla_mode, "Ancilla representation")
            ->check(CLI::IsMember({"auto", "full", "merged"}));
        sub->add_option("--seed", config.seed, "Seed for random states");
    };
    auto add_simulation = [&](CLI::App *sub) {
        sub->add_option("--state", config.initial_state,
                        "Initial state: basis index, 'plus', 'random' or amplitude file");
        sub->add_flag("--no-oracle", [&](std::int64_t) { config.oracle = false; },
                      "Skip the dense reference comparison");
        sub->add_flag("--timing", config.timing, "Report wall time (breaks byte determinism)");
    };

    auto *simulate = app.add_subcommand("simulate", "Simulate exp(-iHt) on an initial state");
    simulate->add_option("--ham", config.hamiltonian_path, ".ham file")->required();
    add_problem(simulate, true);
    add_engine(simulate);
    add_simulation(simulate);
    add_io(simulate);

    auto *simulate_td =
        app.add_subcommand("simulate-td", "Simulate a time-dependent Hamiltonian (.thm)");
    simulate_td->add_option("--thm", config.time_dependent_path, ".thm file")->required();
    add_problem(simulate_td, true);
    add_engine(simulate_td);
    add_simulation(simulate_td);
    add_io(simulate_td);

    auto *estimate = app.add_subcommand("estimate", "Qubit and gate counts");
    auto *est_ham = estimate->add_option("--ham", config.hamiltonian_path, ".ham file");
    auto *est_thm = estimate->add_option("--thm", config.time_dependent_path, ".thm file");
    est_ham->excludes(est_thm);
    add_problem(estimate, true);
    estimate->add_option("--c-prep", config.c_prep, "Gates per amplitude of state preparation");
    estimate->add_option("--c-toffoli", config.c_toffoli, "Gates per Toffoli control");
    add_io(estimate);

    auto *verify = app.add_subcommand("verify-oaa", "Check the amplification identity");
    verify->add_option("--ham", config.hamiltonian_path, ".ham file")->required();
    add_problem(verify, true);
    add_engine(verify);
    verify->add_option("--trials", config.trials, "Random states per table");
    add_io(verify);

    auto *sweep = app.add_subcommand("sweep", "Resource estimates over a list of epsilons");
    sweep->add_option("--ham", config.hamiltonian_path, ".ham file")->required();
    sweep->add_option("--time", config.time, "Evolution time t")->required();
    sweep->add_option("--eps-list", config.epsilon_list, "Comma-separated epsilons")
        ->required()
        ->delimiter(',');
    sweep->add_option("--format", config.format, "csv (default) or json")
        ->check(CLI::IsMember({"csv", "json"}));
    sweep->add_option("--c-prep", config.c_prep, "Gates per amplitude of state preparation");
    sweep->add_option("--c-toffoli", config.c_toffoli, "Gates per Toffoli control");
    add_io(sweep);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << "error: " << e.what() << '\n';
        return 1;
    }

    try {
        if (simulate->parsed()) {
            config.mode = "simulate";
            detail::emit(config, detail::simulate(config).dump(2) + "\n", out);
        } else if (simulate_td->parsed()) {
            config.mode = "simulate-td";
            detail::emit(config, detail::simulate_td(config).dump(2) + "\n", out);
        } else if (estimate->parsed()) {
            config.mode = "estimate";
            if (config.hamiltonian_path.empty() && config.time_dependent_path.empty()) {
                throw ValidationError("estimate needs --ham or --thm");
            }
            detail::emit(config, detail::estimate(config).dump(2) + "\n", out);
        } else if (verify->parsed()) {
            config.mode = "verify-oaa";
            detail::emit(config, detail::verify_oaa(config).dump(2) + "\n", out);
        } else if (sweep->parsed()) {
            config.mode = "sweep";
            const auto h = parse_hamiltonian(detail::read_file(config.hamiltonian_path));
            const auto rows = sweep_report(h, config.time, config.epsilon_list,
                                           detail::constants_for(config),
                                           detail::limits_for(config));
            if (config.format == "json") {
                detail::emit(config, detail::sweep_json(config, rows).dump(2) + "\n", out);
            } else {
                detail::emit(config, detail::sweep_csv(rows), out);
            }
        }
    } catch (const InvariantViolation &e) {
        err << "invariant violation: " << e.what() << '\n';
        return 2;
    } catch (const ValidationError &e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception &e) {
        err << "internal error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}

} // namespace tlcu::cli
