#include "qpbe/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "qpbe/berry_esseen.hpp"
#include "qpbe/gaussian.hpp"
#include "qpbe/lambda_operator.hpp"
#include "qpbe/models.hpp"
#include "qpbe/numerics.hpp"
#include "qpbe/partition_lattice.hpp"
#include "qpbe/quasi_power.hpp"
#include "qpbe/smoothing_kernel.hpp"

namespace qpbe {

using json = nlohmann::ordered_json;

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void validate_config(const ExperimentConfig& cfg) {
    const bool known = cfg.command == "partitions" || cfg.command == "kernel" ||
                       cfg.command == "bound" || cfg.command == "rate" || cfg.command == "demo";
    if (!known) throw config_error("unknown command: " + cfg.command);
    if (cfg.format != "csv" && cfg.format != "json") {
        throw config_error("format must be csv or json");
    }
    if (cfg.nodes != 0 && (cfg.nodes < 2 || cfg.nodes % 2 != 0)) {
        throw config_error("node counts must be even");
    }
    if (cfg.tol < 1e-9) throw config_error("tol must be >= 1e-9");
    for (std::size_t i = 1; i < cfg.n_list.size(); ++i) {
        if (cfg.n_list[i] <= cfg.n_list[i - 1]) {
            throw config_error("n list must be strictly increasing");
        }
    }
    if (cfg.command == "partitions" || cfg.command == "kernel") {
        if (cfg.m < 1 || cfg.m > 8) throw config_error("m must be in 1..8");
    }
    if (cfg.command == "bound" || cfg.command == "rate") {
        if (cfg.n_list.empty()) throw config_error("n list required");
        if (cfg.model.empty()) throw config_error("model required");
        if (cfg.T_policy != "sqrt-phi" && cfg.T_policy != "explicit") {
            throw config_error("T policy must be sqrt-phi or explicit");
        }
        if (cfg.T_policy == "explicit" && !(cfg.T > 0.0)) {
            throw config_error("explicit T must be positive");
        }
    }
    if (cfg.command == "demo" && cfg.n_list.empty()) throw config_error("n list required");
}

namespace {

// ---- model resolution -------------------------------------------------------

LatticeDistribution parse_step_atoms(const std::string& text) {
    // "0:0.5;1:0.5" (1-d) or "0,0:0.25;0,1:0.25;..." (multi-d)
    std::vector<std::pair<std::vector<int>, double>> atoms;
    std::istringstream in(text);
    std::string item;
    int dim = -1;
    while (std::getline(in, item, ';')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) throw config_error("step atom needs key:mass");
        std::vector<int> key;
        std::istringstream kin(item.substr(0, colon));
        std::string tok;
        while (std::getline(kin, tok, ',')) key.push_back(std::stoi(tok));
        if (dim == -1) dim = static_cast<int>(key.size());
        if (static_cast<int>(key.size()) != dim) throw config_error("step atoms disagree on dimension");
        atoms.emplace_back(std::move(key), std::stod(item.substr(colon + 1)));
    }
    if (atoms.empty()) throw config_error("no step atoms given");
    return LatticeDistribution::from_atoms(dim, std::vector<double>(dim, 0.0),
                                           std::vector<double>(dim, 1.0), std::move(atoms));
}

DissectionSpec parse_classes(const std::string& text, int max_n) {
    // classes separated by ';', each "all" or a comma list of sizes
    std::vector<SizeClass> classes;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ';')) {
        SizeClass c;
        if (item == "all" || item == "rest") {
            c.all_remaining = true;
        } else {
            std::istringstream sin(item);
            std::string tok;
            while (std::getline(sin, tok, ',')) c.sizes.push_back(std::stoi(tok));
            if (c.sizes.empty()) throw config_error("empty dissection class");
        }
        classes.push_back(std::move(c));
    }
    return DissectionSpec(std::move(classes), max_n);
}

LatticeDistribution bernoulli_step() {
    return LatticeDistribution::from_atoms(1, {0.0}, {1.0}, {{{0}, 0.5}, {{1}, 0.5}});
}

LatticeDistribution bernoulli_pair_step() {
    return LatticeDistribution::from_atoms(
        2, {0.0, 0.0}, {1.0, 1.0}, {{{0, 0}, 0.25}, {{0, 1}, 0.25}, {{1, 0}, 0.25}, {{1, 1}, 0.25}});
}

LatticeDistribution correlated_pair_step() {
    // (xi, xi + xi') for independent fair coins xi, xi'
    return LatticeDistribution::from_atoms(
        2, {0.0, 0.0}, {1.0, 1.0}, {{{0, 0}, 0.25}, {{0, 1}, 0.25}, {{1, 1}, 0.25}, {{1, 2}, 0.25}});
}

// 2-d product binomial assembled per axis; avoids the quadratic convolution.
LatticeDistribution product_binomial_law(long long n) {
    const LatticeDistribution b = iid_sum_law(bernoulli_step(), n);
    std::vector<std::pair<std::vector<int>, double>> atoms;
    for (std::size_t i = 0; i < b.atom_count(); ++i) {
        for (std::size_t j = 0; j < b.atom_count(); ++j) {
            atoms.push_back({{b.key(i)[0], b.key(j)[0]}, b.mass[i] * b.mass[j]});
        }
    }
    return LatticeDistribution::from_atoms(2, {0.0, 0.0}, {1.0, 1.0}, std::move(atoms));
}

struct ResolvedModel {
    int m = 1;
    bool empirical = false;                                  // sigma via difference quotients
    QuasiPowerModel model;                                   // when !empirical
    std::function<LatticeDistribution(long long)> law_at;    // when empirical
    std::string sigma_source = "series";
};

ResolvedModel resolve_model(const ExperimentConfig& cfg) {
    ResolvedModel r;
    if (cfg.model == "binomial") {
        r.m = 1;
        r.model = make_iid_model(bernoulli_step());
    } else if (cfg.model == "binomial2") {
        r.m = 2;
        QuasiPowerModel m2 = make_iid_model(bernoulli_pair_step());
        // independent coordinates: build the exact law as the product of the
        // one-dimensional binomials
        r.model = QuasiPowerModel(m2.u, m2.v, m2.phi, m2.kappa, m2.tau,
                                  [](long long n) { return product_binomial_law(n); });
    } else if (cfg.model == "correlated2") {
        r.m = 2;
        r.model = make_iid_model(correlated_pair_step());
    } else if (cfg.model == "steplaw") {
        const LatticeDistribution step = parse_step_atoms(cfg.step_atoms);
        r.m = step.dimension;
        r.model = make_iid_model(step);
    } else if (cfg.model == "grammar") {
        std::ifstream in(cfg.grammar_file);
        if (!in) throw config_error("cannot open grammar file: " + cfg.grammar_file);
        std::stringstream buf;
        buf << in.rdbuf();
        const GrammarSpec g = parse_grammar(buf.str());
        r.m = static_cast<int>(g.tracked.size());
        r.empirical = true;
        r.sigma_source = "difference_quotient";
        r.law_at = [g](long long n) { return grammar_law(g, static_cast<int>(n)); };
    } else if (cfg.model == "dissection") {
        const DissectionSpec spec = parse_classes(cfg.classes_spec.empty() ? "all" : cfg.classes_spec,
                                                  cfg.dissection_max_n);
        r.m = static_cast<int>(spec.classes.size());
        r.empirical = true;
        r.sigma_source = "difference_quotient";
        r.law_at = [spec](long long n) { return dissection_law(spec, static_cast<int>(n)); };
    } else {
        throw config_error("unknown model: " + cfg.model);
    }
    if (cfg.m != 0 && cfg.m != r.m) {
        throw config_error("--m disagrees with the model dimension");
    }
    return r;
}

StandardizedPair pair_for(const ResolvedModel& rm, long long n) {
    if (rm.empirical) return empirical_standardized_pair(rm.law_at, n);
    return standardized_pair(rm.model, n);
}

// ---- rendering ----------------------------------------------------------------

json config_json(const ExperimentConfig& cfg) {
    json j;
    j["command"] = cfg.command;
    j["model"] = cfg.model;
    j["grammar_file"] = cfg.grammar_file;
    j["classes"] = cfg.classes_spec;
    j["step_atoms"] = cfg.step_atoms;
    j["m"] = cfg.m;
    j["n_list"] = cfg.n_list;
    j["T_policy"] = cfg.T_policy;
    j["T"] = cfg.T;
    j["nodes"] = cfg.nodes;
    j["tol"] = cfg.tol;
    j["dissection_max_n"] = cfg.dissection_max_n;
    j["ambiguous_ok"] = cfg.ambiguous_ok;
    j["parallel"] = cfg.parallel;
    j["format"] = cfg.format;
    return j;
}

std::string config_comment(const ExperimentConfig& cfg) {
    std::ostringstream out;
    out << "# tool=" << kToolName << " " << kToolVersion << "\n";
    out << "# command=" << cfg.command;
    if (!cfg.model.empty()) out << " model=" << cfg.model;
    if (cfg.m > 0) out << " m=" << cfg.m;
    if (!cfg.n_list.empty()) {
        out << " n=";
        for (std::size_t i = 0; i < cfg.n_list.size(); ++i) {
            if (i) out << ",";
            out << cfg.n_list[i];
        }
    }
    if (cfg.command == "bound" || cfg.command == "rate") {
        out << " T_policy=" << cfg.T_policy;
        if (cfg.T_policy == "explicit") out << " T=" << format_double(cfg.T);
        out << " nodes=" << cfg.nodes << " tol=" << format_double(cfg.tol);
    }
    if (!cfg.grammar_file.empty()) out << " grammar_file=" << cfg.grammar_file;
    if (!cfg.classes_spec.empty()) out << " classes=" << cfg.classes_spec;
    if (!cfg.step_atoms.empty()) out << " step_atoms=" << cfg.step_atoms;
    out << "\n";
    return out.str();
}

constexpr const char* kRowHeader =
    "n,phi_n,sup_distance,integral_term,marginal_term_total,kernel_term,rhs_total,holds";

std::string subset_key(const std::vector<int>& J) {
    std::string s;
    for (std::size_t i = 0; i < J.size(); ++i) {
        if (i) s.push_back(',');
        s += std::to_string(J[i]);
    }
    return s;
}

json bound_row_json(long long n, double phi, const BoundReport& rep) {
    json row;
    row["n"] = n;
    row["phi_n"] = phi;
    row["T"] = rep.T;
    row["lhs_sup_distance"] = rep.lhs_sup_distance;
    row["integral_term"] = rep.integral_term;
    json marg;
    for (const auto& [J, v] : rep.marginal_sup) marg[subset_key(J)] = v;
    row["marginal_sup"] = marg;
    row["marginal_term_total"] = rep.marginal_term_total;
    row["kernel_term"] = rep.kernel_term;
    row["rhs_total"] = rep.rhs_total;
    row["holds"] = rep.holds;
    return row;
}

std::string bound_row_csv(long long n, double phi, const BoundReport& rep) {
    std::ostringstream out;
    out << n << "," << format_double(phi) << "," << format_double(rep.lhs_sup_distance) << ","
        << format_double(rep.integral_term) << "," << format_double(rep.marginal_term_total) << ","
        << format_double(rep.kernel_term) << "," << format_double(rep.rhs_total) << ","
        << (rep.holds ? "true" : "false");
    return out.str();
}

// ---- command runners ------------------------------------------------------------

std::string run_partitions(const ExperimentConfig& cfg) {
    const auto parts = enumerate_partitions(cfg.m);
    struct WRow {
        std::string gamma, beta;
        long long sum;
    };
    std::vector<WRow> wrows;
    if (cfg.m >= 2 && cfg.m <= 5) {
        for (const auto& beta : parts) {
            if (beta.num_blocks() < 2) continue;
            for (const auto& gamma : parts) {
                if (!is_refinement(gamma, beta)) continue;
                wrows.push_back({format_partition(gamma), format_partition(beta),
                                 weisner_sum(gamma, beta)});
            }
        }
    }

    if (cfg.format == "json") {
        json j;
        j["tool"] = kToolName;
        j["version"] = kToolVersion;
        j["config"] = config_json(cfg);
        j["partitions"] = json::array();
        for (const auto& p : parts) {
            json row;
            row["partition"] = format_partition(p);
            row["blocks"] = p.blocks;
            row["num_blocks"] = p.num_blocks();
            row["moebius"] = moebius_coefficient(p);
            j["partitions"].push_back(row);
        }
        j["weisner_checks"] = json::array();
        for (const auto& w : wrows) {
            j["weisner_checks"].push_back({{"gamma", w.gamma}, {"beta", w.beta}, {"sum", w.sum}});
        }
        return j.dump(2) + "\n";
    }

    std::ostringstream out;
    out << config_comment(cfg);
    out << "record,partition,num_blocks,moebius,gamma,beta,weisner_sum\n";
    for (const auto& p : parts) {
        out << "partition," << format_partition(p) << "," << p.num_blocks() << ","
            << moebius_coefficient(p) << ",,,\n";
    }
    for (const auto& w : wrows) {
        out << "weisner,,,," << w.gamma << "," << w.beta << "," << w.sum << "\n";
    }
    return out.str();
}

std::string run_kernel(const ExperimentConfig& cfg) {
    const int m = cfg.m;
    const double lambda = solve_lambda(m, 1e-10);
    const double target = std::pow(0.75, 1.0 / m);
    const double residual = std::abs(cdf_P(lambda) - target);
    const double branch_low = 1.0 - 6.0 * 0.25 + 6.0 * 0.125;
    const double branch_high = 2.0 * 0.125;

    // direct transform of the density against the closed form, coarse grid
    double fourier_max_err = 0.0;
    for (int i = -12; i <= 12; ++i) {
        const double t = 0.1 * i;
        const double numeric = composite_simpson(
            [t](double z) { return 2.0 * std::cos(t * z) * density_f_P(z); }, 0.0, 1e4, 400000);
        fourier_max_err = std::max(fourier_max_err, std::abs(numeric - charfn_phi_P(t)));
    }

    // second derivative at 0 by Richardson over the O(h) one-sided error
    auto second_diff = [](double h) {
        return (charfn_phi_P(h) - 2.0 * charfn_phi_P(0.0) + charfn_phi_P(-h)) / (h * h);
    };
    const double d1 = second_diff(1e-4), d2 = second_diff(5e-5);
    const double second_moment_cf = -(2.0 * d2 - d1);

    const double second_moment_trunc = composite_simpson(
        [](double z) { return 2.0 * z * z * density_f_P(z); }, 0.0, 1e5, 2000000);
    const double abs_moment_trunc = composite_simpson(
        [](double z) { return 2.0 * z * density_f_P(z); }, 0.0, 1e4, 1000000);

    const std::vector<std::pair<std::string, double>> rows = {
        {"lambda", lambda},
        {"C1", constant_C1(m)},
        {"C2", constant_C2()},
        {"quantile_residual", residual},
        {"phi_P_branch_gap_at_half", std::abs(branch_low - branch_high)},
        {"fourier_max_abs_err", fourier_max_err},
        {"second_moment_cf", second_moment_cf},
        {"second_moment_truncated_integral", second_moment_trunc},
        {"abs_moment_truncated_integral", abs_moment_trunc},
    };

    if (cfg.format == "json") {
        json j;
        j["tool"] = kToolName;
        j["version"] = kToolVersion;
        j["config"] = config_json(cfg);
        json vals;
        for (const auto& [k, v] : rows) vals[k] = v;
        j["kernel"] = vals;
        return j.dump(2) + "\n";
    }
    std::ostringstream out;
    out << config_comment(cfg);
    out << "quantity,value\n";
    for (const auto& [k, v] : rows) out << k << "," << format_double(v) << "\n";
    return out.str();
}

std::string run_bound(const ExperimentConfig& cfg) {
    const ResolvedModel rm = resolve_model(cfg);
    QuadConfig quad{cfg.nodes, cfg.parallel};

    std::vector<std::pair<long long, BoundReport>> results;
    std::vector<double> phis;
    for (long long n : cfg.n_list) {
        const StandardizedPair pair = pair_for(rm, n);
        const double T = (cfg.T_policy == "explicit") ? cfg.T : std::sqrt(pair.phi);
        results.emplace_back(n, verify_bound(pair.law, pair.gauss, T, quad, cfg.tol));
        phis.push_back(pair.phi);
    }

    if (cfg.format == "json") {
        json j;
        j["tool"] = kToolName;
        j["version"] = kToolVersion;
        j["config"] = config_json(cfg);
        j["sigma_source"] = rm.sigma_source;
        j["rows"] = json::array();
        for (std::size_t i = 0; i < results.size(); ++i) {
            j["rows"].push_back(bound_row_json(results[i].first, phis[i], results[i].second));
        }
        return j.dump(2) + "\n";
    }
    std::ostringstream out;
    out << config_comment(cfg);
    out << "# sigma_source=" << rm.sigma_source << "\n";
    out << kRowHeader << "\n";
    for (std::size_t i = 0; i < results.size(); ++i) {
        out << bound_row_csv(results[i].first, phis[i], results[i].second) << "\n";
    }
    return out.str();
}

std::string run_rate(const ExperimentConfig& cfg) {
    const ResolvedModel rm = resolve_model(cfg);

    RateResult res;
    if (rm.empirical) {
        // no closed-form u here; measure against the per-n empirical pairs
        std::vector<double> logphi, logdist;
        for (long long n : cfg.n_list) {
            const StandardizedPair pair = pair_for(rm, n);
            const double dist = sup_cdf_distance(pair.law, pair.gauss, cfg.tol, cfg.parallel);
            res.rows.push_back({n, pair.phi, dist});
            logphi.push_back(std::log(pair.phi));
            logdist.push_back(std::log(dist));
        }
        res.fitted_slope = ols_slope(logphi, logdist);
    } else {
        res = rate_experiment(rm.model, cfg.n_list, cfg.tol, cfg.parallel);
    }

    if (cfg.format == "json") {
        json j;
        j["tool"] = kToolName;
        j["version"] = kToolVersion;
        j["config"] = config_json(cfg);
        j["sigma_source"] = rm.sigma_source;
        j["fitted_slope"] = res.fitted_slope;
        j["rows"] = json::array();
        for (const auto& r : res.rows) {
            j["rows"].push_back({{"n", r.n}, {"phi_n", r.phi}, {"sup_distance", r.sup_distance}});
        }
        return j.dump(2) + "\n";
    }
    std::ostringstream out;
    out << config_comment(cfg);
    out << "# sigma_source=" << rm.sigma_source << "\n";
    out << "# fitted_slope=" << format_double(res.fitted_slope) << "\n";
    out << kRowHeader << "\n";
    for (const auto& r : res.rows) {
        out << r.n << "," << format_double(r.phi) << "," << format_double(r.sup_distance)
            << ",,,,,\n";
    }
    return out.str();
}

std::string run_demo(const ExperimentConfig& cfg) {
    std::vector<std::pair<long long, double>> rows;
    for (long long n : cfg.n_list) {
        rows.emplace_back(n, rademacher_demo(n).second);
    }
    if (cfg.format == "json") {
        json j;
        j["tool"] = kToolName;
        j["version"] = kToolVersion;
        j["config"] = config_json(cfg);
        j["rows"] = json::array();
        for (const auto& [n, d] : rows) j["rows"].push_back({{"n", n}, {"sup_distance", d}});
        return j.dump(2) + "\n";
    }
    std::ostringstream out;
    out << config_comment(cfg);
    out << "n,sup_distance\n";
    for (const auto& [n, d] : rows) out << n << "," << format_double(d) << "\n";
    return out.str();
}

}  // namespace

std::string run_experiment(const ExperimentConfig& cfg) {
    validate_config(cfg);
    if (cfg.command == "partitions") return run_partitions(cfg);
    if (cfg.command == "kernel") return run_kernel(cfg);
    if (cfg.command == "bound") return run_bound(cfg);
    if (cfg.command == "rate") return run_rate(cfg);
    return run_demo(cfg);
}

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"quasi-power / Berry-Esseen verification toolkit"};
    app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);
    app.set_config("--config");
    app.require_subcommand(1);

    ExperimentConfig cfg;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--output,-o", cfg.output, "write the report to this path (default stdout)");
        sub->add_option("--format", cfg.format, "csv or json")->default_str("csv");
        sub->add_flag("!--serial", cfg.parallel, "disable the OpenMP paths");
    };
    auto add_model = [&](CLI::App* sub) {
        sub->add_option("--model", cfg.model,
                        "binomial | binomial2 | correlated2 | steplaw | grammar | dissection");
        sub->add_option("--m", cfg.m, "expected dimension (checked against the model)");
        sub->add_option("--n", cfg.n_list, "comma-separated strictly increasing indices")
            ->delimiter(',');
        sub->add_option("--T", cfg.T, "explicit truncation radius (default: sqrt(phi_n))");
        sub->add_option("--nodes", cfg.nodes, "even quadrature node count per axis");
        sub->add_option("--tol", cfg.tol, "CDF quadrature tolerance (>= 1e-9)");
        sub->add_option("--grammar-file", cfg.grammar_file, "grammar description file");
        sub->add_option("--classes", cfg.classes_spec,
                        "dissection classes, e.g. \"all\" or \"3\" or \"3;4,5\"");
        sub->add_option("--max-n", cfg.dissection_max_n, "dissection series cap (<= 22)");
        sub->add_option("--step-atoms", cfg.step_atoms, "step law table, e.g. \"0:0.5;1:0.5\"");
        sub->add_flag("--ambiguous-ok", cfg.ambiguous_ok,
                      "accept derivation counts for possibly ambiguous grammars");
    };

    CLI::App* partitions = app.add_subcommand("partitions", "partition lattice self-checks");
    partitions->add_option("--m", cfg.m, "ground-set size (1..8)")->required();
    add_common(partitions);

    CLI::App* kernel = app.add_subcommand("kernel", "smoothing kernel constants and residuals");
    kernel->add_option("--m", cfg.m, "dimension (1..8)")->required();
    add_common(kernel);

    CLI::App* bound = app.add_subcommand("bound", "two-sided comparison per index");
    add_model(bound);
    add_common(bound);

    CLI::App* rate = app.add_subcommand("rate", "sup-distance decay against phi_n");
    add_model(rate);
    add_common(rate);

    CLI::App* demo = app.add_subcommand("demo", "degenerate-limit demonstration");
    demo->add_option("--n", cfg.n_list, "comma-separated indices")->delimiter(',');
    add_common(demo);

    try {
        app.parse(argc, const_cast<char**>(argv));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);  // prints help/version or the parse error
        return code == 0 ? 0 : 2;
    }

    cfg.command = app.get_subcommands().front()->get_name();
    if (cfg.T > 0.0) cfg.T_policy = "explicit";

    try {
        const std::string report = run_experiment(cfg);
        if (cfg.output.empty()) {
            std::cout << report;
        } else {
            std::ofstream out(cfg.output, std::ios::binary);
            if (!out) throw config_error("cannot write output file: " + cfg.output);
            out << report;
        }
        return 0;
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "model error: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace qpbe
