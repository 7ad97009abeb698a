// Command-line interface: SBM/DCSBM generation, fitting, block-number
// selection, goodness-of-fit and success-rate experiments, and real-network
// analysis. Grids and samples go to CSV, single results to JSON; every run
// writes a manifest with version, config hash and seed.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "sbmsel/sbmsel.hpp"

using json = nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string config_hash(const json& cfg) {
    std::ostringstream os;
    os << std::hex << std::hash<std::string>{}(cfg.dump());
    return os.str();
}

json make_manifest(const std::string& command, const json& cfg, std::uint64_t seed) {
    json m;
    m["version"] = kVersion;
    m["command"] = command;
    m["config"] = cfg;
    m["config_hash"] = config_hash(cfg);
    m["seed"] = seed;
    return m;
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot open " + path + " for writing");
    out << content;
}

sbmsel::LikBackend parse_backend(const std::string& s) {
    if (s == "variational") return sbmsel::LikBackend::variational;
    if (s == "plugin") return sbmsel::LikBackend::plugin;
    if (s == "exhaustive") return sbmsel::LikBackend::exhaustive;
    throw std::invalid_argument("unknown backend: " + s);
}

sbmsel::ModelKind parse_model(const std::string& s) {
    if (s == "sbm") return sbmsel::ModelKind::sbm;
    if (s == "dcsbm") return sbmsel::ModelKind::dcsbm;
    throw std::invalid_argument("unknown model: " + s);
}

std::vector<double> make_lambda_grid(double lo, double hi, double step) {
    if (step <= 0.0 || hi < lo) throw std::invalid_argument("invalid lambda grid");
    std::vector<double> grid;
    for (int i = 0;; ++i) {
        const double v = lo + i * step;
        if (v > hi + 1e-12) break;
        grid.push_back(v);
    }
    return grid;
}

json selection_to_json(const sbmsel::SelectionResult& sel) {
    json j;
    j["K_hat"] = sel.K_hat;
    j["lambda_star"] = sel.lambda_star;
    j["backend"] = sel.backend;
    j["model"] = sel.model;
    j["seed"] = sel.seed;
    j["K_range"] = sel.K_range;
    j["loglik"] = sel.loglik;
    j["penalty"] = sel.penalty_vals;
    j["beta"] = sel.beta;
    j["degenerate_profile"] = sel.degenerate_profile;
    return j;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Likelihood-based block-number selection for SBM/DCSBM"};
    app.set_config("--config", "", "Config file with option defaults (flags override)");
    app.require_subcommand(1);

    std::uint64_t seed = 1;
    std::string backend_str = "variational";
    std::string model_str = "sbm";
    std::string scenario = "a";
    std::string input, output;
    double rho = 0.0;
    int n = 500, reps = 20, K = 2, K_max = 10, threads = 0;
    double lambda_lo = 0.0, lambda_hi = 0.3, lambda_step = 1e-3;
    std::string regime_str = "sparse";
    bool dc_binary = true;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--seed", seed, "Root seed; all randomness derives from it");
        cmd->add_option("--threads", threads, "Worker threads (0 = hardware default)");
    };

    auto* gen = app.add_subcommand("generate", "Sample a graph from a built-in scenario");
    gen->add_option("--scenario", scenario, "a | b | sweep-k2 | sweep-k3 | sweep-k4");
    gen->add_option("--rho", rho, "Degree density (sweep scenarios)");
    gen->add_option("--n", n, "Node count");
    gen->add_option("--model", model_str, "sbm | dcsbm");
    gen->add_flag("--binary,!--no-binary", dc_binary, "Threshold DCSBM Poisson counts");
    gen->add_option("--out", output, "Edge list output path")->required();
    add_common(gen);

    auto* fit = app.add_subcommand("fit", "Fit a K'-block model to an edge list");
    fit->add_option("--input", input, "Edge list path")->required();
    fit->add_option("--k", K, "Block count to fit");
    fit->add_option("--backend", backend_str, "variational | plugin");
    fit->add_option("--model", model_str, "sbm | dcsbm");
    fit->add_option("--out", output, "JSON output path (default stdout)");
    add_common(fit);

    auto* sel = app.add_subcommand("select", "Select the block number for an edge list");
    sel->add_option("--input", input, "Edge list path")->required();
    sel->add_option("--kmax", K_max, "Largest block count to evaluate");
    sel->add_option("--backend", backend_str, "variational | plugin");
    sel->add_option("--model", model_str, "sbm | dcsbm");
    sel->add_option("--lambda-min", lambda_lo, "Lambda grid start");
    sel->add_option("--lambda-max", lambda_hi, "Lambda grid end");
    sel->add_option("--lambda-step", lambda_step, "Lambda grid increment");
    sel->add_option("--out", output, "JSON output path (default stdout)");
    add_common(sel);

    auto* gof = app.add_subcommand("gof", "Goodness-of-fit of the underfitting statistic");
    gof->add_option("--scenario", scenario, "a | b");
    gof->add_option("--n", n, "Node count");
    gof->add_option("--reps", reps, "Replications");
    gof->add_option("--regime", regime_str, "sparse | dense");
    gof->add_option("--backend", backend_str, "variational | plugin");
    gof->add_option("--out", output, "Output prefix (<prefix>.csv, <prefix>.json)")->required();
    add_common(gof);

    auto* sweep = app.add_subcommand("sweep", "Success-rate sweep over (family, K, rho, n) cells");
    std::vector<std::string> cell_specs;
    sweep->add_option("--cell", cell_specs, "Cell as family:K:rho:n (repeatable)")->required();
    sweep->add_option("--reps", reps, "Replications per cell");
    sweep->add_option("--kmax", K_max, "Largest block count to evaluate");
    sweep->add_option("--backend", backend_str, "Backend for SBM cells (DCSBM uses plugin)");
    sweep->add_option("--out", output, "Output prefix (<prefix>.csv, <prefix>.json)")->required();
    add_common(sweep);

    auto* ana = app.add_subcommand("analyze", "End-to-end selection for a real network");
    ana->add_option("--input", input, "Edge list path")->required();
    ana->add_option("--model", model_str, "sbm | dcsbm");
    ana->add_option("--kmax", K_max, "Largest block count to evaluate");
    ana->add_option("--backend", backend_str, "variational | plugin");
    ana->add_option("--lambda-min", lambda_lo, "Lambda grid start");
    ana->add_option("--lambda-max", lambda_hi, "Lambda grid end");
    ana->add_option("--lambda-step", lambda_step, "Lambda grid increment");
    ana->add_option("--out", output, "Output prefix (<prefix>.json, <prefix>.labels.csv)")
        ->required();
    add_common(ana);

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            const sbmsel::BlockParams theta = sbmsel::make_scenario(scenario, rho);
            sbmsel::Graph g;
            sbmsel::Labeling labels;
            if (parse_model(model_str) == sbmsel::ModelKind::dcsbm) {
                auto [graph, lab, omega] = sbmsel::sample_dcsbm(theta, n, dc_binary, seed);
                g = std::move(graph);
                labels = std::move(lab);
            } else {
                auto [graph, lab] = sbmsel::sample_sbm(theta, n, seed);
                g = std::move(graph);
                labels = std::move(lab);
            }
            sbmsel::write_edge_list(output, g);
            write_text(output + ".labels.csv", sbmsel::labels_to_csv(labels, {}));
            json cfg = {{"scenario", scenario}, {"rho", rho}, {"n", n},
                        {"model", model_str}, {"binary", dc_binary}, {"out", output}};
            write_text(output + ".manifest.json",
                       make_manifest("generate", cfg, seed).dump(2) + "\n");
        } else if (fit->parsed()) {
            const sbmsel::Graph g = sbmsel::read_edge_list(input);
            const auto backend = parse_backend(backend_str);
            const auto model = parse_model(model_str);
            json j;
            if (backend == sbmsel::LikBackend::variational) {
                if (model == sbmsel::ModelKind::dcsbm)
                    throw std::invalid_argument("variational backend does not support dcsbm");
                sbmsel::FitResult fit_res = sbmsel::variational_em(g, K, seed);
                j["objective"] = fit_res.objective;
                j["iterations"] = fit_res.iterations;
                j["converged"] = fit_res.converged;
                j["labels"] = fit_res.labels.z;
            } else {
                sbmsel::Labeling lab = sbmsel::estimate_labels(g, K, model, seed);
                const double obj = model == sbmsel::ModelKind::sbm
                    ? sbmsel::complete_log_lik(sbmsel::count_stats(g, lab),
                                               sbmsel::profile_mle(sbmsel::count_stats(g, lab)))
                    : sbmsel::dcsbm_profile_log_lik(g, lab);
                j["objective"] = obj;
                j["labels"] = lab.z;
            }
            j["k"] = K;
            j["backend"] = backend_str;
            j["model"] = model_str;
            json cfg = {{"input", input}, {"k", K}, {"backend", backend_str},
                        {"model", model_str}};
            j["manifest"] = make_manifest("fit", cfg, seed);
            if (output.empty()) std::cout << j.dump(2) << "\n";
            else write_text(output, j.dump(2) + "\n");
        } else if (sel->parsed()) {
            const sbmsel::Graph g = sbmsel::read_edge_list(input);
            const auto grid = make_lambda_grid(lambda_lo, lambda_hi, lambda_step);
            sbmsel::SelectionResult res = sbmsel::select_K(
                g, K_max, parse_backend(backend_str), parse_model(model_str), grid, seed);
            json j = selection_to_json(res);
            json cfg = {{"input", input}, {"kmax", K_max}, {"backend", backend_str},
                        {"model", model_str}, {"lambda_min", lambda_lo},
                        {"lambda_max", lambda_hi}, {"lambda_step", lambda_step}};
            j["manifest"] = make_manifest("select", cfg, seed);
            if (output.empty()) std::cout << j.dump(2) << "\n";
            else write_text(output, j.dump(2) + "\n");
        } else if (gof->parsed()) {
            sbmsel::ExperimentConfig cfg;
            cfg.scenario = scenario;
            cfg.n = n;
            cfg.replications = reps;
            cfg.regime = regime_str == "dense" ? sbmsel::Regime::dense : sbmsel::Regime::sparse;
            cfg.backend = parse_backend(backend_str);
            cfg.seed = seed;
            cfg.threads = threads;
            sbmsel::GofReport rep = sbmsel::run_gof(cfg);
            write_text(output + ".csv", sbmsel::gof_to_csv(rep));
            json j;
            j["empirical_mean"] = rep.empirical_mean;
            j["empirical_sd"] = rep.empirical_sd;
            j["ks_distance"] = rep.ks_distance;
            j["predicted_centering"] = rep.law.centering;
            j["predicted_sd"] = std::sqrt(rep.law.sigma2_fs);
            j["mu"] = rep.law.mu;
            j["replications"] = reps;
            json jcfg = {{"scenario", scenario}, {"n", n}, {"reps", reps},
                         {"regime", regime_str}, {"backend", backend_str}};
            j["manifest"] = make_manifest("gof", jcfg, seed);
            write_text(output + ".json", j.dump(2) + "\n");
        } else if (sweep->parsed()) {
            std::vector<sbmsel::SweepCell> cells;
            for (const std::string& spec : cell_specs) {
                sbmsel::SweepCell cell;
                std::istringstream ss(spec);
                std::string tok;
                if (!std::getline(ss, cell.family, ':'))
                    throw std::invalid_argument("bad cell spec: " + spec);
                if (!std::getline(ss, tok, ':')) throw std::invalid_argument("bad cell: " + spec);
                cell.K = std::stoi(tok);
                if (!std::getline(ss, tok, ':')) throw std::invalid_argument("bad cell: " + spec);
                cell.rho = std::stod(tok);
                if (!std::getline(ss, tok, ':')) throw std::invalid_argument("bad cell: " + spec);
                cell.n = std::stoi(tok);
                cells.push_back(cell);
            }
            sbmsel::ExperimentConfig cfg;
            cfg.replications = reps;
            cfg.K_max = K_max;
            cfg.backend = parse_backend(backend_str);
            cfg.seed = seed;
            cfg.threads = threads;
            sbmsel::SweepReport rep = sbmsel::run_sweep(cells, cfg);
            write_text(output + ".csv", sbmsel::sweep_to_csv(rep));
            json jcfg = {{"cells", cell_specs}, {"reps", reps}, {"kmax", K_max},
                         {"backend", backend_str}};
            write_text(output + ".json", make_manifest("sweep", jcfg, seed).dump(2) + "\n");
        } else if (ana->parsed()) {
            const auto grid = make_lambda_grid(lambda_lo, lambda_hi, lambda_step);
            sbmsel::NetworkAnalysis res = sbmsel::analyze_network(
                input, parse_model(model_str), K_max, parse_backend(backend_str), grid, seed);
            json j = selection_to_json(res.selection);
            j["nodes"] = res.ingest.graph.num_nodes();
            j["edges"] = res.ingest.graph.num_edges();
            j["self_loops_dropped"] = res.ingest.self_loops_dropped;
            j["isolated_removed"] = res.ingest.isolated_removed;
            json cfg = {{"input", input}, {"model", model_str}, {"kmax", K_max},
                        {"backend", backend_str}, {"lambda_min", lambda_lo},
                        {"lambda_max", lambda_hi}, {"lambda_step", lambda_step}};
            j["manifest"] = make_manifest("analyze", cfg, seed);
            write_text(output + ".json", j.dump(2) + "\n");
            const sbmsel::Labeling& labels = res.selection.labels[res.selection.K_hat - 1];
            write_text(output + ".labels.csv",
                       sbmsel::labels_to_csv(labels, res.ingest.original_ids));
        }
    } catch (const sbmsel::resource_limit_error& e) {
        std::cerr << "resource limit: " << e.what() << "\n";
        return 3;
    } catch (const sbmsel::assumption_violation& e) {
        std::cerr << "assumption violation: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
