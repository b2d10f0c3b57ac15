#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fedtrip/config_json.hpp"
#include "fedtrip/cost_model.hpp"
#include "fedtrip/csv.hpp"
#include "fedtrip/errors.hpp"
#include "fedtrip/experiment.hpp"
#include "fedtrip/mnist_idx.hpp"
#include "fedtrip/partition.hpp"
#include "fedtrip/theory.hpp"

namespace {

using namespace fedtrip;

// FEDSIM_OUT, when set, overrides any --out argument.
std::string effective_out(const std::string& cli_out) {
    if (const char* env = std::getenv("FEDSIM_OUT"); env && *env) return env;
    return cli_out;
}

std::vector<double> parse_double_list(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stod(item));
    }
    return out;
}

void append_ema_column(const std::vector<RoundRecord>& records, const std::string& path,
                       double beta) {
    CsvWriter csv(path);
    csv.raw_line(
        "round,test_accuracy,mean_train_loss,cum_flops,cum_comm_bytes,selected_ids,"
        "test_accuracy_ema");
    double ema = records.empty() ? 0.0 : records.front().test_accuracy;
    for (const auto& rec : records) {
        ema = beta * ema + (1.0 - beta) * rec.test_accuracy;
        std::string ids;
        for (std::size_t i = 0; i < rec.selected.size(); ++i) {
            if (i) ids += ';';
            ids += std::to_string(rec.selected[i]);
        }
        csv.field(rec.round)
            .field(rec.test_accuracy)
            .field(rec.mean_train_loss)
            .field(rec.cum_flops)
            .field(rec.cum_comm_bytes)
            .field(ids)
            .field(ema);
        csv.end_line();
    }
}

int cmd_run(const std::string& plan_path, const std::string& out, bool ema) {
    const ExperimentPlan plan = load_plan(plan_path);
    const std::string out_dir = effective_out(out);
    PlanResult result = run_plan(plan, out_dir);
    if (ema) {
        for (const auto& run : result.runs) {
            std::string name = curve_filename(run.method, run.seed);
            name.replace(name.size() - 4, 4, "_ema.csv");
            append_ema_column(run.records, out_dir + "/" + name, 0.9);
        }
    }
    std::cout << "method,rounds_to_target_median,final_accuracy,speedup_vs_baseline\n";
    for (const auto& row : result.summary)
        std::cout << row.method << ',' << row.rounds_display << ','
                  << format_double(row.final_accuracy) << ',' << row.speedup_display << "\n";
    std::cout << "wrote " << result.runs.size() << " curve files to " << out_dir << "\n";
    return 0;
}

int cmd_partition_stats(const std::string& plan_path, const std::string& out) {
    const ExperimentPlan plan = load_plan(plan_path);
    const LoadedTask task = load_task(plan.dataset);
    const PartitionResult partition =
        make_partition(task.train.labels, plan.base.n_clients, plan.partition);
    const PartitionStats stats = partition_stats(partition);

    const std::string path = effective_out(out);
    if (auto dir = std::filesystem::path(path).parent_path(); !dir.empty())
        std::filesystem::create_directories(dir);
    CsvWriter csv(path);
    std::string header = "client_id";
    for (int c = 0; c < partition.num_classes(); ++c) header += ",class_" + std::to_string(c);
    header += ",entropy";
    csv.raw_line(header);
    for (int k = 0; k < partition.num_clients(); ++k) {
        csv.field(k);
        for (std::size_t count : partition.label_histograms[static_cast<std::size_t>(k)])
            csv.field(count);
        csv.field(stats.entropy[static_cast<std::size_t>(k)]);
        csv.end_line();
    }
    std::cout << "wrote " << path << "\n";
    return 0;
}

ModelCostProfile profile_for(const std::string& model, const ExperimentPlan& plan) {
    if (model == "mlp") return ModelCostProfile::mlp();
    if (model == "cnn") return ModelCostProfile::cnn();
    if (model == "alexnet") return ModelCostProfile::alexnet();
    if (model == "plan") {
        MlpSpec spec;
        spec.hidden_dims = plan.hidden_dims;
        if (plan.dataset.kind == DatasetKind::synthetic_blobs) {
            spec.input_dim = plan.dataset.blobs.dim;
            spec.num_classes = static_cast<std::size_t>(plan.dataset.blobs.n_classes);
        } else {
            spec.input_dim = peek_idx_image_dim(plan.dataset.mnist.train_images);
            spec.num_classes = 10;
        }
        return ModelCostProfile::custom_mlp(spec);
    }
    throw ConfigError("cost-report: unknown model '" + model + "'");
}

int cmd_cost_report(const std::string& plan_path, const std::string& out,
                    const std::string& model, int p_hist) {
    const ExperimentPlan plan = load_plan(plan_path);
    const ModelCostProfile profile = profile_for(model, plan);
    const FederationConfig& cfg = plan.base;
    const int n_local = plan.partition.samples_per_client;
    const int iters = local_iterations(cfg.local_epochs, cfg.batch_size, n_local);

    const std::string path = effective_out(out);
    if (auto dir = std::filesystem::path(path).parent_path(); !dir.empty())
        std::filesystem::create_directories(dir);
    CsvWriter csv(path);
    csv.raw_line(
        "method,attach_flops_per_client_round,round_comm_bytes,total_flops,total_comm_bytes");
    for (CostMethod m :
         {CostMethod::fedavg, CostMethod::fedprox, CostMethod::fedtrip, CostMethod::feddyn,
          CostMethod::moon, CostMethod::scaffold, CostMethod::mimelite}) {
        const double attach =
            attach_flops(m, iters, cfg.batch_size, n_local, profile, p_hist);
        const double comm = round_comm_bytes(m, cfg.clients_per_round, profile);
        const double total =
            training_flops(m, cfg.rounds, cfg.clients_per_round, cfg.local_epochs,
                           cfg.batch_size, n_local, profile, p_hist);
        csv.field(cost_method_to_string(m))
            .field(attach)
            .field(comm)
            .field(total)
            .field(comm * cfg.rounds);
        csv.end_line();
    }
    std::cout << "wrote " << path << " (model profile: " << profile.name << ")\n";
    return 0;
}

int cmd_verify_theory(const std::string& out, int problems, int rounds, std::uint64_t seed) {
    const std::string out_dir = effective_out(out);
    std::filesystem::create_directories(out_dir);
    bool all_ok = true;

    CsvWriter descent_csv(out_dir + "/descent.csv");
    descent_csv.raw_line("problem,round,f_before,f_after,bound,margin,satisfied");
    Rng shape_rng(derive_seed({seed, 0x70726f62ULL}));
    for (int i = 0; i < problems; ++i) {
        const int clients = 2 + static_cast<int>(shape_rng.uniform_int(4));  // 2..5
        const std::size_t dim = 1 + shape_rng.uniform_int(5);                // 1..5
        QuadraticProblem problem =
            QuadraticProblem::random(clients, dim, derive_seed({seed, 0x7175ULL,
                                                                static_cast<std::uint64_t>(i)}));
        DescentConfig cfg;
        cfg.rounds = rounds;
        cfg.seed = derive_seed({seed, 0x646573ULL, static_cast<std::uint64_t>(i)});
        DescentReport report = descent_check(problem, cfg);
        for (const auto& r : report.rounds) {
            descent_csv.field(i)
                .field(r.round)
                .field(r.f_before)
                .field(r.f_after)
                .field(r.bound)
                .field(r.margin)
                .field(std::string(r.satisfied ? "1" : "0"));
            descent_csv.end_line();
        }
        const bool ok = report.rho_positive && report.all_satisfied;
        all_ok &= ok;
        std::cout << (ok ? "[pass] " : "[FAIL] ") << "descent problem " << i << " (clients="
                  << clients << ", dim=" << dim << ", L=" << format_double(report.L)
                  << ", B=" << format_double(report.B) << ", mu=" << format_double(report.mu)
                  << ", rho=" << format_double(report.rho) << ")\n";
    }

    CsvWriter xi_csv(out_dir + "/xi_check.csv");
    xi_csv.raw_line("p,empirical,closed_form,rel_error,samples");
    for (double p : {0.08, 0.4, 0.8}) {
        XiExpectationResult r = xi_expectation_check(p, 100000, seed);
        const bool ok = r.rel_error < 0.02;
        all_ok &= ok;
        xi_csv.field(p).field(r.empirical).field(r.closed_form).field(r.rel_error).field(r.samples);
        xi_csv.end_line();
        std::cout << (ok ? "[pass] " : "[FAIL] ") << "xi expectation p=" << format_double(p)
                  << " empirical=" << format_double(r.empirical)
                  << " closed_form=" << format_double(r.closed_form)
                  << " rel_error=" << format_double(r.rel_error) << "\n";
    }

    std::cout << (all_ok ? "ALL CHECKS PASSED" : "CHECKS FAILED") << "; report in " << out_dir
              << "\n";
    return all_ok ? 0 : 1;
}

int cmd_mu_sweep(const std::string& plan_path, const std::string& out, const std::string& mus) {
    const ExperimentPlan plan = load_plan(plan_path);
    const std::vector<double> mu_values = parse_double_list(mus);
    const std::string out_dir = effective_out(out);
    std::vector<MuSweepRow> rows = mu_sweep(plan, mu_values, out_dir);
    std::cout << "mu,final_acc_mean,final_acc_std,rounds_mean,rounds_std,n_reached\n";
    for (const auto& r : rows)
        std::cout << format_double(r.mu) << ',' << format_double(r.final_acc_mean) << ','
                  << format_double(r.final_acc_std) << ',' << format_double(r.rounds_mean) << ','
                  << format_double(r.rounds_std) << ',' << r.n_reached << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Federated-learning simulator: FedTrip, FedProx and FedAvg on "
                 "non-IID partitions, with cost accounting and convergence checks"};
    app.require_subcommand(1);

    std::string plan_path, out_dir = "out", mus = "0.1,0.4,1.0,2.5";
    bool ema = false;
    int problems = 20, rounds = 50, p_hist = 1;
    std::uint64_t seed = 0;
    std::string cost_model_name = "mlp";

    auto* run = app.add_subcommand("run", "Run an experiment plan");
    run->add_option("--plan", plan_path, "Plan JSON file")->required();
    run->add_option("--out", out_dir, "Output directory");
    run->add_flag("--ema", ema, "Also write curves with a smoothed accuracy column");

    auto* pstats = app.add_subcommand("partition-stats", "Partition a dataset and emit label stats");
    pstats->add_option("--plan", plan_path, "Plan JSON file")->required();
    std::string pstats_out = "partition_stats.csv";
    pstats->add_option("--out", pstats_out, "Output CSV path");

    auto* cost = app.add_subcommand("cost-report", "Per-method cost table for a plan");
    cost->add_option("--plan", plan_path, "Plan JSON file")->required();
    std::string cost_out = "cost_report.csv";
    cost->add_option("--out", cost_out, "Output CSV path");
    cost->add_option("--model", cost_model_name, "Cost profile: mlp, cnn, alexnet, or plan");
    cost->add_option("--p-hist", p_hist, "History-model count in the MOON row");

    auto* verify = app.add_subcommand("verify-theory", "Empirical convergence-condition checks");
    verify->add_option("--out", out_dir, "Output directory");
    verify->add_option("--problems", problems, "Number of random quadratic problems");
    verify->add_option("--rounds", rounds, "Rounds per problem");
    verify->add_option("--seed", seed, "Master seed");

    auto* sweep = app.add_subcommand("mu-sweep", "fedtrip sensitivity sweep over mu");
    sweep->add_option("--plan", plan_path, "Plan JSON file")->required();
    sweep->add_option("--out", out_dir, "Output directory");
    sweep->add_option("--mu", mus, "Comma-separated mu values");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(plan_path, out_dir, ema);
        if (pstats->parsed()) return cmd_partition_stats(plan_path, pstats_out);
        if (cost->parsed()) return cmd_cost_report(plan_path, cost_out, cost_model_name, p_hist);
        if (verify->parsed()) return cmd_verify_theory(out_dir, problems, rounds, seed);
        if (sweep->parsed()) return cmd_mu_sweep(plan_path, out_dir, mus);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
