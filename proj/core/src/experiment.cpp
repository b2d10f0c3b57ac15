#include "fedtrip/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <limits>
#include <thread>

#include "fedtrip/checkpoint.hpp"
#include "fedtrip/csv.hpp"
#include "fedtrip/errors.hpp"
#include "fedtrip/mnist_idx.hpp"
#include "fedtrip/synthetic.hpp"

namespace fedtrip {

void ExperimentPlan::validate() const {
    base.validate();
    if (methods.empty()) throw ConfigError("plan: methods must be nonempty");
    if (seeds.empty()) throw ConfigError("plan: seeds must be nonempty");
    if (!(target_accuracy > 0.0 && target_accuracy < 1.0))
        throw ConfigError("plan: target_accuracy must be in (0,1)");
    for (std::size_t h : hidden_dims)
        if (h == 0) throw ConfigError("plan: zero hidden width");
}

LoadedTask load_task(const DatasetSpec& spec) {
    LoadedTask task;
    if (spec.kind == DatasetKind::synthetic_blobs) {
        const BlobSpec& b = spec.blobs;
        BlobTask blob = make_blob_task(b.n_classes, b.dim, b.samples_per_class,
                                       b.test_samples_per_class, b.spread, b.seed);
        task.train = std::move(blob.train);
        task.test = std::move(blob.test);
    } else {
        task.train = load_mnist_idx(spec.mnist.train_images, spec.mnist.train_labels);
        task.test = load_mnist_idx(spec.mnist.test_images, spec.mnist.test_labels);
        const int classes = std::max(task.train.num_classes, task.test.num_classes);
        task.train.num_classes = classes;
        task.test.num_classes = classes;
    }
    return task;
}

MlpSpec model_for(const ExperimentPlan& plan, const LoadedTask& task) {
    MlpSpec spec;
    spec.input_dim = task.train.dim();
    spec.hidden_dims = plan.hidden_dims;
    spec.num_classes = static_cast<std::size_t>(task.train.num_classes);
    return spec;
}

FederationConfig config_for(const ExperimentPlan& plan, MethodTag method, std::uint64_t seed) {
    FederationConfig cfg = plan.base;
    cfg.method = method;
    cfg.seed = seed;
    auto it = plan.method_mu.find(method);
    if (it != plan.method_mu.end()) cfg.mu = it->second;
    return cfg;
}

PartitionSpec partition_for(const ExperimentPlan& plan, std::uint64_t seed) {
    PartitionSpec spec = plan.partition;
    spec.seed = derive_seed({plan.partition.seed, seed});
    return spec;
}

std::optional<int> rounds_to_target(const std::vector<RoundRecord>& records, double target) {
    for (const auto& rec : records)
        if (rec.test_accuracy >= target) return rec.round;
    return std::nullopt;
}

std::string curve_filename(MethodTag method, std::uint64_t seed) {
    return "curve_" + method_to_string(method) + "_seed" + std::to_string(seed) + ".csv";
}

void write_curve_csv(const std::vector<RoundRecord>& records, const std::string& path) {
    CsvWriter csv(path);
    csv.raw_line("round,test_accuracy,mean_train_loss,cum_flops,cum_comm_bytes,selected_ids");
    for (const auto& rec : records) {
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
            .field(ids);
        csv.end_line();
    }
}

namespace {

struct RunJob {
    MethodTag method;
    std::uint64_t seed;
};

RunOutput execute_run(const ExperimentPlan& plan, const LoadedTask& task, const MlpSpec& model,
                      const RunJob& job) {
    const FederationConfig cfg = config_for(plan, job.method, job.seed);
    const PartitionSpec pspec = partition_for(plan, job.seed);
    const PartitionResult partition = make_partition(task.train.labels, cfg.n_clients, pspec);

    RunOutput out;
    out.method = job.method;
    out.seed = job.seed;
    out.records = run_federation(cfg, model, partition, task.train, task.test, &out.final_model);
    out.rounds_to_target = rounds_to_target(out.records, plan.target_accuracy);
    return out;
}

std::vector<RunOutput> execute_jobs(const ExperimentPlan& plan, const LoadedTask& task,
                                    const MlpSpec& model, const std::vector<RunJob>& jobs) {
    std::vector<RunOutput> outputs(jobs.size());
    std::atomic<std::size_t> next{0};
    const unsigned workers =
        std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                        static_cast<unsigned>(jobs.size())));
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) return;
            outputs[i] = execute_run(plan, task, model, jobs[i]);
        }
    };
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < workers; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return outputs;
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

// Unbiased sample standard deviation; 0 for fewer than two values.
double sample_std(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

// Median with not-reached runs sorted to the top as +infinity.
double median_rounds_value(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double last10_accuracy(const std::vector<RoundRecord>& records) {
    if (records.empty()) return 0.0;
    const std::size_t take = std::min<std::size_t>(10, records.size());
    double s = 0.0;
    for (std::size_t i = records.size() - take; i < records.size(); ++i)
        s += records[i].test_accuracy;
    return s / static_cast<double>(take);
}

std::string format_rounds_display(double median, int horizon) {
    if (std::isinf(median)) return ">" + std::to_string(horizon);
    return format_double(median);
}

}  // namespace

PlanResult run_plan(const ExperimentPlan& plan, const std::string& out_dir) {
    plan.validate();
    std::filesystem::create_directories(out_dir);
    const LoadedTask task = load_task(plan.dataset);
    const MlpSpec model = model_for(plan, task);

    std::vector<RunJob> jobs;
    for (MethodTag m : plan.methods)
        for (std::uint64_t s : plan.seeds) jobs.push_back({m, s});

    PlanResult result;
    result.runs = execute_jobs(plan, task, model, jobs);

    for (const auto& run : result.runs) {
        const std::string stem = out_dir + "/";
        write_curve_csv(run.records, stem + curve_filename(run.method, run.seed));
        save_checkpoint(run.final_model, stem + "model_" + method_to_string(run.method) +
                                             "_seed" + std::to_string(run.seed) + ".ckpt");
    }

    // Per-method summary; the first method in the plan is the speedup
    // baseline.
    std::optional<double> baseline_median;
    for (std::size_t mi = 0; mi < plan.methods.size(); ++mi) {
        const MethodTag m = plan.methods[mi];
        std::vector<double> rounds, accs, flops, comms;
        for (const auto& run : result.runs) {
            if (run.method != m) continue;
            rounds.push_back(run.rounds_to_target
                                 ? static_cast<double>(*run.rounds_to_target)
                                 : std::numeric_limits<double>::infinity());
            accs.push_back(last10_accuracy(run.records));
            if (!run.records.empty()) {
                flops.push_back(run.records.back().cum_flops);
                comms.push_back(run.records.back().cum_comm_bytes);
            }
        }
        SummaryRow row;
        row.method = method_to_string(m);
        const double median = median_rounds_value(rounds);
        if (!std::isinf(median)) row.median_rounds = median;
        row.rounds_display = format_rounds_display(median, plan.base.rounds);
        row.final_accuracy = mean_of(accs);
        row.total_flops = mean_of(flops);
        row.total_comm_bytes = mean_of(comms);

        if (mi == 0) {
            baseline_median = row.median_rounds;
            row.speedup_display = row.median_rounds ? "1" : "n/a";
        } else if (baseline_median && row.median_rounds) {
            row.speedup_display = format_double(*baseline_median / *row.median_rounds);
        } else if (baseline_median && !row.median_rounds) {
            // Method needs more than the horizon: speedup below the bound.
            row.speedup_display = "<" + format_double(*baseline_median / plan.base.rounds);
        } else if (!baseline_median && row.median_rounds) {
            row.speedup_display = ">" + format_double(plan.base.rounds / *row.median_rounds);
        } else {
            row.speedup_display = "n/a";
        }
        result.summary.push_back(std::move(row));
    }

    CsvWriter csv(out_dir + "/summary.csv");
    csv.raw_line(
        "method,rounds_to_target_median,final_accuracy,total_flops,total_comm_bytes,"
        "speedup_vs_baseline");
    for (const auto& row : result.summary) {
        csv.field(row.method)
            .field(row.rounds_display)
            .field(row.final_accuracy)
            .field(row.total_flops)
            .field(row.total_comm_bytes)
            .field(row.speedup_display);
        csv.end_line();
    }
    return result;
}

std::vector<MuSweepRow> mu_sweep(const ExperimentPlan& plan, const std::vector<double>& mu_values,
                                 const std::string& out_dir) {
    plan.validate();
    if (mu_values.empty()) throw ConfigError("mu_sweep: need at least one mu value");
    if (std::find(plan.methods.begin(), plan.methods.end(), MethodTag::fedtrip) ==
        plan.methods.end())
        throw ConfigError("mu_sweep: plan must include fedtrip");
    std::filesystem::create_directories(out_dir);
    const LoadedTask task = load_task(plan.dataset);
    const MlpSpec model = model_for(plan, task);

    std::vector<MuSweepRow> rows;
    for (double mu : mu_values) {
        ExperimentPlan sub = plan;
        sub.methods = {MethodTag::fedtrip};
        sub.method_mu[MethodTag::fedtrip] = mu;

        std::vector<RunJob> jobs;
        for (std::uint64_t s : plan.seeds) jobs.push_back({MethodTag::fedtrip, s});
        std::vector<RunOutput> runs = execute_jobs(sub, task, model, jobs);

        MuSweepRow row;
        row.mu = mu;
        std::vector<double> accs, reached;
        for (const auto& run : runs) {
            accs.push_back(last10_accuracy(run.records));
            if (run.rounds_to_target) reached.push_back(static_cast<double>(*run.rounds_to_target));
            write_curve_csv(run.records,
                            out_dir + "/mu" + format_double(mu) + "_" +
                                curve_filename(run.method, run.seed));
        }
        row.final_acc_mean = mean_of(accs);
        row.final_acc_std = sample_std(accs);
        row.rounds_mean = mean_of(reached);
        row.rounds_std = sample_std(reached);
        row.n_reached = static_cast<int>(reached.size());
        rows.push_back(row);
    }

    CsvWriter csv(out_dir + "/mu_sweep.csv");
    csv.raw_line("mu,final_acc_mean,final_acc_std,rounds_mean,rounds_std,n_reached");
    for (const auto& row : rows) {
        csv.field(row.mu)
            .field(row.final_acc_mean)
            .field(row.final_acc_std)
            .field(row.rounds_mean)
            .field(row.rounds_std)
            .field(row.n_reached);
        csv.end_line();
    }
    return rows;
}

}  // namespace fedtrip
