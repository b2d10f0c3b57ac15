#include <cmath>
#include <doctest.h>

#include "fedtrip/cost_model.hpp"
#include "fedtrip/errors.hpp"
#include "fedtrip/rng.hpp"

using namespace fedtrip;

TEST_CASE("presets carry the published model constants") {
    const auto mlp = ModelCostProfile::mlp();
    CHECK(mlp.param_count == 0.8e6);
    CHECK(mlp.fp_per_sample == 0.08e6);
    CHECK(mlp.comm_bytes_per_transfer == 0.3e6);

    const auto cnn = ModelCostProfile::cnn();
    CHECK(cnn.param_count == 0.62e6);
    CHECK(cnn.fp_per_sample == 0.42e6);
    CHECK(cnn.comm_bytes_per_transfer == 0.24e6);

    const auto alexnet = ModelCostProfile::alexnet();
    CHECK(alexnet.param_count == 2.72e6);
    CHECK(alexnet.fp_per_sample == 145.93e6);
    CHECK(alexnet.comm_bytes_per_transfer == 10.42e6);
}

TEST_CASE("custom profile derives from the live model spec") {
    MlpSpec spec{784, {100}, 10};
    const auto profile = ModelCostProfile::custom_mlp(spec);
    const double macs = 784.0 * 100 + 100.0 * 10;
    CHECK(profile.fp_per_sample == 2.0 * macs);
    CHECK(profile.param_count == static_cast<double>(spec.param_count()));
    CHECK(profile.bp_per_sample == 2.0 * profile.fp_per_sample);
    CHECK(profile.comm_bytes_per_transfer == profile.param_count * 8.0);
}

TEST_CASE("fedtrip attach cost on the CNN profile") {
    const auto cnn = ModelCostProfile::cnn();
    CHECK(attach_flops(CostMethod::fedtrip, 12, 50, 600, cnn) ==
          doctest::Approx(2.976e7).epsilon(1e-12));
}

TEST_CASE("fedavg attaches nothing") {
    const auto mlp = ModelCostProfile::mlp();
    for (double k : {1.0, 12.0, 480.0})
        CHECK(attach_flops(CostMethod::fedavg, k, 50, 600, mlp) == 0.0);
}

TEST_CASE("attach formulas match the comparison table row for row") {
    // Independent symbolic evaluation at random positive integers.
    Rng rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        const double k = 1.0 + static_cast<double>(rng.uniform_int(50));
        const double m = 1.0 + static_cast<double>(rng.uniform_int(256));
        const double n = 1.0 + static_cast<double>(rng.uniform_int(5000));
        const double w = 1.0 + static_cast<double>(rng.uniform_int(1000000));
        const double fp = 1.0 + static_cast<double>(rng.uniform_int(1000000));
        const double bp = 1.0 + static_cast<double>(rng.uniform_int(1000000));
        const int p = 1 + static_cast<int>(rng.uniform_int(3));
        ModelCostProfile profile{"sym", w, fp, bp, w};

        CHECK(attach_flops(CostMethod::scaffold, k, m, n, profile, p) ==
              2.0 * (k + 1.0) * w + n * (fp + bp));
        CHECK(attach_flops(CostMethod::mimelite, k, m, n, profile, p) == n * (fp + bp));
        CHECK(attach_flops(CostMethod::moon, k, m, n, profile, p) == k * m * (1.0 + p) * fp);
        CHECK(attach_flops(CostMethod::fedprox, k, m, n, profile, p) == 2.0 * k * w);
        CHECK(attach_flops(CostMethod::feddyn, k, m, n, profile, p) == 4.0 * k * w);
        CHECK(attach_flops(CostMethod::fedtrip, k, m, n, profile, p) == 4.0 * k * w);
        CHECK(attach_flops(CostMethod::fedavg, k, m, n, profile, p) == 0.0);

        CHECK(extra_comm_params(CostMethod::scaffold, w) == 2.0 * w);
        CHECK(extra_comm_params(CostMethod::mimelite, w) == 2.0 * w);
        for (CostMethod zero : {CostMethod::fedavg, CostMethod::fedprox, CostMethod::fedtrip,
                                CostMethod::feddyn, CostMethod::moon})
            CHECK(extra_comm_params(zero, w) == 0.0);
    }
}

TEST_CASE("moon-to-fedtrip ratio at the CNN constants") {
    // K M (1+p) FP / 4 K |w| with M=50, p=1: 42e6 / 2.48e6.
    const auto cnn = ModelCostProfile::cnn();
    const double ratio = attach_flops(CostMethod::moon, 12, 50, 600, cnn, 1) /
                         attach_flops(CostMethod::fedtrip, 12, 50, 600, cnn, 1);
    CHECK(ratio == doctest::Approx(16.935483870967742).epsilon(1e-12));
    // The published prose quotes a larger multiple for this model; the
    // formula-level ratio is what the table yields, so that is what the
    // module reports.
}

TEST_CASE("round communication volume on the CNN profile") {
    const auto cnn = ModelCostProfile::cnn();
    CHECK(round_comm_bytes(CostMethod::fedtrip, 4, cnn) == doctest::Approx(1.92e6).epsilon(1e-12));
    CHECK(round_comm_bytes(CostMethod::fedavg, 4, cnn) ==
          round_comm_bytes(CostMethod::fedtrip, 4, cnn));
    // SCAFFOLD ships two extra model-sized payloads per client.
    CHECK(round_comm_bytes(CostMethod::scaffold, 4, cnn) ==
          doctest::Approx(1.92e6 + 4 * 2 * 0.24e6).epsilon(1e-12));
    CHECK_THROWS_AS(round_comm_bytes(CostMethod::fedavg, 0, cnn), ConfigError);
}

TEST_CASE("training flops: fedavg is pure feedforward and scaling is linear") {
    const auto mlp = ModelCostProfile::mlp();
    const int rounds = 100, k_sel = 4, epochs = 1, batch = 50, n = 600;
    const double avg = training_flops(CostMethod::fedavg, rounds, k_sel, epochs, batch, n, mlp);
    const int iters = local_iterations(epochs, batch, n);
    CHECK(avg == doctest::Approx(rounds * k_sel * iters * batch * mlp.fp_per_sample));
    CHECK(training_flops(CostMethod::fedavg, 2 * rounds, k_sel, epochs, batch, n, mlp) ==
          doctest::Approx(2.0 * avg));

    // At the CNN constants the fedtrip attach term stays far below MOON's.
    const auto cnn = ModelCostProfile::cnn();
    CHECK(training_flops(CostMethod::fedtrip, rounds, k_sel, epochs, batch, n, cnn) <
          training_flops(CostMethod::moon, rounds, k_sel, epochs, batch, n, cnn));
}

TEST_CASE("costs are monotone in every count argument") {
    const auto cnn = ModelCostProfile::cnn();
    for (CostMethod m : {CostMethod::fedprox, CostMethod::fedtrip, CostMethod::moon,
                         CostMethod::scaffold, CostMethod::mimelite}) {
        CHECK(attach_flops(m, 24, 50, 600, cnn) >= attach_flops(m, 12, 50, 600, cnn));
        CHECK(attach_flops(m, 12, 100, 600, cnn) >= attach_flops(m, 12, 50, 600, cnn));
        CHECK(attach_flops(m, 12, 50, 1200, cnn) >= attach_flops(m, 12, 50, 600, cnn));
        CHECK(round_comm_bytes(m, 8, cnn) >= round_comm_bytes(m, 4, cnn));
    }
    CHECK_THROWS_AS(attach_flops(CostMethod::fedtrip, 0, 50, 600, cnn), ConfigError);
}

TEST_CASE("local_iterations rounds partial batches up") {
    CHECK(local_iterations(1, 50, 600) == 12);
    CHECK(local_iterations(2, 50, 600) == 24);
    CHECK(local_iterations(1, 50, 601) == 13);
    CHECK(local_iterations(1, 64, 10) == 1);
}

TEST_CASE("cost method names round-trip") {
    for (CostMethod m : {CostMethod::fedavg, CostMethod::fedprox, CostMethod::fedtrip,
                         CostMethod::feddyn, CostMethod::moon, CostMethod::scaffold,
                         CostMethod::mimelite})
        CHECK(cost_method_from_string(cost_method_to_string(m)) == m);
    CHECK_THROWS_AS(cost_method_from_string("fedsgd"), ConfigError);
}
