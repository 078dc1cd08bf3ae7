#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <string>

#include "mddc/cutoffs.hpp"
#include "mddc/datagen.hpp"
#include "mddc/fixtures.hpp"
#include "mddc/mddc.hpp"
#include "mddc/reference.hpp"

using Clock = std::chrono::steady_clock;

namespace {

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void row(const char* name, double serial_ms, double parallel_ms, bool identical) {
    std::printf("%-22s %10.1f ms %10.1f ms %8.2fx   %s\n", name, serial_ms, parallel_ms,
                serial_ms / parallel_ms, identical ? "bit-identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mddc benchmark: serial reference vs OpenMP kernels"};
    std::string fixture = "synthetic_statin49";
    int reps = 2000;
    int threads = 0;
    std::uint64_t seed = 7;
    app.add_option("--fixture", fixture, "Fixture to benchmark on");
    app.add_option("--reps", reps, "Monte Carlo replications");
    app.add_option("--threads", threads, "Worker threads (0 = all)");
    app.add_option("--seed", seed, "RNG seed");
    CLI11_PARSE(app, argc, argv);

    const mddc::ContinTable table = mddc::load_fixture(fixture);
    std::printf("table %zux%zu, n=%lld, reps=%d, threads=%d\n\n", table.n_rows, table.n_cols,
                static_cast<long long>(table.grand_total), reps,
                mddc::resolve_threads(threads));
    std::printf("%-22s %13s %13s %9s\n", "kernel", "serial", "parallel", "speedup");

    {
        auto t0 = Clock::now();
        const mddc::NullMaxima serial = mddc::reference::mc_null_simulation(table, reps, seed);
        const double serial_ms = ms_since(t0);
        t0 = Clock::now();
        const mddc::NullMaxima parallel = mddc::mc_null_simulation(table, reps, seed, threads);
        row("mc_null_simulation", serial_ms, ms_since(t0), serial.values == parallel.values);
    }
    {
        auto t0 = Clock::now();
        const auto serial = mddc::reference::find_optimal_coef(table, reps, 0.05, 0.1, seed);
        const double serial_ms = ms_since(t0);
        t0 = Clock::now();
        const auto parallel =
            mddc::find_optimal_coef(table, reps, 0.05, 0.1, seed, false, 10.0, threads);
        row("find_optimal_coef", serial_ms, ms_since(t0), serial == parallel);
    }
    {
        const mddc::FixtureSpec spec = mddc::fixture_spec(fixture);
        mddc::GenerationRequest req;
        req.row_marginal = spec.row_marginal;
        req.col_marginal = spec.col_marginal;
        req.clusters.assignment = spec.cluster_assignment;
        if (!spec.cluster_assignment.empty()) req.clusters.within_rho = {0.5};
        req.n_rep = reps;
        req.seed = seed;
        auto t0 = Clock::now();
        const auto serial = mddc::reference::generate_tables(req);
        const double serial_ms = ms_since(t0);
        req.threads = threads;
        t0 = Clock::now();
        const auto parallel = mddc::generate_tables(req);
        bool identical = serial.size() == parallel.size();
        for (std::size_t r = 0; identical && r < serial.size(); ++r)
            identical = serial[r].counts == parallel[r].counts;
        row("generate_tables", serial_ms, ms_since(t0), identical);
    }
    return 0;
}
