#pragma once

#include <cstdint>
#include <vector>

#include "mddc/contin_table.hpp"
#include "mddc/cutoffs.hpp"
#include "mddc/datagen.hpp"

// Straight-line single-threaded implementations of the Monte-Carlo kernels.
// They share the stream-per-replication contract with the parallel versions,
// so the two must agree bit for bit; tests and the benchmark harness rely on
// that.
namespace mddc::reference {

NullMaxima mc_null_simulation(const ContinTable& t, int reps, std::uint64_t seed);

std::vector<double> find_optimal_coef(const ContinTable& t, int reps, double target_fdr,
                                      double step, std::uint64_t seed, bool whole_table = false,
                                      double ceiling = 10.0);

std::vector<ContinTable> generate_tables(const GenerationRequest& req);

}  // namespace mddc::reference
