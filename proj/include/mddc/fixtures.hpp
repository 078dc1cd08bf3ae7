#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mddc/contin_table.hpp"
#include "mddc/datagen.hpp"

namespace mddc {

// Deterministic synthetic marginal sets mimicking published SRS table shapes.
// Each fixture regenerates bit-identically from its recorded seed.
struct FixtureSpec {
    std::string name;
    std::vector<std::int64_t> row_marginal;
    std::vector<std::int64_t> col_marginal;
    std::vector<std::string> row_names;
    std::vector<std::string> col_names;
    std::vector<int> cluster_assignment;  // empty when the fixture has no clusters
    std::uint64_t seed;
};

std::vector<std::string> fixture_names();
FixtureSpec fixture_spec(const std::string& name);  // UnknownFixture if absent
ContinTable load_fixture(const std::string& name);

}  // namespace mddc
