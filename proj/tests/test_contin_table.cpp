#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "mddc/contin_table.hpp"
#include "mddc/error.hpp"
#include "mddc/matrix.hpp"
#include "mddc/rng.hpp"

using namespace mddc;

namespace {

LabeledMatrix raw2x2(double a, double b, double c, double d) {
    LabeledMatrix m(2, 2);
    m.values = {a, b, c, d};
    m.row_names = {"AE_a", "AE_b"};
    m.col_names = {"drug_x", "drug_y"};
    return m;
}

}  // namespace

TEST_CASE("validate_and_fix accepts a clean table") {
    const ContinTable t = validate_and_fix(raw2x2(1, 2, 3, 4), true);
    CHECK(t.n_rows == 2);
    CHECK(t.n_cols == 2);
    CHECK(t.counts == std::vector<std::int64_t>{1, 2, 3, 4});
    CHECK(t.row_names == std::vector<std::string>{"AE_a", "AE_b"});
    CHECK(t.col_names == std::vector<std::string>{"drug_x", "drug_y"});
    CHECK(t.row_totals == std::vector<std::int64_t>{3, 7});
    CHECK(t.col_totals == std::vector<std::int64_t>{4, 6});
    CHECK(t.grand_total == 10);
}

TEST_CASE("validate_and_fix rejects bad shapes and values") {
    LabeledMatrix thin(1, 3);
    thin.values = {1, 2, 3};
    CHECK_THROWS_AS(validate_and_fix(thin, false), Error);
    LabeledMatrix narrow(3, 1);
    narrow.values = {1, 2, 3};
    CHECK_THROWS_AS(validate_and_fix(narrow, false), Error);

    try {
        validate_and_fix(raw2x2(0, 0, 0, 0), false);
        FAIL("expected EmptyTable");
    } catch (const Error& e) {
        CHECK(e.code() == errc::empty_table);
    }
    try {
        validate_and_fix(raw2x2(1, -2, 3, 4), false);
        FAIL("expected NegativeCount");
    } catch (const Error& e) {
        CHECK(e.code() == errc::negative_count);
    }
    CHECK_THROWS_AS(validate_and_fix(raw2x2(1, missing, 3, 4), false), Error);
    CHECK_THROWS_AS(
        validate_and_fix(raw2x2(1, std::numeric_limits<double>::infinity(), 3, 4), false), Error);
}

TEST_CASE("strict mode rejects what lenient mode repairs") {
    LabeledMatrix frac = raw2x2(1.5, 2, 2.5, 4);
    try {
        validate_and_fix(frac, true);
        FAIL("expected NonIntegralCount");
    } catch (const Error& e) {
        CHECK(e.code() == errc::non_integral_count);
    }
    Warnings w;
    const ContinTable t = validate_and_fix(frac, false, &w);
    CHECK(t.counts == std::vector<std::int64_t>{2, 2, 2, 4});  // half to even
    REQUIRE(w.size() == 1);
    CHECK(w[0].find("rounded") != std::string::npos);

    LabeledMatrix dup = raw2x2(1, 2, 3, 4);
    dup.row_names = {"Pain", "Pain"};
    try {
        validate_and_fix(dup, true);
        FAIL("expected DuplicateLabel");
    } catch (const Error& e) {
        CHECK(e.code() == errc::duplicate_label);
    }
    w.clear();
    const ContinTable fixed = validate_and_fix(dup, false, &w);
    CHECK(fixed.row_names == std::vector<std::string>{"Pain", "Pain_2"});
    CHECK(w.size() == 1);
}

TEST_CASE("missing labels are generated") {
    LabeledMatrix bare(3, 2);
    bare.values = {1, 0, 0, 2, 3, 0};
    Warnings w;
    const ContinTable t = validate_and_fix(bare, false, &w);
    CHECK(t.row_names == std::vector<std::string>{"AE_1", "AE_2", "AE_3"});
    CHECK(t.col_names == std::vector<std::string>{"drug_1", "drug_2"});
    CHECK(w.size() == 2);

    // partially given labels keep the given ones
    LabeledMatrix part(2, 2);
    part.values = {1, 1, 1, 1};
    part.row_names = {"Nausea", ""};
    part.col_names = {"", "Other"};
    const ContinTable p = validate_and_fix(part, false);
    CHECK(p.row_names == std::vector<std::string>{"Nausea", "AE_2"});
    CHECK(p.col_names == std::vector<std::string>{"drug_1", "Other"});

    // generated label colliding with a given one gets deduplicated
    LabeledMatrix clash(2, 2);
    clash.values = {1, 1, 1, 1};
    clash.row_names = {"AE_2", ""};
    const ContinTable c = validate_and_fix(clash, false);
    CHECK(c.row_names == std::vector<std::string>{"AE_2", "AE_2_2"});
}

TEST_CASE("validation is idempotent on its own output") {
    LabeledMatrix messy(2, 3);
    messy.values = {1.5, 2, 3, 4, 0.5, 6};
    messy.row_names = {"A", "A"};
    const ContinTable once = validate_and_fix(messy, false);
    LabeledMatrix back(once.n_rows, once.n_cols);
    for (std::size_t i = 0; i < back.values.size(); ++i) back.values[i] = double(once.counts[i]);
    back.row_names = once.row_names;
    back.col_names = once.col_names;
    Warnings w;
    const ContinTable twice = validate_and_fix(back, true, &w);
    CHECK(w.empty());
    CHECK(twice.counts == once.counts);
    CHECK(twice.row_names == once.row_names);
    CHECK(twice.col_names == once.col_names);
}

TEST_CASE("expected counts") {
    LabeledMatrix m(3, 2);
    m.values = {10, 0, 0, 0, 0, 10};
    ContinTable t;
    t.n_rows = 3;
    t.n_cols = 2;
    t.counts = {10, 0, 0, 0, 0, 10};
    t.row_names = {"a", "b", "c"};
    t.col_names = {"x", "y"};
    t.recompute_totals();
    CHECK(t.row_totals == std::vector<std::int64_t>{10, 0, 10});
    CHECK(t.col_totals == std::vector<std::int64_t>{10, 10});
    CHECK(t.grand_total == 20);
    const LabeledMatrix e = expected_counts(t);
    CHECK(e.values == std::vector<double>{5, 5, 0, 0, 5, 5});
    CHECK(e.row_names == t.row_names);
}

TEST_CASE("standardized residuals on hand tables") {
    ContinTable flat;
    flat.n_rows = 2;
    flat.n_cols = 2;
    flat.counts = {1, 1, 1, 1};
    flat.recompute_totals();
    const LabeledMatrix r0 = std_pearson_residuals(flat);
    for (double v : r0.values) CHECK(v == 0.0);

    ContinTable diag;
    diag.n_rows = 2;
    diag.n_cols = 2;
    diag.counts = {2, 0, 0, 2};
    diag.recompute_totals();
    const LabeledMatrix rd = std_pearson_residuals(diag);
    CHECK(rd.values[0] == 2.0);
    CHECK(rd.values[1] == -2.0);
    CHECK(rd.values[2] == -2.0);
    CHECK(rd.values[3] == 2.0);
}

TEST_CASE("degenerate marginals give missing residuals") {
    ContinTable t;
    t.n_rows = 3;
    t.n_cols = 2;
    t.counts = {10, 0, 0, 0, 0, 10};
    t.recompute_totals();
    const LabeledMatrix r = std_pearson_residuals(t);
    CHECK_FALSE(is_missing(r.at(0, 0)));
    CHECK_FALSE(is_missing(r.at(0, 1)));
    CHECK(is_missing(r.at(1, 0)));  // zero row marginal
    CHECK(is_missing(r.at(1, 1)));

    // a column holding the whole total degenerates every cell
    ContinTable col;
    col.n_rows = 2;
    col.n_cols = 2;
    col.counts = {1, 0, 1, 0};
    col.recompute_totals();
    const LabeledMatrix rc = std_pearson_residuals(col);
    for (double v : rc.values) CHECK(is_missing(v));
}

TEST_CASE("residuals match the direct formula on random tables") {
    RngStream rng(2718, 0);
    for (int rep = 0; rep < 1000; ++rep) {
        const std::size_t rows = 2 + rng.next_u32() % 7;
        const std::size_t cols = 2 + rng.next_u32() % 5;
        ContinTable t;
        t.n_rows = rows;
        t.n_cols = cols;
        t.counts.resize(rows * cols);
        for (auto& v : t.counts)
            v = rng.next_unit() < 0.5 ? 0 : std::int64_t(1 + rng.next_u32() % 9);
        t.recompute_totals();
        if (t.grand_total == 0) t.counts[0] = 1;
        t.recompute_totals();

        const LabeledMatrix r = std_pearson_residuals(t);
        const double N = double(t.grand_total);
        double discrepancy_sum = 0.0;
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j) {
                const std::int64_t ri = t.row_totals[i];
                const std::int64_t cj = t.col_totals[j];
                const double expect = double(ri) * double(cj) / N;
                discrepancy_sum += double(t.at(i, j)) - expect;
                const bool degenerate =
                    ri == 0 || cj == 0 || ri == t.grand_total || cj == t.grand_total;
                if (degenerate) {
                    CHECK(is_missing(r.at(i, j)));
                    continue;
                }
                const double denom = std::sqrt(expect * (1.0 - double(ri) / N) *
                                               (1.0 - double(cj) / N));
                const double naive = (double(t.at(i, j)) - expect) / denom;
                CHECK(r.at(i, j) == doctest::Approx(naive).epsilon(1e-12));
            }
        // observed minus expected telescopes to zero over the whole table
        CHECK(std::abs(discrepancy_sum) < 1e-6 * N);
    }
}
