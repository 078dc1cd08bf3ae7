#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mddc/contin_table.hpp"
#include "mddc/matrix.hpp"

namespace mddc {

// Contingency CSV: header ",drug1,...,drugJ" (first cell may also be "AE"),
// then one row per AE: "name,n1,...,nJ". RFC-4180 quoting for labels with
// commas/quotes. Validated strictly.
ContinTable read_contin_csv(const std::string& path, Warnings* warnings = nullptr);
void write_contin_csv(const ContinTable& t, const std::string& path);

// Same layout with real entries; MISSING serialized as the token (default
// "NA"); reals in shortest round-trip form.
LabeledMatrix read_matrix_csv(const std::string& path, const std::string& missing_token = "NA");
void write_matrix_csv(const LabeledMatrix& m, const std::string& path,
                      const std::string& missing_token = "NA");

struct ReportRow {
    std::string drug;
    std::string ae;
    std::int64_t observed;
    double expected;
    double residual;
};

// One row per signal=1 cell, ordered by drug column then descending expected
// count; expected counts and residuals recomputed from the table.
std::vector<ReportRow> report_drug_ae_pairs(const ContinTable& t, const LabeledMatrix& signal);
void write_report_csv(const std::vector<ReportRow>& rows, const std::string& path);

// Standalone SVG 1.1 heatmap: one rect per cell, row labels on the left,
// column labels underneath. Binary matrices get a two-color scheme, anything
// else a sequential ramp; MISSING cells are grey. Output is a pure function
// of the matrix.
std::string heatmap_svg(const LabeledMatrix& m);
void emit_heatmap_svg(const LabeledMatrix& m, const std::string& path);

// Plot-prep helpers for the figure recipes (subset rows, drop a column).
LabeledMatrix take_rows(const LabeledMatrix& m, std::size_t n);
LabeledMatrix drop_column(const LabeledMatrix& m, const std::string& name);

}  // namespace mddc
