#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "mddc/contin_table.hpp"
#include "mddc/cutoffs.hpp"
#include "mddc/datagen.hpp"
#include "mddc/error.hpp"
#include "mddc/fixtures.hpp"
#include "mddc/io.hpp"
#include "mddc/mddc.hpp"
#include "mddc/stats.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void print_warnings(const mddc::Warnings& warnings) {
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

std::string out_path(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

void ensure_out_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) mddc::fail(mddc::errc::io_error, dir + ": cannot create output directory");
}

void write_manifest(const std::string& dir, const std::string& command, const json& inputs,
                    const json& parameters) {
    json manifest;
    manifest["tool"] = "mddc";
    manifest["version"] = MDDC_VERSION;
    manifest["command"] = command;
    manifest["inputs"] = inputs;
    manifest["parameters"] = parameters;
    const std::string path = out_path(dir, "manifest.json");
    std::ofstream out(path, std::ios::binary);
    if (!out) mddc::fail(mddc::errc::io_error, path + ": cannot open for writing");
    out << manifest.dump(2) << '\n';
    if (!out.good()) mddc::fail(mddc::errc::io_error, path + ": write failed");
}

// Scalar ("1.5"), inline list ("1.5,2.0,...") or @file reference to a
// one-column matrix CSV as written by optimal-coef.
std::vector<double> parse_coef(const std::string& raw) {
    if (!raw.empty() && raw[0] == '@') {
        const mddc::LabeledMatrix m = mddc::read_matrix_csv(raw.substr(1));
        return m.values;
    }
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= raw.size()) {
        const std::size_t comma = raw.find(',', start);
        const std::string piece =
            raw.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(piece.data(), piece.data() + piece.size(), v);
        if (ec != std::errc{} || ptr != piece.data() + piece.size())
            mddc::fail(mddc::errc::invalid_argument, "bad coefficient \"" + piece + "\"");
        out.push_back(v);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

// Cluster-assignment CSV: header "idx,AE", then one "<cluster>,<AE name>" row
// per table row. Cluster ids may be names or numbers.
std::vector<int> read_cluster_csv(const std::string& path,
                                  const std::vector<std::string>& row_names) {
    std::ifstream in(path, std::ios::binary);
    if (!in) mddc::fail(mddc::errc::io_error, path + ": cannot open for reading");
    std::vector<int> assignment(row_names.size(), -1);
    std::vector<std::string> ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::size_t comma = line.find(',');
        if (comma == std::string::npos)
            mddc::fail(mddc::errc::parse_error,
                       path + ":" + std::to_string(line_no) + ": expected \"idx,AE\"");
        const std::string idx = line.substr(0, comma);
        std::string ae = line.substr(comma + 1);
        if (ae.size() >= 2 && ae.front() == '"' && ae.back() == '"')
            ae = ae.substr(1, ae.size() - 2);
        if (line_no == 1 && idx == "idx" && ae == "AE") continue;  // header
        const auto row = std::find(row_names.begin(), row_names.end(), ae);
        if (row == row_names.end())
            mddc::fail(mddc::errc::parse_error, path + ":" + std::to_string(line_no) +
                                                    ": no table row named \"" + ae + "\"");
        const auto id = std::find(ids.begin(), ids.end(), idx);
        const int cluster = int(id - ids.begin());
        if (id == ids.end()) ids.push_back(idx);
        assignment[std::size_t(row - row_names.begin())] = cluster;
    }
    for (std::size_t i = 0; i < assignment.size(); ++i)
        if (assignment[i] < 0)
            mddc::fail(mddc::errc::parse_error,
                       path + ": no cluster assigned to row \"" + row_names[i] + "\"");
    return assignment;
}

std::vector<std::int64_t> read_marginal_csv(const std::string& path,
                                            std::vector<std::string>* names) {
    const mddc::LabeledMatrix m = mddc::read_matrix_csv(path);
    if (m.n_cols != 1)
        mddc::fail(mddc::errc::parse_error, path + ": expected a single \"total\" column");
    std::vector<std::int64_t> out;
    for (std::size_t i = 0; i < m.n_rows; ++i) {
        const double v = m.at(i, 0);
        if (mddc::is_missing(v) || v != std::floor(v))
            mddc::fail(mddc::errc::parse_error, path + ": marginals must be integers");
        out.push_back(std::int64_t(v));
    }
    if (names) *names = m.row_names;
    return out;
}

mddc::LabeledMatrix merged_pvalues(const mddc::MddcResult& result) {
    mddc::LabeledMatrix pval = mddc::LabeledMatrix::like(result.mc_pval, mddc::missing);
    for (std::size_t idx = 0; idx < pval.values.size(); ++idx) {
        if (!mddc::is_missing(result.mc_pval.values[idx]))
            pval.values[idx] = result.mc_pval.values[idx];
        else if (!mddc::is_missing(result.fisher_pval.values[idx]))
            pval.values[idx] = result.fisher_pval.values[idx];
    }
    return pval;
}

struct AnalyzeArgs {
    std::string input;
    std::string out = ".";
    std::string method = "monte-carlo";
    int reps = 10000;
    double quantile = 0.95;
    std::string coef = "1.5";
    double corr_lim = 0.8;
    bool col_specific = true;
    bool separate = true;
    bool col_corr = false;
    bool exclude_same_class = true;
    double alpha = 0.05;
    bool adjust_univ_signal = false;
    bool bh_per_column = false;
    std::uint64_t seed = 0;
    int threads = 0;
    bool report = false;
    bool heatmap = false;
};

int cmd_analyze(const AnalyzeArgs& a) {
    ensure_out_dir(a.out);
    mddc::Warnings warnings;
    const mddc::ContinTable table = mddc::read_contin_csv(a.input, &warnings);

    mddc::MddcOptions opt;
    opt.method = a.method == "boxplot" ? mddc::Method::boxplot : mddc::Method::monte_carlo;
    opt.coef = parse_coef(a.coef);
    opt.col_specific = a.col_specific;
    opt.separate = a.separate;
    opt.c_corr = a.corr_lim;
    opt.orientation = a.col_corr ? mddc::Orientation::column : mddc::Orientation::row;
    opt.reps = a.reps;
    opt.quantile_q = a.quantile;
    opt.exclude_same_class = a.exclude_same_class;
    opt.alpha = a.alpha;
    opt.adjust_univ_signal = a.adjust_univ_signal;
    opt.bh_per_column = a.bh_per_column;
    opt.seed = a.seed;
    opt.threads = a.threads;

    const mddc::MddcResult result = mddc::run_mddc(table, opt);
    warnings.insert(warnings.end(), result.warnings.begin(), result.warnings.end());
    print_warnings(warnings);

    mddc::write_matrix_csv(result.univariate_signal, out_path(a.out, "signal.csv"));
    mddc::write_matrix_csv(result.corr_signal_pval, out_path(a.out, "corr_signal_pval.csv"));
    mddc::write_matrix_csv(result.corr_signal_adj_pval,
                           out_path(a.out, "corr_signal_adj_pval.csv"));
    if (opt.method == mddc::Method::monte_carlo) {
        mddc::write_matrix_csv(merged_pvalues(result), out_path(a.out, "pval.csv"));
        mddc::write_matrix_csv(result.fisher_signal, out_path(a.out, "fisher_signal.csv"));
    }
    if (a.report) {
        mddc::write_report_csv(mddc::report_drug_ae_pairs(table, result.univariate_signal),
                               out_path(a.out, "report_signal.csv"));
        if (opt.method == mddc::Method::monte_carlo)
            mddc::write_report_csv(mddc::report_drug_ae_pairs(table, result.fisher_signal),
                                   out_path(a.out, "report_fisher_signal.csv"));
    }
    if (a.heatmap)
        mddc::emit_heatmap_svg(result.univariate_signal, out_path(a.out, "signal_heatmap.svg"));

    write_manifest(a.out, "analyze", json{{"table", a.input}},
                   json{{"method", a.method},
                        {"reps", a.reps},
                        {"quantile", a.quantile},
                        {"coef", opt.coef},
                        {"corr_lim", a.corr_lim},
                        {"col_specific", a.col_specific},
                        {"separate", a.separate},
                        {"col_corr", a.col_corr},
                        {"exclude_same_class", a.exclude_same_class},
                        {"alpha", a.alpha},
                        {"adjust_univ_signal", a.adjust_univ_signal},
                        {"bh_per_column", a.bh_per_column},
                        {"seed", a.seed},
                        {"threads", a.threads},
                        {"report", a.report},
                        {"heatmap", a.heatmap}});
    return 0;
}

struct GenerateArgs {
    std::string table;
    std::string fixture;
    std::string row_marginals;
    std::string col_marginals;
    std::string signal;
    std::string clusters;
    double rho = 0.5;
    bool independent = false;
    int n_rep = 1;
    std::uint64_t seed = 0;
    double tol = 0.0;
    int retry_ceiling = 1000;
    int threads = 0;
    std::string out = ".";
};

int cmd_generate(const GenerateArgs& a) {
    ensure_out_dir(a.out);
    mddc::Warnings warnings;
    mddc::GenerationRequest req;
    json inputs;
    bool table_based = false;
    mddc::ContinTable reference;

    if (!a.table.empty()) {
        reference = mddc::read_contin_csv(a.table, &warnings);
        table_based = true;
        inputs["table"] = a.table;
    } else if (!a.fixture.empty()) {
        const mddc::FixtureSpec f = mddc::fixture_spec(a.fixture);
        req.row_marginal = f.row_marginal;
        req.col_marginal = f.col_marginal;
        req.row_names = f.row_names;
        req.col_names = f.col_names;
        req.clusters.assignment = f.cluster_assignment;
        inputs["fixture"] = a.fixture;
    } else if (!a.row_marginals.empty() && !a.col_marginals.empty()) {
        req.row_marginal = read_marginal_csv(a.row_marginals, &req.row_names);
        req.col_marginal = read_marginal_csv(a.col_marginals, &req.col_names);
        inputs["row_marginals"] = a.row_marginals;
        inputs["col_marginals"] = a.col_marginals;
    } else {
        mddc::fail(mddc::errc::invalid_argument,
                   "need --table, --fixture, or both --row-marginals and --col-marginals");
    }
    if (table_based) {
        req.row_marginal = reference.row_totals;
        req.col_marginal = reference.col_totals;
        req.row_names = reference.row_names;
        req.col_names = reference.col_names;
    }

    if (!a.signal.empty()) {
        req.signal = mddc::read_matrix_csv(a.signal);
        inputs["signal"] = a.signal;
    }
    if (!a.clusters.empty()) {
        req.clusters.assignment = read_cluster_csv(a.clusters, req.row_names);
        inputs["clusters"] = a.clusters;
    }
    if (a.independent) {
        req.clusters = mddc::ClusterSpec{};
    } else if (!req.clusters.assignment.empty()) {
        req.clusters.within_rho = {a.rho};
    } else if (table_based) {
        // no cluster layout given: estimate the AE correlation from the table
        req.clusters.corr = mddc::estimate_cluster_corr(reference, &warnings);
    }

    req.n_rep = a.n_rep;
    req.seed = a.seed;
    req.tolerance = a.tol;
    req.retry_ceiling = a.retry_ceiling;
    req.threads = a.threads;

    const std::vector<mddc::ContinTable> tables =
        a.tol > 0.0 ? mddc::generate_tables_with_tol(req) : mddc::generate_tables(req);
    print_warnings(warnings);

    char name[32];
    for (std::size_t r = 0; r < tables.size(); ++r) {
        std::snprintf(name, sizeof(name), "table_%04zu.csv", r + 1);
        mddc::write_contin_csv(tables[r], out_path(a.out, name));
    }
    write_manifest(a.out, "generate", inputs,
                   json{{"rho", a.rho},
                        {"independent", a.independent},
                        {"n_rep", a.n_rep},
                        {"seed", a.seed},
                        {"tol", a.tol},
                        {"retry_ceiling", a.retry_ceiling},
                        {"threads", a.threads}});
    return 0;
}

struct OptimalCoefArgs {
    std::string input;
    int reps = 10000;
    double target_fdr = 0.05;
    double step = 0.1;
    std::uint64_t seed = 0;
    bool whole_table = false;
    int threads = 0;
    std::string out = ".";
};

int cmd_optimal_coef(const OptimalCoefArgs& a) {
    ensure_out_dir(a.out);
    mddc::Warnings warnings;
    const mddc::ContinTable table = mddc::read_contin_csv(a.input, &warnings);
    print_warnings(warnings);
    const std::vector<double> coef = mddc::find_optimal_coef(
        table, a.reps, a.target_fdr, a.step, a.seed, a.whole_table, 10.0, a.threads);
    mddc::LabeledMatrix m(table.n_cols, 1);
    m.row_names = table.col_names;
    m.col_names = {"coef"};
    m.values = coef;
    mddc::write_matrix_csv(m, out_path(a.out, "coef.csv"));
    write_manifest(a.out, "optimal-coef", json{{"table", a.input}},
                   json{{"reps", a.reps},
                        {"target_fdr", a.target_fdr},
                        {"step", a.step},
                        {"seed", a.seed},
                        {"whole_table", a.whole_table},
                        {"threads", a.threads}});
    return 0;
}

struct HeatmapArgs {
    std::string input;
    std::string out = ".";
    std::size_t rows = 0;
    std::string drop_col;
};

int cmd_heatmap(const HeatmapArgs& a) {
    ensure_out_dir(a.out);
    mddc::LabeledMatrix m = mddc::read_matrix_csv(a.input);
    if (!a.drop_col.empty()) m = mddc::drop_column(m, a.drop_col);
    if (a.rows > 0) m = mddc::take_rows(m, a.rows);
    mddc::emit_heatmap_svg(m, out_path(a.out, "heatmap.svg"));
    write_manifest(a.out, "heatmap", json{{"matrix", a.input}},
                   json{{"rows", a.rows}, {"drop_col", a.drop_col}});
    return 0;
}

struct ReportArgs {
    std::string table;
    std::string signal;
    std::string out = ".";
};

int cmd_report(const ReportArgs& a) {
    ensure_out_dir(a.out);
    mddc::Warnings warnings;
    const mddc::ContinTable table = mddc::read_contin_csv(a.table, &warnings);
    print_warnings(warnings);
    const mddc::LabeledMatrix signal = mddc::read_matrix_csv(a.signal);
    mddc::write_report_csv(mddc::report_drug_ae_pairs(table, signal),
                           out_path(a.out, "report.csv"));
    write_manifest(a.out, "report", json{{"table", a.table}, {"signal", a.signal}}, json{});
    return 0;
}

struct RtdArgs {
    std::string dir;
    std::string table;
    std::int64_t orig_total = 0;
};

int cmd_rtd(const RtdArgs& a) {
    std::int64_t orig = a.orig_total;
    if (!a.table.empty()) {
        mddc::Warnings warnings;
        orig = mddc::read_contin_csv(a.table, &warnings).grand_total;
    }
    if (orig <= 0)
        mddc::fail(mddc::errc::invalid_argument, "need --table or a positive --orig-total");

    std::vector<std::string> paths;
    for (const auto& entry : fs::directory_iterator(a.dir))
        if (entry.is_regular_file() && entry.path().extension() == ".csv")
            paths.push_back(entry.path().string());
    std::sort(paths.begin(), paths.end());
    if (paths.empty()) mddc::fail(mddc::errc::empty_data, a.dir + ": no CSV tables found");

    std::vector<double> rtd;
    for (const auto& path : paths) {
        const mddc::ContinTable t = mddc::read_contin_csv(path);
        rtd.push_back(mddc::relative_total_deviation(orig, t.grand_total));
    }
    std::vector<double> sorted = rtd;
    std::sort(sorted.begin(), sorted.end());
    double mean = 0.0;
    for (double v : rtd) mean += v;
    mean /= double(rtd.size());
    double ss = 0.0;
    for (double v : rtd) ss += (v - mean) * (v - mean);
    const double sd = rtd.size() > 1 ? std::sqrt(ss / double(rtd.size() - 1)) : 0.0;

    char line[160];
    std::snprintf(line, sizeof(line), "%.3f,%.3f,%.3f,%.3f,%.3f", sorted.front(),
                  mddc::quantile_sorted(sorted, 0.5), mean, sorted.back(), sd);
    std::cout << "Min.,Median,Mean,Max.,SD\n" << line << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Modified Detecting Deviating Cells: contingency-table signal detection"};
    app.set_version_flag("--version", std::string(MDDC_VERSION));
    app.require_subcommand(1);

    AnalyzeArgs an;
    CLI::App* analyze = app.add_subcommand("analyze", "Run the MDDC analysis on a table CSV");
    analyze->add_option("input", an.input, "Contingency table CSV")->required();
    analyze->add_option("--out", an.out, "Output directory");
    analyze->add_option("--method", an.method, "Cutoff method")
        ->check(CLI::IsMember({"boxplot", "monte-carlo"}));
    analyze->add_option("--reps", an.reps, "Monte Carlo replications");
    analyze->add_option("--quantile", an.quantile, "Null-maxima quantile for the MC cutoff");
    analyze->add_option("--coef", an.coef, "Boxplot coefficient: scalar, list, or @file");
    analyze->add_option("--corr-lim", an.corr_lim, "Connected-AE correlation threshold");
    analyze->add_flag("--col-specific,!--no-col-specific", an.col_specific,
                      "Per-column cutoffs (default) or whole-table");
    analyze->add_flag("--separate,!--no-separate", an.separate,
                      "Separate fences for zero and nonzero cells");
    analyze->add_flag("--col-corr", an.col_corr, "Correlate drug columns instead of AE rows");
    analyze->add_flag("--exclude-same-class,!--no-exclude-same-class", an.exclude_same_class,
                      "Fisher screening against other-class columns only");
    analyze->add_option("--alpha", an.alpha, "Fisher signal threshold");
    analyze->add_flag("--adjust-univ-signal", an.adjust_univ_signal,
                      "BH-adjust MC p-values before the signal threshold");
    analyze->add_flag("--bh-per-column", an.bh_per_column,
                      "Adjust step-5 p-values per column instead of one family");
    analyze->add_option("--seed", an.seed, "RNG seed");
    analyze->add_option("--threads", an.threads, "Worker threads (0 = all)")
        ->envname("MDDC_THREADS");
    analyze->add_flag("--report", an.report, "Also write drug-AE report CSVs");
    analyze->add_flag("--heatmap", an.heatmap, "Also write a signal heatmap SVG");

    GenerateArgs ge;
    CLI::App* generate = app.add_subcommand("generate", "Generate synthetic tables");
    generate->add_option("--table", ge.table, "Reference table CSV (marginals extracted)");
    generate->add_option("--fixture", ge.fixture, "Bundled fixture name");
    generate->add_option("--row-marginals", ge.row_marginals, "Row marginal CSV (name,total)");
    generate->add_option("--col-marginals", ge.col_marginals, "Column marginal CSV");
    generate->add_option("--signal", ge.signal, "Signal-strength matrix CSV (lambda, >= 1)");
    generate->add_option("--clusters", ge.clusters, "Cluster assignment CSV (idx,AE)");
    generate->add_option("--rho", ge.rho, "Within-cluster correlation");
    generate->add_flag("--independent", ge.independent, "Ignore clusters and correlations");
    generate->add_option("--n-rep", ge.n_rep, "Number of tables");
    generate->add_option("--seed", ge.seed, "RNG seed");
    generate->add_option("--tol", ge.tol, "Relative total deviation cap in percent");
    generate->add_option("--retry-ceiling", ge.retry_ceiling, "Regeneration attempts per table");
    generate->add_option("--threads", ge.threads, "Worker threads (0 = all)")
        ->envname("MDDC_THREADS");
    generate->add_option("--out", ge.out, "Output directory");

    OptimalCoefArgs oc;
    CLI::App* optimal = app.add_subcommand("optimal-coef", "Grid-search boxplot coefficients");
    optimal->add_option("input", oc.input, "Contingency table CSV")->required();
    optimal->add_option("--reps", oc.reps, "Simulated tables per evaluation");
    optimal->add_option("--target-fdr", oc.target_fdr, "Target false discovery rate");
    optimal->add_option("--step", oc.step, "Grid step");
    optimal->add_option("--seed", oc.seed, "RNG seed");
    optimal->add_flag("--whole-table", oc.whole_table, "One pooled coefficient");
    optimal->add_option("--threads", oc.threads, "Worker threads (0 = all)")
        ->envname("MDDC_THREADS");
    optimal->add_option("--out", oc.out, "Output directory");

    HeatmapArgs hm;
    CLI::App* heatmap = app.add_subcommand("heatmap", "Render a matrix CSV as an SVG heatmap");
    heatmap->add_option("input", hm.input, "Matrix CSV")->required();
    heatmap->add_option("--out", hm.out, "Output directory");
    heatmap->add_option("--rows", hm.rows, "Keep only the first N rows");
    heatmap->add_option("--drop-col", hm.drop_col, "Drop one column by name");

    ReportArgs re;
    CLI::App* report = app.add_subcommand("report", "Tabulate signal cells with counts");
    report->add_option("table", re.table, "Contingency table CSV")->required();
    report->add_option("signal", re.signal, "Signal matrix CSV")->required();
    report->add_option("--out", re.out, "Output directory");

    RtdArgs rt;
    CLI::App* rtd = app.add_subcommand("rtd", "Relative total deviation across generated tables");
    rtd->add_option("dir", rt.dir, "Directory of generated table CSVs")->required();
    rtd->add_option("--table", rt.table, "Original table CSV");
    rtd->add_option("--orig-total", rt.orig_total, "Original grand total");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*analyze) return cmd_analyze(an);
        if (*generate) return cmd_generate(ge);
        if (*optimal) return cmd_optimal_coef(oc);
        if (*heatmap) return cmd_heatmap(hm);
        if (*report) return cmd_report(re);
        if (*rtd) return cmd_rtd(rt);
    } catch (const mddc::Error& e) {
        std::cerr << "error: " << e.what() << '\n';  // what() already carries the code name
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
