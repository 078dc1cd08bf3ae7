#include "mddc/fixtures.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>

#include "mddc/error.hpp"

namespace mddc {

namespace {

// Largest-first power-law weights scaled to an exact integer total.
std::vector<std::int64_t> scale_to_total(const std::vector<double>& w, std::int64_t total) {
    const double sum = std::accumulate(w.begin(), w.end(), 0.0);
    std::vector<std::int64_t> out(w.size());
    std::int64_t allocated = 0;
    for (std::size_t k = 0; k < w.size(); ++k) {
        out[k] = std::int64_t(std::floor(w[k] / sum * double(total)));
        allocated += out[k];
    }
    for (std::int64_t r = 0; r < total - allocated; ++r) ++out[std::size_t(r) % out.size()];
    return out;
}

std::vector<double> zipf_weights(std::size_t count, double exponent) {
    std::vector<double> w(count);
    for (std::size_t k = 0; k < count; ++k) w[k] = std::pow(double(k + 1), -exponent);
    return w;
}

std::vector<std::string> numbered_aes(std::size_t first, std::size_t last, int width) {
    std::vector<std::string> names;
    char buf[32];
    for (std::size_t k = first; k <= last; ++k) {
        std::snprintf(buf, sizeof(buf), "AE_%0*zu", width, k);
        names.push_back(buf);
    }
    return names;
}

// Rows: optional named head, then numbered AEs, then an aggregate "Other" row
// weighted like the largest named row.
std::vector<std::int64_t> standard_row_marginal(std::size_t n_rows, double exponent,
                                                std::int64_t total) {
    std::vector<double> w = zipf_weights(n_rows, exponent);
    w.back() = w.front();  // the aggregate row is as heavy as the top AE
    return scale_to_total(w, total);
}

// Columns: named drugs share a tenth of the reports, "Other" takes the rest.
std::vector<std::int64_t> standard_col_marginal(std::size_t n_named, std::int64_t total) {
    const std::int64_t named_total = total / 10;
    std::vector<std::int64_t> cols = scale_to_total(zipf_weights(n_named, 0.7), named_total);
    cols.push_back(total - named_total);
    return cols;
}

FixtureSpec make_statin49() {
    FixtureSpec f;
    f.name = "synthetic_statin49";
    f.seed = 49;
    f.row_names = {
        // muscle injury, signs and symptoms
        "Rhabdomyolysis", "Myalgia", "Muscular weakness", "Muscle spasms", "Myopathy",
        "Muscle rupture", "Myositis", "Musculoskeletal pain", "Muscle fatigue",
        "Muscle atrophy", "Muscle twitching", "Muscle tightness", "Muscle disorder",
        "Pain in extremity", "Mobility decreased", "Gait disturbance", "Muscle contracture",
        "Muscle haemorrhage", "Muscle necrosis", "Musculoskeletal stiffness",
        // muscle injury, laboratory tests
        "Blood creatine phosphokinase increased", "Blood creatine phosphokinase abnormal",
        "Myoglobin blood increased", "Myoglobin blood present", "Myoglobin urine present",
        "Transaminases increased", "Aspartate aminotransferase increased",
        "Alanine aminotransferase increased", "Blood lactate dehydrogenase increased",
        "Muscle enzyme increased", "Blood aldolase increased", "Myoglobinuria",
        "Blood potassium increased", "Blood phosphorus increased", "Blood uric acid increased",
        // kidney injury, diagnosis and treatment
        "Acute kidney injury", "Renal failure", "Renal impairment",
        "Blood creatinine increased", "Blood urea increased", "Oliguria", "Anuria",
        "Dialysis", "Haemodialysis", "Renal tubular necrosis",
        "Glomerular filtration rate decreased", "Chromaturia", "Nephropathy toxic",
        "Renal disorder"};
    f.col_names = {"Atorvastatin", "Fluvastatin",  "Lovastatin", "Pravastatin",
                   "Rosuvastatin", "Simvastatin", "Other"};
    f.cluster_assignment.assign(20, 0);
    f.cluster_assignment.insert(f.cluster_assignment.end(), 15, 1);
    f.cluster_assignment.insert(f.cluster_assignment.end(), 14, 2);

    // row 1 and column 1 pinned so E(Rhabdomyolysis, Atorvastatin) = 60
    f.row_marginal = scale_to_total(zipf_weights(48, 0.6), 1199400);
    f.row_marginal.insert(f.row_marginal.begin(), 600);
    f.col_marginal = {120000, 60000, 24000, 30000, 48000, 36000, 882000};
    return f;
}

FixtureSpec make_statin101() {
    FixtureSpec f;
    f.name = "synthetic_statin101";
    f.seed = 101;
    f.row_names = numbered_aes(1, 101, 3);
    f.row_names.push_back("Other");
    f.col_names = {"Atorvastatin", "Fluvastatin", "Pravastatin", "Simvastatin", "Other"};
    f.row_marginal = standard_row_marginal(102, 0.5, 57723334);
    f.col_marginal = standard_col_marginal(4, 57723334);
    return f;
}

FixtureSpec make_betablocker500() {
    FixtureSpec f;
    f.name = "synthetic_betablocker500";
    f.seed = 500;
    f.row_names = {"Pain", "Fatigue", "Nausea", "Arthralgia", "Condition aggravated",
                   "Dyspnoea"};
    for (auto& name : numbered_aes(7, 500, 3)) f.row_names.push_back(std::move(name));
    f.row_names.push_back("Other");
    f.col_names = {"Acebutolol", "Atenolol",    "Bisoprolol", "Carvedilol", "Metoprolol",
                   "Nadolol",    "Propranolol", "Timolol",    "Other"};
    f.row_marginal = standard_row_marginal(501, 0.5, 77367960);
    f.col_marginal = standard_col_marginal(8, 77367960);
    return f;
}

FixtureSpec make_sedative1000() {
    FixtureSpec f;
    f.name = "synthetic_sedative1000";
    f.seed = 1000;
    f.row_names = numbered_aes(1, 1000, 4);
    f.row_names.push_back("Other");
    f.col_names = {"Zolpidem",  "Zopiclone", "Eszopiclone", "Zaleplon",   "Diazepam",
                   "Lorazepam", "Temazepam", "Alprazolam",  "Midazolam", "Clonazepam",
                   "Other"};
    f.row_marginal = standard_row_marginal(1001, 0.5, 78030040);
    f.col_marginal = standard_col_marginal(10, 78030040);
    return f;
}

const std::vector<FixtureSpec>& registry() {
    static const std::vector<FixtureSpec> specs = {make_statin49(), make_statin101(),
                                                   make_betablocker500(), make_sedative1000()};
    return specs;
}

}  // namespace

std::vector<std::string> fixture_names() {
    std::vector<std::string> names;
    for (const auto& f : registry()) names.push_back(f.name);
    return names;
}

FixtureSpec fixture_spec(const std::string& name) {
    for (const auto& f : registry())
        if (f.name == name) return f;
    fail(errc::unknown_fixture, "no fixture named \"" + name + "\"");
}

ContinTable load_fixture(const std::string& name) {
    const FixtureSpec f = fixture_spec(name);
    GenerationRequest req;
    req.row_marginal = f.row_marginal;
    req.col_marginal = f.col_marginal;
    req.row_names = f.row_names;
    req.col_names = f.col_names;
    req.clusters.assignment = f.cluster_assignment;
    if (!f.cluster_assignment.empty()) req.clusters.within_rho = {0.5};
    req.n_rep = 1;
    req.seed = f.seed;
    req.threads = 1;
    return std::move(generate_tables(req)[0]);
}

}  // namespace mddc
