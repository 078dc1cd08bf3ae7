#include "mddc/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mddc/error.hpp"

namespace mddc {

namespace {

struct CsvRecord {
    std::vector<std::string> fields;
    std::size_t line = 0;  // 1-based line where the record starts
};

[[noreturn]] void parse_fail(const std::string& path, std::size_t line, std::size_t column,
                             const std::string& what) {
    fail(errc::parse_error, path + ":" + std::to_string(line) + ": column " +
                                std::to_string(column) + ": " + what);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(errc::io_error, path + ": cannot open for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) fail(errc::io_error, path + ": read failed");
    return buf.str();
}

// RFC-4180 state machine; quoted fields may contain commas, escaped quotes
// and newlines. CRLF and LF both end records.
std::vector<CsvRecord> parse_csv(const std::string& path, const std::string& text) {
    std::vector<CsvRecord> records;
    CsvRecord rec;
    rec.line = 1;
    std::string field;
    bool in_quotes = false;
    bool field_was_quoted = false;
    bool any_field = false;
    std::size_t line = 1;

    auto end_field = [&] {
        rec.fields.push_back(std::move(field));
        field.clear();
        field_was_quoted = false;
        any_field = true;
    };
    auto end_record = [&] {
        end_field();
        // a lone newline (single empty field) is a blank line, skip it
        if (rec.fields.size() > 1 || !rec.fields[0].empty()) records.push_back(std::move(rec));
        rec = CsvRecord{};
        rec.line = line;
        any_field = false;
    };

    for (std::size_t pos = 0; pos < text.size(); ++pos) {
        const char c = text[pos];
        if (in_quotes) {
            if (c == '"') {
                if (pos + 1 < text.size() && text[pos + 1] == '"') {
                    field.push_back('"');
                    ++pos;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line;
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
            case '"':
                if (!field.empty() || field_was_quoted)
                    parse_fail(path, line, rec.fields.size() + 1, "stray quote inside field");
                in_quotes = true;
                field_was_quoted = true;
                break;
            case ',':
                end_field();
                break;
            case '\r':
                if (pos + 1 < text.size() && text[pos + 1] == '\n') break;  // CRLF: defer to \n
                field.push_back(c);
                break;
            case '\n':
                ++line;
                end_record();
                break;
            default:
                field.push_back(c);
        }
    }
    if (in_quotes) parse_fail(path, line, rec.fields.size() + 1, "unterminated quoted field");
    if (!field.empty() || field_was_quoted || any_field) end_record();
    if (records.empty()) parse_fail(path, 1, 1, "empty file");
    return records;
}

std::string trimmed(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t')) --e;
    return s.substr(b, e - b);
}

double parse_real(const std::string& path, const CsvRecord& rec, std::size_t column) {
    const std::string cell = trimmed(rec.fields[column]);
    double value = 0.0;
    const char* first = cell.data();
    const char* last = first + cell.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last)
        parse_fail(path, rec.line, column + 1, "expected a number, got \"" + rec.fields[column] + "\"");
    return value;
}

// Shared layout reader: corner cell, drug names, one AE row per record.
LabeledMatrix read_layout(const std::string& path, const std::string& missing_token,
                          bool allow_missing) {
    const std::string text = slurp(path);
    const std::vector<CsvRecord> records = parse_csv(path, text);
    const CsvRecord& header = records[0];
    if (header.fields.size() < 2)
        parse_fail(path, header.line, 1, "header needs at least one value column");
    const std::string corner = trimmed(header.fields[0]);
    if (!corner.empty() && corner != "AE")
        parse_fail(path, header.line, 1, "first header cell must be empty or \"AE\"");
    const std::size_t J = header.fields.size() - 1;
    const std::size_t I = records.size() - 1;
    if (I == 0) parse_fail(path, header.line + 1, 1, "no data rows");

    LabeledMatrix m(I, J);
    m.col_names.assign(header.fields.begin() + 1, header.fields.end());
    m.row_names.resize(I);
    for (std::size_t i = 0; i < I; ++i) {
        const CsvRecord& rec = records[i + 1];
        if (rec.fields.size() != J + 1)
            parse_fail(path, rec.line, rec.fields.size(),
                       "expected " + std::to_string(J + 1) + " fields, got " +
                           std::to_string(rec.fields.size()));
        m.row_names[i] = rec.fields[0];
        for (std::size_t j = 0; j < J; ++j) {
            if (allow_missing && trimmed(rec.fields[j + 1]) == missing_token) {
                m.at(i, j) = missing;
                continue;
            }
            m.at(i, j) = parse_real(path, rec, j + 1);
        }
    }
    return m;
}

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

std::string format_real(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

std::string format_fixed4(double v) {
    if (is_missing(v)) return "NA";
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(errc::io_error, path + ": cannot open for writing");
    return out;
}

void finish_out(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) fail(errc::io_error, path + ": write failed");
}

void write_header(std::ofstream& out, const std::vector<std::string>& col_names) {
    for (const auto& name : col_names) out << ',' << csv_quote(name);
    out << '\n';
}

std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

}  // namespace

ContinTable read_contin_csv(const std::string& path, Warnings* warnings) {
    const LabeledMatrix raw = read_layout(path, "", false);
    return validate_and_fix(raw, /*strict=*/true, warnings);
}

void write_contin_csv(const ContinTable& t, const std::string& path) {
    std::ofstream out = open_out(path);
    write_header(out, t.col_names);
    for (std::size_t i = 0; i < t.n_rows; ++i) {
        out << csv_quote(t.row_names[i]);
        for (std::size_t j = 0; j < t.n_cols; ++j) out << ',' << t.at(i, j);
        out << '\n';
    }
    finish_out(out, path);
}

LabeledMatrix read_matrix_csv(const std::string& path, const std::string& missing_token) {
    return read_layout(path, missing_token, true);
}

void write_matrix_csv(const LabeledMatrix& m, const std::string& path,
                      const std::string& missing_token) {
    std::ofstream out = open_out(path);
    std::vector<std::string> cols = m.col_names;
    if (cols.empty())
        for (std::size_t j = 0; j < m.n_cols; ++j) cols.push_back("col_" + std::to_string(j + 1));
    write_header(out, cols);
    for (std::size_t i = 0; i < m.n_rows; ++i) {
        out << csv_quote(i < m.row_names.size() ? m.row_names[i]
                                                : "row_" + std::to_string(i + 1));
        for (std::size_t j = 0; j < m.n_cols; ++j) {
            const double v = m.at(i, j);
            out << ',' << (is_missing(v) ? missing_token : format_real(v));
        }
        out << '\n';
    }
    finish_out(out, path);
}

std::vector<ReportRow> report_drug_ae_pairs(const ContinTable& t, const LabeledMatrix& signal) {
    if (signal.n_rows != t.n_rows || signal.n_cols != t.n_cols)
        fail(errc::dimension_mismatch, "signal matrix does not match the table shape");
    const LabeledMatrix expected = expected_counts(t);
    const LabeledMatrix res = std_pearson_residuals(t);
    std::vector<ReportRow> rows;
    for (std::size_t j = 0; j < t.n_cols; ++j) {
        const std::size_t before = rows.size();
        for (std::size_t i = 0; i < t.n_rows; ++i) {
            if (signal.at(i, j) != 1.0) continue;
            rows.push_back({t.col_names[j], t.row_names[i], t.at(i, j), expected.at(i, j),
                            res.at(i, j)});
        }
        std::stable_sort(rows.begin() + std::ptrdiff_t(before), rows.end(),
                         [](const ReportRow& a, const ReportRow& b) {
                             return a.expected > b.expected;
                         });
    }
    return rows;
}

void write_report_csv(const std::vector<ReportRow>& rows, const std::string& path) {
    std::ofstream out = open_out(path);
    out << "Drug,AE,Observed Count,Expected Count,Std Pearson Resid\n";
    for (const auto& r : rows)
        out << csv_quote(r.drug) << ',' << csv_quote(r.ae) << ',' << r.observed << ','
            << format_fixed4(r.expected) << ',' << format_fixed4(r.residual) << '\n';
    finish_out(out, path);
}

std::string heatmap_svg(const LabeledMatrix& m) {
    constexpr int cell = 18;
    constexpr int pad = 10;
    constexpr int char_w = 7;  // sans-serif at 11px, generous

    std::size_t row_label_max = 0, col_label_max = 0;
    auto label_of = [](const std::vector<std::string>& names, std::size_t k,
                       const char* prefix) {
        if (k < names.size() && !names[k].empty()) return names[k];
        return std::string(prefix) + std::to_string(k + 1);
    };
    for (std::size_t i = 0; i < m.n_rows; ++i)
        row_label_max = std::max(row_label_max, label_of(m.row_names, i, "row ").size());
    for (std::size_t j = 0; j < m.n_cols; ++j)
        col_label_max = std::max(col_label_max, label_of(m.col_names, j, "col ").size());

    const int left = pad + int(row_label_max) * char_w;
    const int top = pad;
    const int bottom = pad + int(col_label_max) * char_w;
    const int width = left + int(m.n_cols) * cell + pad;
    const int height = top + int(m.n_rows) * cell + bottom;

    bool binary = true;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (double v : m.values) {
        if (is_missing(v)) continue;
        if (v != 0.0 && v != 1.0) binary = false;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double span = hi > lo ? hi - lo : 1.0;

    auto ramp_color = [&](double v) {
        // light yellow to dark red
        const double t = std::isfinite(lo) ? (v - lo) / span : 0.0;
        const int r = int(std::lround(255.0 + t * (128.0 - 255.0)));
        const int g = int(std::lround(255.0 + t * (0.0 - 255.0)));
        const int b = int(std::lround(204.0 + t * (38.0 - 204.0)));
        char buf[8];
        std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
        return std::string(buf);
    };
    auto cell_color = [&](double v) -> std::string {
        if (is_missing(v)) return "#bdbdbd";
        if (binary) return v == 1.0 ? "#d73027" : "#f0f0f0";
        return ramp_color(v);
    };

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width
        << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
        << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
    for (std::size_t i = 0; i < m.n_rows; ++i)
        for (std::size_t j = 0; j < m.n_cols; ++j) {
            const int x = left + int(j) * cell;
            const int y = top + int(i) * cell;
            svg << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << (cell - 1)
                << "\" height=\"" << (cell - 1) << "\" fill=\"" << cell_color(m.at(i, j))
                << "\"/>\n";
        }
    for (std::size_t i = 0; i < m.n_rows; ++i) {
        const int y = top + int(i) * cell + cell / 2 + 4;
        svg << "<text x=\"" << (left - 4) << "\" y=\"" << y << "\" text-anchor=\"end\">"
            << xml_escape(label_of(m.row_names, i, "row ")) << "</text>\n";
    }
    for (std::size_t j = 0; j < m.n_cols; ++j) {
        const int x = left + int(j) * cell + cell / 2;
        const int y = top + int(m.n_rows) * cell + 12;
        svg << "<text x=\"" << x << "\" y=\"" << y << "\" text-anchor=\"end\" transform=\"rotate(-45 "
            << x << ' ' << y << ")\">" << xml_escape(label_of(m.col_names, j, "col "))
            << "</text>\n";
    }
    svg << "</g>\n</svg>\n";
    return svg.str();
}

void emit_heatmap_svg(const LabeledMatrix& m, const std::string& path) {
    std::ofstream out = open_out(path);
    out << heatmap_svg(m);
    finish_out(out, path);
}

LabeledMatrix take_rows(const LabeledMatrix& m, std::size_t n) {
    const std::size_t keep = std::min(n, m.n_rows);
    LabeledMatrix out(keep, m.n_cols);
    out.col_names = m.col_names;
    std::copy(m.values.begin(), m.values.begin() + std::ptrdiff_t(keep * m.n_cols),
              out.values.begin());
    if (!m.row_names.empty())
        out.row_names.assign(m.row_names.begin(), m.row_names.begin() + std::ptrdiff_t(keep));
    return out;
}

LabeledMatrix drop_column(const LabeledMatrix& m, const std::string& name) {
    std::size_t target = m.n_cols;
    for (std::size_t j = 0; j < m.col_names.size(); ++j)
        if (m.col_names[j] == name) {
            target = j;
            break;
        }
    if (target == m.n_cols)
        fail(errc::invalid_argument, "no column named \"" + name + "\"");
    LabeledMatrix out(m.n_rows, m.n_cols - 1);
    out.row_names = m.row_names;
    for (std::size_t j = 0; j < m.n_cols; ++j)
        if (j != target) out.col_names.push_back(m.col_names[j]);
    for (std::size_t i = 0; i < m.n_rows; ++i) {
        std::size_t k = 0;
        for (std::size_t j = 0; j < m.n_cols; ++j) {
            if (j == target) continue;
            out.at(i, k++) = m.at(i, j);
        }
    }
    return out;
}

}  // namespace mddc
