// Batch front end: parses domain specs, runs the experiment suites and
// emits CSV/JSON reports. Exit codes: 0 success, 2 assertion-suite
// failure, 3 configuration error, 4 numerical non-convergence.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "kobalab/csv.hpp"
#include "kobalab/errors.hpp"
#include "kobalab/experiments.hpp"
#include "kobalab/hyperbolicity.hpp"
#include "kobalab/minimal_basis.hpp"
#include "kobalab/pseudodistance.hpp"
#include "kobalab/stats.hpp"

using json = nlohmann::json;
using namespace kobalab;

namespace {

CPoint parse_point(const std::string& text, int n) {
    std::vector<double> vals;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        try {
            vals.push_back(std::stod(cell));
        } catch (const std::exception&) {
            throw ConfigError("cannot parse coordinate '" + cell + "'");
        }
    }
    if (static_cast<int>(vals.size()) != 2 * n)
        throw ConfigError("expected " + std::to_string(2 * n) +
                          " interleaved real coordinates, got " + std::to_string(vals.size()));
    RVec r(2 * n);
    for (int i = 0; i < 2 * n; ++i) r[i] = vals[static_cast<std::size_t>(i)];
    return to_complex(r);
}

// "a:b:geometric[:k]" or a comma list of depths
std::vector<double> parse_depth_grid(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ':')) parts.push_back(cell);
    if (parts.size() >= 3) {
        if (parts[2] != "geometric")
            throw ConfigError("unsupported depth grid kind '" + parts[2] + "'");
        const double a = std::stod(parts[0]);
        const double b = std::stod(parts[1]);
        if (a <= 0 || b <= 0) throw ConfigError("depth grid bounds must be positive");
        int k;
        if (parts.size() >= 4) {
            k = std::stoi(parts[3]);
        } else {
            k = static_cast<int>(std::lround(std::abs(std::log10(a / b)))) + 1;
        }
        if (k < 1) throw ConfigError("depth grid needs at least one point");
        std::vector<double> grid;
        for (int i = 0; i < k; ++i) {
            const double t = k == 1 ? 0.0 : static_cast<double>(i) / (k - 1);
            grid.push_back(std::exp(std::log(a) + t * (std::log(b) - std::log(a))));
        }
        return grid;
    }
    std::vector<double> grid;
    std::stringstream sc(text);
    while (std::getline(sc, cell, ',')) grid.push_back(std::stod(cell));
    if (grid.empty()) throw ConfigError("empty depth grid");
    return grid;
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty() || out_path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw ConfigError("cannot open output file '" + out_path + "'");
    f << text;
}

std::vector<std::string> point_header(const std::string& prefix, int n) {
    std::vector<std::string> h;
    for (int i = 0; i < 2 * n; ++i) h.push_back(prefix + std::to_string(i));
    return h;
}

void push_point(CsvWriter& w, const CPoint& p) {
    const RVec r = to_real(p);
    for (Eigen::Index i = 0; i < r.size(); ++i) w.cell(r[i]);
}

int run_domain_validate(const std::string& domain_path) {
    const ConvexDomain dom(DomainSpec::from_json_file(domain_path));
    const std::vector<std::string> issues = dom.validate();
    for (const auto& issue : issues) std::cerr << "validate: " << issue << "\n";
    if (issues.empty()) {
        std::cout << "domain '" << dom.spec().label() << "' passed all checks\n";
        return 0;
    }
    return 2;
}

int run_tau(const std::string& domain_path, const std::string& q_text,
            const std::vector<double>& eps_list, const std::string& out) {
    const ConvexDomain dom(DomainSpec::from_json_file(domain_path));
    const int n = dom.dim();
    const CPoint q = parse_point(q_text, n);
    std::vector<std::string> header = point_header("q", n);
    header.push_back("eps");
    for (int i = 1; i <= n; ++i) header.push_back("tau" + std::to_string(i));
    for (int i = 1; i <= n; ++i)
        for (const auto& c : point_header("e" + std::to_string(i) + "_", n)) header.push_back(c);
    CsvWriter w(header);
    for (double eps : eps_list) {
        const MinimalFrame frame = build_minimal_frame(dom, q, eps);
        push_point(w, q);
        w.cell(eps);
        for (double t : frame.tau) w.cell(t);
        for (const CVec& e : frame.basis) push_point(w, e);
        w.end_row();
    }
    emit(w.str(), out);
    return 0;
}

int run_pseudo(const std::string& domain_path, const std::string& x_text,
               const std::string& y_text, const std::string& method, const std::string& out) {
    const ConvexDomain dom(DomainSpec::from_json_file(domain_path));
    const int n = dom.dim();
    const CPoint x = parse_point(x_text, n);
    const CPoint y = parse_point(y_text, n);
    std::vector<std::string> header = point_header("x", n);
    for (const auto& c : point_header("y", n)) header.push_back(c);
    header.push_back("m_inf");
    header.push_back("m_taylor");
    header.push_back("ratio");
    CsvWriter w(header);
    push_point(w, x);
    push_point(w, y);
    const bool want_inf = method == "inf" || method == "both";
    const bool want_taylor = method == "taylor" || method == "both";
    if (!want_inf && !want_taylor) throw ConfigError("method must be inf, taylor or both");
    const double mi = want_inf ? pseudo_distance_inf(dom, x, y) : std::nan("");
    const double mt = want_taylor ? pseudo_distance_taylor(dom, x, y) : std::nan("");
    w.cell(mi);
    w.cell(mt);
    w.cell(want_inf && want_taylor && mi > 0 ? mt / mi : std::nan(""));
    w.end_row();
    emit(w.str(), out);
    return 0;
}

int run_calibrate(const std::string& domain_path, double h_max, int samples,
                  std::uint64_t seed, const std::string& out) {
    const ConvexDomain dom(DomainSpec::from_json_file(domain_path));
    CalibrationConfig cfg;
    cfg.h_max = h_max;
    cfg.sample_count = samples;
    cfg.seed = seed;
    const PseudoCalibration cal = calibrate(dom, cfg);
    json j;
    j["c_quasi"] = cal.c_quasi;
    j["eps0"] = cal.eps0;
    j["sample_count"] = cal.sample_count;
    j["chart"] = cal.chart;
    emit(j.dump(2) + "\n", out);
    return 0;
}

int run_sandwich(const std::string& domain_path, int pairs, const std::string& grid_text,
                 std::uint64_t seed, const std::string& out) {
    const ConvexDomain dom(DomainSpec::from_json_file(domain_path));
    SandwichScanConfig cfg;
    cfg.pairs = pairs;
    cfg.depth_grid = parse_depth_grid(grid_text);
    cfg.seed = seed;
    if (pairs < 1) throw ConfigError("sandwich: --pairs must be >= 1");
    const std::vector<SandwichRow> rows = sandwich_scan(dom, cfg);

    const int n = dom.dim();
    std::vector<std::string> header{"pair_id", "h"};
    for (const auto& c : point_header("x", n)) header.push_back(c);
    for (const auto& c : point_header("y", n)) header.push_back(c);
    for (const char* c : {"delta_x", "delta_y", "M", "g", "K_lo", "K_up", "resid_lo",
                          "resid_hi", "case_tag"})
        header.push_back(c);
    CsvWriter w(header);
    for (const SandwichRow& row : rows) {
        w.cell(row.pair_id);
        w.cell(row.h);
        push_point(w, row.x);
        push_point(w, row.y);
        w.cell(row.delta_x);
        w.cell(row.delta_y);
        w.cell(row.m);
        w.cell(row.g);
        w.cell(row.k_lo);
        w.cell(row.k_up);
        w.cell(row.k_lo - row.g);
        w.cell(row.k_up - row.g);
        w.cell(row.case_tag);
        w.end_row();
    }
    emit(w.str(), out);
    return 0;
}

json report_of_buckets(const std::vector<double>& h, const std::vector<double>& v) {
    json j;
    json buckets = json::array();
    for (std::size_t i = 0; i < h.size(); ++i)
        buckets.push_back({{"h", h[i]}, {"value", v[i]}});
    j["buckets"] = buckets;
    std::vector<double> lx;
    for (double hh : h) lx.push_back(std::log(1.0 / hh));
    const auto slope = ols_slope(lx, v);
    if (slope)
        j["slope"] = *slope;
    else
        j["slope"] = nullptr;
    return j;
}

int run_hyp(const std::string& domain_path, int quadruples, int triangles,
            const std::string& grid_text, std::uint64_t seed, const std::string& out) {
    const ConvexDomain dom(DomainSpec::from_json_file(domain_path));
    if (quadruples < 1 && triangles < 1)
        throw ConfigError("hyp: need --quadruples or --triangles >= 1");
    ScanConfig cfg;
    cfg.depth_grid = parse_depth_grid(grid_text);
    cfg.seed = seed;

    std::vector<std::string> header{"sample_id", "kind", "h", "value_lo", "value_hi",
                                    "width_sum"};
    CsvWriter w(header);
    json summary;
    if (quadruples >= 1) {
        cfg.count = quadruples;
        std::vector<ScanRow> rows;
        const DefectReport rep = four_point_scan(dom, cfg, &rows);
        for (const ScanRow& r : rows) {
            w.cell(r.sample_id);
            w.cell("four_point");
            w.cell(r.h);
            w.cell(r.value_lo);
            w.cell(r.value_hi);
            w.cell(r.width_sum);
            w.end_row();
        }
        json rj = report_of_buckets(rep.bucket_h, rep.bucket_max);
        rj["q50"] = rep.q50;
        rj["q95"] = rep.q95;
        rj["q100"] = rep.q100;
        rj["width_mean"] = rep.width_mean;
        rj["width_max"] = rep.width_max;
        summary["four_point"] = rj;
    }
    if (triangles >= 1) {
        cfg.count = triangles;
        std::vector<ScanRow> rows;
        const DefectReport rep = thin_triangle_scan(dom, cfg, &rows);
        for (const ScanRow& r : rows) {
            w.cell(r.sample_id);
            w.cell("triangle");
            w.cell(r.h);
            w.cell(r.value_lo);
            w.cell(r.value_hi);
            w.cell(r.width_sum);
            w.end_row();
        }
        json rj = report_of_buckets(rep.bucket_h, rep.bucket_max);
        rj["q50"] = rep.q50;
        rj["q95"] = rep.q95;
        rj["q100"] = rep.q100;
        summary["triangle"] = rj;
    }
    emit(w.str(), out);
    const std::string summary_path =
        out.empty() || out == "-" ? std::string() : out + ".summary.json";
    emit(summary.dump(2) + "\n", summary_path);
    return 0;
}

int run_visual(const std::string& domain_path, const std::string& omega_text,
               const std::string& patch_center_text, double patch_radius, int pairs,
               std::uint64_t seed, const std::string& out) {
    const ConvexDomain dom(DomainSpec::from_json_file(domain_path));
    const int n = dom.dim();
    VisualConfig cfg;
    cfg.patch_radius = patch_radius;
    cfg.pairs = pairs;
    cfg.seed = seed;
    if (!omega_text.empty()) cfg.omega_point = parse_point(omega_text, n);
    if (!patch_center_text.empty()) {
        const CPoint c = parse_point(patch_center_text, n);
        cfg.patch_center_dir = c;
    }
    const std::vector<VisualRow> rows = visual_metric_scan(dom, cfg);

    std::vector<std::string> header = point_header("xi", n);
    for (const auto& c : point_header("eta", n)) header.push_back(c);
    for (std::size_t k = 0; k < cfg.fiber_h.size(); ++k)
        header.push_back("product_h" + std::to_string(k));
    for (const char* c : {"stable", "product", "m_matched", "ratio_exp1", "ratio_exp2"})
        header.push_back(c);
    CsvWriter w(header);
    int flagged = 0;
    std::vector<double> stable_ratio2;
    for (const VisualRow& row : rows) {
        push_point(w, row.xi);
        push_point(w, row.eta);
        for (double p : row.products) w.cell(p);
        w.cell(row.stable ? 1 : 0);
        w.cell(row.product);
        w.cell(row.m_matched);
        w.cell(row.ratio_exp1);
        w.cell(row.ratio_exp2);
        w.end_row();
        if (!row.stable)
            ++flagged;
        else
            stable_ratio2.push_back(row.ratio_exp2);
    }
    emit(w.str(), out);

    json summary;
    summary["pairs"] = pairs;
    summary["flagged"] = flagged;
    if (!stable_ratio2.empty()) {
        const Band band = ratio_band(stable_ratio2);
        summary["ratio_exp2_band"] = {{"min", band.lo}, {"max", band.hi}};
    } else {
        summary["ratio_exp2_band"] = nullptr;
    }
    const std::string summary_path =
        out.empty() || out == "-" ? std::string() : out + ".summary.json";
    emit(summary.dump(2) + "\n", summary_path);
    return 0;
}

int run_report(const std::string& input, const std::string& h_col, const std::string& stat_col,
               const std::string& agg, const std::string& out) {
    const CsvTable table = read_csv(input);
    const int hc = table.column(h_col);
    const int sc = table.column(stat_col);
    if (hc < 0) throw ConfigError("report: no column named '" + h_col + "'");
    if (sc < 0) throw ConfigError("report: no column named '" + stat_col + "'");

    // group rows by distinct depth value
    std::vector<double> hs;
    std::vector<std::vector<double>> groups;
    std::vector<double> all;
    for (const auto& row : table.rows) {
        const double h = row[static_cast<std::size_t>(hc)];
        const double v = row[static_cast<std::size_t>(sc)];
        if (!std::isfinite(h) || !std::isfinite(v)) continue;
        all.push_back(v);
        bool found = false;
        for (std::size_t g = 0; g < hs.size(); ++g) {
            if (hs[g] == h) {
                groups[g].push_back(v);
                found = true;
                break;
            }
        }
        if (!found) {
            hs.push_back(h);
            groups.push_back({v});
        }
    }
    if (all.empty()) throw ConfigError("report: no finite rows to aggregate");

    std::vector<double> stat;
    for (const auto& g : groups) {
        double v = g.front();
        for (double x : g) v = agg == "min" ? std::min(v, x) : std::max(v, x);
        stat.push_back(v);
    }

    json j = report_of_buckets(hs, stat);
    j["quantiles"] = {{"q50", quantile(all, 0.5)},
                      {"q95", quantile(all, 0.95)},
                      {"q100", quantile(all, 1.0)}};
    const Band band = ratio_band(all);
    j["band"] = {{"min", band.lo}, {"max", band.hi}};
    j["rows"] = all.size();
    emit(j.dump(2) + "\n", out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for boundary distance estimates on convex domains"};
    app.require_subcommand(1);

    std::string domain_path, out, q_text, x_text, y_text, method = "both";
    std::string grid_text = "1e-3:1e-5:geometric";
    std::string omega_text, patch_center_text;
    std::string input, h_col = "h", stat_col = "value_hi", agg = "max";
    std::vector<double> eps_list;
    std::uint64_t seed = 42;
    int pairs = 500, quadruples = 0, triangles = 0, samples = 1000;
    double h_max = 0.1, patch_radius = 0.2;

    auto* validate = app.add_subcommand("domain", "domain spec utilities");
    auto* validate_run = validate->add_subcommand("validate", "run the spec invariant checks");
    validate_run->add_option("--domain", domain_path)->required();

    auto* tau = app.add_subcommand("tau", "minimal-basis radii and frame");
    tau->add_option("--domain", domain_path)->required();
    tau->add_option("--q", q_text)->required();
    tau->add_option("--eps", eps_list)->required();
    tau->add_option("--out", out);

    auto* pseudo = app.add_subcommand("pseudo", "local pseudodistance, both routes");
    pseudo->add_option("--domain", domain_path)->required();
    pseudo->add_option("--x", x_text)->required();
    pseudo->add_option("--y", y_text)->required();
    pseudo->add_option("--method", method)->check(CLI::IsMember({"inf", "taylor", "both"}));
    pseudo->add_option("--out", out);

    auto* cal = app.add_subcommand("calibrate", "quasi-metric constant and exponent");
    cal->add_option("--domain", domain_path)->required();
    cal->add_option("--h-max", h_max);
    cal->add_option("--samples", samples);
    cal->add_option("--seed", seed);
    cal->add_option("--out", out);

    auto* sand = app.add_subcommand("sandwich", "two-sided distance bounds over a pair family");
    sand->add_option("--domain", domain_path)->required();
    sand->add_option("--pairs", pairs);
    sand->add_option("--depth-grid", grid_text);
    sand->add_option("--seed", seed);
    sand->add_option("--out", out);

    auto* hyp = app.add_subcommand("hyp", "hyperbolicity defect scans");
    hyp->add_option("--domain", domain_path)->required();
    hyp->add_option("--quadruples", quadruples);
    hyp->add_option("--triangles", triangles);
    hyp->add_option("--depth-grid", grid_text);
    hyp->add_option("--seed", seed);
    hyp->add_option("--out", out);

    auto* vis = app.add_subcommand("visual", "boundary visual-metric ratios");
    vis->add_option("--domain", domain_path)->required();
    vis->add_option("--omega", omega_text);
    vis->add_option("--patch-center", patch_center_text);
    vis->add_option("--patch-radius", patch_radius);
    vis->add_option("--pairs", pairs);
    vis->add_option("--seed", seed);
    vis->add_option("--out", out);

    auto* rep = app.add_subcommand("report", "summarize a scan CSV");
    rep->add_option("--input", input)->required();
    rep->add_option("--h-col", h_col);
    rep->add_option("--stat-col", stat_col);
    rep->add_option("--agg", agg)->check(CLI::IsMember({"max", "min"}));
    rep->add_option("--out", out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 3;
    }

    try {
        if (validate_run->parsed()) return run_domain_validate(domain_path);
        if (tau->parsed()) return run_tau(domain_path, q_text, eps_list, out);
        if (pseudo->parsed()) return run_pseudo(domain_path, x_text, y_text, method, out);
        if (cal->parsed()) return run_calibrate(domain_path, h_max, samples, seed, out);
        if (sand->parsed()) return run_sandwich(domain_path, pairs, grid_text, seed, out);
        if (hyp->parsed()) return run_hyp(domain_path, quadruples, triangles, grid_text, seed, out);
        if (vis->parsed())
            return run_visual(domain_path, omega_text, patch_center_text, patch_radius, pairs,
                              seed, out);
        if (rep->parsed()) return run_report(input, h_col, stat_col, agg, out);
        std::cerr << "no subcommand selected\n";
        return 3;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 4;
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 3;
    } catch (const ArgumentError& e) {
        std::cerr << "argument error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
