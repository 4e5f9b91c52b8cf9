#include "wbary/cli.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "wbary/analysis.hpp"
#include "wbary/barycenter.hpp"
#include "wbary/error.hpp"
#include "wbary/estimation.hpp"
#include "wbary/io.hpp"
#include "wbary/stats.hpp"
#include "wbary/transport.hpp"

namespace wbary {
namespace {

struct LoadedGroups {
    std::vector<std::string> names;
    std::vector<DiscreteMeasure> measures;
};

bool looks_like_json(const std::string& text) {
    for (const char ch : text) {
        if (std::isspace(static_cast<unsigned char>(ch))) continue;
        return ch == '{';
    }
    return false;
}

/// CSV groups merge by label across files; each measure JSON file stands alone
/// under its path.
LoadedGroups load_groups(const std::vector<std::string>& paths) {
    std::vector<std::string> order;
    std::map<std::string, std::vector<Eigen::RowVectorXd>> rowsets;
    std::map<std::string, DiscreteMeasure> fixed;
    auto seen = [&](const std::string& name) { return rowsets.count(name) || fixed.count(name); };

    for (const std::string& path : paths) {
        const std::string text = read_text(path);
        if (looks_like_json(text)) {
            const MeasureFile mf = parse_measure_json(text, path);
            std::string name = path;
            while (seen(name)) name += "#";
            order.push_back(name);
            fixed.emplace(name, mf.discrete ? *mf.discrete
                                            : to_discrete(Measure1D::from_grid(*mf.grid)));
        } else {
            const Table t = parse_csv(text, path);
            std::string lone = path;
            if (!t.has_group)
                while (seen(lone)) lone += "#";
            for (Eigen::Index r = 0; r < t.values.rows(); ++r) {
                const std::string& name = t.has_group ? t.group[r] : lone;
                require(!fixed.count(name), "ConfigError",
                        "group '" + name + "' mixes a measure file with observations");
                if (!rowsets.count(name)) order.push_back(name);
                rowsets[name].push_back(t.values.row(r));
            }
        }
    }

    LoadedGroups out;
    for (const std::string& name : order) {
        out.names.push_back(name);
        const auto fx = fixed.find(name);
        if (fx != fixed.end()) {
            out.measures.push_back(fx->second);
            continue;
        }
        const auto& rows = rowsets.at(name);
        Eigen::MatrixXd points(rows.size(), rows.front().size());
        for (std::size_t r = 0; r < rows.size(); ++r) {
            require(rows[r].size() == points.cols(), "ConfigError",
                    "group '" + name + "' has inconsistent dimension");
            points.row(static_cast<Eigen::Index>(r)) = rows[r];
        }
        out.measures.push_back(make_discrete(std::move(points)));
    }
    return out;
}

std::vector<Measure1D> as_1d(const LoadedGroups& g) {
    std::vector<Measure1D> out;
    out.reserve(g.measures.size());
    for (std::size_t j = 0; j < g.measures.size(); ++j) {
        require(g.measures[j].dim() == 1, "ConfigError",
                "group '" + g.names[j] + "' is not one-dimensional");
        out.push_back(to_measure1d(g.measures[j]));
    }
    return out;
}

Eigen::VectorXd resolve_weights(const std::vector<double>& given, std::size_t count) {
    const auto n = static_cast<Eigen::Index>(count);
    if (given.empty()) return Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(count));
    require(given.size() == count, "ConfigError",
            "expected " + std::to_string(count) + " weights, got " + std::to_string(given.size()));
    Eigen::VectorXd w(n);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        require(given[i] > 0.0, "ConfigError", "weights must be positive");
        w(i) = given[i];
        sum += given[i];
    }
    require(std::abs(sum - 1.0) <= 1e-9, "ConfigError", "weights must sum to 1");
    return w;
}

void check_grid(int m) { require(m >= 2, "ConfigError", "grid size must be at least 2"); }

void write_output(const std::string& out, const std::string& text) {
    if (out == "-") {
        std::cout << text;
    } else {
        write_text(out, text);
    }
}

/// foo.json -> foo<ext>; extensionless paths get <ext> appended.
std::string sibling_path(const std::string& path, const std::string& ext) {
    const std::size_t slash = path.find_last_of("/\\");
    const std::size_t dot = path.find_last_of('.');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path + ext;
    return path.substr(0, dot) + ext;
}

std::string json_string(const std::string& s) {
    std::string out = "\"";
    for (const char ch : s) {
        switch (ch) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\r': out += "\\r"; break;
        case '\t': out += "\\t"; break;
        default:
            if (static_cast<unsigned char>(ch) < 0x20) {
                char buf[8];
                std::snprintf(buf, sizeof buf, "\\u%04x", static_cast<unsigned char>(ch));
                out += buf;
            } else {
                out += ch;
            }
        }
    }
    out += '"';
    return out;
}

double parse_bandwidth(const std::string& s) {
    if (s == "1/n") return -1.0;
    const char* begin = s.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    require(!s.empty() && end == begin + s.size() && std::isfinite(v) && v >= 0.0, "ConfigError",
            "bandwidth must be a nonnegative number or 1/n");
    return v;
}

DeformationProcess::Family parse_family(const std::string& s) {
    if (s == "scale_location") return DeformationProcess::Family::scale_location;
    if (s == "product_increasing") return DeformationProcess::Family::product_increasing;
    if (s == "radial") return DeformationProcess::Family::radial;
    fail("ConfigError", "unknown family '" + s + "'");
}

/// 20 standard normal quantiles at midpoint levels, the demo template.
Measure1D default_template() {
    std::vector<double> xs(20);
    for (int i = 0; i < 20; ++i) xs[i] = norm_quantile((i + 0.5) / 20.0);
    return Measure1D::from_atoms(std::move(xs), std::vector<double>(20, 0.05));
}

struct CommonOpts {
    std::vector<std::string> inputs;
    std::vector<double> weights;
    int grid_m = 512;
    std::string out = "-";
};

void run_barycenter(const CommonOpts& o) {
    check_grid(o.grid_m);
    const std::vector<Measure1D> ms = as_1d(load_groups(o.inputs));
    const Eigen::VectorXd w = resolve_weights(o.weights, ms.size());
    const Measure1D bary = iterated_barycenter(ms, w);
    write_output(o.out, quantile_grid_json(to_quantile_grid(bary, o.grid_m)));
}

void run_template(const CommonOpts& o, const std::string& bandwidth, std::uint64_t seed) {
    check_grid(o.grid_m);
    const LoadedGroups g = load_groups(o.inputs);
    require(!g.measures.empty(), "ConfigError", "no input groups");
    TemplateConfig cfg;
    cfg.bandwidth = parse_bandwidth(bandwidth);
    cfg.grid_m = o.grid_m;
    cfg.seed = seed;
    if (!o.weights.empty()) cfg.weights = resolve_weights(o.weights, g.measures.size());
    const Eigen::Index d = g.measures.front().dim();
    for (std::size_t j = 0; j < g.measures.size(); ++j) {
        require(g.measures[j].dim() == d, "ConfigError",
                "group '" + g.names[j] + "' has mismatched dimension");
    }
    if (d == 1) {
        const Measure1D tmpl = template_estimate(g.measures, cfg);
        write_output(o.out, quantile_grid_json(to_quantile_grid(tmpl, o.grid_m)));
    } else {
        write_output(o.out, discrete_json(template_estimate_nd(g.measures, cfg)));
    }
}

void run_equalize(const std::string& input, const std::vector<double>& weights,
                  const std::string& out) {
    const std::string text = read_text(input);
    require(!looks_like_json(text), "ConfigError", "equalize takes a CSV of observations");
    const Table t = parse_csv(text, input);
    require(t.has_group, "ConfigError", "equalize needs a group column");

    std::vector<std::string> names;
    std::map<std::string, std::vector<Eigen::Index>> members;
    for (Eigen::Index r = 0; r < t.values.rows(); ++r) {
        if (!members.count(t.group[r])) names.push_back(t.group[r]);
        members[t.group[r]].push_back(r);
    }
    const Eigen::VectorXd w = resolve_weights(weights, names.size());

    Table eq;
    eq.has_group = true;
    eq.group = t.group;
    eq.columns = t.columns;
    for (const std::string& col : t.columns) eq.columns.push_back("eq_" + col);
    const Eigen::Index d = t.values.cols();
    eq.values.resize(t.values.rows(), 2 * d);
    eq.values.leftCols(d) = t.values;

    // product model: each score coordinate is equalized independently
    for (Eigen::Index c = 0; c < d; ++c) {
        std::vector<Measure1D> groups;
        groups.reserve(names.size());
        for (const std::string& name : names) {
            const auto& rows = members.at(name);
            std::vector<double> xs(rows.size());
            for (std::size_t i = 0; i < rows.size(); ++i) xs[i] = t.values(rows[i], c);
            groups.push_back(Measure1D::from_atoms(
                std::move(xs), std::vector<double>(rows.size(), 1.0 / rows.size())));
        }
        const Measure1D bary = iterated_barycenter(groups, w);
        for (std::size_t j = 0; j < names.size(); ++j) {
            const MonotoneMap1D to_bary = brenier_map_1d(groups[j], bary);
            for (const Eigen::Index r : members.at(names[j])) {
                eq.values(r, d + c) = to_bary(t.values(r, c));
            }
        }
    }
    write_output(out, format_table(eq));
}

void run_pca(const CommonOpts& o, int components) {
    check_grid(o.grid_m);
    require(components >= 1, "ConfigError", "component count must be positive");
    const LoadedGroups g = load_groups(o.inputs);
    const std::vector<Measure1D> ms = as_1d(g);
    const Eigen::VectorXd w = resolve_weights(o.weights, ms.size());
    const Measure1D bary = iterated_barycenter(ms, w);
    const PcaResult res = geodesic_pca(ms, bary, components, o.grid_m);

    std::string json = "{\"schema\":1,\"kind\":\"pca\",\"groups\":[";
    for (std::size_t j = 0; j < g.names.size(); ++j) {
        if (j > 0) json += ',';
        json += json_string(g.names[j]);
    }
    json += "],\"grid\":" + json_array(res.barycenter.values);
    json += ",\"eigenvalues\":" + json_array(res.eigenvalues);
    json += ",\"scores\":" + json_rows(res.scores);
    json += ",\"components\":" + json_rows(res.components);
    json += ",\"validity\":[";
    for (std::size_t i = 0; i < res.validity.size(); ++i) {
        if (i > 0) json += ',';
        json += "{\"t_min\":" + json_number(res.validity[i].t_min) +
                ",\"t_max\":" + json_number(res.validity[i].t_max) + "}";
    }
    json += "]}\n";
    write_output(o.out, json);

    if (o.out != "-") {
        Table scores;
        scores.has_group = true;
        scores.group = g.names;
        for (int c = 0; c < components; ++c) scores.columns.push_back("score" + std::to_string(c + 1));
        scores.values = res.scores;
        write_text(sibling_path(o.out, "_scores.csv"), format_table(scores));
    }
}

void run_cluster(const CommonOpts& o) {
    check_grid(o.grid_m);
    const LoadedGroups g = load_groups(o.inputs);
    const std::vector<Measure1D> ms = as_1d(g);
    const Eigen::VectorXd w = resolve_weights(o.weights, ms.size());
    const Measure1D bary = iterated_barycenter(ms, w);
    Table t;
    t.has_group = true;
    t.group = g.names;
    t.columns = {"w2sq"};
    t.values = discriminant_features(bary, ms, o.grid_m);
    write_output(o.out, format_table(t));
}

struct SimulateOpts {
    std::string family = "scale_location";
    double spread = 0.1;
    bool antithetic = false;
    std::vector<int> j_values;
    int reps = 50;
    int n = 0;
    int grid_m = 512;
    std::uint64_t seed = 0;
    double threshold = 0.05;
    std::string template_path;
    std::string out = "-";
};

void run_simulate(const SimulateOpts& o) {
    check_grid(o.grid_m);
    require(o.reps >= 1, "ConfigError", "reps must be positive");
    require(o.n >= 0, "ConfigError", "n must be nonnegative");
    Measure1D tmpl = default_template();
    if (!o.template_path.empty()) {
        const std::string text = read_text(o.template_path);
        if (looks_like_json(text)) {
            const MeasureFile mf = parse_measure_json(text, o.template_path);
            if (mf.grid) {
                tmpl = Measure1D::from_grid(*mf.grid);
            } else {
                require(mf.discrete->dim() == 1, "ConfigError", "template must be one-dimensional");
                tmpl = to_measure1d(*mf.discrete);
            }
        } else {
            const Table t = parse_csv(text, o.template_path);
            require(t.values.cols() == 1, "ConfigError", "template must be one-dimensional");
            tmpl = to_measure1d(make_discrete(t.values));
        }
    }

    DeformationProcess proc;
    proc.family = parse_family(o.family);
    proc.spread = o.spread;
    proc.seed = o.seed;
    proc.antithetic = o.antithetic;
    proc.domain_lo = std::min(proc.domain_lo, std::floor(tmpl.min_support()) - 1.0);
    proc.domain_hi = std::max(proc.domain_hi, std::ceil(tmpl.max_support()) + 1.0);

    ExperimentConfig cfg;
    if (!o.j_values.empty()) cfg.j_values = o.j_values;
    cfg.replicates = o.reps;
    cfg.samples_per_group = o.n;
    cfg.grid_m = o.grid_m;
    cfg.exceed_threshold = o.threshold;

    const ExperimentReport rep = consistency_experiment(tmpl, proc, cfg);

    const auto cols = static_cast<Eigen::Index>(cfg.j_values.size());
    Table rows;
    rows.columns = {"J", "rep", "error"};
    rows.values.resize(cfg.replicates * cols, 3);
    Eigen::Index at = 0;
    for (Eigen::Index c = 0; c < cols; ++c) {
        for (int r = 0; r < cfg.replicates; ++r, ++at) {
            rows.values(at, 0) = cfg.j_values[c];
            rows.values(at, 1) = r;
            rows.values(at, 2) = rep.errors(r, c);
        }
    }
    write_output(o.out, format_table(rows));

    if (o.out != "-") {
        Table summary;
        summary.columns = {"J", "mean", "median", "q90", "exceed"};
        summary.values.resize(cols, 5);
        for (Eigen::Index c = 0; c < cols; ++c) {
            summary.values(c, 0) = cfg.j_values[c];
            summary.values(c, 1) = rep.mean_error(c);
            summary.values(c, 2) = rep.median_error(c);
            summary.values(c, 3) = rep.q90_error(c);
            summary.values(c, 4) = rep.exceed_freq(c);
        }
        write_text(sibling_path(o.out, "_summary.csv"), format_table(summary));
    }
}

int exit_code_for(const Error& e) {
    if (e.code() == "ParseError") return 2;
    if (e.code() == "ConfigError" || e.code() == "IoError") return 4;
    return 3;
}

} // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"2-Wasserstein barycenters, warped-template estimation, and geodesic PCA"};
    app.require_subcommand(1);

    CommonOpts bary;
    CLI::App* cmd_bary = app.add_subcommand("barycenter", "Iterated barycenter of the input groups");
    cmd_bary->add_option("inputs", bary.inputs, "CSV score files or measure JSON files")->required();
    cmd_bary->add_option("--weights", bary.weights, "group weights, positive and summing to 1")
        ->delimiter(',');
    cmd_bary->add_option("--grid", bary.grid_m, "quantile grid size");
    cmd_bary->add_option("--out", bary.out, "output path, - for stdout");

    CommonOpts tpl;
    std::string tpl_bandwidth = "1/n";
    std::uint64_t tpl_seed = 0;
    CLI::App* cmd_tpl =
        app.add_subcommand("template", "Template estimate from smoothed group measures");
    cmd_tpl->add_option("inputs", tpl.inputs, "CSV score files or measure JSON files")->required();
    cmd_tpl->add_option("--weights", tpl.weights, "group weights")->delimiter(',');
    cmd_tpl->add_option("--grid", tpl.grid_m, "quantile grid size");
    cmd_tpl->add_option("--bandwidth", tpl_bandwidth, "smoothing variance, a number or 1/n");
    cmd_tpl->add_option("--seed", tpl_seed, "sampling seed (dimension >= 2 smoothing)");
    cmd_tpl->add_option("--out", tpl.out, "output path, - for stdout");

    std::string eq_input;
    std::vector<double> eq_weights;
    std::string eq_out = "-";
    CLI::App* cmd_eq =
        app.add_subcommand("equalize", "Push every observation through its group-to-barycenter map");
    cmd_eq->add_option("input", eq_input, "CSV with a group column")->required();
    cmd_eq->add_option("--weights", eq_weights, "group weights")->delimiter(',');
    cmd_eq->add_option("--out", eq_out, "output path, - for stdout");

    CommonOpts pca;
    int pca_components = 2;
    CLI::App* cmd_pca = app.add_subcommand("pca", "Geodesic PCA of the groups about their barycenter");
    cmd_pca->add_option("inputs", pca.inputs, "CSV score files or measure JSON files")->required();
    cmd_pca->add_option("--weights", pca.weights, "barycenter weights")->delimiter(',');
    cmd_pca->add_option("--grid", pca.grid_m, "quantile grid size");
    cmd_pca->add_option("--components", pca_components, "number of principal components");
    cmd_pca->add_option("--out", pca.out, "output path, - for stdout");

    CommonOpts clu;
    CLI::App* cmd_clu =
        app.add_subcommand("cluster", "Squared distances to the barycenter, one per group");
    cmd_clu->add_option("inputs", clu.inputs, "CSV score files or measure JSON files")->required();
    cmd_clu->add_option("--weights", clu.weights, "barycenter weights")->delimiter(',');
    cmd_clu->add_option("--grid", clu.grid_m, "quantile grid size");
    cmd_clu->add_option("--out", clu.out, "output path, - for stdout");

    SimulateOpts sim;
    CLI::App* cmd_sim =
        app.add_subcommand("simulate", "Barycenter consistency experiment under random warps");
    cmd_sim->add_option("--family", sim.family, "scale_location, product_increasing, or radial");
    cmd_sim->add_option("--spread", sim.spread, "deformation spread");
    cmd_sim->add_flag("--antithetic", sim.antithetic, "pair draws so each pair averages to identity");
    cmd_sim->add_option("--J", sim.j_values, "group counts, e.g. 4,16,64")->delimiter(',');
    cmd_sim->add_option("--reps", sim.reps, "replicates per group count");
    cmd_sim->add_option("--n", sim.n, "samples per group, 0 for exact pushforwards");
    cmd_sim->add_option("--grid", sim.grid_m, "quantile grid size");
    cmd_sim->add_option("--seed", sim.seed, "process seed");
    cmd_sim->add_option("--threshold", sim.threshold, "exceedance threshold");
    cmd_sim->add_option("--template", sim.template_path, "template measure file (default built-in)");
    cmd_sim->add_option("--out", sim.out, "output path, - for stdout");

    try {
        app.parse(argc, argv);
        if (cmd_bary->parsed()) run_barycenter(bary);
        if (cmd_tpl->parsed()) run_template(tpl, tpl_bandwidth, tpl_seed);
        if (cmd_eq->parsed()) run_equalize(eq_input, eq_weights, eq_out);
        if (cmd_pca->parsed()) run_pca(pca, pca_components);
        if (cmd_clu->parsed()) run_cluster(clu);
        if (cmd_sim->parsed()) run_simulate(sim);
        return 0;
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 4;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

} // namespace wbary
