// cmpce: convergence studies, projection, evaluation, Sobol indices and grid export.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "cmpce/cmpce.hpp"

namespace {

using namespace cmpce;

struct Options {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::string orders;
    std::string map;
    std::optional<std::size_t> quad_nodes;
    std::optional<std::size_t> cv_samples;
    std::string surrogate;
    std::string points;
    std::string plot_data;
    std::string moments;
    std::optional<std::size_t> dimension;
};

unsigned thread_count() {
    const char* env = std::getenv("CMPCE_THREADS");
    if (env == nullptr || *env == '\0') return std::max(1u, std::thread::hardware_concurrency());
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1 || v > 1024) throw ArgumentError("CMPCE_THREADS must be an integer in 1..1024");
    return static_cast<unsigned>(v);
}

// ---- config ---------------------------------------------------------------

std::size_t json_count(const Json& j, const std::string& field, std::size_t min_value) {
    if (!j.is_number_integer() || j.get<long long>() < static_cast<long long>(min_value))
        throw ParseError("config field '" + field + "': expected an integer >= " + std::to_string(min_value));
    return j.get<std::size_t>();
}

std::vector<unsigned> parse_orders_text(const std::string& text, const std::string& field) {
    std::vector<unsigned> out;
    auto to_uint = [&](const std::string& s) {
        std::size_t used = 0;
        long v = -1;
        try {
            v = std::stol(s, &used);
        } catch (const std::exception&) {
        }
        if (used != s.size() || v < 0 || v > 200) throw ParseError(field + ": invalid order '" + s + "'");
        return static_cast<unsigned>(v);
    };
    if (const auto colon = text.find(':'); colon != std::string::npos) {
        const unsigned lo = to_uint(text.substr(0, colon));
        const unsigned hi = to_uint(text.substr(colon + 1));
        if (lo > hi) throw ParseError(field + ": empty order range '" + text + "'");
        for (unsigned p = lo; p <= hi; ++p) out.push_back(p);
        return out;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_uint(item));
    if (out.empty()) throw ParseError(field + ": no orders given");
    return out;
}

std::vector<unsigned> parse_orders(const Json& j) {
    if (j.is_string()) return parse_orders_text(j.get<std::string>(), "config field 'orders'");
    if (j.is_array() && !j.empty()) {
        std::vector<unsigned> out;
        for (const auto& v : j) out.push_back(static_cast<unsigned>(json_count(v, "orders", 0)));
        return out;
    }
    throw ParseError("config field 'orders': expected \"lo:hi\", \"a,b,c\" or an array of integers");
}

struct ModelConfig {
    std::string kind;
    std::size_t dimension = 1;
    std::optional<ParametricModel> analytic;
    // tabulated
    std::filesystem::path dir;
    std::filesystem::path file;
    std::filesystem::path cv_file;
    std::optional<Complex> ref_mean;
    std::optional<double> ref_std;
};

ModelConfig parse_model(const Json& cfg, const std::filesystem::path& base) {
    if (!cfg.contains("model")) throw ParseError("config: missing field 'model'");
    const Json& m = cfg["model"];
    const std::string where = "config field 'model'";
    if (!m.is_object() || !m.contains("kind") || !m["kind"].is_string())
        throw ParseError(where + ": expected an object with a string 'kind'");
    ModelConfig mc;
    mc.kind = m["kind"].get<std::string>();
    auto number = [&](const char* key, double fallback) {
        if (!m.contains(key)) return fallback;
        if (!m[key].is_number()) throw ParseError("config field 'model/" + std::string(key) + "': expected a number");
        return m[key].get<double>();
    };
    auto path_of = [&](const char* key) {
        if (!m[key].is_string()) throw ParseError("config field 'model/" + std::string(key) + "': expected a path");
        std::filesystem::path p = m[key].get<std::string>();
        return p.is_absolute() ? p : base / p;
    };
    try {
        if (mc.kind == "rlc") {
            RLCModel r;
            r.omega = number("omega", r.omega);
            r.u_e = number("u_e", r.u_e);
            r.C = number("C", r.C);
            r.R = number("R", r.R);
            r.L0 = number("L0", r.L0);
            r.dL = number("dL", r.dL);
            mc.analytic = rlc_model(r);
        } else if (mc.kind == "runge") {
            const std::size_t n = m.contains("dimension") ? json_count(m["dimension"], "model/dimension", 1) : 1;
            const double a = number("a", 6.25);
            mc.analytic = n == 1 ? runge_model(a) : runge_product_model(a, n);
        } else if (mc.kind == "interaction") {
            mc.analytic = ParametricModel{
                2, [](std::span<const double> y) { return Complex(y[0] + y[0] * y[1], 0.0); }, "y1+y1*y2"};
        } else if (mc.kind == "tabulated") {
            if (!m.contains("dimension")) throw ParseError("config: missing field 'model/dimension'");
            mc.dimension = json_count(m["dimension"], "model/dimension", 1);
            if (m.contains("dir")) mc.dir = path_of("dir");
            if (m.contains("file")) mc.file = path_of("file");
            if (m.contains("cv_file")) mc.cv_file = path_of("cv_file");
            if (m.contains("reference_mean"))
                mc.ref_mean = Complex(number("reference_mean", 0.0), number("reference_mean_imag", 0.0));
            if (m.contains("reference_std")) mc.ref_std = number("reference_std", 0.0);
            return mc;
        } else {
            throw ParseError(where + "/kind: unknown model '" + mc.kind + "' (rlc, runge, interaction, tabulated)");
        }
    } catch (const ArgumentError& e) {
        throw ParseError(where + ": " + e.what());
    }
    mc.dimension = mc.analytic->dimension;
    return mc;
}

JointDensity parse_density(const Json& cfg, std::size_t dimension) {
    if (cfg.contains("densities")) {
        const Json& d = cfg["densities"];
        if (!d.is_array() || d.size() != dimension)
            throw ParseError("config field 'densities': expected " + std::to_string(dimension) + " entries");
        std::vector<UnivariateDensity> out;
        for (std::size_t i = 0; i < d.size(); ++i)
            out.push_back(density_from_json(d[i], "config field 'densities/" + std::to_string(i) + "'"));
        return JointDensity(std::move(out));
    }
    if (cfg.contains("density")) return JointDensity::iid(density_from_json(cfg["density"], "config field 'density'"), dimension);
    return JointDensity::iid(UnivariateDensity::uniform(), dimension);
}

std::vector<std::string> split_names(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

// Map names in order of appearance; the config may hold "maps" (list) or "map".
std::vector<std::pair<std::string, ConformalMap1D>> parse_maps(const Json& cfg, const std::string& flag) {
    std::vector<std::pair<std::string, ConformalMap1D>> out;
    auto add = [&](const Json& j, const std::string& where) {
        const ConformalMap1D g = map_from_json(j, where);
        out.emplace_back(j.is_string() ? j.get<std::string>() : g.name(), g);
    };
    if (!flag.empty()) {
        for (const auto& name : split_names(flag)) add(Json(name), "--map");
    } else if (cfg.contains("maps")) {
        if (!cfg["maps"].is_array() || cfg["maps"].empty()) throw ParseError("config field 'maps': expected a non-empty array");
        for (std::size_t i = 0; i < cfg["maps"].size(); ++i) add(cfg["maps"][i], "config field 'maps/" + std::to_string(i) + "'");
    } else if (cfg.contains("map")) {
        add(cfg["map"], "config field 'map'");
    } else {
        add(Json("identity"), "map");
    }
    if (out.empty()) throw ParseError("--map: no map given");
    return out;
}

Json load_config(const std::string& path) {
    if (path.empty()) throw ArgumentError("--config is required");
    Json cfg = read_json_file(path);
    if (!cfg.is_object()) throw ParseError(path + ": expected a JSON object");
    return cfg;
}

std::filesystem::path config_dir(const std::string& path) {
    const auto parent = std::filesystem::path(path).parent_path();
    return parent.empty() ? std::filesystem::path(".") : parent;
}

std::size_t nodes_for(unsigned order, const Options& o, const Json& cfg) {
    if (o.quad_nodes) {
        if (*o.quad_nodes == 0) throw ArgumentError("--quad-nodes must be positive");
        return *o.quad_nodes;
    }
    if (cfg.contains("quad_nodes")) return json_count(cfg["quad_nodes"], "quad_nodes", 1);
    return order + 1;
}

std::uint64_t seed_of(const Options& o, const Json& cfg) {
    if (o.seed) return *o.seed;
    if (cfg.contains("seed")) {
        if (!cfg["seed"].is_number_unsigned() && !(cfg["seed"].is_number_integer() && cfg["seed"].get<long long>() >= 0))
            throw ParseError("config field 'seed': expected a nonnegative integer");
        return cfg["seed"].get<std::uint64_t>();
    }
    return 1;
}

std::size_t cv_samples_of(const Options& o, const Json& cfg) {
    if (o.cv_samples) {
        if (*o.cv_samples == 0) throw ArgumentError("--cv-samples must be positive");
        return *o.cv_samples;
    }
    if (cfg.contains("cv_samples")) return json_count(cfg["cv_samples"], "cv_samples", 1);
    return 1000;
}

class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty() && path != "-") {
            file_.open(path);
            if (!file_) throw ArgumentError("cannot write '" + path + "'");
        }
    }
    std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

private:
    std::ofstream file_;
};

std::string tabulated_name(const std::string& map, std::size_t nodes) {
    return map + "_n" + std::to_string(nodes) + ".csv";
}

// Surrogate built from either an analytic model or a tabulated grid file.
Surrogate build_surrogate(const ModelConfig& mc, const PCBasis& basis, std::size_t nodes, const std::filesystem::path& file,
                          unsigned threads) {
    if (mc.analytic) return project(*mc.analytic, basis, nodes, {threads});
    const TensorQuadrature grid = projection_grid(basis, nodes);
    if (!std::filesystem::exists(file)) throw IngestionError("tabulated model file '" + file.string() + "' not found");
    const TabulatedModel table = tabulated_from_csv(file.string(), grid);
    return project(table.as_model("tabulated:" + file.filename().string()), basis, nodes, {threads});
}

// "index,y1..yN,value_real,value_imag" rows at arbitrary points.
void read_point_values(const std::filesystem::path& path, std::size_t dim, std::vector<std::vector<double>>& points,
                       std::vector<Complex>& values) {
    std::ifstream in(path);
    if (!in) throw IngestionError("cannot open cross-validation file '" + path.string() + "'");
    std::string line;
    std::getline(in, line);
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto f = detail::split_csv_line(line);
        const std::string where = path.string() + " line " + std::to_string(line_no);
        if (f.size() != dim + 3) throw IngestionError(where + ": expected " + std::to_string(dim + 3) + " fields");
        std::vector<double> y(dim);
        for (std::size_t j = 0; j < dim; ++j) y[j] = detail::parse_number(f[1 + j], where);
        points.push_back(std::move(y));
        values.emplace_back(detail::parse_number(f[dim + 1], where), detail::parse_number(f[dim + 2], where));
    }
    if (points.empty()) throw IngestionError(path.string() + ": no cross-validation rows");
}

struct Reference {
    std::optional<Complex> mean;
    std::optional<double> std;
};

Reference reference_moments(const ModelConfig& mc, const JointDensity& density, const Json& cfg, unsigned threads) {
    Reference ref;
    if (!mc.analytic) {
        ref.mean = mc.ref_mean;
        ref.std = mc.ref_std;
        return ref;
    }
    std::size_t n = 200;
    if (mc.dimension > 1) n = static_cast<std::size_t>(std::floor(std::pow(1e6, 1.0 / static_cast<double>(mc.dimension))));
    n = std::min<std::size_t>(n, 200);
    if (cfg.contains("reference_nodes")) n = json_count(cfg["reference_nodes"], "reference_nodes", 1);
    std::vector<QuadratureRule1D> rules;
    for (const auto& d : density.factors()) rules.push_back(gauss_rule(d, n));
    const TensorQuadrature grid(std::move(rules));
    const auto values = evaluate_on_grid(*mc.analytic, grid, threads);
    Complex mean(0.0, 0.0);
    for (std::size_t k = 0; k < grid.size(); ++k) mean += grid.weight(k) * values[k];
    double var = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) var += grid.weight(k) * std::norm(values[k] - mean);
    ref.mean = mean;
    ref.std = std::sqrt(var);
    return ref;
}

std::optional<double> fitted_rate(const std::vector<unsigned>& orders, const std::vector<double>& errors, unsigned lo,
                                  unsigned hi) {
    try {
        return empirical_rate(orders, errors, lo, hi);
    } catch (const NumericalError&) {
        return std::nullopt;
    }
}

std::string format_optional(const std::optional<double>& v) { return v ? format_double(*v) : "nan"; }

// ---- subcommands -----------------------------------------------------------

int run_study(const Options& o) {
    const Json cfg = load_config(o.config);
    const auto base = config_dir(o.config);
    const ModelConfig mc = parse_model(cfg, base);
    const JointDensity density = parse_density(cfg, mc.dimension);
    const auto maps = parse_maps(cfg, o.map);
    std::vector<unsigned> orders;
    if (!o.orders.empty()) orders = parse_orders_text(o.orders, "--orders");
    else if (cfg.contains("orders")) orders = parse_orders(cfg["orders"]);
    else throw ParseError("config: missing field 'orders'");
    unsigned rate_lo = 4, rate_hi = 18;
    if (cfg.contains("rate_window")) {
        const Json& w = cfg["rate_window"];
        if (!w.is_array() || w.size() != 2) throw ParseError("config field 'rate_window': expected [lo, hi]");
        rate_lo = static_cast<unsigned>(json_count(w[0], "rate_window/0", 0));
        rate_hi = static_cast<unsigned>(json_count(w[1], "rate_window/1", 0));
    }
    const unsigned threads = thread_count();
    if (!mc.analytic && mc.dir.empty()) throw ParseError("config field 'model/dir': required for a tabulated study");

    std::vector<std::vector<double>> cv_points;
    std::vector<Complex> cv_values;
    if (mc.analytic) {
        cv_points = sample(density, cv_samples_of(o, cfg), seed_of(o, cfg));
        cv_values.resize(cv_points.size());
        for (std::size_t i = 0; i < cv_points.size(); ++i) {
            try {
                cv_values[i] = (*mc.analytic)(cv_points[i]);
            } catch (const std::exception& e) {
                throw ModelEvaluationError(i, e.what());
            }
        }
    } else if (!mc.cv_file.empty()) {
        read_point_values(mc.cv_file, mc.dimension, cv_points, cv_values);
    }
    const Reference ref = reference_moments(mc, density, cfg, threads);

    struct Row {
        unsigned order;
        std::size_t map;
        std::optional<double> cv, mean_err, std_err;
        std::size_t evaluations;
    };
    std::vector<Row> rows;
    std::vector<std::optional<double>> rates;
    for (std::size_t mi = 0; mi < maps.size(); ++mi) {
        const MultivariateMap g = MultivariateMap::uniform(maps[mi].second, mc.dimension);
        std::vector<unsigned> fit_orders;
        std::vector<double> fit_errors;
        for (unsigned p : orders) {
            const PCBasis basis = build_basis(density, g, p);
            const std::size_t nodes = nodes_for(p, o, cfg);
            const Surrogate s = build_surrogate(mc, basis, nodes, mc.dir / tabulated_name(maps[mi].first, nodes), threads);
            Row row{p, mi, std::nullopt, std::nullopt, std::nullopt, projection_grid(basis, nodes).size()};
            if (!cv_points.empty()) {
                double acc = 0.0;
                for (std::size_t i = 0; i < cv_points.size(); ++i) acc += std::norm(s(cv_points[i]) - cv_values[i]);
                row.cv = acc / static_cast<double>(cv_points.size());
                fit_orders.push_back(p);
                fit_errors.push_back(*row.cv);
            }
            if (ref.mean) row.mean_err = std::abs(mean(s) - *ref.mean);
            if (ref.std) row.std_err = std::abs(standard_deviation(s) - *ref.std);
            rows.push_back(row);
        }
        rates.push_back(fitted_rate(fit_orders, fit_errors, rate_lo, rate_hi));
    }

    Output out(o.out);
    std::ostream& os = out.stream();
    os << "order,map,cv_error,mean_error,std_error,model_evaluations,empirical_rate\n";
    for (const auto& r : rows)
        os << r.order << ',' << maps[r.map].first << ',' << format_optional(r.cv) << ',' << format_optional(r.mean_err) << ','
           << format_optional(r.std_err) << ',' << r.evaluations << ',' << format_optional(rates[r.map]) << '\n';

    if (!o.plot_data.empty()) {
        Output plot(o.plot_data);
        std::ostream& ps = plot.stream();
        ps << "curve,x,y\n";
        for (const char* what : {"cv_error", "mean_error", "std_error"})
            for (const auto& r : rows) {
                const auto& v = std::string(what) == "cv_error" ? r.cv : std::string(what) == "mean_error" ? r.mean_err : r.std_err;
                if (v) ps << what << ':' << maps[r.map].first << ',' << r.order << ',' << format_double(*v) << '\n';
            }
    }
    return 0;
}

Surrogate project_from_config(const Options& o) {
    const Json cfg = load_config(o.config);
    const ModelConfig mc = parse_model(cfg, config_dir(o.config));
    const JointDensity density = parse_density(cfg, mc.dimension);
    const auto maps = parse_maps(cfg, o.map);
    if (maps.size() != 1) throw ArgumentError("project builds one surrogate; give exactly one map");
    unsigned order = 0;
    if (!o.orders.empty()) {
        const auto list = parse_orders_text(o.orders, "--orders");
        if (list.size() != 1) throw ArgumentError("--orders: project takes a single order");
        order = list.front();
    } else if (cfg.contains("order")) {
        order = static_cast<unsigned>(json_count(cfg["order"], "order", 0));
    } else {
        throw ParseError("config: missing field 'order'");
    }
    const MultivariateMap g = MultivariateMap::uniform(maps.front().second, mc.dimension);
    const PCBasis basis = build_basis(density, g, order);
    const std::size_t nodes = nodes_for(order, o, cfg);
    std::filesystem::path file = mc.file;
    if (!mc.analytic && file.empty()) {
        if (mc.dir.empty()) throw ParseError("config field 'model/file': required for a tabulated projection");
        file = mc.dir / tabulated_name(maps.front().first, nodes);
    }
    return build_surrogate(mc, basis, nodes, file, thread_count());
}

int run_project(const Options& o) {
    if (o.out.empty()) throw ArgumentError("--out is required for project");
    save(project_from_config(o), o.out);
    return 0;
}

std::vector<std::vector<double>> read_points(std::istream& in, std::size_t dim) {
    std::vector<std::vector<double>> out;
    std::string line;
    std::size_t line_no = 0;
    bool indexed = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        auto f = detail::split_csv_line(line);
        if (line_no == 1 && !f.empty() && !f[0].empty() && !(std::isdigit(static_cast<unsigned char>(f[0][0])) || f[0][0] == '-' ||
                                                              f[0][0] == '+' || f[0][0] == '.')) {
            indexed = f[0] == "index";
            continue;
        }
        const std::string where = "points line " + std::to_string(line_no);
        const std::size_t first = indexed ? 1 : 0;
        if (f.size() < first + dim) throw ParseError(where + ": expected " + std::to_string(dim) + " coordinates");
        std::vector<double> y(dim);
        for (std::size_t j = 0; j < dim; ++j) {
            try {
                y[j] = detail::parse_number(f[first + j], where);
            } catch (const IngestionError& e) {
                throw ParseError(e.what());
            }
        }
        out.push_back(std::move(y));
    }
    return out;
}

int run_eval(const Options& o) {
    if (o.surrogate.empty()) throw ArgumentError("--surrogate is required for eval");
    const Surrogate s = load(o.surrogate);
    const std::size_t dim = s.basis().dimension();
    std::vector<std::vector<double>> points;
    if (o.points.empty() || o.points == "-") {
        points = read_points(std::cin, dim);
    } else {
        std::ifstream in(o.points);
        if (!in) throw ArgumentError("cannot open '" + o.points + "'");
        points = read_points(in, dim);
    }
    Output out(o.out);
    std::ostream& os = out.stream();
    os << "index";
    for (std::size_t j = 1; j <= dim; ++j) os << ",y" << j;
    os << ",value_real,value_imag\n";
    for (std::size_t i = 0; i < points.size(); ++i) {
        const Complex v = s(points[i]);
        os << i;
        for (double y : points[i]) os << ',' << format_double(y);
        os << ',' << format_double(v.real()) << ',' << format_double(v.imag()) << '\n';
    }
    return 0;
}

int run_sobol(const Options& o) {
    if (o.surrogate.empty() && o.config.empty()) throw ArgumentError("sobol needs --surrogate or --config");
    const Surrogate s = o.surrogate.empty() ? project_from_config(o) : load(o.surrogate);
    const auto indices = sobol_indices(s);
    Output out(o.out);
    write_sobol_csv(out.stream(), indices);
    if (!o.moments.empty()) {
        Output m(o.moments);
        write_moments_csv(m.stream(), s);
    }
    return 0;
}

int run_export_grid(const Options& o) {
    Json cfg = Json::object();
    std::size_t dim = 0;
    if (!o.config.empty()) {
        cfg = load_config(o.config);
        if (cfg.contains("model")) dim = parse_model(cfg, config_dir(o.config)).dimension;
        if (cfg.contains("dimension")) dim = json_count(cfg["dimension"], "dimension", 1);
    }
    if (o.dimension) dim = *o.dimension;
    if (dim == 0) throw ArgumentError("export-grid needs a dimension (--dimension or config)");
    const JointDensity density = parse_density(cfg, dim);
    const auto maps = parse_maps(cfg, o.map);
    if (maps.size() != 1) throw ArgumentError("export-grid takes exactly one map");
    std::size_t nodes = 0;
    if (o.quad_nodes) nodes = *o.quad_nodes;
    else if (cfg.contains("quad_nodes")) nodes = json_count(cfg["quad_nodes"], "quad_nodes", 1);
    else if (cfg.contains("order")) nodes = json_count(cfg["order"], "order", 0) + 1;
    if (nodes == 0) throw ArgumentError("export-grid needs --quad-nodes");
    std::vector<QuadratureRule1D> rules;
    for (std::size_t j = 0; j < dim; ++j) rules.push_back(mapped_rule(density[j], maps.front().second, nodes));
    Output out(o.out);
    write_grid_csv(out.stream(), TensorQuadrature(std::move(rules)));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cmpce: conformally mapped polynomial chaos surrogates"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, "JSON configuration file");
        sub->add_option("--out", o.out, "output file (default stdout)");
        sub->add_option("--map", o.map, "map name(s): identity, sausage9 (comma separated for study)");
        sub->add_option("--quad-nodes", o.quad_nodes, "quadrature nodes per dimension (default order+1)");
    };
    auto* study = app.add_subcommand("study", "convergence study over orders and maps");
    common(study);
    study->add_option("--seed", o.seed, "seed for cross-validation samples");
    study->add_option("--orders", o.orders, "orders, as lo:hi or a,b,c");
    study->add_option("--cv-samples", o.cv_samples, "number of cross-validation samples");
    study->add_option("--plot-data", o.plot_data, "write curve,x,y plot data to this file");

    auto* proj = app.add_subcommand("project", "build and save a surrogate");
    common(proj);
    proj->add_option("--orders", o.orders, "polynomial order");

    auto* ev = app.add_subcommand("eval", "evaluate a saved surrogate at points");
    ev->add_option("--surrogate", o.surrogate, "surrogate JSON file")->required();
    ev->add_option("--points", o.points, "CSV of points (default stdin)");
    ev->add_option("--out", o.out, "output file (default stdout)");

    auto* sob = app.add_subcommand("sobol", "Sobol indices of a surrogate");
    common(sob);
    sob->add_option("--surrogate", o.surrogate, "surrogate JSON file (instead of --config)");
    sob->add_option("--orders", o.orders, "polynomial order when projecting from --config");
    sob->add_option("--moments", o.moments, "also write mean/variance/std CSV here");

    auto* grid = app.add_subcommand("export-grid", "write projection nodes for an external solver");
    common(grid);
    grid->add_option("--dimension", o.dimension, "number of parameters");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (study->parsed()) return run_study(o);
        if (proj->parsed()) return run_project(o);
        if (ev->parsed()) return run_eval(o);
        if (sob->parsed()) return run_sobol(o);
        if (grid->parsed()) return run_export_grid(o);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.numerical() ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
