#include "mot/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mot/error.hpp"

namespace mot {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void parse_fail(const std::string& what) { throw Error(ErrorKind::Parse, what); }
[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorKind::Validation, what); }

const json* find(const json& obj, const char* key) {
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

const json& require_object(const json& parent, const char* key, const std::string& ctx) {
    const json* v = find(parent, key);
    if (!v) parse_fail("missing required key \"" + ctx + key + "\"");
    if (!v->is_object()) parse_fail("key \"" + ctx + key + "\" must be an object");
    return *v;
}

double get_number(const json& obj, const char* key, const std::string& ctx) {
    const json* v = find(obj, key);
    if (!v) parse_fail("missing required key \"" + ctx + key + "\"");
    if (!v->is_number()) parse_fail("key \"" + ctx + key + "\" must be a number");
    return v->get<double>();
}

double get_number_or(const json& obj, const char* key, const std::string& ctx, double fallback) {
    return find(obj, key) ? get_number(obj, key, ctx) : fallback;
}

std::size_t get_count(const json& obj, const char* key, const std::string& ctx) {
    const json* v = find(obj, key);
    if (!v) parse_fail("missing required key \"" + ctx + key + "\"");
    if (!v->is_number_integer()) parse_fail("key \"" + ctx + key + "\" must be an integer");
    const auto n = v->get<long long>();
    if (n < 0) invalid(ctx + key + " must be >= 0");
    return static_cast<std::size_t>(n);
}

std::string get_string(const json& obj, const char* key, const std::string& ctx) {
    const json* v = find(obj, key);
    if (!v) parse_fail("missing required key \"" + ctx + key + "\"");
    if (!v->is_string()) parse_fail("key \"" + ctx + key + "\" must be a string");
    return v->get<std::string>();
}

fs::path resolve(const fs::path& base, const std::string& p) {
    fs::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
}

void require_file(const fs::path& p, const std::string& key) {
    if (!fs::is_regular_file(p))
        throw Error(ErrorKind::Io, key + ": file \"" + p.string() + "\" does not exist");
}

std::string line_column(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t k = 0; k + 1 < byte && k < text.size(); ++k) {
        if (text[k] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

double parse_double(std::string_view s, const fs::path& path, std::size_t line) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
        std::ostringstream msg;
        msg << path.string() << ":" << line << ": cannot parse number \"" << s << "\"";
        throw Error(ErrorKind::Parse, msg.str());
    }
    return v;
}

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, "cannot write \"" + path.string() + "\"");
    return out;
}

} // namespace

RunConfig parse_config_text(const std::string& text, const fs::path& base_dir) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        parse_fail("config is not valid JSON at " + line_column(text, e.byte) + ": " + e.what());
    }
    if (!doc.is_object()) parse_fail("config root must be a JSON object");

    RunConfig cfg;

    const json& problem = require_object(doc, "problem", "");
    if (problem.size() != 1)
        parse_fail("\"problem\" must contain exactly one of gaussian, files, chain");
    if (const json* g = find(problem, "gaussian")) {
        if (!g->is_object()) parse_fail("key \"problem.gaussian\" must be an object");
        GaussianProblem gp;
        gp.mean0 = get_number(*g, "mean0", "problem.gaussian.");
        gp.sd0 = get_number(*g, "sd0", "problem.gaussian.");
        gp.mean1 = get_number(*g, "mean1", "problem.gaussian.");
        gp.sd1 = get_number(*g, "sd1", "problem.gaussian.");
        if (!(gp.sd0 > 0.0)) invalid("problem.gaussian.sd0 must be > 0");
        if (!(gp.sd1 > 0.0)) invalid("problem.gaussian.sd1 must be > 0");
        cfg.problem = gp;
    } else if (const json* f = find(problem, "files")) {
        if (!f->is_object()) parse_fail("key \"problem.files\" must be an object");
        FilesProblem fp{resolve(base_dir, get_string(*f, "rho0", "problem.files.")),
                        resolve(base_dir, get_string(*f, "rho1", "problem.files."))};
        require_file(fp.rho0, "problem.files.rho0");
        require_file(fp.rho1, "problem.files.rho1");
        cfg.problem = fp;
    } else if (const json* c = find(problem, "chain")) {
        if (!c->is_object()) parse_fail("key \"problem.chain\" must be an object");
        ChainProblem cp{resolve(base_dir, get_string(*c, "chain0", "problem.chain.")),
                        resolve(base_dir, get_string(*c, "chain1", "problem.chain."))};
        require_file(cp.chain0, "problem.chain.chain0");
        require_file(cp.chain1, "problem.chain.chain1");
        cfg.problem = cp;
    } else {
        parse_fail("\"problem\" must contain one of gaussian, files, chain");
    }

    const json& lat = require_object(doc, "lattice", "");
    cfg.lattice.nt = get_count(lat, "nt", "lattice.");
    cfg.lattice.nx = get_count(lat, "nx", "lattice.");
    cfg.lattice.x_lo = get_number(lat, "x_lo", "lattice.");
    cfg.lattice.x_hi = get_number(lat, "x_hi", "lattice.");
    if (cfg.lattice.nt < 3) invalid("lattice.nt must be >= 3");
    if (cfg.lattice.nx < 5) invalid("lattice.nx must be >= 5");
    if (!(cfg.lattice.x_lo < cfg.lattice.x_hi)) invalid("lattice.x_lo must be < lattice.x_hi");

    const json& cost = require_object(doc, "cost", "");
    cfg.gamma_bar = get_number(cost, "gamma_bar", "cost.");
    if (!(cfg.gamma_bar > 0.0)) invalid("cost.gamma_bar must be > 0");

    if (const json* s = find(doc, "solver")) {
        if (!s->is_object()) parse_fail("key \"solver\" must be an object");
        SolverConfig& sc = cfg.solver;
        sc.r = get_number_or(*s, "r", "solver.", sc.r);
        if (find(*s, "max_iter")) sc.max_iter = get_count(*s, "max_iter", "solver.");
        sc.res_tol = get_number_or(*s, "res_tol", "solver.", sc.res_tol);
        sc.lin_tol = get_number_or(*s, "lin_tol", "solver.", sc.lin_tol);
        if (find(*s, "init_scheme"))
            sc.init_scheme = parse_init_scheme(get_string(*s, "init_scheme", "solver."));
    }
    cfg.solver.validate();

    if (const json* o = find(doc, "output")) {
        if (!o->is_object()) parse_fail("key \"output\" must be an object");
        if (find(*o, "directory"))
            cfg.output.directory = resolve(base_dir, get_string(*o, "directory", "output."));
        cfg.output.mask_fraction =
            get_number_or(*o, "mask_fraction", "output.", cfg.output.mask_fraction);
    }
    if (!(cfg.output.mask_fraction > 0.0 && cfg.output.mask_fraction < 1.0))
        invalid("output.mask_fraction must lie in (0, 1)");
    cfg.solver.rho_mask_fraction = cfg.output.mask_fraction;
    return cfg;
}

RunConfig parse_config(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot read config \"" + path.string() + "\"");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path.parent_path());
}

json config_to_json(const RunConfig& config) {
    json doc;
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, GaussianProblem>) {
                doc["problem"]["gaussian"] = {
                    {"mean0", p.mean0}, {"sd0", p.sd0}, {"mean1", p.mean1}, {"sd1", p.sd1}};
            } else if constexpr (std::is_same_v<T, FilesProblem>) {
                doc["problem"]["files"] = {{"rho0", p.rho0.string()}, {"rho1", p.rho1.string()}};
            } else {
                doc["problem"]["chain"] = {{"chain0", p.chain0.string()},
                                           {"chain1", p.chain1.string()}};
            }
        },
        config.problem);
    doc["lattice"] = {{"nt", config.lattice.nt},
                      {"nx", config.lattice.nx},
                      {"x_lo", config.lattice.x_lo},
                      {"x_hi", config.lattice.x_hi}};
    doc["cost"] = {{"gamma_bar", config.gamma_bar}};
    doc["solver"] = {{"r", config.solver.r},
                     {"max_iter", config.solver.max_iter},
                     {"res_tol", config.solver.res_tol},
                     {"lin_tol", config.solver.lin_tol},
                     {"init_scheme", to_string(config.solver.init_scheme)}};
    doc["output"] = {{"directory", config.output.directory.string()},
                     {"mask_fraction", config.output.mask_fraction}};
    return doc;
}

DensityPair load_densities(const RunConfig& config, std::vector<std::string>* warnings) {
    const Lattice lattice = config.lattice.build();
    return std::visit(
        [&](const auto& p) -> DensityPair {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, GaussianProblem>) {
                return DensityPair(lattice, gaussian_density(lattice, p.mean0, p.sd0, warnings),
                                   gaussian_density(lattice, p.mean1, p.sd1, warnings));
            } else if constexpr (std::is_same_v<T, FilesProblem>) {
                return DensityPair(lattice, resample_density(read_density(p.rho0), lattice),
                                   resample_density(read_density(p.rho1), lattice));
            } else {
                const TwoColumn c0 = read_chain(p.chain0);
                const TwoColumn c1 = read_chain(p.chain1);
                return DensityPair(lattice, density_from_calls(c0.first, c0.second, lattice),
                                   density_from_calls(c1.first, c1.second, lattice));
            }
        },
        config.problem);
}

std::string format_double(double v) {
    char buf[40];
    const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf, static_cast<std::size_t>(n));
}

TwoColumn read_two_column_csv(const fs::path& path, const std::string& header) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot read \"" + path.string() + "\"");
    std::string line;
    if (!std::getline(in, line))
        throw Error(ErrorKind::Parse, path.string() + ": empty file, expected header " + header);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != header)
        throw Error(ErrorKind::Parse,
                    path.string() + ":1: expected header \"" + header + "\", got \"" + line + "\"");
    TwoColumn out;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
            std::ostringstream msg;
            msg << path.string() << ":" << lineno << ": expected two comma-separated values";
            throw Error(ErrorKind::Parse, msg.str());
        }
        const std::string_view view(line);
        out.first.push_back(parse_double(view.substr(0, comma), path, lineno));
        out.second.push_back(parse_double(view.substr(comma + 1), path, lineno));
    }
    return out;
}

TwoColumn read_chain(const fs::path& path) { return read_two_column_csv(path, "strike,price"); }
TwoColumn read_density(const fs::path& path) { return read_two_column_csv(path, "x,rho"); }

Row resample_density(const TwoColumn& samples, const Lattice& lattice) {
    const auto& xs = samples.first;
    const auto& ys = samples.second;
    if (xs.size() < 2) throw Error(ErrorKind::Validation, "density file needs at least 2 rows");
    for (std::size_t k = 1; k < xs.size(); ++k)
        if (!(xs[k] > xs[k - 1]))
            throw Error(ErrorKind::Validation, "density x values must be strictly increasing");
    for (double y : ys)
        if (y < 0.0) throw Error(ErrorKind::Validation, "density values must be nonnegative");

    Row out = Row::Zero(static_cast<Eigen::Index>(lattice.nx()));
    // Relative slack so grids that coincide up to rounding still match at the ends.
    const double slack = 1e-12 * std::max(1.0, std::abs(xs.back() - xs.front()));
    for (std::size_t i = 0; i < lattice.nx(); ++i) {
        const double x = lattice.x(i);
        if (x < xs.front() - slack || x > xs.back() + slack) continue;
        const double xc = std::clamp(x, xs.front(), xs.back());
        auto it = std::upper_bound(xs.begin(), xs.end(), xc);
        std::size_t hi = static_cast<std::size_t>(it - xs.begin());
        if (hi >= xs.size()) {
            out(static_cast<Eigen::Index>(i)) = ys.back();
            continue;
        }
        const std::size_t lo = hi - 1;
        const double w = (xc - xs[lo]) / (xs[hi] - xs[lo]);
        out(static_cast<Eigen::Index>(i)) = (1.0 - w) * ys[lo] + w * ys[hi];
    }
    if (!(integrate_x(out, lattice) > 0.0))
        throw Error(ErrorKind::DegenerateDensity, "density file has no mass on the lattice");
    return normalize(out, lattice);
}

void write_chain(const fs::path& path, const std::vector<double>& strikes,
                 const std::vector<double>& prices) {
    std::ofstream out = open_out(path);
    out << "strike,price\n";
    for (std::size_t k = 0; k < strikes.size(); ++k)
        out << format_double(strikes[k]) << ',' << format_double(prices[k]) << '\n';
}

void write_density(const fs::path& path, const Lattice& lattice, const Row& rho) {
    std::ofstream out = open_out(path);
    out << "x,rho\n";
    for (std::size_t i = 0; i < lattice.nx(); ++i)
        out << format_double(lattice.x(i)) << ','
            << format_double(rho(static_cast<Eigen::Index>(i))) << '\n';
}

void write_rho(const fs::path& path, const Field& rho) {
    const Lattice& l = rho.lattice();
    std::ofstream out = open_out(path);
    out << "t,x,rho\n";
    for (std::size_t j = 0; j < l.nt(); ++j)
        for (std::size_t i = 0; i < l.nx(); ++i)
            out << format_double(l.t(j)) << ',' << format_double(l.x(i)) << ','
                << format_double(rho(j, i)) << '\n';
}

void write_surface(const fs::path& path, const VolSurface& surface) {
    const Lattice& l = surface.rho.lattice();
    std::ofstream out = open_out(path);
    out << "t,x,rho,m,sigma2,masked\n";
    for (std::size_t j = 0; j < l.nt(); ++j) {
        for (std::size_t i = 0; i < l.nx(); ++i) {
            const bool reliable = surface.reliable(j, i);
            out << format_double(l.t(j)) << ',' << format_double(l.x(i)) << ','
                << format_double(surface.rho(j, i)) << ',' << format_double(surface.m(j, i))
                << ',';
            if (reliable)
                out << format_double(surface.sigma2(static_cast<Eigen::Index>(j),
                                                    static_cast<Eigen::Index>(i)));
            out << ',' << (reliable ? 0 : 1) << '\n';
        }
    }
}

void write_residuals(const fs::path& path, const RunReport& report) {
    std::ofstream out = open_out(path);
    out << "iter,residual,primal_gap\n";
    for (const IterationRecord& rec : report.residual_history)
        out << rec.iteration << ',' << format_double(rec.residual) << ','
            << format_double(rec.primal_gap) << '\n';
}

} // namespace mot
