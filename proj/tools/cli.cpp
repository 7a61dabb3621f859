#include "cli.hpp"

#include "smoothing.hpp"

#include "esocp/format.hpp"
#include "esocp/model.hpp"
#include "esocp/perpetual.hpp"
#include "esocp/pricer_full.hpp"
#include "esocp/pricer_partial.hpp"
#include "esocp/simulate.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>

namespace esocp::cli {

namespace {

namespace fs = std::filesystem;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Inline parameter flags. The prior y0 is handled by the --y0 list instead.
constexpr std::array<const char*, 8> kParamKeys = {"mu0", "mu1", "sigma", "lambda", "r", "strike", "maturity", "spot"};

struct Config {
    std::string command;
    std::string params_file;
    std::array<std::optional<std::string>, kParamKeys.size()> inline_params;
    int steps = 2500;
    int grid = 250;
    std::vector<int> grids;
    std::vector<std::string> priors;
    std::uint64_t seed = 42;
    std::size_t paths = 1000;
    std::size_t export_paths = 4;
    std::optional<std::string> regime_prior;
    std::vector<int> n_sweep;
    std::vector<int> l_sweep;
    std::vector<std::string> mu0_grid;
    std::vector<std::string> mu1_grid;
    std::vector<std::string> sigma_grid;
    std::vector<std::string> lambda_grid;
    double x_min = 0.0;
    std::optional<double> x_max;
    int x_points = 101;
    std::string out_dir;
    bool literal = false;
    bool smooth = false;
    int smooth_degree = 6;
};

// ---------------------------------------------------------------- parsing helpers

double number_or_usage(const std::string& text, const std::string& what) {
    try {
        return parse_number(text);
    } catch (const std::invalid_argument&) {
        throw UsageError("invalid value for " + what + ": '" + text + "'");
    }
}

std::vector<double> numbers(const std::vector<std::string>& texts, const std::string& what) {
    std::vector<double> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(number_or_usage(t, what));
    return out;
}

double ModelParams::*param_member(std::string_view key) {
    if (key == "mu0") return &ModelParams::mu0;
    if (key == "mu1") return &ModelParams::mu1;
    if (key == "sigma") return &ModelParams::sigma;
    if (key == "lambda") return &ModelParams::lambda;
    if (key == "r") return &ModelParams::r;
    if (key == "strike") return &ModelParams::strike;
    if (key == "maturity") return &ModelParams::maturity;
    if (key == "spot") return &ModelParams::spot;
    return &ModelParams::y0;
}

ModelParams resolve_params(const Config& c) {
    ModelParams p;
    if (!c.params_file.empty()) {
        try {
            p = read_params_file(c.params_file, p);
        } catch (const std::runtime_error& e) {
            throw UsageError(e.what());
        } catch (const std::invalid_argument& e) {
            throw UsageError(std::string(e.what()) + " in " + c.params_file);
        }
    }
    for (std::size_t i = 0; i < kParamKeys.size(); ++i) {
        if (c.inline_params[i]) p.*param_member(kParamKeys[i]) = number_or_usage(*c.inline_params[i], kParamKeys[i]);
    }
    return p;
}

std::vector<double> resolve_priors(const Config& c, const ModelParams& p, std::vector<double> fallback) {
    std::vector<double> priors = c.priors.empty() ? std::move(fallback) : numbers(c.priors, "y0");
    if (priors.empty()) priors.push_back(p.y0);
    for (double y : priors) {
        if (!(y >= 0.0 && y <= 1.0)) throw UsageError("prior y0 must lie in [0,1], got " + format_double(y));
    }
    return priors;
}

DriftConvention convention(const Config& c) {
    return c.literal ? DriftConvention::literal_sqrt_h : DriftConvention::per_step;
}

std::string percent(double v) {
    std::ostringstream s;
    s << std::setprecision(6) << v * 100.0 << '%';
    return s.str();
}

std::string one_decimal(double v) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(1) << v;
    return s.str();
}

// ---------------------------------------------------------------- manifest

using Manifest = std::vector<std::pair<std::string, std::string>>;

void add_params(Manifest& m, const ModelParams& p) {
    for (const char* key : kParamKeys) m.emplace_back(key, format_double(p.*param_member(key)));
}

void add_list(Manifest& m, const std::string& key, const std::vector<double>& values) {
    for (double v : values) m.emplace_back(key, format_double(v));
}

void add_list(Manifest& m, const std::string& key, const std::vector<int>& values) {
    for (int v : values) m.emplace_back(key, std::to_string(v));
}

void add_numerics(Manifest& m, const Config& c, bool with_steps) {
    if (with_steps) m.emplace_back("N", std::to_string(c.steps));
    if (c.literal) m.emplace_back("literal-pl-exponent", "true");
}

std::string manifest_text(const Config& c, const Manifest& m, const std::vector<std::string>& notes) {
    std::ostringstream s;
    s << "command = " << c.command << '\n';
    for (const auto& [k, v] : m) s << k << " = " << v << '\n';
    for (const auto& n : notes) s << "# " << n << '\n';
    return s.str();
}

void echo_inputs(std::ostream& out, const Config& c, const Manifest& m) {
    out << "# command = " << c.command << '\n';
    for (const auto& [k, v] : m) out << "# " << k << " = " << v << '\n';
    out << "# convention = " << (c.literal ? "literal_sqrt_h" : "per_step") << '\n';
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string flag_key(const std::string& token) {
    if (token.rfind("--", 0) != 0) return {};
    const std::string body = token.substr(2);
    return body.substr(0, body.find('='));
}

// Rewrites `--manifest FILE [overrides...]` into the recorded command line plus overrides.
std::vector<std::string> expand_manifest(const std::vector<std::string>& args) {
    std::vector<std::string> rest;
    std::optional<std::string> path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--manifest") {
            if (i + 1 >= args.size()) throw UsageError("--manifest needs a file name");
            path = args[++i];
        } else if (args[i].rfind("--manifest=", 0) == 0) {
            path = args[i].substr(11);
        } else {
            rest.push_back(args[i]);
        }
    }
    if (!path) return args;

    std::ifstream in(*path);
    if (!in) throw UsageError("cannot open manifest file: " + *path);
    std::set<std::string> overridden;
    for (const auto& t : rest) {
        const std::string k = flag_key(t);
        if (!k.empty()) overridden.insert(k);
    }
    std::string command;
    std::vector<std::string> recorded;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw UsageError(*path + ":" + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "command") {
            command = value;
            continue;
        }
        if (overridden.count(key)) continue;
        if (key == "literal-pl-exponent" || key == "smooth") {
            if (value == "true") recorded.push_back("--" + key);
            continue;
        }
        recorded.push_back("--" + key + "=" + value);
    }
    if (command.empty()) throw UsageError("manifest has no command: " + *path);
    std::vector<std::string> out{command};
    out.insert(out.end(), recorded.begin(), recorded.end());
    out.insert(out.end(), rest.begin(), rest.end());
    return out;
}

// ---------------------------------------------------------------- output

class Output {
public:
    Output(const Config& c, std::ostream& out) : config_(c), out_(out) {
        if (!c.out_dir.empty()) {
            std::error_code ec;
            fs::create_directories(c.out_dir, ec);
            if (ec) throw std::runtime_error("cannot create output directory " + c.out_dir + ": " + ec.message());
        }
    }

    bool to_files() const { return !config_.out_dir.empty(); }

    void file(const std::string& name, const std::string& body) const {
        const fs::path path = fs::path(config_.out_dir) / name;
        std::ofstream f(path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + path.string());
        f << body;
        if (!f) throw std::runtime_error("failed writing " + path.string());
        out_ << "wrote " << path.string() << '\n';
    }

    /// Writes a CSV to the output directory, or to stdout when no directory was given and
    /// `print_otherwise` is set.
    void csv(const std::string& name, const std::string& body, bool print_otherwise) const {
        if (to_files()) {
            file(name, body);
        } else if (print_otherwise) {
            out_ << body;
        }
    }

    void manifest(const Manifest& m, const std::vector<std::string>& notes = {}) const {
        if (to_files()) file("manifest.txt", manifest_text(config_, m, notes));
    }

private:
    const Config& config_;
    std::ostream& out_;
};

std::string boundary_csv(const Lattice& lat, const Boundary& b0, const Boundary& b1) {
    std::ostringstream s;
    s << "step,time_years,boundary_regime0,boundary_regime1\n";
    for (int k = 0; k <= lat.steps; ++k) {
        s << k << ',' << format_double(lat.time(k)) << ',' << format_double(b0[k]) << ',' << format_double(b1[k])
          << '\n';
    }
    return s.str();
}

std::vector<double> lattice_times(const Lattice& lat) {
    std::vector<double> t(lat.steps + 1);
    for (int k = 0; k <= lat.steps; ++k) t[k] = lat.time(k);
    return t;
}

// ---------------------------------------------------------------- commands

void emit_boundaries(const Config& c, const Output& o, const FullInfoResult& r, bool print_otherwise) {
    o.csv("boundary.csv", boundary_csv(r.lattice, r.boundary0, r.boundary1), print_otherwise);
    if (c.smooth) {
        const auto t = lattice_times(r.lattice);
        const Boundary s0 = smooth_polynomial(t, r.boundary0, c.smooth_degree);
        const Boundary s1 = smooth_polynomial(t, r.boundary1, c.smooth_degree);
        o.csv("boundary_smoothed.csv", boundary_csv(r.lattice, s0, s1), print_otherwise);
    }
}

Manifest full_manifest(const Config& c, const ModelParams& p) {
    Manifest m;
    add_params(m, p);
    add_numerics(m, c, true);
    if (c.smooth) {
        m.emplace_back("smooth", "true");
        m.emplace_back("smooth-degree", std::to_string(c.smooth_degree));
    }
    return m;
}

int cmd_price_full(const Config& c, std::ostream& out) {
    const ModelParams p = resolve_params(c);
    const Model model = validate(p);
    const Manifest m = full_manifest(c, p);
    echo_inputs(out, c, m);
    const Output o(c, out);
    const FullInfoResult r = price_full(model, c.steps, {convention(c), false});
    out << "v0 = " << format_double(r.v0_root) << "  (" << one_decimal(r.v0_root) << ")\n";
    out << "v1 = " << format_double(r.v1_root) << "  (" << one_decimal(r.v1_root) << ")\n";
    if (o.to_files()) {
        std::ostringstream s;
        s << "quantity,value\nv0," << format_double(r.v0_root) << "\nv1," << format_double(r.v1_root) << '\n';
        o.file("values.csv", s.str());
        emit_boundaries(c, o, r, false);
    }
    o.manifest(m);
    return kExitOk;
}

int cmd_boundary(const Config& c, std::ostream& out) {
    const ModelParams p = resolve_params(c);
    const Model model = validate(p);
    const Manifest m = full_manifest(c, p);
    const Output o(c, out);
    if (o.to_files()) echo_inputs(out, c, m);
    const FullInfoResult r = price_full(model, c.steps, {convention(c), false});
    emit_boundaries(c, o, r, true);
    o.manifest(m);
    return kExitOk;
}

int cmd_price_partial(const Config& c, std::ostream& out) {
    const ModelParams p = resolve_params(c);
    const Model model = validate(p);
    const std::vector<double> priors = resolve_priors(c, p, {});
    const std::vector<int> grids = c.grids.empty() ? std::vector<int>{250} : c.grids;
    Manifest m;
    add_params(m, p);
    add_numerics(m, c, true);
    add_list(m, "L", grids);
    add_list(m, "y0", priors);
    echo_inputs(out, c, m);
    const Output o(c, out);

    const LatticeSetup setup = make_setup(model, c.steps, convention(c));
    PartialInfoOptions opts;
    opts.convention = convention(c);
    opts.compute_surface = false;
    std::vector<std::vector<double>> values;  // [grid][prior]
    for (int l : grids) {
        const PartialInfoResult r = price_partial(model, setup, l, opts);
        std::vector<double> row;
        for (double y : priors) row.push_back(r.root(y));
        values.push_back(std::move(row));
    }

    out << std::left << std::setw(10) << "y0";
    for (int l : grids) out << std::setw(24) << ("u[L=" + std::to_string(l) + "]");
    out << '\n';
    for (std::size_t i = 0; i < priors.size(); ++i) {
        out << std::setw(10) << format_double(priors[i]);
        for (std::size_t g = 0; g < grids.size(); ++g) out << std::setw(24) << format_double(values[g][i]);
        out << '\n';
    }
    out << std::right;

    std::ostringstream s;
    s << "y0,L,u\n";
    for (std::size_t i = 0; i < priors.size(); ++i) {
        for (std::size_t g = 0; g < grids.size(); ++g) {
            s << format_double(priors[i]) << ',' << grids[g] << ',' << format_double(values[g][i]) << '\n';
        }
    }
    o.csv("partial.csv", s.str(), false);
    o.manifest(m);
    return kExitOk;
}

int cmd_surface(const Config& c, std::ostream& out) {
    const ModelParams p = resolve_params(c);
    const Model model = validate(p);
    Manifest m;
    add_params(m, p);
    add_numerics(m, c, true);
    m.emplace_back("L", std::to_string(c.grid));
    if (c.smooth) {
        m.emplace_back("smooth", "true");
        m.emplace_back("smooth-degree", std::to_string(c.smooth_degree));
    }
    const Output o(c, out);
    if (o.to_files()) echo_inputs(out, c, m);

    PartialInfoOptions opts;
    opts.convention = convention(c);
    const PartialInfoResult r = price_partial(model, c.steps, c.grid, opts);
    const ExerciseSurface& surface = *r.surface;
    const int layers = r.grid.size();

    auto render = [&](auto&& value_at) {
        std::ostringstream s;
        s << "step,time_years,belief,boundary_price\n";
        for (int k = 0; k <= r.lattice.steps; ++k) {
            const std::string t = format_double(r.lattice.time(k));
            for (int l = 0; l < layers; ++l) {
                s << k << ',' << t << ',' << format_double(r.grid.point(l)) << ',' << format_double(value_at(k, l))
                  << '\n';
            }
        }
        return s.str();
    };
    o.csv("surface.csv", render([&](int k, int l) { return surface.at(k, l); }), true);
    if (c.smooth) {
        const auto t = lattice_times(r.lattice);
        std::vector<std::vector<double>> smoothed(layers);
        for (int l = 0; l < layers; ++l) {
            std::vector<double> column(r.lattice.steps + 1);
            for (int k = 0; k <= r.lattice.steps; ++k) column[k] = surface.at(k, l);
            smoothed[l] = smooth_polynomial(t, column, c.smooth_degree);
        }
        o.csv("surface_smoothed.csv", render([&](int k, int l) { return smoothed[l][k]; }), true);
    }
    o.manifest(m);
    return kExitOk;
}

int cmd_perpetual(const Config& c, std::ostream& out) {
    const ModelParams p = resolve_params(c);
    const Model model = validate(p);
    Manifest m;
    add_params(m, p);
    m.emplace_back("x-min", format_double(c.x_min));
    if (c.x_max) m.emplace_back("x-max", format_double(*c.x_max));
    m.emplace_back("x-points", std::to_string(c.x_points));
    echo_inputs(out, c, m);
    const Output o(c, out);

    const PerpetualOutcome outcome = solve_perpetual(model);
    if (const auto* none = std::get_if<NoFiniteBoundary>(&outcome)) {
        out << none->reason << '\n';
        o.manifest(m);
        return kExitOk;
    }
    const PerpetualSolution& s = std::get<PerpetualSolution>(outcome);
    const std::pair<const char*, double> constants[] = {
        {"gamma", s.gamma}, {"beta", s.beta}, {"delta", s.delta}, {"A", s.A},   {"B", s.B},   {"C", s.C},
        {"D", s.D},         {"E", s.E},       {"F", s.F},         {"x1", s.x1}, {"x0", s.x0},
    };
    for (const auto& [name, value] : constants) out << std::left << std::setw(7) << name << format_double(value) << '\n';
    out << std::setw(7) << "v0(x)" << format_double(eval_v0(s, p.spot)) << "  at x = " << format_double(p.spot) << '\n';
    out << std::setw(7) << "v1(x)" << format_double(eval_v1(s, p.spot)) << "  at x = " << format_double(p.spot) << '\n'
        << std::right;

    const double hi = c.x_max.value_or(1.5 * s.x0);
    if (!(hi > c.x_min) || c.x_min < 0.0) throw UsageError("need 0 <= x-min < x-max");
    if (c.x_points < 2) throw UsageError("x-points must be at least 2");
    std::ostringstream csv;
    csv << "x,v0,v1\n";
    for (int i = 0; i < c.x_points; ++i) {
        const double x = c.x_min + (hi - c.x_min) * i / (c.x_points - 1);
        csv << format_double(x) << ',' << format_double(eval_v0(s, x)) << ',' << format_double(eval_v1(s, x)) << '\n';
    }
    o.csv("perpetual.csv", csv.str(), true);
    if (o.to_files()) {
        std::ostringstream k;
        k << "name,value\n";
        for (const auto& [name, value] : constants) k << name << ',' << format_double(value) << '\n';
        o.file("perpetual_constants.csv", k.str());
    }
    o.manifest(m);
    return kExitOk;
}

std::string prior_tag(double y) { return "y0=" + format_double(y); }

int cmd_simulate(const Config& c, std::ostream& out) {
    ModelParams p = resolve_params(c);
    if (c.regime_prior) p.y0 = number_or_usage(*c.regime_prior, "regime-prior");
    const Model model = validate(p);
    const std::vector<double> priors = resolve_priors(c, p, {0.0, 0.5});
    Manifest m;
    add_params(m, p);
    add_numerics(m, c, true);
    m.emplace_back("L", std::to_string(c.grid));
    add_list(m, "y0", priors);
    m.emplace_back("regime-prior", format_double(p.y0));
    m.emplace_back("seed", std::to_string(c.seed));
    m.emplace_back("paths", std::to_string(c.paths));
    m.emplace_back("export-paths", std::to_string(c.export_paths));
    const std::vector<std::string> notes{"rng = " + std::string(kRngName)};
    echo_inputs(out, c, m);
    out << "# " << notes[0] << '\n';
    if (c.paths == 0) throw UsageError("--paths must be at least 1");
    const Output o(c, out);

    const LatticeSetup setup = make_setup(model, c.steps, convention(c));
    const FullInfoResult full = price_full(model, setup);
    PartialInfoOptions opts;
    opts.convention = convention(c);
    const PartialInfoResult partial = price_partial(model, setup, c.grid, opts);

    const auto outcomes = run_monte_carlo(model, setup, full, partial, priors, c.paths, c.seed);
    const SimulationSummary summary = aggregate_stats(outcomes, setup.lattice.dt);

    out << std::left << std::setw(22) << "agent" << std::setw(20) << "root_value" << std::setw(20) << "mean_payoff"
        << std::setw(20) << "std_error" << std::setw(14) << "exercised" << "mean_exercise_time\n";
    for (std::size_t a = 0; a < summary.agents.size(); ++a) {
        const AgentSummary& s = summary.agents[a];
        // DP value of the policy when the agent's prior is the true regime prior; nan otherwise
        double root = (1.0 - p.y0) * full.v0_root + p.y0 * full.v1_root;
        if (a > 0) root = priors[a - 1] == p.y0 ? partial.root(priors[a - 1]) : std::numeric_limits<double>::quiet_NaN();
        out << std::setw(22) << s.label << std::setw(20) << format_double(root) << std::setw(20)
            << format_double(s.mean_payoff) << std::setw(20) << format_double(s.std_error) << std::setw(14)
            << format_double(s.exercise_frequency) << format_double(s.mean_exercise_time) << '\n';
    }
    for (const HeadToHead& h : summary.head_to_head) {
        out << std::setw(42) << h.label << "mean difference " << format_double(h.mean_difference) << " (se "
            << format_double(h.std_error) << ")\n";
    }
    out << std::right;

    if (!o.to_files()) return kExitOk;

    std::ostringstream s;
    s << "agent,paths,mean_payoff,stdev_payoff,std_error,exercise_frequency,mean_exercise_time,rng,master_seed\n";
    for (const AgentSummary& a : summary.agents) {
        s << a.label << ',' << a.paths << ',' << format_double(a.mean_payoff) << ',' << format_double(a.stdev_payoff)
          << ',' << format_double(a.std_error) << ',' << format_double(a.exercise_frequency) << ','
          << format_double(a.mean_exercise_time) << ',' << kRngName << ',' << c.seed << '\n';
    }
    o.file("summary.csv", s.str());
    std::ostringstream h;
    h << "comparison,mean_difference,std_error,rng,master_seed\n";
    for (const HeadToHead& x : summary.head_to_head) {
        h << x.label << ',' << format_double(x.mean_difference) << ',' << format_double(x.std_error) << ','
          << kRngName << ',' << c.seed << '\n';
    }
    o.file("head_to_head.csv", h.str());

    const std::size_t exports = std::min(c.export_paths, c.paths);
    for (std::size_t i = 0; i < exports; ++i) {
        const SimPath path = simulate_joint_path(model, setup, c.seed, i, priors);
        const std::vector<ExerciseOutcome>& row = outcomes[i];
        std::ostringstream f;
        f << "step,time,stock,regime";
        for (double y : priors) f << ",belief_" << prior_tag(y);
        f << ",insider_boundary";
        for (double y : priors) f << ",outsider_boundary_" << prior_tag(y);
        f << ",insider_exercise";
        for (double y : priors) f << ",outsider_exercise_" << prior_tag(y);
        f << ",master_seed,path_index\n";
        for (int k = 0; k <= path.steps(); ++k) {
            f << k << ',' << format_double(setup.lattice.time(k)) << ',' << format_double(path.stock[k]) << ','
              << index(path.regime[k]);
            for (std::size_t v = 0; v < priors.size(); ++v) f << ',' << format_double(path.outsider_belief[v][k]);
            f << ',' << format_double(full.boundary(path.regime[k])[k]);
            for (std::size_t v = 0; v < priors.size(); ++v) {
                f << ',' << format_double(partial.surface->at_belief(k, partial.grid.locate(path.outsider_belief[v][k])));
            }
            for (const ExerciseOutcome& e : row) f << ',' << (e.exercise_step && *e.exercise_step == k ? 1 : 0);
            f << ',' << c.seed << ',' << i << '\n';
        }
        o.file("path_" + std::to_string(i) + ".csv", f.str());
    }
    o.manifest(m, notes);
    return kExitOk;
}

std::vector<double> grid_or(const std::vector<std::string>& given, std::vector<double> fallback,
                            const std::string& what) {
    return given.empty() ? fallback : numbers(given, what);
}

int cmd_table1(const Config& c, std::ostream& out) {
    const ModelParams base = resolve_params(c);
    const auto mu0s = grid_or(c.mu0_grid, {0.02, 0.08, 0.18}, "mu0-grid");
    const auto mu1s = grid_or(c.mu1_grid, {-0.02, -0.05, -0.10}, "mu1-grid");
    const auto sigmas = grid_or(c.sigma_grid, {0.20, 0.30, 0.40}, "sigma-grid");
    const auto lambdas = grid_or(c.lambda_grid, {0.10, 0.20}, "lambda-grid");
    Manifest m;
    add_params(m, base);
    add_numerics(m, c, true);
    m.emplace_back("L", std::to_string(c.grid));
    add_list(m, "mu0-grid", mu0s);
    add_list(m, "mu1-grid", mu1s);
    add_list(m, "sigma-grid", sigmas);
    add_list(m, "lambda-grid", lambdas);
    echo_inputs(out, c, m);
    const Output o(c, out);

    std::ostringstream csv;
    csv << "mu0,mu1,sigma,lambda,v0,v1,u_y0=0,u_y0=0.5\n";
    out << std::setw(8) << "mu0" << std::setw(8) << "mu1" << std::setw(8) << "sigma" << std::setw(8) << "lambda"
        << std::setw(10) << "v0" << std::setw(10) << "v1" << std::setw(10) << "u(0)" << std::setw(10) << "u(0.5)"
        << '\n';
    for (double lambda : lambdas) {
        for (double sigma : sigmas) {
            for (double mu0 : mu0s) {
                for (double mu1 : mu1s) {
                    ModelParams p = base;
                    p.mu0 = mu0;
                    p.mu1 = mu1;
                    p.sigma = sigma;
                    p.lambda = lambda;
                    const Model model = validate(p);
                    const LatticeSetup setup = make_setup(model, c.steps, convention(c));
                    const FullInfoResult full = price_full(model, setup);
                    PartialInfoOptions opts;
                    opts.convention = convention(c);
                    opts.compute_surface = false;
                    const PartialInfoResult partial = price_partial(model, setup, c.grid, opts);
                    const double u0 = partial.root(0.0);
                    const double u5 = partial.root(0.5);
                    out << std::setw(8) << percent(mu0) << std::setw(8) << percent(mu1) << std::setw(8)
                        << percent(sigma) << std::setw(8) << percent(lambda) << std::setw(10)
                        << one_decimal(full.v0_root) << std::setw(10) << one_decimal(full.v1_root) << std::setw(10)
                        << one_decimal(u0) << std::setw(10) << one_decimal(u5) << std::endl;
                    csv << format_double(mu0) << ',' << format_double(mu1) << ',' << format_double(sigma) << ','
                        << format_double(lambda) << ',' << format_double(full.v0_root) << ','
                        << format_double(full.v1_root) << ',' << format_double(u0) << ',' << format_double(u5)
                        << '\n';
                }
            }
        }
    }
    o.csv("table1.csv", csv.str(), false);
    o.manifest(m);
    return kExitOk;
}

int cmd_converge(const Config& c, std::ostream& out) {
    const ModelParams p = resolve_params(c);
    const Model model = validate(p);
    const std::vector<double> priors = resolve_priors(c, p, {0.0, 0.5});
    const std::vector<int> ns = c.n_sweep.empty() ? std::vector<int>{250, 500, 1000, 1250, 2500} : c.n_sweep;
    const std::vector<int> ls = c.l_sweep.empty() ? std::vector<int>{50, 100, 150, 200, 250, 300} : c.l_sweep;
    Manifest m;
    add_params(m, p);
    add_numerics(m, c, true);
    m.emplace_back("L", std::to_string(c.grid));
    add_list(m, "Ns", ns);
    add_list(m, "Ls", ls);
    add_list(m, "y0", priors);
    echo_inputs(out, c, m);
    const Output o(c, out);

    PartialInfoOptions opts;
    opts.convention = convention(c);
    opts.compute_surface = false;

    std::ostringstream by_n;
    by_n << "N,v0,v1";
    for (double y : priors) by_n << ",u_" << prior_tag(y);
    by_n << '\n';
    std::vector<std::vector<double>> rows;
    for (int n : ns) {
        const LatticeSetup setup = make_setup(model, n, convention(c));
        const FullInfoResult full = price_full(model, setup);
        const PartialInfoResult partial = price_partial(model, setup, c.grid, opts);
        std::vector<double> row{full.v0_root, full.v1_root};
        for (double y : priors) row.push_back(partial.root(y));
        by_n << n;
        for (double v : row) by_n << ',' << format_double(v);
        by_n << '\n';
        rows.push_back(std::move(row));
    }

    std::ostringstream by_l;
    by_l << "L";
    for (double y : priors) by_l << ",u_" << prior_tag(y);
    by_l << '\n';
    const LatticeSetup setup = make_setup(model, c.steps, convention(c));
    std::vector<std::vector<double>> lrows;
    for (int l : ls) {
        const PartialInfoResult partial = price_partial(model, setup, l, opts);
        std::vector<double> row;
        for (double y : priors) row.push_back(partial.root(y));
        by_l << l;
        for (double v : row) by_l << ',' << format_double(v);
        by_l << '\n';
        lrows.push_back(std::move(row));
    }

    out << "value against N (L = " << c.grid << ")\n" << by_n.str();
    out << "value against L (N = " << c.steps << ")\n" << by_l.str();
    if (rows.size() >= 2) {
        double gap = 0.0;
        for (std::size_t i = 0; i < rows.back().size(); ++i) {
            gap = std::max(gap, std::abs(rows.back()[i] - rows[rows.size() - 2][i]));
        }
        out << "max change between N = " << ns[ns.size() - 2] << " and N = " << ns.back() << ": "
            << format_double(gap) << '\n';
    }
    if (lrows.size() >= 2) {
        double gap = 0.0;
        for (std::size_t i = 0; i < lrows.back().size(); ++i) {
            gap = std::max(gap, std::abs(lrows.back()[i] - lrows[lrows.size() - 2][i]));
        }
        out << "max change between L = " << ls[ls.size() - 2] << " and L = " << ls.back() << ": "
            << format_double(gap) << '\n';
    }
    o.csv("converge_N.csv", by_n.str(), false);
    o.csv("converge_L.csv", by_l.str(), false);
    o.manifest(m);
    return kExitOk;
}

// ---------------------------------------------------------------- wiring

void add_param_options(CLI::App* sub, Config& c) {
    sub->add_option("--params", c.params_file, "parameter file (key = value)");
    for (std::size_t i = 0; i < kParamKeys.size(); ++i) {
        sub->add_option(std::string("--") + kParamKeys[i], c.inline_params[i],
                        std::string("override ") + kParamKeys[i] + " (decimal or percent)");
    }
}

void add_lattice_options(CLI::App* sub, Config& c) {
    sub->add_option("--N", c.steps, "lattice steps")->check(CLI::PositiveNumber);
    sub->add_flag("--literal-pl-exponent", c.literal, "use e^{mu sqrt(h)} in the return probabilities");
}

void add_out(CLI::App* sub, Config& c) { sub->add_option("--out", c.out_dir, "output directory for CSV files"); }

void add_smooth(CLI::App* sub, Config& c) {
    sub->add_flag("--smooth", c.smooth, "also write a polynomial-smoothed copy of the boundary");
    sub->add_option("--smooth-degree", c.smooth_degree, "degree of the smoothing polynomial")
        ->check(CLI::Range(0, 20));
}

void add_priors(CLI::App* sub, Config& c, const std::string& help) {
    sub->add_option("--y0", c.priors, help)->allow_extra_args(false);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<std::string> expanded;
    try {
        expanded = expand_manifest(args);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    Config c;
    CLI::App app{"Executive stock option pricing under a hidden drift change point"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "expand all help");
    app.add_option("--manifest", "replay the inputs recorded in a manifest file");

    auto* full = app.add_subcommand("price-full", "full-information values v0, v1");
    add_param_options(full, c);
    add_lattice_options(full, c);
    add_out(full, c);
    add_smooth(full, c);

    auto* boundary = app.add_subcommand("boundary", "full-information exercise boundaries as CSV");
    add_param_options(boundary, c);
    add_lattice_options(boundary, c);
    add_out(boundary, c);
    add_smooth(boundary, c);

    auto* partial = app.add_subcommand("price-partial", "partial-information values u(y0)");
    add_param_options(partial, c);
    add_lattice_options(partial, c);
    add_out(partial, c);
    partial->add_option("--L", c.grids, "belief grid size (repeatable)")->allow_extra_args(false);
    add_priors(partial, c, "prior probability of the switch having happened (repeatable)");

    auto* surface = app.add_subcommand("surface", "partial-information exercise surface as CSV");
    add_param_options(surface, c);
    add_lattice_options(surface, c);
    add_out(surface, c);
    add_smooth(surface, c);
    surface->add_option("--L", c.grid, "belief grid size")->check(CLI::Range(2, 100000));

    auto* perpetual = app.add_subcommand("perpetual", "closed-form infinite-horizon values");
    add_param_options(perpetual, c);
    add_out(perpetual, c);
    perpetual->add_option("--x-min", c.x_min, "smallest stock price in the CSV");
    perpetual->add_option("--x-max", c.x_max, "largest stock price in the CSV (default 1.5 x0)");
    perpetual->add_option("--x-points", c.x_points, "number of CSV rows");

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo replay of insider and outsider policies");
    add_param_options(simulate, c);
    add_lattice_options(simulate, c);
    add_out(simulate, c);
    simulate->add_option("--L", c.grid, "belief grid size")->check(CLI::Range(2, 100000));
    add_priors(simulate, c, "outsider prior (repeatable, default 0 and 0.5)");
    simulate->add_option("--seed", c.seed, "master seed");
    simulate->add_option("--paths", c.paths, "number of simulated paths");
    simulate->add_option("--export-paths", c.export_paths, "number of per-path CSV files to write");
    simulate->add_option("--regime-prior", c.regime_prior, "probability that a path starts after the switch");

    auto* table = app.add_subcommand("table1", "comparative statics table of v0, v1, u(0), u(0.5)");
    add_param_options(table, c);
    add_lattice_options(table, c);
    add_out(table, c);
    table->add_option("--L", c.grid, "belief grid size")->check(CLI::Range(2, 100000));
    table->add_option("--mu0-grid", c.mu0_grid, "mu0 values (repeatable)")->allow_extra_args(false);
    table->add_option("--mu1-grid", c.mu1_grid, "mu1 values (repeatable)")->allow_extra_args(false);
    table->add_option("--sigma-grid", c.sigma_grid, "sigma values (repeatable)")->allow_extra_args(false);
    table->add_option("--lambda-grid", c.lambda_grid, "lambda values (repeatable)")->allow_extra_args(false);

    auto* converge = app.add_subcommand("converge", "value against lattice steps and belief grid size");
    add_param_options(converge, c);
    add_lattice_options(converge, c);
    add_out(converge, c);
    converge->add_option("--L", c.grid, "belief grid size for the N sweep")->check(CLI::Range(2, 100000));
    converge->add_option("--Ns", c.n_sweep, "lattice steps to sweep (repeatable)")->allow_extra_args(false);
    converge->add_option("--Ls", c.l_sweep, "grid sizes to sweep at --N (repeatable)")->allow_extra_args(false);
    add_priors(converge, c, "priors to report (repeatable, default 0 and 0.5)");

    std::vector<std::string> reversed(expanded.rbegin(), expanded.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    const std::pair<CLI::App*, int (*)(const Config&, std::ostream&)> commands[] = {
        {full, cmd_price_full}, {boundary, cmd_boundary}, {partial, cmd_price_partial},
        {surface, cmd_surface}, {perpetual, cmd_perpetual}, {simulate, cmd_simulate},
        {table, cmd_table1},    {converge, cmd_converge},
    };
    try {
        for (const auto& [sub, fn] : commands) {
            if (sub->parsed()) {
                c.command = sub->get_name();
                return fn(c, out);
            }
        }
        err << "error: no command given\n";
        return kExitUsage;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ModelError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitEngine;
    }
}

}  // namespace esocp::cli
