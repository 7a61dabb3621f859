#include "esocp/model.hpp"

#include "esocp/format.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace esocp {

DerivedConstants derived(const ModelParams& p) {
    DerivedConstants d;
    d.eta = (p.mu0 - p.mu1) / p.sigma;
    d.nu0 = p.mu0 / p.sigma - 0.5 * p.sigma;
    d.nu1 = p.mu1 / p.sigma - 0.5 * p.sigma;
    d.kappa = p.lambda + d.eta * d.nu0 - 0.5 * d.eta * d.eta;
    return d;
}

Model validate(const ModelParams& p, DriftOrdering ordering) {
    auto finite = [](double v) { return std::isfinite(v); };
    if (!finite(p.mu0) || !finite(p.mu1) || !finite(p.sigma) || !finite(p.lambda) || !finite(p.r) ||
        !finite(p.strike) || !finite(p.maturity) || !finite(p.spot) || !finite(p.y0)) {
        throw ModelError("model parameters must be finite");
    }
    if (ordering == DriftOrdering::strict ? !(p.mu0 > p.mu1) : !(p.mu0 >= p.mu1)) {
        throw ModelError("drift ordering violated: mu0 must exceed mu1");
    }
    if (!(p.sigma > 0.0)) throw ModelError("non-positive volatility sigma");
    if (!(p.maturity > 0.0)) throw ModelError("non-positive maturity");
    if (!(p.spot > 0.0)) throw ModelError("non-positive spot price");
    if (p.strike < 0.0) throw ModelError("negative strike");
    if (p.lambda < 0.0) throw ModelError("negative switching intensity lambda");
    if (p.r < 0.0) throw ModelError("negative interest rate");
    if (!(p.y0 >= 0.0 && p.y0 < 1.0)) throw ModelError("prior y0 outside [0,1)");
    return Model{p, derived(p)};
}

double parse_number(const std::string& text) {
    std::string s = text;
    auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    bool percent = false;
    if (!s.empty() && s.back() == '%') {
        percent = true;
        s.pop_back();
    }
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(s, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("not a number: '" + text + "'");
    }
    if (used != s.size()) throw std::invalid_argument("not a number: '" + text + "'");
    return percent ? value / 100.0 : value;
}

namespace {

double* field(ModelParams& p, const std::string& key) {
    if (key == "mu0") return &p.mu0;
    if (key == "mu1") return &p.mu1;
    if (key == "sigma") return &p.sigma;
    if (key == "lambda") return &p.lambda;
    if (key == "r") return &p.r;
    if (key == "strike") return &p.strike;
    if (key == "maturity") return &p.maturity;
    if (key == "spot") return &p.spot;
    if (key == "y0") return &p.y0;
    return nullptr;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

ModelParams parse_params(std::istream& in, const ModelParams& defaults) {
    ModelParams p = defaults;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        double* slot = field(p, key);
        if (slot == nullptr) {
            throw std::invalid_argument("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
        *slot = parse_number(line.substr(eq + 1));
    }
    return p;
}

ModelParams read_params_file(const std::filesystem::path& path, const ModelParams& defaults) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open parameter file: " + path.string());
    return parse_params(in, defaults);
}

void write_params(std::ostream& out, const ModelParams& p) {
    out << "mu0=" << format_double(p.mu0) << '\n'
        << "mu1=" << format_double(p.mu1) << '\n'
        << "sigma=" << format_double(p.sigma) << '\n'
        << "lambda=" << format_double(p.lambda) << '\n'
        << "r=" << format_double(p.r) << '\n'
        << "strike=" << format_double(p.strike) << '\n'
        << "maturity=" << format_double(p.maturity) << '\n'
        << "spot=" << format_double(p.spot) << '\n'
        << "y0=" << format_double(p.y0) << '\n';
}

}  // namespace esocp
