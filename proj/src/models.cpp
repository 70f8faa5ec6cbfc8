#include "nmep/models.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>

#include "nmep/util.hpp"

namespace nmep {

namespace {
constexpr double pi = 3.141592653589793238462643383279502884;
}

Matrix effective_hamiltonian(const LindbladModel& m, double t) {
    Matrix h = m.hamiltonian_at(t);
    if (h.dim() != m.dim)
        throw DimensionMismatch("effective_hamiltonian: Hamiltonian dim mismatch");
    for (const auto& ch : m.channels) {
        const Matrix a = ch.operator_at(t);
        if (a.dim() != m.dim)
            throw DimensionMismatch("effective_hamiltonian: jump operator dim mismatch");
        h -= cplx(0.0, 0.5 * ch.rate_at(t)) * (a.adjoint() * a);
    }
    return h;
}

// ---------------------------------------------------------------------------
// Spin-star

double spin_star_rate(const SpinStarParams& p, double t) {
    const double a = p.alpha;
    return a * p.n_spins * std::sin(4.0 * a * t) /
           (std::cos(4.0 * a * t) + std::cosh(-p.beta_omega));
}

double spin_star_lamb_shift(const SpinStarParams& p, double t) {
    const double a = p.alpha;
    return a * p.n_spins * std::sinh(-p.beta_omega) /
           (std::cos(4.0 * a * t) + std::cosh(-p.beta_omega));
}

cplx spin_star_f(const SpinStarParams& p, double t) {
    const double c = std::cos(2.0 * p.alpha * t);
    const double s = std::sin(2.0 * p.alpha * t);
    const cplx base(c, -std::tanh(-p.beta_omega / 2.0) * s);
    return std::pow(base, p.n_spins);
}

LindbladModel spin_star_model(const SpinStarParams& p) {
    LindbladModel m;
    m.dim = 2;
    m.hamiltonian_at = [p](double t) { return spin_star_lamb_shift(p, t) * sigma_z(); };
    m.channels.push_back({[](double) { return sigma_z(); },
                          [p](double t) { return spin_star_rate(p, t); }});
    return m;
}

DensityMatrix spin_star_analytic(const SpinStarParams& p, const DensityMatrix& rho0, double t) {
    if (rho0.dim() != 2)
        throw DimensionMismatch("spin_star_analytic: expects a 2x2 density matrix");
    const cplx f = spin_star_f(p, t);
    DensityMatrix rho = rho0;
    rho(0, 1) *= f;
    rho(1, 0) *= std::conj(f);
    return rho;
}

// ---------------------------------------------------------------------------
// Transmon

namespace {

// 16-point Gauss-Legendre on [-1, 1], positive half.
constexpr double gl_x[8] = {
    0.0950125098376374, 0.2816035507792589, 0.4580167776572274, 0.6178762444026438,
    0.7554044083550030, 0.8656312023878318, 0.9445750230732326, 0.9894009349916499};
constexpr double gl_w[8] = {
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};

template <typename F>
double gl16(F&& f, double a, double b) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double s = 0.0;
    for (int i = 0; i < 8; ++i)
        s += gl_w[i] * (f(mid + half * gl_x[i]) + f(mid - half * gl_x[i]));
    return half * s;
}

} // namespace

TransmonTables::TransmonTables(double alpha, double x_max, std::size_t points) {
    if (!(alpha > 0.0 && alpha < 2.0))
        throw InvalidExponent("spectral exponent must lie in (0, 2)");
    if (points < 2 || !(x_max > 0.0))
        throw ConfigError("table needs x_max > 0 and at least two points");
    x_max_ = x_max;
    dx_ = x_max / static_cast<double>(points - 1);
    fcos_.resize(points);
    fsin_.resize(points);

    // Integrals rewritten via u = w^alpha: integrand alpha w^(alpha-1) cos(w)
    // (resp. sin), integrable but unbounded at w = 0 for alpha < 1. The nodes
    // of the quadrature stay interior, and quadratically graded panels over
    // the first grid interval absorb the singularity.
    const auto gc = [alpha](double w) { return alpha * std::pow(w, alpha - 1.0) * std::cos(w); };
    const auto gs = [alpha](double w) { return alpha * std::pow(w, alpha - 1.0) * std::sin(w); };

    constexpr int graded = 40;
    double c_acc = 0.0, s_acc = 0.0;
    for (int j = 0; j < graded; ++j) {
        const double a = dx_ * std::pow(static_cast<double>(j) / graded, 2.0);
        const double b = dx_ * std::pow(static_cast<double>(j + 1) / graded, 2.0);
        c_acc += gl16(gc, a, b);
        s_acc += gl16(gs, a, b);
    }
    fcos_[1] = c_acc;
    fsin_[1] = s_acc;
    for (std::size_t i = 2; i < points; ++i) {
        const double a = dx_ * static_cast<double>(i - 1);
        const double b = dx_ * static_cast<double>(i);
        c_acc += gl16(gc, a, b);
        s_acc += gl16(gs, a, b);
        fcos_[i] = c_acc;
        fsin_[i] = s_acc;
    }
}

double TransmonTables::lookup(const std::vector<double>& tab, double x) const {
    if (x < -1e-12 || x > x_max_ * (1.0 + 1e-12))
        throw OutOfTableRange("table argument " + format_double(x) + " outside [0, " +
                              format_double(x_max_) + "]");
    x = std::clamp(x, 0.0, x_max_);
    std::size_t i = static_cast<std::size_t>(x / dx_);
    if (i >= tab.size() - 1) i = tab.size() - 2;
    const double frac = x / dx_ - static_cast<double>(i);
    return tab[i] + frac * (tab[i + 1] - tab[i]);
}

double TransmonTables::f_cos(double x) const { return lookup(fcos_, x); }
double TransmonTables::f_sin(double x) const { return lookup(fsin_, x); }

TransmonModel::TransmonModel(const TransmonParams& p)
    : p_(p),
      tables_(p.alpha, 2.0 * pi * p.s_max, p.table_points),
      prefactor_(p.alpha == 1.0 ? 0.0 : 2.0 * std::tgamma(p.alpha - 1.0) / p.alpha),
      cached_s_(std::numeric_limits<double>::quiet_NaN()) {
    if (!(p.c > 0.0)) throw ConfigError("coupling c must be positive");
}

TransmonRates TransmonModel::rates(double s) const {
    if (p_.alpha == 1.0)
        throw InvalidExponent("decay rates diverge at exponent 1 (pole of the prefactor)");
    const double x = 2.0 * pi * s;
    const double fc = tables_.f_cos(x);
    const double fs = tables_.f_sin(x);
    const double sp = std::sin(pi * p_.alpha / 2.0);
    const double cp = std::cos(pi * p_.alpha / 2.0);
    TransmonRates r;
    r.gamma_plus = prefactor_ * (sp * fc + cp * fs);
    r.gamma_minus = prefactor_ * (sp * fc - cp * fs);
    r.lamb_shift = prefactor_ * sp * fs;
    return r;
}

namespace {

cplx column_overlap(const Matrix& a, std::size_t ca, const Matrix& b, std::size_t cb) {
    cplx s = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) s += std::conj(a(i, ca)) * b(i, cb);
    return s;
}

} // namespace

TransmonChannels TransmonModel::channels(double s) {
    if (cached_s_ == s) return cached_;
    if (has_prev_ && s < prev_s_) has_prev_ = false;

    const TransmonRates r = rates(s);
    Matrix d(2);
    d(0, 0) = r.gamma_plus;
    d(1, 1) = r.gamma_minus;
    const cplx off(-(r.gamma_plus + r.gamma_minus) / 2.0, -r.lamb_shift);
    d(0, 1) = off;
    d(1, 0) = std::conj(off);

    Eig2 eig = hermitian_eig2(d);
    Matrix u = eig.vectors;
    std::array<double, 2> vals = eig.values;
    if (has_prev_) {
        // Keep each branch aligned with its predecessor: pick the column
        // pairing with the larger overlap, then fix the residual sign.
        const double keep = std::norm(column_overlap(prev_u_, 0, u, 0)) +
                            std::norm(column_overlap(prev_u_, 1, u, 1));
        const double crossed = std::norm(column_overlap(prev_u_, 0, u, 1)) +
                               std::norm(column_overlap(prev_u_, 1, u, 0));
        if (crossed > keep) {
            std::swap(vals[0], vals[1]);
            for (std::size_t i = 0; i < 2; ++i) std::swap(u(i, 0), u(i, 1));
        }
        for (std::size_t l = 0; l < 2; ++l) {
            if (column_overlap(prev_u_, l, u, l).real() < 0.0)
                for (std::size_t i = 0; i < 2; ++i) u(i, l) = -u(i, l);
        }
    }

    TransmonChannels out;
    out.basis = u;
    const Matrix sp = sigma_plus();
    const Matrix sm = sigma_minus();
    for (std::size_t l = 0; l < 2; ++l) {
        out.rates[l] = 2.0 * p_.c * vals[l];
        out.operators[l] = u(0, l) * sp + u(1, l) * sm;
    }
    out.hamiltonian = cplx(-(pi + p_.c * r.lamb_shift)) * sigma_z();

    prev_u_ = u;
    prev_s_ = s;
    has_prev_ = true;
    cached_ = out;
    cached_s_ = s;
    return cached_;
}

LindbladModel transmon_lindblad_model(std::shared_ptr<TransmonModel> m) {
    LindbladModel lm;
    lm.dim = 2;
    lm.hamiltonian_at = [m](double s) { return m->channels(s).hamiltonian; };
    for (std::size_t l = 0; l < 2; ++l) {
        lm.channels.push_back({[m, l](double s) { return m->channels(s).operators[l]; },
                               [m, l](double s) { return m->channels(s).rates[l]; }});
    }
    return lm;
}

LindbladModel transmon_lindblad_model(const TransmonParams& p) {
    return transmon_lindblad_model(std::make_shared<TransmonModel>(p));
}

// ---------------------------------------------------------------------------
// Tabulated models

namespace {

double interp_rate(const std::vector<std::pair<double, double>>& samples, double t) {
    if (samples.size() == 1) return samples.front().second;
    if (t < samples.front().first - 1e-12 || t > samples.back().first + 1e-12)
        throw OutOfRange("rate requested at t=" + format_double(t) +
                         " outside sampled window [" + format_double(samples.front().first) +
                         ", " + format_double(samples.back().first) + "]");
    t = std::clamp(t, samples.front().first, samples.back().first);
    auto hi = std::upper_bound(samples.begin(), samples.end(), t,
                               [](double v, const auto& s) { return v < s.first; });
    if (hi == samples.end()) return samples.back().second;
    if (hi == samples.begin()) return samples.front().second;
    auto lo = std::prev(hi);
    const double w = (t - lo->first) / (hi->first - lo->first);
    return lo->second + w * (hi->second - lo->second);
}

Matrix interp_hamiltonian(const std::vector<std::pair<double, Matrix>>& samples, double t) {
    if (samples.size() == 1) return samples.front().second;
    if (t < samples.front().first - 1e-12 || t > samples.back().first + 1e-12)
        throw OutOfRange("Hamiltonian requested at t=" + format_double(t) +
                         " outside sampled window");
    t = std::clamp(t, samples.front().first, samples.back().first);
    auto hi = std::upper_bound(samples.begin(), samples.end(), t,
                               [](double v, const auto& s) { return v < s.first; });
    if (hi == samples.end()) return samples.back().second;
    if (hi == samples.begin()) return samples.front().second;
    auto lo = std::prev(hi);
    const double w = (t - lo->first) / (hi->first - lo->first);
    Matrix out = lo->second;
    for (std::size_t i = 0; i < out.dim(); ++i)
        for (std::size_t j = 0; j < out.dim(); ++j)
            out(i, j) += w * (hi->second(i, j) - lo->second(i, j));
    return out;
}

template <typename T>
void require_increasing(const std::vector<std::pair<double, T>>& samples, const char* what) {
    for (std::size_t i = 1; i < samples.size(); ++i)
        if (!(samples[i].first > samples[i - 1].first))
            throw NonMonotonicTimes(std::string(what) + " sample times must be strictly increasing");
}

} // namespace

LindbladModel tabulated_model(TabulatedModelSpec spec) {
    if (spec.dim == 0) throw ConfigError("tabulated model: dim must be positive");
    if (spec.hamiltonian.empty())
        throw ConfigError("tabulated model: missing Hamiltonian");
    require_increasing(spec.hamiltonian, "Hamiltonian");
    for (const auto& [t, h] : spec.hamiltonian)
        if (h.dim() != spec.dim)
            throw ConfigError("tabulated model: Hamiltonian dim mismatch");
    for (const auto& ch : spec.channels) {
        if (ch.op.dim() != spec.dim)
            throw ConfigError("tabulated model: channel operator dim mismatch");
        if (ch.rates.empty())
            throw ConfigError("tabulated model: channel has no rate samples");
        require_increasing(ch.rates, "rate");
    }

    auto sp = std::make_shared<const TabulatedModelSpec>(std::move(spec));
    LindbladModel m;
    m.dim = sp->dim;
    m.hamiltonian_at = [sp](double t) { return interp_hamiltonian(sp->hamiltonian, t); };
    for (std::size_t l = 0; l < sp->channels.size(); ++l) {
        m.channels.push_back({[sp, l](double) { return sp->channels[l].op; },
                              [sp, l](double t) { return interp_rate(sp->channels[l].rates, t); }});
    }
    return m;
}

namespace {

struct ModelLine {
    int number;
    std::string text;
};

[[noreturn]] void fail(const std::string& name, int line, const std::string& msg) {
    throw ParseError(name + ":" + std::to_string(line) + ": " + msg);
}

std::vector<std::string> tokens_of(const std::string& line) {
    std::istringstream ss(line);
    std::vector<std::string> out;
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
}

bool is_keyword(const std::string& line) {
    return line == "channel:" || line == "rates:" || line == "hamiltonian:";
}

Matrix parse_matrix(const std::vector<ModelLine>& lines, std::size_t& pos, std::size_t dim,
                    const std::string& name, const std::string& what) {
    Matrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        if (pos >= lines.size())
            fail(name, lines.empty() ? 0 : lines.back().number, "unexpected end of " + what);
        const ModelLine& ln = lines[pos];
        auto toks = tokens_of(ln.text);
        if (toks.size() != dim)
            fail(name, ln.number,
                 what + " row needs " + std::to_string(dim) + " entries, got " +
                     std::to_string(toks.size()));
        for (std::size_t j = 0; j < dim; ++j) {
            try {
                m(i, j) = parse_complex(toks[j]);
            } catch (const ParseError& e) {
                fail(name, ln.number, e.what());
            }
        }
        ++pos;
    }
    return m;
}

} // namespace

TabulatedModelSpec parse_tabulated_model(std::istream& in, const std::string& name) {
    std::vector<ModelLine> lines;
    std::string raw;
    for (int n = 1; std::getline(in, raw); ++n) {
        const std::size_t hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string t = trim(raw);
        if (!t.empty()) lines.push_back({n, t});
    }
    if (lines.empty()) throw ParseError(name + ": empty model file");

    TabulatedModelSpec spec;
    std::size_t pos = 0;

    // Header: "dim=<n> channels=<k>"
    {
        const ModelLine& ln = lines[pos];
        std::size_t dim = 0, nch = 0;
        bool have_dim = false, have_ch = false;
        for (const auto& tok : tokens_of(ln.text)) {
            const auto eq = tok.find('=');
            if (eq == std::string::npos) fail(name, ln.number, "bad header token '" + tok + "'");
            const std::string key = tok.substr(0, eq);
            int value = 0;
            try {
                value = std::stoi(tok.substr(eq + 1));
            } catch (...) {
                fail(name, ln.number, "bad header value in '" + tok + "'");
            }
            if (value <= 0) fail(name, ln.number, "header value in '" + tok + "' must be positive");
            if (key == "dim") { dim = static_cast<std::size_t>(value); have_dim = true; }
            else if (key == "channels") { nch = static_cast<std::size_t>(value); have_ch = true; }
            else fail(name, ln.number, "unknown header key '" + key + "'");
        }
        if (!have_dim || !have_ch)
            fail(name, ln.number, "header must be 'dim=<n> channels=<k>'");
        spec.dim = dim;
        spec.channels.reserve(nch);
        ++pos;
        while (spec.channels.size() < nch) {
            if (pos >= lines.size() || lines[pos].text != "channel:")
                fail(name, pos < lines.size() ? lines[pos].number : lines.back().number,
                     "expected 'channel:' block " + std::to_string(spec.channels.size() + 1) +
                         " of " + std::to_string(nch));
            ++pos;
            TabulatedChannel ch;
            ch.op = parse_matrix(lines, pos, spec.dim, name, "channel operator");
            if (pos >= lines.size() || lines[pos].text != "rates:")
                fail(name, pos < lines.size() ? lines[pos].number : lines.back().number,
                     "expected 'rates:' after channel operator");
            ++pos;
            while (pos < lines.size() && !is_keyword(lines[pos].text)) {
                const ModelLine& rl = lines[pos];
                auto toks = tokens_of(rl.text);
                if (toks.size() != 2) fail(name, rl.number, "rate sample needs 't value'");
                try {
                    ch.rates.emplace_back(std::stod(toks[0]), std::stod(toks[1]));
                } catch (...) {
                    fail(name, rl.number, "bad rate sample '" + rl.text + "'");
                }
                ++pos;
            }
            if (ch.rates.empty())
                fail(name, lines[pos - 1].number, "channel needs at least one rate sample");
            spec.channels.push_back(std::move(ch));
        }
    }

    if (pos >= lines.size() || lines[pos].text != "hamiltonian:")
        fail(name, pos < lines.size() ? lines[pos].number : lines.back().number,
             "expected 'hamiltonian:' block");
    ++pos;
    if (pos >= lines.size())
        fail(name, lines.back().number, "unexpected end of Hamiltonian block");
    if (tokens_of(lines[pos].text).front() == "t") {
        while (pos < lines.size()) {
            const ModelLine& tl = lines[pos];
            auto toks = tokens_of(tl.text);
            if (toks.size() != 2 || toks[0] != "t")
                fail(name, tl.number, "expected 't <value>' before a Hamiltonian sample");
            double tv = 0.0;
            try {
                tv = std::stod(toks[1]);
            } catch (...) {
                fail(name, tl.number, "bad time value '" + toks[1] + "'");
            }
            ++pos;
            spec.hamiltonian.emplace_back(tv, parse_matrix(lines, pos, spec.dim, name,
                                                           "Hamiltonian sample"));
        }
    } else {
        spec.hamiltonian.emplace_back(0.0,
                                      parse_matrix(lines, pos, spec.dim, name, "Hamiltonian"));
        if (pos < lines.size())
            fail(name, lines[pos].number, "trailing content after Hamiltonian");
    }
    return spec;
}

TabulatedModelSpec load_tabulated_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open model file");
    return parse_tabulated_model(in, path);
}

} // namespace nmep
