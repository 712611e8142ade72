#include "treedyn/analytic.hpp"

#include <charconv>
#include <cmath>
#include <string>

namespace treedyn::analytic {

namespace {

constexpr double kDomainSlack = 1e-9;

void append_double(std::string& out, double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, res.ptr);
}

/// Cumulative integral on a uniform grid, locally 4th order (Simpson pairs
/// with a quadratic half-panel at odd offsets).
std::vector<double> cumulative_integral(double h, const std::vector<double>& w) {
    std::vector<double> out(w.size(), 0.0);
    if (w.size() >= 3) {
        out[1] = h / 12.0 * (5.0 * w[0] + 8.0 * w[1] - w[2]);
        for (std::size_t i = 2; i < w.size(); ++i)
            out[i] = out[i - 2] + h / 3.0 * (w[i - 2] + 4.0 * w[i - 1] + w[i]);
    } else if (w.size() == 2) {
        out[1] = 0.5 * h * (w[0] + w[1]);
    }
    return out;
}

} // namespace

ModelSpec ModelSpec::general(int d) {
    if (d < 2) throw config_error("ModelSpec: branching must be at least 2");
    return {ModelKind::general, d};
}

double ModelSpec::f(double rho) const {
    if (kind == ModelKind::voter)
        return rho * (1.5 + rho * (-0.75 + rho * 0.25));
    return 1.0 - std::pow(1.0 - rho, branching);
}

double ModelSpec::f_prime(double rho) const {
    if (kind == ModelKind::voter)
        return 1.5 - 1.5 * rho + 0.75 * rho * rho;
    return branching * std::pow(1.0 - rho, branching - 1);
}

double ModelSpec::potential(double rho) const {
    if (kind == ModelKind::voter)
        return rho * rho * (0.25 + rho * (-0.25 + rho * 0.0625));
    // primitive of f(u) - u with f(u) = 1 - (1-u)^d
    const double d1 = static_cast<double>(branching) + 1.0;
    return rho + (std::pow(1.0 - rho, d1) - 1.0) / d1 - 0.5 * rho * rho;
}

double ModelSpec::tail_rate() const {
    return std::sqrt(1.0 - f_prime(1.0));
}

std::string ModelSpec::name() const {
    switch (kind) {
    case ModelKind::coalescing: return "coalescing";
    case ModelKind::voter: return "voter";
    case ModelKind::general: return "general-d" + std::to_string(branching);
    }
    return "unknown";
}

std::size_t GridSpec::points() const {
    if (h <= 0.0 || t_max <= 0.0) throw config_error("GridSpec: h and t_max must be positive");
    return static_cast<std::size_t>(std::llround(t_max / h)) + 1;
}

GridFunction::GridFunction(GridSpec grid, std::vector<double> values, double lambda)
    : grid_(grid), values_(std::move(values)), lambda_(lambda) {
    if (values_.size() != grid_.points())
        throw config_error("GridFunction: value count does not match the grid");
    if (lambda_ <= 0.0) throw config_error("GridFunction: lambda must be positive");
}

double GridFunction::operator()(double u) const {
    if (u >= grid_.t_max)
        return 1.0 - (1.0 - values_.back()) * std::exp(-lambda_ * (u - grid_.t_max));
    if (u <= 0.0) return values_.front();
    const double x = u / grid_.h;
    const std::size_t i = static_cast<std::size_t>(x);
    const double frac = x - static_cast<double>(i);
    if (i + 1 >= values_.size()) return values_.back();
    return values_[i] * (1.0 - frac) + values_[i + 1] * frac;
}

double GridFunction::sup_distance(const GridFunction& other) const {
    if (values_.size() != other.values_.size())
        throw config_error("sup_distance: grids differ");
    double d = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i)
        d = std::max(d, std::abs(values_[i] - other.values_[i]));
    return d;
}

void GridFunction::write_csv(std::ostream& os, const std::string& model) const {
    std::string out = "# model=" + model + " h=";
    append_double(out, grid_.h);
    out += " t_max=";
    append_double(out, grid_.t_max);
    out += " lambda=";
    append_double(out, lambda_);
    out += "\nT,value\n";
    for (std::size_t i = 0; i < values_.size(); ++i) {
        append_double(out, time(i));
        out.push_back(',');
        append_double(out, values_[i]);
        out.push_back('\n');
    }
    os << out;
}

GridFunction upper_envelope(const ModelSpec& model, const GridSpec& grid) {
    std::vector<double> v(grid.points());
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = 1.0 - std::exp(-static_cast<double>(i) * grid.h);
    // The envelope itself decays at unit rate for every model.
    (void)model;
    return GridFunction(grid, std::move(v), 1.0);
}

GridFunction chi_apply(const ModelSpec& model, const GridFunction& rho) {
    const GridSpec& grid = rho.grid();
    const std::size_t n = rho.size();
    const double h = grid.h;
    // Domain check: increasing and below the envelope 1 - e^{-T}, to slack.
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0 && rho.at(i) < rho.at(i - 1) - kDomainSlack)
            throw numerical_error("chi_apply: input not increasing at grid index " +
                                  std::to_string(i));
        if (rho.at(i) > 1.0 - std::exp(-rho.time(i)) + kDomainSlack)
            throw numerical_error("chi_apply: input above the envelope at grid index " +
                                  std::to_string(i));
    }

    // Inner integral: H(t) = int_t^inf e^{-u} f(rho(u)) du, computed on the
    // grid by backward cumulative quadrature; the tail beyond t_max uses the
    // analytic tail model until its contribution bound drops below 1e-10.
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i)
        w[i] = std::exp(-rho.time(i)) * model.f(rho.at(i));
    double tail = 0.0;
    {
        // Simpson over [t_max, t_max + L], L wide enough that e^{-u} kills
        // the remainder below 1e-10 relative weight.
        const double L = 40.0;
        const std::size_t m0 = static_cast<std::size_t>(std::llround(L / h));
        const std::size_t m = m0 % 2 == 0 ? m0 : m0 + 1;
        auto g = [&](std::size_t j) {
            const double u = grid.t_max + static_cast<double>(j) * h;
            return std::exp(-u) * model.f(rho(u));
        };
        double acc = g(0) + g(m);
        for (std::size_t j = 1; j < m; ++j) acc += (j % 2 == 1 ? 4.0 : 2.0) * g(j);
        tail = acc * h / 3.0;
    }
    std::vector<double> w_rev(w.rbegin(), w.rend());
    std::vector<double> h_rev = cumulative_integral(h, w_rev);
    std::vector<double> H(n);
    for (std::size_t i = 0; i < n; ++i) H[i] = tail + h_rev[n - 1 - i];

    // Outer integral: chi(T) = e^{-T} int_0^T e^{2t} H(t) dt.
    std::vector<double> integrand(n);
    for (std::size_t i = 0; i < n; ++i)
        integrand[i] = std::exp(2.0 * rho.time(i)) * H[i];
    std::vector<double> K = cumulative_integral(h, integrand);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        double v = std::exp(-rho.time(i)) * K[i];
        out[i] = std::min(1.0, std::max(0.0, v));
    }
    return GridFunction(grid, std::move(out), model.tail_rate());
}

std::vector<GridFunction> chi_iterate(const ModelSpec& model, int iterations,
                                      const GridSpec& grid) {
    if (iterations < 1) throw config_error("chi_iterate: need at least one iteration");
    std::vector<GridFunction> iterates;
    iterates.push_back(upper_envelope(model, grid));
    for (int it = 0; it < iterations; ++it) {
        GridFunction next = chi_apply(model, iterates.back());
        const GridFunction& prev = iterates.back();
        for (std::size_t i = 0; i < next.size(); ++i)
            if (next.at(i) > prev.at(i) + kDomainSlack)
                throw numerical_error("chi_iterate: monotonicity lost at grid index " +
                                      std::to_string(i));
        iterates.push_back(std::move(next));
    }
    return iterates;
}

double closed_form_rho_inf(double T) {
    if (T < 0.0) throw contract_violation("closed_form_rho_inf: T must be non-negative");
    const double b = std::sqrt(3.0) - 2.0;
    const double e = b * std::exp(-T);
    return 1.0 + 6.0 * e / ((e - 1.0) * (e - 1.0));
}

GridFunction closed_form_grid(const GridSpec& grid) {
    std::vector<double> v(grid.points());
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = closed_form_rho_inf(static_cast<double>(i) * grid.h);
    return GridFunction(grid, std::move(v), 1.0);
}

GridFunction solve_heteroclinic(const ModelSpec& model, const GridSpec& grid) {
    const double energy = model.potential(1.0);
    auto slope = [&](double rho) {
        const double radicand = 2.0 * (energy - model.potential(rho));
        if (radicand < -1e-12)
            throw numerical_error("solve_heteroclinic: negative radicand");
        return std::sqrt(std::max(0.0, radicand));
    };
    const double lambda = model.tail_rate();
    const std::size_t n = grid.points();
    std::vector<double> v(n);
    v[0] = 0.0;
    const double h = grid.h;
    std::size_t switched_at = n;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (1.0 - v[i] < 1e-6) {
            // Past the square-root degeneracy: continue with the linearized
            // exponential approach to 1.
            switched_at = i;
            break;
        }
        const double k1 = slope(v[i]);
        const double k2 = slope(std::min(1.0, v[i] + 0.5 * h * k1));
        const double k3 = slope(std::min(1.0, v[i] + 0.5 * h * k2));
        const double k4 = slope(std::min(1.0, v[i] + h * k3));
        v[i + 1] = v[i] + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (v[i + 1] > 1.0) v[i + 1] = 1.0;
    }
    if (switched_at < n) {
        const double gap = 1.0 - v[switched_at];
        for (std::size_t i = switched_at + 1; i < n; ++i)
            v[i] = 1.0 - gap * std::exp(-lambda * static_cast<double>(i - switched_at) * h);
    }
    return GridFunction(grid, std::move(v), lambda);
}

double fixed_point_residual(const ModelSpec& model, const GridFunction& rho) {
    GridFunction image = chi_apply(model, rho);
    return image.sup_distance(rho);
}

double ode_residual(const ModelSpec& model, const GridFunction& rho) {
    const double h = rho.grid().h;
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < rho.size(); ++i) {
        const double second =
            (rho.at(i - 1) - 2.0 * rho.at(i) + rho.at(i + 1)) / (h * h);
        const double rhs = rho.at(i) - model.f(rho.at(i));
        worst = std::max(worst, std::abs(second - rhs));
    }
    return worst;
}

} // namespace treedyn::analytic
