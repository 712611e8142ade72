#pragma once

#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include "treedyn/errors.hpp"

namespace treedyn::analytic {

enum class ModelKind { coalescing, voter, general };

/// The model's flow polynomial f and the derived potential V with
/// V'(rho) = f(rho) - rho. Coalescing/general use f(rho) = 1 - (1-rho)^d;
/// the voter uses f(rho) = 2 M(rho/2).
struct ModelSpec {
    ModelKind kind = ModelKind::coalescing;
    int branching = 2;

    static ModelSpec coalescing() { return {ModelKind::coalescing, 2}; }
    static ModelSpec voter() { return {ModelKind::voter, 3}; }
    static ModelSpec general(int d);

    double f(double rho) const;
    double f_prime(double rho) const;
    double potential(double rho) const;
    double potential_slope(double rho) const { return f(rho) - rho; }
    /// Exponential rate of 1 - rho(T) near the upper equilibrium:
    /// lambda = sqrt(1 - f'(1)).
    double tail_rate() const;
    std::string name() const;
};

struct GridSpec {
    double h = 0.01;
    double t_max = 15.0;
    std::size_t points() const; // N + 1 including both endpoints
};

/// Values of an increasing function [0, t_max] -> [0, 1] on a uniform grid,
/// extended past t_max by the tail model 1 - (1 - v_N) e^{-lambda (u - t_max)}.
class GridFunction {
public:
    GridFunction(GridSpec grid, std::vector<double> values, double lambda);

    const GridSpec& grid() const { return grid_; }
    double lambda() const { return lambda_; }
    std::size_t size() const { return values_.size(); }
    double at(std::size_t i) const { return values_[i]; }
    double time(std::size_t i) const { return static_cast<double>(i) * grid_.h; }
    const std::vector<double>& values() const { return values_; }

    /// Evaluate at an arbitrary point: grid nodes are exact (linear between
    /// nodes), the analytic tail applies beyond t_max.
    double operator()(double u) const;

    double sup_distance(const GridFunction& other) const;

    /// CSV: one metadata comment line, then "T,value" rows. Bit-stable for
    /// identical parameters (shortest round-trip decimals, LF endings).
    void write_csv(std::ostream& os, const std::string& model) const;

private:
    GridSpec grid_;
    std::vector<double> values_;
    double lambda_;
};

/// The upper envelope rho_1(T) = 1 - e^{-T}, the maximal element of the
/// domain of the integral transform.
GridFunction upper_envelope(const ModelSpec& model, const GridSpec& grid);

/// One application of the integral transform
/// chi(rho)(T) = int_0^inf e^{-s} ds int_0^T e^{t-T} dt f(rho(t+s)).
/// Rejects inputs outside the domain (non-increasing or above the envelope).
GridFunction chi_apply(const ModelSpec& model, const GridFunction& rho);

/// Iterates chi starting from the upper envelope; the sequence decreases
/// pointwise towards the maximal fixed point. Returns all iterates
/// (index 0 is the starting envelope).
std::vector<GridFunction> chi_iterate(const ModelSpec& model, int iterations,
                                      const GridSpec& grid);

/// Closed-form maximal fixed point for the coalescing model on the binary
/// tree: rho_inf(T) = 1 + 6 b e^{-T} / (b e^{-T} - 1)^2 with b = sqrt(3) - 2.
double closed_form_rho_inf(double T);
GridFunction closed_form_grid(const GridSpec& grid);

/// The non-trivial solution of rho'' = rho - f(rho) with rho(0) = 0 and
/// rho -> 1, integrated as the energy-conserving first-order reduction
/// rho' = sqrt(2 (V(1) - V(rho))).
GridFunction solve_heteroclinic(const ModelSpec& model, const GridSpec& grid);

/// sup over the grid of |chi(rho) - rho|.
double fixed_point_residual(const ModelSpec& model, const GridFunction& rho);

/// sup over interior grid points of |rho'' - (rho - f(rho))| with centered
/// second differences.
double ode_residual(const ModelSpec& model, const GridFunction& rho);

} // namespace treedyn::analytic
