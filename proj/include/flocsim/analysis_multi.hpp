#pragma once

// Positive equilibrium of the n-species reduced model with diagonal
// attachment, where species i only sees its own density:
//   S'   = D (S_in - S) - sum_i mu_i(S, x_i) x_i
//   x_i' = (mu_i(S, x_i) - d_i(x_i)) x_i

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "flocsim/analysis_single.hpp"
#include "flocsim/reduction.hpp"

namespace flocsim::multi {

class DiagonalMultiModel {
public:
    /// Throws PreconditionError when A has off-diagonal entries.
    explicit DiagonalMultiModel(const MultiReducedModel& model);
    /// Species given directly; all must share D and S_in and have p = p(x).
    explicit DiagonalMultiModel(std::vector<ReducedModel> species);

    std::size_t species() const noexcept { return species_.size(); }
    const ReducedModel& species_model(std::size_t i) const { return species_.at(i); }
    double D() const noexcept { return D_; }
    double S_in() const noexcept { return S_in_; }

    const single::BreakEven& break_even(std::size_t i) const { return break_even_.at(i); }
    /// max_i lambda0i and min_i lambda1i.
    const single::Threshold& lambda0_max() const noexcept { return lambda0_max_; }
    const single::Threshold& lambda1_min() const noexcept { return lambda1_min_; }

private:
    void init();

    std::vector<ReducedModel> species_;
    double D_ = 0.0;
    double S_in_ = 0.0;
    std::vector<single::BreakEven> break_even_;
    single::Threshold lambda0_max_ = single::Threshold::infinite();
    single::Threshold lambda1_min_ = single::Threshold::infinite();
};

/// Biomass of species i in balance with substrate S: 0 for S <= lambda0i,
/// else the x with mu_i(S, x) = d_i(x). DomainError for S >= lambda1i.
double X(const DiagonalMultiModel& model, std::size_t i, double s);

/// h_i(S) = mu_i(S, X_i(S)) X_i(S).
double h(const DiagonalMultiModel& model, std::size_t i, double s);

/// H(S) = sum_i h_i(S) - D (S_in - S).
double H(const DiagonalMultiModel& model, double s);

struct MultiHypothesisReport {
    /// Per species, the single-species checks H0..H3 play the roles of
    /// H5..H8.
    std::vector<single::HypothesisReport> species;
    /// lambda0i < lambda1i, the ordering half of H8.
    std::vector<bool> ordered;
    bool h9 = false;

    /// One line per violated hypothesis, e.g. "H6 (species 2): ...".
    std::vector<std::string> violations() const;
    bool holds() const { return violations().empty(); }
};

MultiHypothesisReport check_multi_hypotheses(const DiagonalMultiModel& model);

struct MultiEquilibrium {
    double S_star = 0.0;
    std::vector<double> x_star;
    Eigen::MatrixXd jacobian;
    std::vector<numerics::Complex> eigenvalues;
    bool stable = false;
    /// |D (S_in - S*) - sum mu_i x_i*| and max_i |mu_i - d_i| at E*.
    double mass_residual = 0.0;
    double growth_residual = 0.0;
    /// H(lambda0_max), negative exactly when the equilibrium exists.
    double criterion = 0.0;
};

/// Returns nullopt when H(lambda0_max) >= 0. Throws PreconditionError
/// listing the violated hypotheses unless `assume_hypotheses` is set, and
/// NumericError when the equilibrium found is not stable or misses the
/// residual bound.
std::optional<MultiEquilibrium> solve_positive_equilibrium(const DiagonalMultiModel& model,
                                                           bool assume_hypotheses = false);

/// (n+1) x (n+1) matrix with first row (-D - sum a, c_1..c_n), first column
/// (., a_1..a_n) and diagonal -b_i below.
Eigen::MatrixXd arrowhead_matrix(const std::vector<double>& a, const std::vector<double>& b,
                                 const std::vector<double>& c, double D);

/// max Re(lambda) < 0 for arrowhead_matrix(a, b, c, D).
bool arrowhead_stability(const std::vector<double>& a, const std::vector<double>& b,
                         const std::vector<double>& c, double D);

struct HCurves {
    std::vector<double> S;
    /// h[i][k] = h_i(S[k]).
    std::vector<std::vector<double>> h;
    std::vector<double> H;

    /// Header `S,h_1,...,h_n,H`.
    std::string to_csv() const;
};

/// Samples h_i and H on `points` equally spaced values in [0, S_end),
/// S_end = lambda1_min when finite, else 1.5 S_in.
HCurves h_curves(const DiagonalMultiModel& model, std::size_t points = 512);

} // namespace flocsim::multi
