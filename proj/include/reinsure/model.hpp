#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "reinsure/rng.hpp"

namespace reinsure {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Risk aversion, interest rate, horizon, initial capital and the two safety
// loadings (reinsurer theta, insurer theta_i).
struct MarketParams {
    double eta = 1.0;
    double rate_r = 0.0;
    double horizon_t = 1.0;
    double initial_wealth = 0.0;
    double theta = 0.3;
    double theta_i = 0.1;

    void validate() const;

    // eta * exp(R (T - t)): sensitivity of terminal disutility to a unit of
    // wealth lost at time t.
    double risk_factor(double t) const;
};

// ---------------------------------------------------------------------------
// Claim-size laws
// ---------------------------------------------------------------------------

struct Atom {
    double size;
    double prob;
};

struct DiscreteClaims {
    std::vector<Atom> atoms;
};
struct ExponentialClaims {
    double zeta;
};
struct GammaClaims {
    double alpha;
    double zeta;
};
// Normal(mu, sigma) conditioned on [0, inf).
struct TruncatedNormalClaims {
    double mu;
    double sigma;
};

class ClaimDistribution {
public:
    using Law = std::variant<DiscreteClaims, ExponentialClaims, GammaClaims, TruncatedNormalClaims>;

    explicit ClaimDistribution(Law law);

    static ClaimDistribution discrete(std::vector<Atom> atoms);
    static ClaimDistribution point_mass(double size) { return discrete({{size, 1.0}}); }
    static ClaimDistribution exponential(double zeta);
    static ClaimDistribution gamma(double alpha, double zeta);
    static ClaimDistribution truncated_normal(double mu, double sigma);

    const Law& law() const noexcept { return law_; }
    bool is_atomic() const noexcept { return std::holds_alternative<DiscreteClaims>(law_); }
    std::span<const Atom> atoms() const;

    double mean() const;
    double second_moment() const;

    // Supremum of k with E[e^{kZ}] finite (+inf for bounded or Gaussian tails).
    double mgf_abscissa() const;

    // Density (continuous laws) or atom mass (discrete laws) at z.
    double likelihood(double z) const;
    double survival(double z) const;  // P(Z > z)
    double quantile(double p) const;
    double support_max() const;

    // Closed-form partial moment  \int_{lo < z <= hi} z^power e^{a z} F(dz),
    // power in {0, 1, 2}. lo < 0 includes the whole lower tail.
    double partial_moment(int power, double a, double lo, double hi) const;

    // Quadrature route: \int f(z) F(dz) over [0, inf). Continuous laws use
    // adaptive Gauss-Kronrod on [0, q] with q chosen so that the Chernoff bound
    // of the dropped tail of (1 + z^2) e^{tilt z} is below 1e-13. `breaks` are
    // points where f may have a kink.
    double integrate(const std::function<double(double)>& f, double tilt = 0.0,
                     std::span<const double> breaks = {}) const;

    // Upper integration limit used by `integrate` for a given exponential tilt.
    double truncation_point(double tilt) const;

    double sample(Stream& rng) const;

    std::string describe() const;

    friend bool operator==(const ClaimDistribution& a, const ClaimDistribution& b);

private:
    Law law_;
};

// E[e^{kZ}] in closed form. DomainError if k is at or beyond the abscissa.
double mgf(const ClaimDistribution& dist, double k);
// d/dk E[e^{kZ}] = E[Z e^{kZ}].
double mgf_derivative(const ClaimDistribution& dist, double k);

// ---------------------------------------------------------------------------
// Reinsurance contracts: retained loss g(z, u), u in [0, I]
// ---------------------------------------------------------------------------

struct ProportionalContract {};
struct ExcessOfLossContract {};
struct CustomContract {
    std::string name;
    std::function<double(double z, double u)> retained;
    std::function<double(double z, double u)> marginal;  // dg/du
    double cap = 1.0;
    // Declares g linear or convex in u (sufficient for a concave driver).
    bool convex_in_u = false;
};

class Contract {
public:
    using Kind = std::variant<ProportionalContract, ExcessOfLossContract, CustomContract>;

    Contract() = default;
    explicit Contract(Kind kind);

    static Contract proportional() { return Contract{ProportionalContract{}}; }
    static Contract excess_of_loss() { return Contract{ExcessOfLossContract{}}; }
    static Contract custom(CustomContract c);

    const Kind& kind() const noexcept { return kind_; }
    bool is_proportional() const noexcept { return std::holds_alternative<ProportionalContract>(kind_); }
    bool is_excess_of_loss() const noexcept { return std::holds_alternative<ExcessOfLossContract>(kind_); }
    bool is_custom() const noexcept { return std::holds_alternative<CustomContract>(kind_); }

    // Retention bound I (1 for proportional, +inf for excess of loss).
    double cap() const;

    // g(z, u) and dg/du without range checks (hot paths).
    double g(double z, double u) const;
    double dg_du(double z, double u) const;

    std::string name() const;

private:
    Kind kind_ = ProportionalContract{};
};

// g(z, u); DomainError if u is outside [0, I] or z < 0.
double retained(const Contract& contract, double z, double u);

// ---------------------------------------------------------------------------
// Exponential moments of retained and ceded losses
// ---------------------------------------------------------------------------

// All integrals against one claim law F that the premia, the driver and its
// first-order condition need, for fixed (a, contract, u).
struct ContractMoments {
    double exp_retained = 0.0;    // \int e^{a g(z,u)} F(dz)
    double exp_claim = 0.0;       // \int e^{a z} F(dz)
    double exp_marginal = 0.0;    // \int dg/du e^{a g(z,u)} F(dz)
    double mean_claim = 0.0;      // \int z F(dz)
    double second_claim = 0.0;    // \int z^2 F(dz)
    double mean_ceded = 0.0;      // \int (z - g) F(dz)
    double second_ceded = 0.0;    // \int (z - g)^2 F(dz)
    double mean_marginal = 0.0;   // \int dg/du F(dz)
    double ceded_marginal = 0.0;  // \int (z - g) dg/du F(dz)
};

// \int e^{a g(z,u)} F(dz) by exact summation (discrete) or adaptive quadrature.
double exp_moment(const ClaimDistribution& dist, double a, const Contract& contract, double u);

// Quadrature route for every companion integral.
ContractMoments exp_moment_companions(const ClaimDistribution& dist, double a, const Contract& contract,
                                      double u);

// Closed forms for the standard contracts (via partial moments); falls back to
// the quadrature route for custom contracts.
ContractMoments contract_moments(const ClaimDistribution& dist, double a, const Contract& contract, double u);

// ---------------------------------------------------------------------------
// Hidden-chain model
// ---------------------------------------------------------------------------

struct ModelSpec {
    Eigen::MatrixXd generator;                 // Q, rows sum to zero
    std::vector<double> intensities;           // lambda_i > 0
    std::vector<ClaimDistribution> claims;     // F^i
    Eigen::VectorXd initial_distribution;      // law of Y_0

    std::size_t num_states() const noexcept { return intensities.size(); }
    double max_intensity() const;
    Eigen::VectorXd intensity_vector() const;

    // True when every state has the same claim-size law; the jump update then
    // ignores the observed size.
    bool shared_claims() const;
    bool intensities_sorted() const;
    // Either every F^i is discrete or none is.
    bool homogeneous_claim_types() const;

    void validate() const;

    static ModelSpec single_state(double lambda, ClaimDistribution dist);
};

struct StateAdmissibility {
    bool pass = false;
    double abscissa = 0.0;   // mgf abscissa of F^i
    double mgf_value = 0.0;  // E[e^{k Z}] at the binding constant (inf on failure)
};

struct AdmissibilityReport {
    bool pass = false;
    double binding_constant = 0.0;  // 2 eta e^{R T}
    std::vector<StateAdmissibility> states;
};

// Finite exponential moment of order 2 eta e^{RT} for every state law.
AdmissibilityReport check_admissibility(const ModelSpec& model, const MarketParams& mkt);

}  // namespace reinsure
