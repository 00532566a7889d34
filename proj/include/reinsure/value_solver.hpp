#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "reinsure/filter.hpp"
#include "reinsure/model.hpp"
#include "reinsure/premium.hpp"
#include "reinsure/simplex.hpp"

namespace reinsure {

enum class BoundaryTag { AtZero, Interior, AtCap };

std::string to_string(BoundaryTag tag);
BoundaryTag tag_from_string(const std::string& s);

struct SolverConfig {
    int time_steps = 500;
    int resolution = 201;  // lattice points per simplex edge
    double root_tol = 1e-10;
    // Composite Gauss-Legendre panels for state-dependent continuous claim laws.
    int quadrature_panels = 48;
    double terminal_value = 1.0;
    double search_quantile = 0.999;
    double stability_limit = 0.5;

    void validate() const;
};

// Slices of a function on (uniform time grid) x (simplex lattice).
struct GridTable {
    std::vector<double> times;
    std::shared_ptr<const SimplexLattice> lattice;
    std::vector<std::vector<double>> slices;

    std::size_t num_times() const noexcept { return times.size(); }
    // Linear in time between slices, barycentric on the lattice.
    double at(double t, const Eigen::VectorXd& pi) const;
    double at_slice(std::size_t k, const Eigen::VectorXd& pi) const;
};

struct ValueTable : GridTable {};

struct PolicyTable : GridTable {
    std::vector<std::vector<BoundaryTag>> tags;
    double cap = 1.0;
};

struct Solution {
    ValueTable value;
    PolicyTable policy;
};

struct OptimizeResult {
    double u;
    BoundaryTag tag;
};

// Everything the driver needs about v around one filter state pi.
struct JumpSample {
    Eigen::VectorXd pi;
    double v = 1.0;           // v(pi)
    double lambda_bar = 0.0;  // sum_i pi_i lambda_i
    double v_jump = 1.0;      // v(W(pi)) when the claim law is shared
    std::vector<double> weights;  // per node: sum_i pi_i lambda_i f_i(z_j) omega_j
    std::vector<double> v_nodes;  // per node: v(W(pi, z_j))
};

// The pointwise driver h(t, pi, u) and its maximizer.
class Driver {
public:
    Driver(const ModelSpec& model, const Contract& contract, std::shared_ptr<const PremiumModel> premia,
           const MarketParams& mkt, const SolverConfig& config = {});

    const ModelSpec& model() const noexcept { return flow_.model(); }
    const FilterFlow& flow() const noexcept { return flow_; }
    const PremiumModel& premia() const noexcept { return *premia_; }
    const MarketParams& market() const noexcept { return mkt_; }
    const Contract& contract() const noexcept { return contract_; }
    bool shared() const noexcept { return shared_; }
    const std::vector<double>& nodes() const noexcept { return nodes_; }

    std::vector<double> node_weights(const Eigen::VectorXd& pi) const;

    // Fill a JumpSample from an arbitrary value function of pi.
    template <class VFun>
    JumpSample sample(const Eigen::VectorXd& pi, const VFun& v) const {
        JumpSample s;
        s.pi = pi;
        s.v = v(pi);
        s.lambda_bar = lambda_.dot(pi);
        if (shared_) {
            s.v_jump = v(flow_.jump_shared(pi));
        } else {
            s.weights = node_weights(pi);
            s.v_nodes.assign(nodes_.size(), 0.0);
            for (std::size_t j = 0; j < nodes_.size(); ++j)
                if (s.weights[j] > 0.0) s.v_nodes[j] = v(flow_.jump(pi, nodes_[j]));
        }
        return s;
    }

    double h(const JumpSample& s, double t, double u) const;
    double dh_du(const JumpSample& s, double t, double u) const;
    // sum_i pi_i lambda_i \int e^{kappa g(z,u)} v(W(pi, z)) F^i(dz)
    double jump_term(const JumpSample& s, double kappa, double u) const;
    double premium(const JumpSample& s, double t, double u) const;

    OptimizeResult optimize(const JumpSample& s, double t) const;

    // Grid end for an infinite retention cap.
    double search_top() const noexcept { return search_top_; }
    double search_limit() const noexcept { return search_limit_; }

private:
    double exp_integral(const JumpSample& s, double kappa, double u, bool marginal) const;

    FilterFlow flow_;
    Contract contract_;
    std::shared_ptr<const PremiumModel> premia_;
    MarketParams mkt_;
    SolverConfig config_;
    Eigen::VectorXd lambda_;
    bool shared_;
    std::vector<double> nodes_;
    std::vector<double> node_omega_;
    double search_top_;
    double search_limit_;
};

// Hypotheses of the concavity result (q and g linear or convex in u) or, for
// custom rules, a monotone derivative on a probe grid; NonConcaveError otherwise.
void check_concavity(const Driver& driver);

double hamiltonian_h(double t, const Eigen::VectorXd& pi, double u, const std::function<double(const Eigen::VectorXd&)>& v,
                     const Driver& driver);
OptimizeResult optimize_u(double t, const Eigen::VectorXd& pi, const std::function<double(const Eigen::VectorXd&)>& v,
                          const Driver& driver);

Solution solve_backward(const ModelSpec& model, const Contract& contract, std::shared_ptr<const PremiumModel> premia,
                        const MarketParams& mkt, const SolverConfig& config);
Solution solve_backward(const ModelSpec& model, const Contract& contract, const PremiumSpec& spec,
                        const MarketParams& mkt, const SolverConfig& config);

struct SingleStateSolution {
    std::vector<double> times;
    std::vector<double> value;
    std::vector<double> retention;
};

// RK4 on v' = v [kappa c + lambda - min_u {kappa q^u + lambda \int e^{kappa g} F}],
// v(T) = terminal, using quadrature moments.
SingleStateSolution single_state_oracle(const ModelSpec& model, const Contract& contract, const PremiumSpec& spec,
                                        const MarketParams& mkt, int steps, double terminal = 1.0);

// Optimal retention when the hidden state is known to be `state`.
double full_info_retention(const ModelSpec& model, std::size_t state, const Contract& contract, const PremiumSpec& spec,
                           const MarketParams& mkt, double t, double tol = 1e-10);

void write_solution_csv(std::ostream& os, const Solution& sol, int time_stride = 1);
Solution read_solution_csv(std::istream& is);

}  // namespace reinsure
