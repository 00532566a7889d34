#include <cmath>
#include <vector>

#include "reinsure/errors.hpp"
#include "reinsure/model.hpp"

namespace reinsure {

Contract::Contract(Kind kind) : kind_(std::move(kind)) {
    if (const auto* c = std::get_if<CustomContract>(&kind_)) {
        if (!c->retained || !c->marginal) throw DomainError("custom contract needs g and dg/du");
        if (!(c->cap > 0.0)) throw DomainError("custom contract cap must be > 0");
    }
}

Contract Contract::custom(CustomContract c) { return Contract{Kind{std::move(c)}}; }

double Contract::cap() const {
    if (is_proportional()) return 1.0;
    if (is_excess_of_loss()) return kInf;
    return std::get<CustomContract>(kind_).cap;
}

double Contract::g(double z, double u) const {
    if (is_proportional()) return u * z;
    if (is_excess_of_loss()) return std::min(z, u);
    return std::get<CustomContract>(kind_).retained(z, u);
}

double Contract::dg_du(double z, double u) const {
    if (is_proportional()) return z;
    if (is_excess_of_loss()) return z > u ? 1.0 : 0.0;
    return std::get<CustomContract>(kind_).marginal(z, u);
}

std::string Contract::name() const {
    if (is_proportional()) return "proportional";
    if (is_excess_of_loss()) return "excess_of_loss";
    return std::get<CustomContract>(kind_).name;
}

double retained(const Contract& contract, double z, double u) {
    if (!(z >= 0.0)) throw DomainError("claim size must be >= 0");
    if (!(u >= 0.0 && u <= contract.cap())) throw DomainError("retention outside [0, I]");
    return contract.g(z, u);
}

namespace {

void check_retention(const Contract& contract, double u) {
    if (!(u >= 0.0 && u <= contract.cap())) throw DomainError("retention outside [0, I]");
}

// Largest exponential rate the integrand e^{a g(z,u)} can reach in z.
double effective_tilt(const Contract& contract, double a, double u) {
    if (contract.is_proportional()) return a * u;
    if (contract.is_excess_of_loss()) return std::isinf(u) ? a : 0.0;
    return a;
}

}  // namespace

double exp_moment(const ClaimDistribution& dist, double a, const Contract& contract, double u) {
    check_retention(contract, u);
    if (a == 0.0) return 1.0;
    const double tilt = effective_tilt(contract, a, u);
    if (tilt >= dist.mgf_abscissa()) throw DomainError("exponential moment of the retained loss diverges");
    std::vector<double> breaks;
    if (contract.is_excess_of_loss() && std::isfinite(u)) breaks.push_back(u);
    return dist.integrate([&](double z) { return std::exp(a * contract.g(z, u)); }, tilt, breaks);
}

ContractMoments exp_moment_companions(const ClaimDistribution& dist, double a, const Contract& contract,
                                      double u) {
    check_retention(contract, u);
    const double tilt = effective_tilt(contract, a, u);
    if (tilt >= dist.mgf_abscissa()) throw DomainError("exponential moment of the retained loss diverges");
    std::vector<double> breaks;
    if (contract.is_excess_of_loss() && std::isfinite(u)) breaks.push_back(u);

    const auto integral = [&](auto&& f, double t) { return dist.integrate(f, t, breaks); };
    ContractMoments m;
    m.exp_retained = a == 0.0 ? 1.0 : integral([&](double z) { return std::exp(a * contract.g(z, u)); }, tilt);
    m.exp_claim = a >= dist.mgf_abscissa() ? kInf : integral([&](double z) { return std::exp(a * z); }, a);
    m.exp_marginal =
        integral([&](double z) { return contract.dg_du(z, u) * std::exp(a * contract.g(z, u)); }, tilt);
    m.mean_claim = integral([](double z) { return z; }, 0.0);
    m.second_claim = integral([](double z) { return z * z; }, 0.0);
    m.mean_ceded = integral([&](double z) { return z - contract.g(z, u); }, 0.0);
    m.second_ceded = integral(
        [&](double z) {
            const double c = z - contract.g(z, u);
            return c * c;
        },
        0.0);
    m.mean_marginal = integral([&](double z) { return contract.dg_du(z, u); }, 0.0);
    m.ceded_marginal = integral([&](double z) { return (z - contract.g(z, u)) * contract.dg_du(z, u); }, 0.0);
    return m;
}

ContractMoments contract_moments(const ClaimDistribution& dist, double a, const Contract& contract, double u) {
    if (contract.is_custom()) return exp_moment_companions(dist, a, contract, u);
    check_retention(contract, u);

    ContractMoments m;
    m.mean_claim = dist.mean();
    m.second_claim = dist.second_moment();
    m.exp_claim = a >= dist.mgf_abscissa() ? kInf : mgf(dist, a);

    if (contract.is_proportional()) {
        const double k = a * u;
        m.exp_retained = mgf(dist, k);
        m.exp_marginal = mgf_derivative(dist, k);
        m.mean_marginal = m.mean_claim;
        m.mean_ceded = (1.0 - u) * m.mean_claim;
        m.second_ceded = (1.0 - u) * (1.0 - u) * m.second_claim;
        m.ceded_marginal = (1.0 - u) * m.second_claim;
        return m;
    }

    // Excess of loss: g = min(z, u), dg/du = 1{z > u}.
    if (std::isinf(u) || u >= dist.support_max()) {
        if (std::isinf(m.exp_claim)) throw DomainError("exponential moment of the retained loss diverges");
        m.exp_retained = m.exp_claim;
        return m;
    }
    const double tail = dist.survival(u);
    const double tail1 = dist.partial_moment(1, 0.0, u, kInf);
    const double tail2 = dist.partial_moment(2, 0.0, u, kInf);
    const double eu = std::exp(a * u);
    m.exp_retained = dist.partial_moment(0, a, -1.0, u) + eu * tail;
    m.exp_marginal = eu * tail;
    m.mean_marginal = tail;
    m.mean_ceded = std::max(tail1 - u * tail, 0.0);
    m.second_ceded = std::max(tail2 - 2.0 * u * tail1 + u * u * tail, 0.0);
    m.ceded_marginal = m.mean_ceded;
    return m;
}

}  // namespace reinsure
