#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "reinsure/errors.hpp"
#include "reinsure/model.hpp"

namespace reinsure {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

double norm_pdf(double x) { return std::isinf(x) ? 0.0 : kInvSqrt2Pi * std::exp(-0.5 * x * x); }
double norm_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }
double norm_sf(double x) { return 0.5 * std::erfc(x / kSqrt2); }

// P(lo < X <= hi) for standard normal X without cancellation in either tail.
double norm_interval(double lo, double hi) {
    if (hi <= lo) return 0.0;
    if (lo >= 0.0) return norm_sf(lo) - norm_sf(hi);
    if (hi <= 0.0) return norm_cdf(hi) - norm_cdf(lo);
    return 1.0 - norm_cdf(lo) - norm_sf(hi);
}

double gk(const std::function<double(double)>& f, double lo, double hi) {
    if (!(hi > lo)) return 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, lo, hi, 20, 1e-13);
}

double rising(double x, int n) {
    double r = 1.0;
    for (int i = 0; i < n; ++i) r *= x + i;
    return r;
}

// \int_{lo < z <= hi} z^p e^{az} Gamma(alpha, zeta)(dz) for b = zeta - a > 0.
double gamma_partial(double alpha, double zeta, int p, double a, double lo, double hi) {
    const double b = zeta - a;
    const double s = alpha + p;
    const double xlo = std::max(lo, 0.0) * b;
    double mass;
    if (std::isinf(hi)) {
        mass = xlo <= 0.0 ? 1.0 : boost::math::gamma_q(s, xlo);
    } else {
        const double xhi = hi * b;
        if (xlo > s) {
            mass = boost::math::gamma_q(s, xlo) - boost::math::gamma_q(s, xhi);
        } else {
            mass = boost::math::gamma_p(s, xhi) - (xlo <= 0.0 ? 0.0 : boost::math::gamma_p(s, xlo));
        }
    }
    return std::pow(zeta / b, alpha) * rising(alpha, p) / std::pow(b, p) * mass;
}

}  // namespace

ClaimDistribution::ClaimDistribution(Law law) : law_(std::move(law)) {
    std::visit(
        [](auto& l) {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, DiscreteClaims>) {
                if (l.atoms.empty()) throw DomainError("discrete claim law needs at least one atom");
                double total = 0.0;
                for (const auto& a : l.atoms) {
                    if (!(a.size >= 0.0) || !std::isfinite(a.size)) throw DomainError("atom sizes must be finite and >= 0");
                    if (!(a.prob > 0.0)) throw DomainError("atom probabilities must be > 0");
                    total += a.prob;
                }
                if (std::abs(total - 1.0) > 1e-12) throw DomainError("atom probabilities must sum to 1");
                std::sort(l.atoms.begin(), l.atoms.end(), [](const Atom& x, const Atom& y) { return x.size < y.size; });
                for (std::size_t i = 1; i < l.atoms.size(); ++i)
                    if (l.atoms[i].size == l.atoms[i - 1].size) throw DomainError("duplicate atom size");
            } else if constexpr (std::is_same_v<T, ExponentialClaims>) {
                if (!(l.zeta > 0.0)) throw DomainError("exponential zeta must be > 0");
            } else if constexpr (std::is_same_v<T, GammaClaims>) {
                if (!(l.alpha > 0.0) || !(l.zeta > 0.0)) throw DomainError("gamma alpha and zeta must be > 0");
            } else {
                if (!(l.sigma > 0.0) || !std::isfinite(l.mu)) throw DomainError("truncated normal needs sigma > 0");
            }
        },
        law_);
}

ClaimDistribution ClaimDistribution::discrete(std::vector<Atom> atoms) { return ClaimDistribution{DiscreteClaims{std::move(atoms)}}; }
ClaimDistribution ClaimDistribution::exponential(double zeta) { return ClaimDistribution{ExponentialClaims{zeta}}; }
ClaimDistribution ClaimDistribution::gamma(double alpha, double zeta) { return ClaimDistribution{GammaClaims{alpha, zeta}}; }
ClaimDistribution ClaimDistribution::truncated_normal(double mu, double sigma) {
    return ClaimDistribution{TruncatedNormalClaims{mu, sigma}};
}

std::span<const Atom> ClaimDistribution::atoms() const {
    if (const auto* d = std::get_if<DiscreteClaims>(&law_)) return d->atoms;
    return {};
}

double ClaimDistribution::mean() const { return partial_moment(1, 0.0, -1.0, kInf); }
double ClaimDistribution::second_moment() const { return partial_moment(2, 0.0, -1.0, kInf); }

double ClaimDistribution::mgf_abscissa() const {
    if (const auto* e = std::get_if<ExponentialClaims>(&law_)) return e->zeta;
    if (const auto* g = std::get_if<GammaClaims>(&law_)) return g->zeta;
    return kInf;
}

double ClaimDistribution::likelihood(double z) const {
    return std::visit(
        [z](const auto& l) -> double {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, DiscreteClaims>) {
                for (const auto& a : l.atoms)
                    if (a.size == z) return a.prob;
                return 0.0;
            } else if constexpr (std::is_same_v<T, ExponentialClaims>) {
                return z < 0.0 ? 0.0 : l.zeta * std::exp(-l.zeta * z);
            } else if constexpr (std::is_same_v<T, GammaClaims>) {
                if (z < 0.0) return 0.0;
                if (z == 0.0) return l.alpha < 1.0 ? kInf : (l.alpha == 1.0 ? l.zeta : 0.0);
                return std::exp((l.alpha - 1.0) * std::log(z) - l.zeta * z + l.alpha * std::log(l.zeta) -
                                std::lgamma(l.alpha));
            } else {
                if (z < 0.0) return 0.0;
                return norm_pdf((z - l.mu) / l.sigma) / (l.sigma * norm_cdf(l.mu / l.sigma));
            }
        },
        law_);
}

double ClaimDistribution::survival(double z) const {
    return std::visit(
        [z](const auto& l) -> double {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, DiscreteClaims>) {
                double s = 0.0;
                for (const auto& a : l.atoms)
                    if (a.size > z) s += a.prob;
                return s;
            } else if constexpr (std::is_same_v<T, ExponentialClaims>) {
                return z <= 0.0 ? 1.0 : std::exp(-l.zeta * z);
            } else if constexpr (std::is_same_v<T, GammaClaims>) {
                return z <= 0.0 ? 1.0 : boost::math::gamma_q(l.alpha, l.zeta * z);
            } else {
                if (z <= 0.0) return 1.0;
                return norm_sf((z - l.mu) / l.sigma) / norm_cdf(l.mu / l.sigma);
            }
        },
        law_);
}

double ClaimDistribution::quantile(double p) const {
    if (!(p >= 0.0 && p < 1.0)) throw DomainError("quantile level must lie in [0, 1)");
    return std::visit(
        [p](const auto& l) -> double {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, DiscreteClaims>) {
                double c = 0.0;
                for (const auto& a : l.atoms) {
                    c += a.prob;
                    if (c >= p) return a.size;
                }
                return l.atoms.back().size;
            } else if constexpr (std::is_same_v<T, ExponentialClaims>) {
                return -std::log1p(-p) / l.zeta;
            } else if constexpr (std::is_same_v<T, GammaClaims>) {
                return boost::math::gamma_q_inv(l.alpha, 1.0 - p) / l.zeta;
            } else {
                const boost::math::normal_distribution<double> n01;
                const double tail = (1.0 - p) * norm_cdf(l.mu / l.sigma);
                return std::max(0.0, l.mu + l.sigma * boost::math::quantile(boost::math::complement(n01, tail)));
            }
        },
        law_);
}

double ClaimDistribution::support_max() const {
    if (const auto* d = std::get_if<DiscreteClaims>(&law_)) return d->atoms.back().size;
    return kInf;
}

double ClaimDistribution::partial_moment(int power, double a, double lo, double hi) const {
    if (power < 0 || power > 2) throw DomainError("partial_moment supports powers 0, 1, 2");
    if (!(hi > lo)) return 0.0;
    return std::visit(
        [&](const auto& l) -> double {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, DiscreteClaims>) {
                double s = 0.0;
                for (const auto& at : l.atoms)
                    if (at.size > lo && at.size <= hi) s += at.prob * std::pow(at.size, power) * std::exp(a * at.size);
                return s;
            } else if constexpr (std::is_same_v<T, TruncatedNormalClaims>) {
                // e^{az} phi((z-mu)/sigma) = e^{a mu + a^2 sigma^2 / 2} phi((z - mu')/sigma)
                const double shifted = l.mu + a * l.sigma * l.sigma;
                const double scale = std::exp(a * l.mu + 0.5 * a * a * l.sigma * l.sigma) / norm_cdf(l.mu / l.sigma);
                const double x0 = (std::max(lo, 0.0) - shifted) / l.sigma;
                const double x1 = std::isinf(hi) ? kInf : (hi - shifted) / l.sigma;
                const double mass = norm_interval(x0, x1);
                const double dpdf = norm_pdf(x0) - norm_pdf(x1);
                if (power == 0) return scale * mass;
                if (power == 1) return scale * (shifted * mass + l.sigma * dpdf);
                const double xpdf = x0 * norm_pdf(x0) - (std::isinf(x1) ? 0.0 : x1 * norm_pdf(x1));
                return scale * ((shifted * shifted + l.sigma * l.sigma) * mass + 2.0 * shifted * l.sigma * dpdf +
                                l.sigma * l.sigma * xpdf);
            } else {
                double alpha, zeta;
                if constexpr (std::is_same_v<T, ExponentialClaims>) {
                    alpha = 1.0;
                    zeta = l.zeta;
                } else {
                    alpha = l.alpha;
                    zeta = l.zeta;
                }
                if (zeta - a > 0.0) return gamma_partial(alpha, zeta, power, a, lo, hi);
                if (std::isinf(hi)) throw DomainError("exponential moment diverges: tilt beyond abscissa");
                const auto f = [&](double z) { return std::pow(z, power) * std::exp(a * z) * likelihood(z); };
                return gk(f, std::max(lo, 0.0), hi);
            }
        },
        law_);
}

double ClaimDistribution::truncation_point(double tilt) const {
    if (is_atomic()) return support_max();
    const double abscissa = mgf_abscissa();
    tilt = std::max(tilt, 0.0);
    if (tilt >= abscissa) throw DomainError("exponential tilt beyond the mgf abscissa");
    const double gap = std::isinf(abscissa) ? 3.0 : abscissa - tilt;
    const double s = std::min(gap / 3.0, 1.0);
    // (1 + z^2) <= c e^{s z};  \int_q^inf e^{(t+s) z} F <= e^{-s q} m(t + 2 s).
    const double c = 1.0 + 4.0 / (s * s * std::exp(2.0));
    const double bound = c * mgf(*this, tilt + 2.0 * s);
    const double q_chernoff = std::log(bound / 1e-13) / s;
    return std::max(quantile(1.0 - 1e-10), q_chernoff);
}

double ClaimDistribution::integrate(const std::function<double(double)>& f, double tilt,
                                    std::span<const double> breaks) const {
    if (const auto* d = std::get_if<DiscreteClaims>(&law_)) {
        double s = 0.0;
        for (const auto& a : d->atoms) s += a.prob * f(a.size);
        return s;
    }
    const double q = truncation_point(tilt);
    std::vector<double> pts{0.0};
    for (double b : breaks)
        if (b > 0.0 && b < q) pts.push_back(b);
    pts.push_back(q);
    std::sort(pts.begin(), pts.end());
    const auto g = [&](double z) {
        const double w = likelihood(z);
        return w == 0.0 ? 0.0 : f(z) * w;
    };
    double total = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i) total += gk(g, pts[i - 1], pts[i]);
    return total;
}

double ClaimDistribution::sample(Stream& rng) const {
    return std::visit(
        [&rng](const auto& l) -> double {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, DiscreteClaims>) {
                const double u = rng.uniform();
                double c = 0.0;
                for (const auto& a : l.atoms) {
                    c += a.prob;
                    if (u <= c) return a.size;
                }
                return l.atoms.back().size;
            } else if constexpr (std::is_same_v<T, ExponentialClaims>) {
                return -std::log(rng.uniform()) / l.zeta;
            } else if constexpr (std::is_same_v<T, GammaClaims>) {
                std::gamma_distribution<double> g(l.alpha, 1.0 / l.zeta);
                return g(rng);
            } else {
                const boost::math::normal_distribution<double> n01;
                const double tail = rng.uniform() * norm_cdf(l.mu / l.sigma);
                return std::max(0.0, l.mu + l.sigma * boost::math::quantile(boost::math::complement(n01, tail)));
            }
        },
        law_);
}

std::string ClaimDistribution::describe() const {
    std::ostringstream os;
    os.precision(17);
    std::visit(
        [&os](const auto& l) {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, DiscreteClaims>) {
                os << "discrete(";
                for (std::size_t i = 0; i < l.atoms.size(); ++i)
                    os << (i ? ", " : "") << l.atoms[i].size << ":" << l.atoms[i].prob;
                os << ")";
            } else if constexpr (std::is_same_v<T, ExponentialClaims>) {
                os << "exponential(zeta=" << l.zeta << ")";
            } else if constexpr (std::is_same_v<T, GammaClaims>) {
                os << "gamma(alpha=" << l.alpha << ", zeta=" << l.zeta << ")";
            } else {
                os << "truncated_normal(mu=" << l.mu << ", sigma=" << l.sigma << ")";
            }
        },
        law_);
    return os.str();
}

bool operator==(const ClaimDistribution& a, const ClaimDistribution& b) {
    if (a.law_.index() != b.law_.index()) return false;
    return std::visit(
        [&b](const auto& l) {
            using T = std::decay_t<decltype(l)>;
            const auto& r = std::get<T>(b.law_);
            if constexpr (std::is_same_v<T, DiscreteClaims>) {
                return std::equal(l.atoms.begin(), l.atoms.end(), r.atoms.begin(), r.atoms.end(),
                                  [](const Atom& x, const Atom& y) { return x.size == y.size && x.prob == y.prob; });
            } else if constexpr (std::is_same_v<T, ExponentialClaims>) {
                return l.zeta == r.zeta;
            } else if constexpr (std::is_same_v<T, GammaClaims>) {
                return l.alpha == r.alpha && l.zeta == r.zeta;
            } else {
                return l.mu == r.mu && l.sigma == r.sigma;
            }
        },
        a.law_);
}

double mgf(const ClaimDistribution& dist, double k) {
    if (k == 0.0) return 1.0;
    if (k >= dist.mgf_abscissa()) throw DomainError("mgf evaluated outside its region of convergence");
    return std::visit(
        [k](const auto& l) -> double {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, DiscreteClaims>) {
                double s = 0.0;
                for (const auto& a : l.atoms) s += a.prob * std::exp(k * a.size);
                return s;
            } else if constexpr (std::is_same_v<T, ExponentialClaims>) {
                return l.zeta / (l.zeta - k);
            } else if constexpr (std::is_same_v<T, GammaClaims>) {
                return std::pow(l.zeta / (l.zeta - k), l.alpha);
            } else {
                const double r = l.mu / l.sigma;
                return std::exp(l.mu * k + 0.5 * l.sigma * l.sigma * k * k) * norm_cdf(r + l.sigma * k) / norm_cdf(r);
            }
        },
        dist.law());
}

double mgf_derivative(const ClaimDistribution& dist, double k) {
    if (k >= dist.mgf_abscissa()) throw DomainError("mgf evaluated outside its region of convergence");
    return std::visit(
        [k](const auto& l) -> double {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, DiscreteClaims>) {
                double s = 0.0;
                for (const auto& a : l.atoms) s += a.prob * a.size * std::exp(k * a.size);
                return s;
            } else if constexpr (std::is_same_v<T, ExponentialClaims>) {
                return l.zeta / ((l.zeta - k) * (l.zeta - k));
            } else if constexpr (std::is_same_v<T, GammaClaims>) {
                return l.alpha / (l.zeta - k) * std::pow(l.zeta / (l.zeta - k), l.alpha);
            } else {
                const double r = l.mu / l.sigma;
                const double x = r + l.sigma * k;
                const double e = std::exp(l.mu * k + 0.5 * l.sigma * l.sigma * k * k) / norm_cdf(r);
                return e * ((l.mu + l.sigma * l.sigma * k) * norm_cdf(x) + l.sigma * norm_pdf(x));
            }
        },
        dist.law());
}

}  // namespace reinsure
