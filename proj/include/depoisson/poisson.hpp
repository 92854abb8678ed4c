#ifndef DEPOISSON_POISSON_HPP
#define DEPOISSON_POISSON_HPP

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "depoisson/polyfam.hpp"
#include "depoisson/rational.hpp"
#include "depoisson/sequences.hpp"

namespace depoisson {

class WindowOverflowError : public std::runtime_error {
public:
    explicit WindowOverflowError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Poisson(r) probability weights w_m = e^{-r} r^m/m! over a window
/// [m_lo, m_hi], built in linear space outward from the mode (the mode weight
/// comes from log space, so r up to 1e6 cannot underflow). tail_bound is a
/// certified geometric majorant of the mass outside the window.
struct PoissonWeights {
    double r = 0;
    long m_lo = 0, m_hi = 0;
    std::vector<double> w;  // w[i] is weight of index m_lo + i
    double tail_bound = 0;

    double at(long m) const { return w[static_cast<std::size_t>(m - m_lo)]; }
};

namespace detail {

inline double poisson_log_pmf(long m, double r) {
    return -r + static_cast<double>(m) * std::log(r) - std::lgamma(static_cast<double>(m) + 1.0);
}

inline PoissonWeights build_weights(double r, long m_lo, long m_hi) {
    PoissonWeights pw;
    pw.r = r;
    pw.m_lo = m_lo;
    pw.m_hi = m_hi;
    pw.w.assign(static_cast<std::size_t>(m_hi - m_lo + 1), 0.0);
    long mode = std::max(m_lo, std::min(m_hi, static_cast<long>(std::floor(r))));
    pw.w[mode - m_lo] = std::exp(poisson_log_pmf(mode, r));
    for (long m = mode; m > m_lo; --m)
        pw.w[m - 1 - m_lo] = pw.w[m - m_lo] * static_cast<double>(m) / r;
    for (long m = mode; m < m_hi; ++m)
        pw.w[m + 1 - m_lo] = pw.w[m - m_lo] * r / static_cast<double>(m + 1);

    // Left tail: for m <= m_lo - 1 < r the weights shrink by at least
    // (m_lo-1)/r per step, so a geometric series tops the mass. Right tail
    // likewise with ratio r/(m_hi+2).
    double tail = 0.0;
    if (m_lo > 0) {
        double w_edge = pw.w[0] * static_cast<double>(m_lo) / r;
        double ratio = static_cast<double>(m_lo - 1) / r;
        tail += ratio < 1.0 ? w_edge / (1.0 - ratio) : 1.0;
    }
    {
        double w_edge = pw.w.back() * r / static_cast<double>(m_hi + 1);
        double ratio = r / static_cast<double>(m_hi + 2);
        tail += ratio < 1.0 ? w_edge / (1.0 - ratio) : 1.0;
    }
    pw.tail_bound = tail;

    // The log-space anchor is only good to ~1e-11 relative at large r
    // (lgamma of a huge argument), while the window provably holds mass
    // 1 - tail. Renormalizing to that target restores full double accuracy;
    // skipped when the tail is not negligible (externally truncated windows).
    if (tail < 1e-9) {
        double mass = 0.0, comp = 0.0;
        for (double x : pw.w) {
            double t = mass + x;
            comp += (mass - t) + x;
            mass = t;
        }
        mass += comp;
        double s = (1.0 - tail) / mass;
        for (double& x : pw.w) x *= s;
    }
    return pw;
}

}  // namespace detail

/// Default guard window [r - 12 sqrt(r) - 30, r + 12 sqrt(r) + 30], widened
/// until the certified tail mass drops below 1 - coverage.
inline PoissonWeights poisson_weights(double r, double coverage = 1.0 - 1e-16) {
    if (!(r > 0)) throw std::invalid_argument("poisson_weights: r must be positive");
    if (!(coverage > 0 && coverage < 1))
        throw std::invalid_argument("poisson_weights: coverage must lie in (0,1)");
    double sr = std::sqrt(r);
    long m_lo = std::max(0L, static_cast<long>(std::floor(r - 12.0 * sr - 30.0)));
    long m_hi = static_cast<long>(std::ceil(r + 12.0 * sr + 30.0));
    PoissonWeights pw = detail::build_weights(r, m_lo, m_hi);
    while (pw.tail_bound > 1.0 - coverage) {
        long grow = static_cast<long>(4.0 * sr) + 10;
        m_lo = std::max(0L, m_lo - grow);
        m_hi += grow;
        if (m_hi - m_lo > 4000000)
            throw WindowOverflowError("poisson_weights: cannot reach requested coverage");
        pw = detail::build_weights(r, m_lo, m_hi);
    }
    return pw;
}

struct PoissonEvalReport {
    double value = 0;
    long m_lo = 0, m_hi = 0;
    double tail_bound = 0;
    std::optional<Rational> exact;
    bool degraded = false;
};

namespace detail {

constexpr long kWindowCap = 1000000;

// Certified rational approximation of e^{-r} by the alternating Taylor
// series; the truncation error is below the first omitted term.
inline Rational exp_neg_rational(const Rational& r, double abs_tol) {
    Rational sum = 1, term = 1;
    for (long k = 1; k < 4000; ++k) {
        term *= -r;
        term /= k;
        sum += term;
        if (std::fabs(to_double(term)) < abs_tol && k > to_double(r)) break;
    }
    return sum;
}

// Core windowed summation of sum_m w_m t(m) with adaptive window extension:
// the window grows past the default guard band while edge terms still
// contribute more than 1e-18 of the running sum (16-term patience, so
// sequences whose mass peaks beyond the default window are followed).
template <typename TermFn>
PoissonEvalReport eval_windowed(const Sequence& seq, double r, TermFn term_of) {
    PoissonWeights pw = poisson_weights(r);
    long lim = seq.max_index();
    if (lim >= 0 && pw.m_hi > lim) pw = detail::build_weights(r, std::min(pw.m_lo, lim), lim);

    PoissonEvalReport rep;
    rep.m_lo = pw.m_lo;
    rep.m_hi = pw.m_hi;
    rep.tail_bound = pw.tail_bound;

    double sum = 0.0, comp = 0.0;
    auto add = [&](double t) {
        double s = sum + t;
        if (std::fabs(sum) >= std::fabs(t))
            comp += (sum - s) + t;
        else
            comp += (t - s) + sum;
        sum = s;
    };
    for (long m = pw.m_lo; m <= pw.m_hi; ++m) add(pw.at(m) * term_of(m, rep));

    // Head: indices below the default window, down to 0.
    if (pw.m_lo > 0) {
        double w = pw.w[0];
        int quiet = 0;
        for (long m = pw.m_lo - 1; m >= 0; --m) {
            w *= static_cast<double>(m + 1) / r;
            double t = w * term_of(m, rep);
            add(t);
            rep.m_lo = m;
            if (std::fabs(t) <= 1e-18 * std::fabs(sum + comp)) {
                if (++quiet >= 16) break;
            } else {
                quiet = 0;
            }
        }
    }
    // Extension above, for sequences still growing at the window edge.
    {
        double w = pw.w.back();
        int quiet = 0;
        long m = pw.m_hi;
        while (true) {
            ++m;
            if (lim >= 0 && m > lim) break;
            if (m - rep.m_lo > kWindowCap)
                throw WindowOverflowError(
                    "poisson window exceeded 1e6 terms; coefficient growth too heavy");
            w *= r / static_cast<double>(m);
            double t = w * term_of(m, rep);
            add(t);
            rep.m_hi = m;
            if (std::fabs(t) <= 1e-18 * std::fabs(sum + comp)) {
                if (++quiet >= 16) break;
            } else {
                quiet = 0;
            }
        }
    }
    rep.value = sum + comp;
    return rep;
}

}  // namespace detail

/// f^{(k)}(r) = e^{-r} sum_m Delta^k A_m r^m/m!, summed over an adaptive
/// window. When the provider is exact and r is a simple rational the report
/// also carries a rational value (window partial sum times a certified
/// rational approximation of e^{-r}).
inline PoissonEvalReport eval_poisson_transform(const Sequence& seq, unsigned k, double r) {
    PoissonEvalReport rep = detail::eval_windowed(
        seq, r, [&](long m, PoissonEvalReport& rr) {
            bool bad = false;
            double d = seq.delta(k, m, &bad);
            if (bad) rr.degraded = true;
            return d;
        });
    Rational rq;
    if (seq.is_exact() && is_simple_rational(r, &rq) && r <= 64.0 && rep.m_hi <= 700) {
        try {
            Rational partial = 0, rpow = 1, fact = 1;
            for (long m = 0; m <= rep.m_hi; ++m) {
                if (m > 0) {
                    rpow *= rq;
                    fact *= m;
                }
                partial += seq.exact_delta(k, m) * rpow / fact;
            }
            // tolerance gives e^{-r} to relative 1e-16
            rep.exact = partial * detail::exp_neg_rational(rq, 1e-16 * std::exp(-r));
        } catch (const std::exception&) {
            // provider cannot serve the exact path over this window
        }
    }
    return rep;
}

/// Majorant operator applied to the k-th derivative:
/// E(f^{(k)}; r) = e^{-r} sum_m |Delta^k A_m| r^m/m!.
inline PoissonEvalReport E_op(const Sequence& seq, unsigned k, double r) {
    return detail::eval_windowed(seq, r, [&](long m, PoissonEvalReport& rr) {
        bool bad = false;
        double d = seq.delta(k, m, &bad);
        if (bad) rr.degraded = true;
        return std::fabs(d);
    });
}

/// Regularized upper incomplete gamma of integer order,
/// Q(m+1, R) = Gamma(m+1,R)/m! = e^{-R} sum_{k<=m} R^k/k!.
inline double regularized_gamma_q(unsigned long m, double R) {
    if (!(R > 0)) throw std::invalid_argument("regularized_gamma_q: R must be positive");
    long mode = std::min(static_cast<long>(m), static_cast<long>(std::floor(R)));
    double wmode = std::exp(detail::poisson_log_pmf(mode, R));
    double sum = 0.0;
    double w = wmode;
    for (long k = mode; k >= 0; --k) {
        sum += w;
        w *= static_cast<double>(k) / R;
        if (w < 1e-20 * sum) break;
    }
    w = wmode;
    for (long k = mode + 1; k <= static_cast<long>(m); ++k) {
        w *= R / static_cast<double>(k);
        sum += w;
    }
    return std::min(sum, 1.0);
}

inline double regularized_gamma_p(unsigned long m, double R) {
    return 1.0 - regularized_gamma_q(m, R);
}

/// (gamma(m+1,R), Gamma(m+1,R)) from the integer-order closed form
/// Gamma(m+1,R) = m! e^{-R} sum_{k<=m} R^k/k!. The pair sums to m!, which
/// overflows double beyond m = 170; the regularized helpers stay finite.
inline std::pair<double, double> incomplete_gamma_split(unsigned long m, double R) {
    double q = regularized_gamma_q(m, R);
    double fact = detail::factorial_d(m);
    return {fact * (1.0 - q), fact * q};
}

/// sum_{j=0}^{depth} 2^{-jN} g_bound(r/2^j) plus a certified geometric tail:
/// the tail factor 2^{-(depth+1)N}/(1 - 2^{-N}) multiplies the largest probe
/// of g_bound just past the cutoff. Diverges at N = 0, hence rejected.
inline double E_bound_split(const std::function<double(double)>& g_bound, unsigned N, double r,
                            int depth) {
    if (depth < 1) throw std::invalid_argument("E_bound_split: depth must be >= 1");
    if (N == 0)
        throw std::domain_error("E_bound_split: the dyadic tail is not summable at N = 0");
    double sum = 0.0;
    double scale = 1.0;
    double x = r;
    for (int j = 0; j <= depth; ++j) {
        sum += scale * g_bound(x);
        scale *= std::pow(2.0, -static_cast<double>(N));
        x *= 0.5;
    }
    double probe = 0.0;
    double xp = x;
    for (int j = 0; j < 8; ++j) {
        probe = std::max(probe, g_bound(xp));
        xp *= 0.5;
    }
    double twoN = std::pow(2.0, -static_cast<double>(N));
    sum += probe * scale / (1.0 - twoN);  // scale is already 2^{-(depth+1)N}
    return sum;
}

struct EAlgebraReport {
    double product_lhs = 0;  // E_x(f(px) g(qx); r)
    double product_rhs = 0;  // E(f; rp) E(g; rq)
    double scaling_lhs = 0;  // E_x(f(px); r)
    double scaling_rhs = 0;  // E(f; rp)
};

namespace detail {

// Coefficients of x -> f(px) g(qx) as a Poisson transform in x:
// C_m = sum_i binom(m,i) p^i q^{m-i} A_i B_{m-i}, the binomial(m, p) average
// of A_i B_{m-i}. Computed through anchored binomial pmf recurrences so no
// binom(m,i) overflows.
class ScaledProductSequence : public Sequence {
public:
    ScaledProductSequence(const Sequence& a, const Sequence& b, double p)
        : a_(a), b_(b), p_(p), q_(1.0 - p) {}
    bool is_exact() const override { return false; }
    double value(long m) const override {
        if (p_ == 0.0) return a_.value(0) * b_.value(m);
        if (q_ == 0.0) return a_.value(m) * b_.value(0);
        long mode = static_cast<long>(p_ * static_cast<double>(m));
        mode = std::max(0L, std::min(m, mode));
        double lw = std::lgamma(static_cast<double>(m) + 1.0) -
                    std::lgamma(static_cast<double>(mode) + 1.0) -
                    std::lgamma(static_cast<double>(m - mode) + 1.0) +
                    static_cast<double>(mode) * std::log(p_) +
                    static_cast<double>(m - mode) * std::log(q_);
        double wmode = std::exp(lw);
        double sum = wmode * a_.value(mode) * b_.value(m - mode);
        double w = wmode;
        for (long i = mode; i > 0; --i) {
            w *= static_cast<double>(i) * q_ / (static_cast<double>(m - i + 1) * p_);
            sum += w * a_.value(i - 1) * b_.value(m - i + 1);
            if (w < 1e-22 * wmode) break;
        }
        w = wmode;
        for (long i = mode; i < m; ++i) {
            w *= static_cast<double>(m - i) * p_ / (static_cast<double>(i + 1) * q_);
            sum += w * a_.value(i + 1) * b_.value(m - i - 1);
            if (w < 1e-22 * wmode) break;
        }
        return sum;
    }

private:
    const Sequence& a_;
    const Sequence& b_;
    double p_, q_;
};

}  // namespace detail

/// Both sides of the majorant product and scaling inequalities
/// E_x(f(px)g(qx); r) <= E(f; rp) E(g; rq) and E_x(f(px); r) <= E(f; rp),
/// with q = 1 - p.
inline EAlgebraReport E_algebra_check(const Sequence& f, const Sequence& g, double p, double r) {
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("E_algebra_check: p must lie in [0,1]");
    double q = 1.0 - p;
    EAlgebraReport rep;
    ConstantSequence one{Rational(1)};
    detail::ScaledProductSequence prod(f, g, p);
    detail::ScaledProductSequence scaled(f, one, p);
    rep.product_lhs = E_op(prod, 0, r).value;
    rep.scaling_lhs = E_op(scaled, 0, r).value;
    double ef = p > 0.0 ? E_op(f, 0, r * p).value : std::fabs(f.value(0));
    double eg = q > 0.0 ? E_op(g, 0, r * q).value : std::fabs(g.value(0));
    rep.product_rhs = ef * eg;
    rep.scaling_rhs = ef;
    return rep;
}

}  // namespace depoisson

#endif
