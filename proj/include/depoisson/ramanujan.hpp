#ifndef DEPOISSON_RAMANUJAN_HPP
#define DEPOISSON_RAMANUJAN_HPP

#include <cmath>
#include <optional>
#include <vector>

#include "depoisson/poisson.hpp"
#include "depoisson/polyfam.hpp"
#include "depoisson/sequences.hpp"

namespace depoisson {

struct InverseTerm {
    unsigned s = 0;
    double diff = 0;  // Delta^s value (or phi^{(s)} in the derivative form)
    double poly = 0;  // polynomial factor divided by s!
    double term = 0;
};

struct InverseExpansionReport {
    double R = 0;
    long n = 0;
    unsigned N = 0;
    double partial_sum = 0;
    std::optional<double> certified_bound;
    std::optional<double> oracle_value;
    std::optional<Rational> exact_partial;  // filled on the exact path
    std::vector<InverseTerm> terms;
};

namespace detail {

inline double oracle_transform(const Sequence& seq, double R) {
    return seq.has_transform() ? seq.transform(0, R) : eval_poisson_transform(seq, 0, R).value;
}

// Whether the provider can actually serve exact differences at (N, n);
// providers with a bounded exact range (trie table) throw past it.
inline bool exact_delta_available(const Sequence& seq, unsigned N, long n) {
    if (!seq.is_exact()) return false;
    try {
        seq.exact_delta(N, n);
        return true;
    } catch (const std::exception&) {
        return false;
    }
}

}  // namespace detail

/// Partial sum sum_{m<=N} Delta^m A_n/m! tau_m(-n) approximating f(n), with
/// certified bound 9(N+1) n^{(N+1)/2} E(f^{(N+1)}; n). Exact providers get an
/// exact rational partial sum alongside the floating one.
inline InverseExpansionReport inverse_findiff_at_integer(const Sequence& seq, long n, unsigned N) {
    if (n < 2) throw std::invalid_argument("inverse_findiff_at_integer: requires n >= 2");
    InverseExpansionReport rep;
    rep.n = n;
    rep.N = N;
    rep.R = static_cast<double>(n);
    bool exact = detail::exact_delta_available(seq, N, n);
    Rational acc = 0, fact = 1;
    double facc = 0.0;
    for (unsigned m = 0; m <= N; ++m) {
        if (m > 0) fact *= m;
        Rational poly = tau_poly(m).eval(Rational(-n)) / fact;
        double polyd = to_double(poly);
        double diff, term;
        if (exact) {
            Rational d = seq.exact_delta(m, n);
            Rational t = d * poly;
            acc += t;
            diff = to_double(d);
            term = to_double(t);
        } else {
            diff = seq.delta(m, n);
            term = diff * polyd;
        }
        facc += term;
        rep.terms.push_back({m, diff, polyd, term});
    }
    rep.partial_sum = exact ? to_double(acc) : facc;
    if (exact) rep.exact_partial = acc;
    double nn = static_cast<double>(n);
    rep.certified_bound = 9.0 * (static_cast<double>(N) + 1.0) *
                          std::pow(nn, 0.5 * (static_cast<double>(N) + 1.0)) *
                          E_op(seq, N + 1, nn).value;
    rep.oracle_value = detail::oracle_transform(seq, nn);
    return rep;
}

/// General-center form: sum_{m<=N} Delta^m A_n/m! (-R)^m C_m(-R,-n), bound
/// 3(N+1) n! (e^R/R^n) E(f^{(N+1)}; R) n^{N/2} e^{|R-n|/sqrt(n)}.
inline InverseExpansionReport inverse_findiff_general_R(const Sequence& seq, long n, unsigned N,
                                                        double R) {
    if (n < 2) throw std::invalid_argument("inverse_findiff_general_R: requires n >= 2");
    if (!(R > 0)) throw std::invalid_argument("inverse_findiff_general_R: R must be positive");
    InverseExpansionReport rep;
    rep.n = n;
    rep.N = N;
    rep.R = R;
    Rational rq;
    bool exact = is_simple_rational(R, &rq) && detail::exact_delta_available(seq, N, n);
    Rational acc = 0, fact = 1;
    double facc = 0.0;
    for (unsigned m = 0; m <= N; ++m) {
        if (m > 0) fact *= m;
        double polyd, diff, term;
        if (exact) {
            Rational poly = charlier_weighted_exact(-rq, m, Rational(-n)) / fact;
            Rational d = seq.exact_delta(m, n);
            Rational t = d * poly;
            acc += t;
            polyd = to_double(poly);
            diff = to_double(d);
            term = to_double(t);
        } else {
            polyd = charlier_weighted(-R, m, -static_cast<double>(n)) / to_double(fact);
            diff = seq.delta(m, n);
            term = diff * polyd;
        }
        facc += term;
        rep.terms.push_back({m, diff, polyd, term});
    }
    rep.partial_sum = exact ? to_double(acc) : facc;
    if (exact) rep.exact_partial = acc;
    double nn = static_cast<double>(n);
    double logpre = std::lgamma(nn + 1.0) + R - nn * std::log(R);
    rep.certified_bound = 3.0 * (static_cast<double>(N) + 1.0) *
                          std::exp(logpre + 0.5 * static_cast<double>(N) * std::log(nn) +
                                   std::fabs(R - nn) / std::sqrt(nn)) *
                          E_op(seq, N + 1, R).value;
    rep.oracle_value = detail::oracle_transform(seq, R);
    return rep;
}

/// Real-center finite-difference expansion of the Poisson average of phi:
/// sum_{s<=N} Delta^s phi(R)/s! tau_s(-R). The oracle is the true Poisson
/// average (closed form when the provider has one, windowed summation
/// otherwise).
inline InverseExpansionReport ramanujan_findiff_real(const Sequence& seq, double R, unsigned N) {
    if (!seq.has_extension())
        throw std::logic_error("ramanujan_findiff_real: sequence has no real extension");
    if (!(R > 0)) throw std::invalid_argument("ramanujan_findiff_real: R must be positive");
    InverseExpansionReport rep;
    rep.R = R;
    rep.N = N;
    Rational rr(R);  // doubles are exactly rational
    rr.canonicalize();
    Rational fact = 1;
    for (unsigned s = 0; s <= N; ++s) {
        if (s > 0) fact *= s;
        double poly = to_double(tau_poly(s).eval(-rr) / fact);
        double diff = seq.phi_delta(s, R);
        double term = diff * poly;
        rep.terms.push_back({s, diff, poly, term});
        rep.partial_sum += term;
    }
    rep.oracle_value = detail::oracle_transform(seq, R);
    return rep;
}

/// Derivative (Mahler) form: sum_{j<=N} phi^{(j)}(R)/j! rho_j(-R).
inline InverseExpansionReport ramanujan_derivative_form(const Sequence& seq, double R, unsigned N) {
    if (!seq.has_derivatives())
        throw std::logic_error("ramanujan_derivative_form: sequence has no derivative accessor");
    if (!(R > 0)) throw std::invalid_argument("ramanujan_derivative_form: R must be positive");
    InverseExpansionReport rep;
    rep.R = R;
    rep.N = N;
    Rational rr(R);
    rr.canonicalize();
    Rational fact = 1;
    for (unsigned j = 0; j <= N; ++j) {
        if (j > 0) fact *= j;
        double poly = to_double(rho_poly(j).eval(-rr) / fact);
        double diff = seq.phi_derivative(j, R);
        double term = diff * poly;
        rep.terms.push_back({j, diff, poly, term});
        rep.partial_sum += term;
    }
    rep.oracle_value = detail::oracle_transform(seq, R);
    return rep;
}

struct RateFit {
    bool saturated = false;
    double slope = 0;
    int points = 0;
};

/// Least-squares slope of log|oracle - partial| against log R over the grid,
/// for the finite-difference real-center expansion at order N. Points whose
/// error sits within 10x of the floating noise floor are discarded; fewer
/// than two usable points reports saturation.
inline RateFit rate_probe(const Sequence& seq, unsigned N, const std::vector<double>& R_grid) {
    std::vector<double> xs, ys;
    for (double R : R_grid) {
        InverseExpansionReport rep = ramanujan_findiff_real(seq, R, N);
        double scale = std::fabs(*rep.oracle_value);
        for (const auto& t : rep.terms) scale = std::max(scale, std::fabs(t.term));
        double err = std::fabs(*rep.oracle_value - rep.partial_sum);
        double floor = 2.3e-16 * std::max(scale, 1e-300);
        if (err <= 10.0 * floor || err == 0.0) continue;
        xs.push_back(std::log(R));
        ys.push_back(std::log(err));
    }
    RateFit fit;
    fit.points = static_cast<int>(xs.size());
    if (xs.size() < 2) {
        fit.saturated = true;
        return fit;
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= xs.size();
    my /= ys.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    fit.slope = sxy / sxx;
    return fit;
}

}  // namespace depoisson

#endif
