#ifndef DEPOISSON_VERIFY_HPP
#define DEPOISSON_VERIFY_HPP

#include <cmath>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "depoisson/depoissonize.hpp"
#include "depoisson/ramanujan.hpp"

namespace depoisson {

struct CheckResult {
    std::string name;
    bool pass = true;
    std::string detail;
};

namespace detail {

inline std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << std::scientific << v;
    return os.str();
}

inline const TrieSequence& shared_trie() {
    static TrieSequence trie(64);  // shared so the multiprecision caches amortize
    return trie;
}

struct GridTracker {
    bool pass = true;
    double worst_ratio = 0;  // err / bound, maximized over points with bound > 0
    std::string worst_point;
    int points = 0;
    void record(double err, double bound, const std::string& where) {
        ++points;
        if (err > bound) pass = false;
        double ratio = bound > 0 ? err / bound : (err > 0 ? 1e300 : 0.0);
        if (ratio > worst_ratio) {
            worst_ratio = ratio;
            worst_point = where;
        }
    }
    std::string summary() const {
        std::ostringstream os;
        os << points << " grid points, worst err/bound " << fmt(worst_ratio) << " at "
           << worst_point;
        return os.str();
    }
};

inline std::vector<std::unique_ptr<Sequence>> oracle_suite() {
    std::vector<std::unique_ptr<Sequence>> seqs;
    seqs.push_back(std::make_unique<GeometricMixture>(
        std::vector<GeometricMixture::Atom>{{Rational(1), Rational(1, 2)}}));
    seqs.push_back(std::make_unique<GeometricMixture>(std::vector<GeometricMixture::Atom>{
        {Rational(2, 3), Rational(1, 2)}, {Rational(1, 3), Rational(1, 3)}}));
    seqs.push_back(std::make_unique<GeometricMixture>(
        std::vector<GeometricMixture::Atom>{{Rational(1), Rational(9, 10)}}));
    return seqs;
}

inline std::string grid_label(int seq_idx, long n, unsigned N, double R) {
    std::ostringstream os;
    os << "(seq " << seq_idx << ", n=" << n << ", N=" << N << ", R=" << R << ")";
    return os.str();
}

}  // namespace detail

/// Coefficient-level comparison of the tau and rho families against their
/// published reference tables.
inline CheckResult verify_polynomial_tables() {
    CheckResult res{"polynomial tables", true, ""};
    auto poly = [](std::vector<long> c) {
        std::vector<Rational> v;
        for (long x : c) v.emplace_back(x);
        return Polynomial{std::move(v)};
    };
    std::vector<Polynomial> tau_ref = {poly({1}),          Polynomial{},
                                       poly({0, -1}),      poly({0, 2}),
                                       poly({0, -6, 3}),   poly({0, 24, -20}),
                                       poly({0, -120, 130, -15})};
    std::vector<Polynomial> rho_ref = {poly({1}),          Polynomial{},
                                       poly({0, -1}),      poly({0, -1}),
                                       poly({0, -1, 3}),   poly({0, -1, 10}),
                                       poly({0, -1, 25, -15}), poly({0, -1, 56, -105})};
    for (unsigned m = 0; m < tau_ref.size(); ++m)
        if (!(tau_poly(m) == tau_ref[m])) {
            res.pass = false;
            res.detail = "tau_" + std::to_string(m) + " = " + tau_poly(m).str();
        }
    for (unsigned j = 0; j < rho_ref.size(); ++j)
        if (!(rho_poly(j) == rho_ref[j])) {
            res.pass = false;
            res.detail = "rho_" + std::to_string(j) + " = " + rho_poly(j).str();
        }
    if (res.pass) res.detail = "tau_0..6 and rho_0..7 match exactly";
    return res;
}

/// Exact-arithmetic identity suite: the inversion convolution, the Stirling
/// bridge rho = tau o S, the b-coefficient bridge, both Charlier duality
/// expansions, and the difference-of-powers bridge. Zero tolerance.
inline CheckResult verify_exact_identities() {
    CheckResult res{"exact identity suite", true, ""};
    int checks = 0;
    auto fail = [&res](const std::string& what) {
        res.pass = false;
        if (res.detail.empty()) res.detail = what;
    };
    // convolution of the two weighted Charlier families collapses to delta_{s0}
    std::vector<std::pair<Rational, Rational>> pts = {{Rational(1), Rational(1)},
                                                      {Rational(2), Rational(3)},
                                                      {Rational(11, 2), Rational(10)},
                                                      {Rational(3), Rational(-7)}};
    for (const auto& [R, n] : pts)
        for (unsigned s = 0; s <= 12; ++s) {
            Rational acc = 0;
            for (unsigned j = 0; j <= s; ++j)
                acc += charlier_weighted_exact(R, s - j, n) * charlier_weighted_exact(-R, j, -n) /
                       (Rational(factorial(s - j)) * Rational(factorial(j)));
            ++checks;
            if (acc != (s == 0 ? Rational(1) : Rational(0))) fail("inversion convolution");
        }
    // rho_j = sum_s S(j,s) tau_s
    for (unsigned j = 0; j <= 12; ++j) {
        Polynomial acc;
        for (unsigned s = 0; s <= j; ++s) acc += tau_poly(s) * Rational(stirling2(j, s));
        ++checks;
        if (!(acc == rho_poly(j))) fail("Stirling bridge at j=" + std::to_string(j));
    }
    // rho_n(-R) = sum_k b_{kn} R^{n-k+1}
    for (long n = 2; n <= 12; ++n) {
        Polynomial lhs = rho_poly(static_cast<unsigned>(n)).reflected();
        Polynomial rhs;
        for (long k = 1; k <= n; ++k) {
            Int b = ramanujan_b(k, n);
            if (b == 0) continue;
            std::vector<Rational> mono(static_cast<std::size_t>(n - k + 2), Rational(0));
            mono.back() = Rational(b);
            rhs += Polynomial{std::move(mono)};
        }
        ++checks;
        if (!(lhs == rhs)) fail("b-coefficient bridge at n=" + std::to_string(n));
    }
    // both duality expansions of t^N C_N(t,y)
    std::vector<std::pair<Rational, Rational>> dual = {
        {Rational(2), Rational(3)}, {Rational(7), Rational(-4)}, {Rational(-1), Rational(5)}};
    for (const auto& [t, y] : dual)
        for (unsigned N = 0; N <= 8; ++N) {
            Rational direct = charlier_weighted_exact(t, N, y);
            Rational via_y = 0, via_t = 0;
            for (unsigned j = 0; j <= N; ++j) {
                Rational b(binomial(N, j));
                via_y += b * tau_poly(N - j).eval(y) * pow_rational(y - t, j);
                via_t += b * tau_poly(N - j).eval(t) * falling_factorial(y - t, j);
            }
            ++checks;
            if (direct != via_y || direct != via_t) fail("Charlier duality");
        }
    // sum_s (-R)^s C_s(-R,-n)/s! Delta^s x^j|_0 = sum_s tau_s(-R)/s! Delta^s x^j|_{R-n}
    std::vector<std::pair<Rational, Rational>> bridge = {
        {Rational(3), Rational(2)}, {Rational(7, 2), Rational(3)}, {Rational(10), Rational(10)}};
    for (const auto& [R, n] : bridge)
        for (unsigned j = 0; j <= 8; ++j) {
            Rational lhs = 0, rhs = 0;
            for (unsigned s = 0; s <= j; ++s) {
                lhs += charlier_weighted_exact(-R, s, -n) * Rational(stirling2(j, s));
                Rational dpow = 0;
                for (unsigned l = 0; l <= s; ++l) {
                    Rational t = Rational(binomial(s, l)) *
                                 pow_rational(R - n + static_cast<long>(l), static_cast<long>(j));
                    if ((s - l) & 1u) dpow -= t;
                    else dpow += t;
                }
                rhs += tau_poly(s).eval(-R) * dpow / Rational(factorial(s));
            }
            ++checks;
            if (lhs != rhs) fail("difference-of-powers bridge");
        }
    if (res.pass) res.detail = std::to_string(checks) + " exact identities hold";
    return res;
}

/// sum_{m<=200} tau_m(n)^2/(m! n^m) stays within 1e-8 relative of n! e^n/n^n
/// for n = 1..15 (at n = 1 the target is e itself).
inline CheckResult verify_parseval(double tol = 1e-8) {
    CheckResult res{"weighted tau square sum", true, ""};
    double worst = 0;
    long worst_n = 0;
    for (long n = 1; n <= 15; ++n) {
        Rational acc = 0;
        Rational npow = 1;
        Rational fact = 1;
        for (unsigned m = 0; m <= 200; ++m) {
            if (m > 0) {
                fact *= m;
                npow *= n;
            }
            Rational t = tau_poly(m).eval(Rational(n));
            acc += t * t / (fact * npow);
        }
        double nn = static_cast<double>(n);
        double target = std::exp(std::lgamma(nn + 1.0) + nn - nn * std::log(nn));
        double rel = std::fabs(to_double(acc) - target) / target;
        if (rel > worst) {
            worst = rel;
            worst_n = n;
        }
        if (rel > tol) res.pass = false;
    }
    res.detail = "worst relative deviation " + detail::fmt(worst) + " at n=" +
                 std::to_string(worst_n) + " (tol " + detail::fmt(tol) + ")";
    return res;
}

/// First-order identity residual on exact geometric mixtures at the fixed
/// (n, R) probes, truncation M = 200.
inline CheckResult verify_first_order(double tol = 1e-9) {
    CheckResult res{"first-order identity", true, ""};
    GeometricMixture g1({{Rational(1), Rational(1, 2)}});
    GeometricMixture g2({{Rational(2, 3), Rational(1, 2)}, {Rational(1, 3), Rational(1, 3)}});
    const Sequence* seqs[] = {&g1, &g2};
    struct Probe {
        long n;
        double R;
    } probes[] = {{5, 3.0}, {10, 10.0}, {20, 14.5}};
    double worst = 0;
    for (const Sequence* s : seqs)
        for (const auto& p : probes) {
            double r = first_order_identity_residual(*s, p.n, p.R, 200);
            worst = std::max(worst, r);
            if (r > tol) res.pass = false;
        }
    res.detail = "worst residual " + detail::fmt(worst) + " (tol " + detail::fmt(tol) + ")";
    return res;
}

/// Bound domination at R = n over the oracle grid: trie plus three geometric
/// mixtures, n in {8,...,512} (powers of two), N in 0..3.
inline CheckResult verify_bounds_at_n() {
    CheckResult res{"center bound domination", true, ""};
    detail::GridTracker grid;
    auto geoms = detail::oracle_suite();
    std::vector<const Sequence*> seqs = {&detail::shared_trie()};
    for (const auto& g : geoms) seqs.push_back(g.get());
    for (int i = 0; i < static_cast<int>(seqs.size()); ++i)
        for (long n = 8; n <= 512; n *= 2)
            for (unsigned N = 0; N <= 3; ++N) {
                double an = seqs[i]->value(n);
                double partial =
                    charlier_poisson_sum(*seqs[i], n, N, static_cast<double>(n)).partial_sum;
                double bound = error_bound_at_n(*seqs[i], n, N);
                grid.record(std::fabs(an - partial), bound,
                            detail::grid_label(i, n, N, static_cast<double>(n)));
            }
    res.pass = grid.pass;
    res.detail = grid.summary();
    return res;
}

/// Same grid with off-center evaluation points R in {n/2, n, 2n}.
inline CheckResult verify_bounds_general_R() {
    CheckResult res{"general-center bound domination", true, ""};
    detail::GridTracker grid;
    auto geoms = detail::oracle_suite();
    std::vector<const Sequence*> seqs = {&detail::shared_trie()};
    for (const auto& g : geoms) seqs.push_back(g.get());
    for (int i = 0; i < static_cast<int>(seqs.size()); ++i)
        for (long n = 8; n <= 512; n *= 2)
            for (unsigned N = 0; N <= 3; ++N) {
                double an = seqs[i]->value(n);
                for (double R : {0.5 * n, 1.0 * n, 2.0 * n}) {
                    double partial = charlier_poisson_sum(*seqs[i], n, N, R).partial_sum;
                    double bound = error_bound_general_R(*seqs[i], n, N, R);
                    grid.record(std::fabs(an - partial), bound, detail::grid_label(i, n, N, R));
                }
            }
    res.pass = grid.pass;
    res.detail = grid.summary();
    return res;
}

/// Monotone fast path on the trie expectation: |A_n - h(n)| <= 2 sqrt(n)
/// |h'(n)| for every n up to max_n.
inline CheckResult verify_monotone_trie(long max_n = 1024) {
    CheckResult res{"monotone trie bound", true, ""};
    const TrieSequence& trie = detail::shared_trie();
    detail::GridTracker grid;
    for (long n = 1; n <= max_n; ++n) {
        double nn = static_cast<double>(n);
        double err = std::fabs(trie.value(n) - trie.transform(0, nn));
        double bound = 2.0 * std::sqrt(nn) * std::fabs(trie.transform(1, nn));
        grid.record(err, bound, "n=" + std::to_string(n));
    }
    res.pass = grid.pass;
    res.detail = grid.summary();
    return res;
}

/// Inverse-direction bound domination on the oracle grid, both the
/// integer-center and the general-center forms.
inline CheckResult verify_inverse_bounds() {
    CheckResult res{"inverse bound domination", true, ""};
    detail::GridTracker grid;
    auto geoms = detail::oracle_suite();
    std::vector<const Sequence*> seqs = {&detail::shared_trie()};
    for (const auto& g : geoms) seqs.push_back(g.get());
    for (int i = 0; i < static_cast<int>(seqs.size()); ++i)
        for (long n = 8; n <= 512; n *= 2)
            for (unsigned N = 0; N <= 3; ++N) {
                InverseExpansionReport at = inverse_findiff_at_integer(*seqs[i], n, N);
                grid.record(std::fabs(at.partial_sum - *at.oracle_value), *at.certified_bound,
                            detail::grid_label(i, n, N, static_cast<double>(n)));
                for (double R : {0.5 * n, 1.0 * n, 2.0 * n}) {
                    InverseExpansionReport rep = inverse_findiff_general_R(*seqs[i], n, N, R);
                    grid.record(std::fabs(rep.partial_sum - *rep.oracle_value),
                                *rep.certified_bound, detail::grid_label(i, n, N, R));
                }
            }
    res.pass = grid.pass;
    res.detail = grid.summary();
    return res;
}

/// Truncated exact-inversion residuals: the order-40 integer-center series on
/// a geometric sequence, and the order-30 real-center series on exponential
/// mixtures with base <= 2.
inline CheckResult verify_exact_inversion(double tol_geom = 1e-10, double tol_exp = 1e-8) {
    CheckResult res{"exact inversion convergence", true, ""};
    std::ostringstream os;
    GeometricMixture g({{Rational(1), Rational(1, 2)}});
    double worst_geom = 0;
    for (long n : {10L, 20L, 50L}) {
        InverseExpansionReport rep = inverse_findiff_at_integer(g, n, 40);
        double err = std::fabs(rep.partial_sum - *rep.oracle_value);
        worst_geom = std::max(worst_geom, err);
        if (err > tol_geom) res.pass = false;
    }
    os << "order-40 geometric residual " << detail::fmt(worst_geom) << " (tol "
       << detail::fmt(tol_geom) << ")";
    double worst_exp = 0;
    for (const Rational& c : {Rational(3, 2), Rational(2)}) {
        ExpMixture e({{Rational(1), c}});
        for (double R : {1.0, 5.0, 10.0}) {
            InverseExpansionReport rep = ramanujan_derivative_form(e, R, 30);
            double rel =
                std::fabs(rep.partial_sum - *rep.oracle_value) / std::fabs(*rep.oracle_value);
            worst_exp = std::max(worst_exp, rel);
            if (rel > tol_exp) res.pass = false;
        }
    }
    os << "; order-30 exp-mixture relative residual " << detail::fmt(worst_exp) << " (tol "
       << detail::fmt(tol_exp) << ")";
    res.detail = os.str();
    return res;
}

/// Log-log error-rate fit for phi(x) = 2^{-x}: the fitted slope over
/// R in [64, 4096] is compared against -(N+1)/2 within +-slack.
inline CheckResult verify_rate_fit(double slack = 0.2) {
    CheckResult res{"error rate fit", true, ""};
    GeometricMixture g({{Rational(1), Rational(1, 2)}});
    std::vector<double> grid;
    for (double R = 64.0; R <= 4096.0; R *= 2.0) grid.push_back(R);
    std::ostringstream os;
    for (unsigned N : {1u, 2u, 3u}) {
        RateFit fit = rate_probe(g, N, grid);
        double target = -0.5 * (static_cast<double>(N) + 1.0);
        bool ok = !fit.saturated && std::fabs(fit.slope - target) <= slack;
        if (!ok) res.pass = false;
        if (N > 1) os << "; ";
        os << "N=" << N << " slope "
           << (fit.saturated ? std::string("saturated") : detail::fmt(fit.slope)) << " vs "
           << detail::fmt(target);
    }
    res.detail = os.str();
    return res;
}

/// Product and scaling inequalities of the majorant algebra on randomized
/// geometric-mixture pairs; nonnegative coefficient sequences force equality.
inline CheckResult verify_E_algebra(double eq_tol = 1e-10) {
    CheckResult res{"majorant algebra", true, ""};
    std::mt19937 rng(20250823);
    std::uniform_int_distribution<long> natoms(1, 3), wnum(1, 9), qnum(1, 9), qden(10, 19);
    auto random_mixture = [&] {
        std::vector<GeometricMixture::Atom> atoms;
        long k = natoms(rng);
        for (long i = 0; i < k; ++i)
            atoms.push_back({Rational(wnum(rng)), Rational(qnum(rng), qden(rng))});
        return GeometricMixture(atoms);
    };
    detail::GridTracker grid;
    double worst_eq = 0;
    for (int pair = 0; pair < 50; ++pair) {
        GeometricMixture f = random_mixture();
        GeometricMixture g = random_mixture();
        for (double p : {0.25, 0.5, 0.75})
            for (double r : {2.0, 8.0, 32.0}) {
                EAlgebraReport rep = E_algebra_check(f, g, p, r);
                std::string where = "(pair " + std::to_string(pair) + ", p=" +
                                    detail::fmt(p) + ", r=" + detail::fmt(r) + ")";
                grid.record(rep.product_lhs, rep.product_rhs * (1 + 1e-9) + 1e-300, where);
                grid.record(rep.scaling_lhs, rep.scaling_rhs * (1 + 1e-9) + 1e-300, where);
                double eq1 = std::fabs(rep.product_lhs - rep.product_rhs) /
                             std::max(rep.product_rhs, 1e-300);
                double eq2 = std::fabs(rep.scaling_lhs - rep.scaling_rhs) /
                             std::max(rep.scaling_rhs, 1e-300);
                worst_eq = std::max(worst_eq, std::max(eq1, eq2));
                if (eq1 > eq_tol || eq2 > eq_tol) res.pass = false;
            }
    }
    if (!grid.pass) res.pass = false;
    res.detail = grid.summary() + "; worst equality gap " + detail::fmt(worst_eq);
    return res;
}

/// Dyadic-split majorant for the trie: the analytic per-level envelope
/// e^{-x}(N + x) summed by E_bound_split dominates the directly computed
/// majorant of the (N+1)-th derivative.
inline CheckResult verify_trie_split() {
    CheckResult res{"trie dyadic split bound", true, ""};
    const TrieSequence& trie = detail::shared_trie();
    detail::GridTracker grid;
    for (double r : {16.0, 64.0, 256.0})
        for (unsigned N : {1u, 2u, 3u}) {
            auto g = [N](double x) { return std::exp(-x) * (static_cast<double>(N) + x); };
            double split = E_bound_split(g, N, r, 40);
            double direct = E_op(trie, N + 1, r).value;
            grid.record(direct, split,
                        "(r=" + detail::fmt(r) + ", N=" + std::to_string(N) + ")");
        }
    res.pass = grid.pass;
    res.detail = grid.summary();
    return res;
}

inline std::vector<CheckResult> verify_identity_suites() {
    return {verify_polynomial_tables(), verify_exact_identities(), verify_parseval(),
            verify_first_order()};
}

inline std::vector<CheckResult> verify_bound_suites() {
    return {verify_bounds_at_n(), verify_bounds_general_R(), verify_monotone_trie(),
            verify_inverse_bounds(), verify_trie_split()};
}

inline std::vector<CheckResult> verify_all_suites() {
    std::vector<CheckResult> out = verify_identity_suites();
    for (auto& r : verify_bound_suites()) out.push_back(std::move(r));
    out.push_back(verify_exact_inversion());
    out.push_back(verify_rate_fit());
    out.push_back(verify_E_algebra());
    return out;
}

}  // namespace depoisson

#endif
