#ifndef DEPOISSON_SEQUENCES_HPP
#define DEPOISSON_SEQUENCES_HPP

#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "depoisson/rational.hpp"

namespace depoisson {

/// Coefficient sequence A_m with optional exactness, real extension phi,
/// derivative accessors, and a closed-form Poisson transform. max_index()
/// is -1 for unbounded providers.
class Sequence {
public:
    virtual ~Sequence() = default;

    virtual bool is_exact() const = 0;
    virtual long max_index() const { return -1; }
    virtual double value(long m) const = 0;
    virtual Rational exact_value(long) const {
        throw std::logic_error("sequence has no exact values");
    }

    /// Forward difference Delta^k A_m. The default floating path flags
    /// degraded precision when the alternating sum's condition number
    /// exceeds 1e8; exact providers route through exact_delta.
    virtual double delta(unsigned k, long m, bool* degraded = nullptr) const {
        if (is_exact()) return to_double(exact_delta(k, m));
        double sum = 0.0, comp = 0.0, mass = 0.0;
        double b = 1.0;
        for (unsigned i = 0; i <= k; ++i) {
            double a = value(m + static_cast<long>(i));
            double term = b * a;
            mass += std::fabs(term);
            if ((k - i) & 1u) term = -term;
            double t = sum + term;
            if (std::fabs(sum) >= std::fabs(term))
                comp += (sum - t) + term;
            else
                comp += (term - t) + sum;
            sum = t;
            b *= static_cast<double>(k - i) / static_cast<double>(i + 1);
        }
        double v = sum + comp;
        if (degraded && mass > 1e8 * std::max(std::fabs(v), 1e-300)) *degraded = true;
        return v;
    }

    virtual Rational exact_delta(unsigned k, long m) const {
        Rational acc = 0;
        for (unsigned i = 0; i <= k; ++i) {
            Rational t = Rational(binomial(k, i)) * exact_value(m + static_cast<long>(i));
            if ((k - i) & 1u) acc -= t; else acc += t;
        }
        return acc;
    }

    virtual bool has_extension() const { return false; }
    virtual double phi(double) const { throw std::logic_error("sequence has no real extension"); }
    virtual double phi_delta(unsigned, double) const {
        throw std::logic_error("sequence has no real extension");
    }
    virtual bool has_derivatives() const { return false; }
    virtual double phi_derivative(unsigned, double) const {
        throw std::logic_error("sequence has no derivative accessor");
    }
    virtual bool has_transform() const { return false; }
    /// Closed form for f^{(k)}(r) when known.
    virtual double transform(unsigned, double) const {
        throw std::logic_error("sequence has no closed-form transform");
    }
};

inline double finite_difference(const Sequence& s, unsigned k, long m, bool* degraded = nullptr) {
    return s.delta(k, m, degraded);
}
inline Rational exact_finite_difference(const Sequence& s, unsigned k, long m) {
    return s.exact_delta(k, m);
}

class ConstantSequence : public Sequence {
public:
    explicit ConstantSequence(Rational c) : c_(std::move(c)), cd_(to_double(c_)) {}
    bool is_exact() const override { return true; }
    double value(long) const override { return cd_; }
    Rational exact_value(long) const override { return c_; }
    double delta(unsigned k, long, bool* = nullptr) const override { return k == 0 ? cd_ : 0.0; }
    Rational exact_delta(unsigned k, long) const override { return k == 0 ? c_ : Rational(0); }
    bool has_extension() const override { return true; }
    double phi(double) const override { return cd_; }
    double phi_delta(unsigned s, double) const override { return s == 0 ? cd_ : 0.0; }
    bool has_derivatives() const override { return true; }
    double phi_derivative(unsigned j, double) const override { return j == 0 ? cd_ : 0.0; }
    bool has_transform() const override { return true; }
    double transform(unsigned k, double) const override { return k == 0 ? cd_ : 0.0; }

private:
    Rational c_;
    double cd_;
};

/// A_m = sum_k w_k q_k^m with w_k > 0 and q_k in (0,1). All accessors have
/// exact closed forms: Delta^k A_m = sum w (q-1)^k q^m, phi(x) = sum w q^x,
/// f^{(k)}(r) = sum w (q-1)^k e^{-r(1-q)}.
class GeometricMixture : public Sequence {
public:
    using Atom = std::pair<Rational, Rational>;  // (weight, ratio)
    explicit GeometricMixture(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
        if (atoms_.empty()) throw std::invalid_argument("geometric mixture needs at least one atom");
        for (const auto& [w, q] : atoms_) {
            if (w <= 0) throw std::invalid_argument("geometric mixture weight must be positive");
            if (q <= 0 || q >= 1)
                throw std::invalid_argument("geometric mixture ratio must lie in (0,1)");
            wd_.push_back(to_double(w));
            qd_.push_back(to_double(q));
            logq_.push_back(std::log(to_double(q)));
        }
    }

    const std::vector<Atom>& atoms() const { return atoms_; }
    bool is_exact() const override { return true; }

    double value(long m) const override {
        double s = 0.0;
        for (std::size_t i = 0; i < wd_.size(); ++i)
            s += wd_[i] * std::exp(static_cast<double>(m) * logq_[i]);
        return s;
    }
    Rational exact_value(long m) const override {
        if (m < 0) throw std::out_of_range("negative index");
        Rational s = 0;
        for (const auto& [w, q] : atoms_) s += w * pow_rational(q, m);
        return s;
    }
    double delta(unsigned k, long m, bool* = nullptr) const override {
        double s = 0.0;
        for (std::size_t i = 0; i < wd_.size(); ++i)
            s += wd_[i] * std::pow(qd_[i] - 1.0, static_cast<double>(k)) *
                 std::exp(static_cast<double>(m) * logq_[i]);
        return s;
    }
    Rational exact_delta(unsigned k, long m) const override {
        if (m < 0) throw std::out_of_range("negative index");
        Rational s = 0;
        for (const auto& [w, q] : atoms_)
            s += w * pow_rational(q - 1, k) * pow_rational(q, m);
        return s;
    }

    bool has_extension() const override { return true; }
    double phi(double x) const override {
        double s = 0.0;
        for (std::size_t i = 0; i < wd_.size(); ++i) s += wd_[i] * std::exp(x * logq_[i]);
        return s;
    }
    double phi_delta(unsigned s, double x) const override {
        double acc = 0.0;
        for (std::size_t i = 0; i < wd_.size(); ++i)
            acc += wd_[i] * std::pow(qd_[i] - 1.0, static_cast<double>(s)) * std::exp(x * logq_[i]);
        return acc;
    }
    bool has_derivatives() const override { return true; }
    double phi_derivative(unsigned j, double x) const override {
        double acc = 0.0;
        for (std::size_t i = 0; i < wd_.size(); ++i)
            acc += wd_[i] * std::pow(logq_[i], static_cast<double>(j)) * std::exp(x * logq_[i]);
        return acc;
    }
    bool has_transform() const override { return true; }
    double transform(unsigned k, double r) const override {
        double s = 0.0;
        for (std::size_t i = 0; i < wd_.size(); ++i)
            s += wd_[i] * std::pow(qd_[i] - 1.0, static_cast<double>(k)) *
                 std::exp(-r * (1.0 - qd_[i]));
        return s;
    }

private:
    std::vector<Atom> atoms_;
    std::vector<double> wd_, qd_, logq_;
};

/// A_m = sum_k w_k c_k^m with w_k > 0 and c_k >= 1 (c = 1 contributes a
/// constant). The Poisson average has closed form sum w e^{r(c-1)}.
class ExpMixture : public Sequence {
public:
    using Atom = std::pair<Rational, Rational>;  // (weight, base)
    explicit ExpMixture(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
        if (atoms_.empty()) throw std::invalid_argument("exp mixture needs at least one atom");
        for (const auto& [w, c] : atoms_) {
            if (w <= 0) throw std::invalid_argument("exp mixture weight must be positive");
            if (c < 1) throw std::invalid_argument("exp mixture base must be >= 1");
            wd_.push_back(to_double(w));
            cd_.push_back(to_double(c));
            logc_.push_back(std::log(to_double(c)));
        }
    }

    const std::vector<Atom>& atoms() const { return atoms_; }
    bool is_exact() const override { return true; }

    double value(long m) const override {
        double s = 0.0;
        for (std::size_t i = 0; i < wd_.size(); ++i)
            s += wd_[i] * std::exp(static_cast<double>(m) * logc_[i]);
        return s;
    }
    Rational exact_value(long m) const override {
        if (m < 0) throw std::out_of_range("negative index");
        Rational s = 0;
        for (const auto& [w, c] : atoms_) s += w * pow_rational(c, m);
        return s;
    }
    double delta(unsigned k, long m, bool* = nullptr) const override {
        double s = 0.0;
        for (std::size_t i = 0; i < wd_.size(); ++i)
            s += wd_[i] * std::pow(cd_[i] - 1.0, static_cast<double>(k)) *
                 std::exp(static_cast<double>(m) * logc_[i]);
        return s;
    }
    Rational exact_delta(unsigned k, long m) const override {
        if (m < 0) throw std::out_of_range("negative index");
        Rational s = 0;
        for (const auto& [w, c] : atoms_)
            s += w * pow_rational(c - 1, k) * pow_rational(c, m);
        return s;
    }

    bool has_extension() const override { return true; }
    double phi(double x) const override {
        double s = 0.0;
        for (std::size_t i = 0; i < wd_.size(); ++i) s += wd_[i] * std::exp(x * logc_[i]);
        return s;
    }
    double phi_delta(unsigned s, double x) const override {
        double acc = 0.0;
        for (std::size_t i = 0; i < wd_.size(); ++i)
            acc += wd_[i] * std::pow(cd_[i] - 1.0, static_cast<double>(s)) * std::exp(x * logc_[i]);
        return acc;
    }
    bool has_derivatives() const override { return true; }
    double phi_derivative(unsigned j, double x) const override {
        double acc = 0.0;
        for (std::size_t i = 0; i < wd_.size(); ++i)
            acc += wd_[i] * std::pow(logc_[i], static_cast<double>(j)) * std::exp(x * logc_[i]);
        return acc;
    }
    bool has_transform() const override { return true; }
    double transform(unsigned k, double r) const override {
        double s = 0.0;
        for (std::size_t i = 0; i < wd_.size(); ++i)
            s += wd_[i] * std::pow(cd_[i] - 1.0, static_cast<double>(k)) *
                 std::exp(r * (cd_[i] - 1.0));
        return s;
    }

private:
    std::vector<Atom> atoms_;
    std::vector<double> wd_, cd_, logc_;
};

namespace detail {

// g(x) = e^{-x}(e^x - 1 - x); series near 0 to dodge cancellation.
inline double trie_g(double x) {
    if (std::fabs(x) < 0.01) {
        double x2 = x * x;
        return x2 * (0.5 + x * (-1.0 / 3.0) + x2 * (1.0 / 8.0) + x2 * x * (-1.0 / 30.0) +
                     x2 * x2 * (1.0 / 144.0));
    }
    return -std::expm1(-x) - x * std::exp(-x);
}

// g^{(k)}(x) = (-1)^{k-1} e^{-x} (x - (k-1)) for k >= 1.
inline double trie_g_deriv(unsigned k, double x) {
    if (k == 0) return trie_g(x);
    double v = std::exp(-x) * (x - static_cast<double>(k - 1));
    return (k % 2 == 1) ? v : -v;
}

}  // namespace detail

/// Expected external path sum of a random symmetric binary trie built from n
/// strings: ES_0 = ES_1 = 0 and
///   Delta ES_n = (1/(2^n - 1)) sum_{j<n} binom(n,j) Delta ES_j + 2 [n = 1].
/// An exact rational table covers n <= exact_limit. Beyond the table, values
/// come from the closed form
///   ES_n = sum_{k=2}^{n} binom(n,k) (-1)^k (k-1) 2^{k-1}/(2^{k-1}-1)
/// evaluated in multiprecision floating point (the alternating sum cancels
/// about n bits, so evaluation carries n + 360 bits). The closed form is the
/// binomial transform of the recurrence and is cross-checked against the
/// exact table in the tests.
class TrieSequence : public Sequence {
public:
    explicit TrieSequence(long exact_limit = 64) : exact_limit_(exact_limit) {
        if (exact_limit_ < 1) throw std::invalid_argument("trie sequence needs exact_limit >= 1");
        std::vector<Rational> de(static_cast<std::size_t>(exact_limit_) + 1);
        de[0] = 0;
        Int pow2 = 1;
        for (long n = 1; n <= exact_limit_; ++n) {
            pow2 *= 2;  // 2^n
            Rational acc = 0;
            for (long j = 0; j < n; ++j)
                acc += Rational(binomial(static_cast<unsigned long>(n),
                                         static_cast<unsigned long>(j))) * de[j];
            acc /= Rational(pow2 - 1);
            if (n == 1) acc += 2;
            de[n] = acc;
        }
        table_.resize(static_cast<std::size_t>(exact_limit_) + 1);
        table_[0] = 0;
        for (long n = 1; n <= exact_limit_; ++n) table_[n] = table_[n - 1] + de[n - 1];
    }

    bool is_exact() const override { return true; }
    long exact_limit() const { return exact_limit_; }

    double value(long m) const override {
        if (m < 0) throw std::out_of_range("negative index");
        if (m <= exact_limit_) return to_double(table_[m]);
        return high_precision(m).get_d();
    }
    Rational exact_value(long m) const override {
        if (m < 0) throw std::out_of_range("negative index");
        if (m > exact_limit_)
            throw std::out_of_range("trie index beyond exact table");
        return table_[m];
    }
    double delta(unsigned k, long m, bool* = nullptr) const override {
        if (m < 0) throw std::out_of_range("negative index");
        if (m + static_cast<long>(k) <= exact_limit_)
            return to_double(exact_delta(k, m));
        mp_bitcnt_t prec = static_cast<mp_bitcnt_t>(m + k) + 380;
        mpf_class acc(0, prec);
        for (unsigned i = 0; i <= k; ++i) {
            mpf_class t(binomial(k, i), prec);
            t *= high_precision(m + static_cast<long>(i));
            if ((k - i) & 1u) acc -= t; else acc += t;
        }
        return acc.get_d();
    }
    Rational exact_delta(unsigned k, long m) const override {
        return Sequence::exact_delta(k, m);
    }

    bool has_transform() const override { return true; }
    /// h^{(k)}(r) for h(r) = sum_{j>=0} 2^j g(r/2^j), termwise differentiated:
    /// sum_j 2^{j(1-k)} g^{(k)}(r/2^j), truncated at relative 1e-18.
    double transform(unsigned k, double r) const override {
        double sum = 0.0;
        double scale = 1.0;  // 2^{j(1-k)}
        double ratio = std::pow(2.0, 1.0 - static_cast<double>(k));
        double x = r;
        for (int j = 0; j < 1500; ++j) {
            double term = scale * detail::trie_g_deriv(k, x);
            sum += term;
            if (x < 0.5 && std::fabs(term) <= 1e-18 * std::fabs(sum)) break;
            scale *= ratio;
            x *= 0.5;
        }
        return sum;
    }

private:
    mpf_class high_precision(long n) const {
        std::lock_guard<std::mutex> lock(mtx_);
        auto it = cache_.find(n);
        if (it != cache_.end()) return it->second;
        mp_bitcnt_t prec = static_cast<mp_bitcnt_t>(n) + 360;
        mpf_class acc(0, prec);
        Int pow2 = 2;  // 2^{k-1}
        for (long k = 2; k <= n; ++k) {
            pow2 *= 2;
            Int p = pow2 / 2;  // 2^{k-1}
            Rational ck(Int(k - 1) * p, p - 1);
            mpf_class term(binomial(static_cast<unsigned long>(n),
                                    static_cast<unsigned long>(k)), prec);
            term *= mpf_class(ck, prec);
            if (k & 1) acc -= term; else acc += term;
        }
        cache_.emplace(n, acc);
        return acc;
    }

    long exact_limit_;
    std::vector<Rational> table_;
    mutable std::map<long, mpf_class> cache_;
    mutable std::mutex mtx_;
};

/// Finite sequence loaded from a text file: one value per line ("p/q",
/// integer, or decimal; decimals without exponents stay exact), '#' comment
/// lines, and an optional "# offset N" header fixing the index of the first
/// value. Scientific-notation values switch the provider to floating.
class FileSequence : public Sequence {
public:
    explicit FileSequence(const std::string& path, long offset = 0)
        : offset_(offset), exact_(true) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open sequence file: " + path);
        std::string line;
        long lineno = 0;
        bool offset_seen = false;
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            std::size_t b = line.find_first_not_of(" \t");
            if (b == std::string::npos) continue;
            std::size_t e = line.find_last_not_of(" \t");
            std::string tok = line.substr(b, e - b + 1);
            if (tok[0] == '#') {
                std::istringstream hs(tok.substr(1));
                std::string word;
                long n;
                if (!offset_seen && hs >> word && word == "offset" && hs >> n) {
                    offset_ = n;
                    offset_seen = true;
                }
                continue;
            }
            try {
                Rational q = parse_rational(tok);
                exact_vals_.push_back(q);
                vals_.push_back(to_double(q));
            } catch (const std::invalid_argument&) {
                std::size_t pos = 0;
                double d;
                try {
                    d = std::stod(tok, &pos);
                } catch (const std::exception&) {
                    pos = 0;
                }
                if (pos != tok.size())
                    throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                             ": cannot parse value '" + tok + "'");
                exact_ = false;
                exact_vals_.emplace_back(0);
                vals_.push_back(d);
            }
        }
        if (vals_.empty()) throw std::runtime_error(path + ": no values in sequence file");
    }

    bool is_exact() const override { return exact_; }
    long offset() const { return offset_; }
    long max_index() const override { return offset_ + static_cast<long>(vals_.size()) - 1; }

    double value(long m) const override { return vals_[index(m)]; }
    Rational exact_value(long m) const override {
        if (!exact_) throw std::logic_error("sequence file holds floating values");
        return exact_vals_[index(m)];
    }

private:
    std::size_t index(long m) const {
        long i = m - offset_;
        if (i < 0 || i >= static_cast<long>(vals_.size()))
            throw std::out_of_range("sequence file index " + std::to_string(m) +
                                    " outside [" + std::to_string(offset_) + ", " +
                                    std::to_string(max_index()) + "]");
        return static_cast<std::size_t>(i);
    }

    long offset_;
    bool exact_;
    std::vector<Rational> exact_vals_;
    std::vector<double> vals_;
};

}  // namespace depoisson

#endif
