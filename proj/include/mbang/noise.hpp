#pragma once

// Zero-mean noise laws with analytic cumulants.
//
// Text form (used in JSON and on the command line):
//   uniform(a,b)  gamma(shape,rate)  chisq(df)  exp(rate)  t(df)
// Every law is shifted to mean zero. t(df) is additionally scaled to unit
// variance.

#include "errors.hpp"

#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace mbang {

class NoiseSpec {
public:
    enum class Family { uniform, gamma, chi_squared, exponential, student_t };

    static NoiseSpec uniform(double a, double b) { return NoiseSpec(Family::uniform, a, b); }
    static NoiseSpec gamma(double shape, double rate) { return NoiseSpec(Family::gamma, shape, rate); }
    static NoiseSpec chi_squared(double df) { return NoiseSpec(Family::chi_squared, df, 0.0); }
    static NoiseSpec exponential(double rate) { return NoiseSpec(Family::exponential, rate, 0.0); }
    static NoiseSpec student_t(double df) { return NoiseSpec(Family::student_t, df, 0.0); }

    static NoiseSpec parse(const std::string& text)
    {
        auto open = text.find('(');
        auto close = text.rfind(')');
        if (open == std::string::npos || close == std::string::npos || close < open)
            throw ValidationError("noise tag '" + text + "': expected name(params)");
        std::string name = text.substr(0, open);
        std::vector<double> args;
        std::stringstream ss(text.substr(open + 1, close - open - 1));
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            try {
                std::size_t used = 0;
                args.push_back(std::stod(tok, &used));
                if (tok.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(tok);
            } catch (const std::exception&) {
                throw ValidationError("noise tag '" + text + "': bad parameter '" + tok + "'");
            }
        }
        auto want = [&](std::size_t count) {
            if (args.size() != count)
                throw ValidationError("noise tag '" + text + "': expected " + std::to_string(count) + " parameter(s)");
        };
        if (name == "uniform" || name == "unif") {
            want(2);
            return uniform(args[0], args[1]);
        }
        if (name == "gamma") {
            want(2);
            return gamma(args[0], args[1]);
        }
        if (name == "chisq" || name == "chi-squared" || name == "chi2") {
            want(1);
            return chi_squared(args[0]);
        }
        if (name == "exp" || name == "exponential") {
            want(1);
            return exponential(args[0]);
        }
        if (name == "t" || name == "student-t") {
            want(1);
            return student_t(args[0]);
        }
        throw ValidationError("noise tag '" + text + "': unknown distribution '" + name + "'");
    }

    Family family() const noexcept { return family_; }

    std::string to_string() const
    {
        auto num = [](double x) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", x);
            return std::string(buf);
        };
        switch (family_) {
        case Family::uniform: return "uniform(" + num(a_) + "," + num(b_) + ")";
        case Family::gamma: return "gamma(" + num(a_) + "," + num(b_) + ")";
        case Family::chi_squared: return "chisq(" + num(a_) + ")";
        case Family::exponential: return "exp(" + num(a_) + ")";
        case Family::student_t: return "t(" + num(a_) + ")";
        }
        return {};
    }

    /// Highest cumulant order that exists for this law.
    int max_order() const noexcept
    {
        if (family_ != Family::student_t) return 1 << 20;
        // Moments of order r exist iff r < df.
        return static_cast<int>(std::ceil(a_)) - 1;
    }

    /// k-th cumulant of the shifted (and for t, rescaled) law.
    double cumulant(int k) const
    {
        if (k < 1) throw UsageError("cumulant order must be positive");
        if (k > max_order())
            throw NumericalError(to_string() + " has no cumulant of order " + std::to_string(k));
        if (k == 1) return 0.0;
        switch (family_) {
        case Family::uniform: {
            // kappa_k = B_k (b-a)^k / k with Bernoulli numbers; zero for odd k.
            if (k % 2 == 1) return 0.0;
            return bernoulli(k) * std::pow(b_ - a_, k) / k;
        }
        case Family::gamma: return a_ * factorial(k - 1) / std::pow(b_, k);
        case Family::chi_squared: return std::pow(2.0, k - 1) * factorial(k - 1) * a_;
        case Family::exponential: return factorial(k - 1) / std::pow(a_, k);
        case Family::student_t: return student_t_cumulant(k);
        }
        return 0.0;
    }

    double variance() const { return cumulant(2); }

    /// One zero-mean draw.
    template <typename Rng>
    double sample(Rng& rng) const
    {
        switch (family_) {
        case Family::uniform: return std::uniform_real_distribution<double>(a_, b_)(rng) - 0.5 * (a_ + b_);
        case Family::gamma: return std::gamma_distribution<double>(a_, 1.0 / b_)(rng) - a_ / b_;
        case Family::chi_squared: return std::chi_squared_distribution<double>(a_)(rng) - a_;
        case Family::exponential: return std::exponential_distribution<double>(a_)(rng) - 1.0 / a_;
        case Family::student_t: return std::student_t_distribution<double>(a_)(rng) * std::sqrt((a_ - 2.0) / a_);
        }
        return 0.0;
    }

    friend bool operator==(const NoiseSpec&, const NoiseSpec&) = default;

private:
    NoiseSpec(Family f, double a, double b) : family_(f), a_(a), b_(b)
    {
        auto bad = [&](const char* why) { throw ValidationError(to_string() + ": " + why); };
        if (!std::isfinite(a) || !std::isfinite(b)) bad("non-finite parameter");
        switch (f) {
        case Family::uniform:
            if (!(a < b)) bad("requires a < b");
            break;
        case Family::gamma:
            if (!(a > 0 && b > 0)) bad("requires shape > 0 and rate > 0");
            break;
        case Family::chi_squared:
        case Family::exponential:
            if (!(a > 0)) bad("requires a positive parameter");
            break;
        case Family::student_t:
            if (!(a > 2)) bad("requires df > 2 for a unit-variance scaling");
            break;
        }
    }

    static double factorial(int n)
    {
        double f = 1.0;
        for (int i = 2; i <= n; ++i) f *= i;
        return f;
    }

    static double bernoulli(int n)
    {
        // Akiyama-Tanigawa; B_1 = +1/2 convention is irrelevant for even n.
        std::vector<double> a(static_cast<std::size_t>(n) + 1);
        for (int m = 0; m <= n; ++m) {
            a[m] = 1.0 / (m + 1);
            for (int j = m; j >= 1; --j) a[j - 1] = j * (a[j - 1] - a[j]);
        }
        return a[0];
    }

    double student_t_cumulant(int k) const
    {
        const double nu = a_;
        const double scale2 = (nu - 2.0) / nu;
        // Raw moments of the standard t law: odd ones vanish,
        // mu_{2m} = nu^m prod_{i=1..m} (2i-1)/(nu-2i). Rescaled by scale^r.
        std::vector<double> mu(static_cast<std::size_t>(k) + 1, 0.0);
        mu[0] = 1.0;
        for (int r = 2; r <= k; r += 2) {
            int m = r / 2;
            double v = 1.0;
            for (int i = 1; i <= m; ++i) v *= nu * (2.0 * i - 1.0) / (nu - 2.0 * i);
            mu[r] = v * std::pow(scale2, m);
        }
        // kappa_r = mu_r - sum_{m=1}^{r-1} C(r-1, m-1) kappa_m mu_{r-m}
        std::vector<double> kappa(static_cast<std::size_t>(k) + 1, 0.0);
        for (int r = 1; r <= k; ++r) {
            double v = mu[r];
            double binom = 1.0; // C(r-1, m-1)
            for (int m = 1; m < r; ++m) {
                v -= binom * kappa[m] * mu[r - m];
                binom = binom * (r - m) / m;
            }
            kappa[r] = v;
        }
        return kappa[k];
    }

    Family family_;
    double a_;
    double b_;
};

} // namespace mbang
