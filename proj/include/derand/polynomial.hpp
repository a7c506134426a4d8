#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace derand {

// Sparse multilinear polynomial over {1,-1}^n. Monomials are sorted lists of
// 1-indexed variables; zero coefficients are never stored.
class MultilinearPolynomial {
public:
    using Monomial = std::vector<int>;

    MultilinearPolynomial() = default;

    // Adds coef to the monomial's coefficient (variables are sorted, duplicates
    // cancel because x_i^2 = 1).
    void add_term(Monomial vars, double coef);

    const std::map<Monomial, double>& terms() const noexcept { return terms_; }
    size_t size() const noexcept { return terms_.size(); }
    int degree() const noexcept;
    // Largest variable index, 0 for constants.
    int max_variable() const noexcept;

    double evaluate(std::span<const int> x) const;
    double l2_norm() const;
    MultilinearPolynomial scaled(double s) const;

    nlohmann::json to_json() const;
    static MultilinearPolynomial from_json(const nlohmann::json& j);
    static MultilinearPolynomial parse(const std::string& text);

private:
    std::map<Monomial, double> terms_;
};

// At most one variable of I per bucket of h (h indexed by variable - 1).
bool is_h_bad(const MultilinearPolynomial::Monomial& vars, std::span<const uint32_t> h);
MultilinearPolynomial prune_h_bad(const MultilinearPolynomial& p, std::span<const uint32_t> h);
double bad_weight(const MultilinearPolynomial& p, std::span<const uint32_t> h);

// Fast evaluator over packed points: bit i-1 of x set means x_i = -1.
class CompiledPolynomial {
public:
    explicit CompiledPolynomial(const MultilinearPolynomial& p);
    double operator()(uint64_t x) const noexcept {
        double s = 0;
        for (size_t k = 0; k < masks_.size(); ++k) s += (__builtin_popcountll(x & masks_[k]) & 1) ? -coefs_[k] : coefs_[k];
        return s;
    }
    int max_variable() const noexcept { return max_var_; }

private:
    std::vector<uint64_t> masks_;
    std::vector<double> coefs_;
    int max_var_ = 0;
};

}  // namespace derand
