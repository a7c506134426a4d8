#include "derand/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include "derand/errors.hpp"

namespace derand {

void MultilinearPolynomial::add_term(Monomial vars, double coef) {
    if (!std::isfinite(coef)) throw ParameterError("polynomial: coefficient must be finite");
    std::sort(vars.begin(), vars.end());
    Monomial reduced;
    for (size_t i = 0; i < vars.size();) {
        if (vars[i] < 1) throw ParameterError("polynomial: variables are 1-indexed");
        size_t j = i;
        while (j < vars.size() && vars[j] == vars[i]) ++j;
        if ((j - i) % 2 == 1) reduced.push_back(vars[i]);
        i = j;
    }
    const double v = (terms_[reduced] += coef);
    if (v == 0.0) terms_.erase(reduced);
}

int MultilinearPolynomial::degree() const noexcept {
    int d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, static_cast<int>(m.size()));
    return d;
}

int MultilinearPolynomial::max_variable() const noexcept {
    int v = 0;
    for (const auto& [m, c] : terms_)
        if (!m.empty()) v = std::max(v, m.back());
    return v;
}

double MultilinearPolynomial::evaluate(std::span<const int> x) const {
    if (static_cast<int>(x.size()) < max_variable()) throw ParameterError("evaluate: point shorter than max variable");
    double s = 0;
    for (const auto& [m, c] : terms_) {
        int sign = 1;
        for (int v : m) sign *= x[v - 1];
        s += sign * c;
    }
    return s;
}

double MultilinearPolynomial::l2_norm() const {
    double s = 0;
    for (const auto& [m, c] : terms_) s += c * c;
    return std::sqrt(s);
}

MultilinearPolynomial MultilinearPolynomial::scaled(double s) const {
    MultilinearPolynomial out;
    for (const auto& [m, c] : terms_) out.add_term(m, c * s);
    return out;
}

nlohmann::json MultilinearPolynomial::to_json() const {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& [m, c] : terms_) terms.push_back({{"vars", m}, {"coef", c}});
    return {{"terms", terms}};
}

MultilinearPolynomial MultilinearPolynomial::from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("terms") || !j["terms"].is_array())
        throw ParameterError("polynomial JSON: expected {\"terms\": [...]}");
    MultilinearPolynomial p;
    for (const auto& t : j["terms"]) {
        if (!t.is_object() || !t.contains("vars") || !t.contains("coef") || !t["vars"].is_array() ||
            !t["coef"].is_number())
            throw ParameterError("polynomial JSON: each term needs \"vars\" and \"coef\"");
        Monomial vars;
        for (const auto& v : t["vars"]) {
            if (!v.is_number_integer()) throw ParameterError("polynomial JSON: variables must be integers");
            vars.push_back(v.get<int>());
        }
        p.add_term(std::move(vars), t["coef"].get<double>());
    }
    return p;
}

MultilinearPolynomial MultilinearPolynomial::parse(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParameterError(std::string("polynomial JSON: ") + e.what());
    }
    return from_json(j);
}

bool is_h_bad(const MultilinearPolynomial::Monomial& vars, std::span<const uint32_t> h) {
    std::vector<uint32_t> buckets;
    buckets.reserve(vars.size());
    for (int v : vars) {
        if (v < 1 || static_cast<size_t>(v) > h.size()) throw ParameterError("h-bad check: h undefined on a variable");
        buckets.push_back(h[v - 1]);
    }
    std::sort(buckets.begin(), buckets.end());
    return std::adjacent_find(buckets.begin(), buckets.end()) != buckets.end();
}

MultilinearPolynomial prune_h_bad(const MultilinearPolynomial& p, std::span<const uint32_t> h) {
    MultilinearPolynomial out;
    for (const auto& [m, c] : p.terms())
        if (!is_h_bad(m, h)) out.add_term(m, c);
    return out;
}

double bad_weight(const MultilinearPolynomial& p, std::span<const uint32_t> h) {
    double s = 0;
    for (const auto& [m, c] : p.terms())
        if (is_h_bad(m, h)) s += c * c;
    return s;
}

CompiledPolynomial::CompiledPolynomial(const MultilinearPolynomial& p) {
    max_var_ = p.max_variable();
    if (max_var_ > 64) throw ParameterError("compiled polynomial: at most 64 variables");
    for (const auto& [m, c] : p.terms()) {
        uint64_t mask = 0;
        for (int v : m) mask |= uint64_t{1} << (v - 1);
        masks_.push_back(mask);
        coefs_.push_back(c);
    }
}

}  // namespace derand
