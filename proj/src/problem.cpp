#include "perihyp/problem.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "perihyp/error.hpp"

namespace perihyp {

namespace {

Expr parse_field(const std::string& name, const std::string& src, const std::vector<std::string>& vars) {
    try {
        return Expr::parse(src, vars);
    } catch (const ParseError& e) {
        throw ParseError("expression '" + name + "' (\"" + src + "\"): " + e.detail(), e.position());
    }
}

constexpr int kValidationPoints = 1001;

}  // namespace

const std::vector<std::string>& FirstOrderProblem::speed_variables() {
    static const std::vector<std::string> v{"x"};
    return v;
}

const std::vector<std::string>& FirstOrderProblem::source_variables() {
    static const std::vector<std::string> v{"x", "u1", "u2", "t"};
    return v;
}

FirstOrderProblem FirstOrderProblem::from_strings(const std::string& a1, const std::string& a2,
                                                  const std::string& f1, const std::string& f2, double r1,
                                                  double r2) {
    if (!std::isfinite(r1) || !std::isfinite(r2)) throw ConfigError("reflection coefficients must be finite");
    return FirstOrderProblem{parse_field("a1", a1, speed_variables()), parse_field("a2", a2, speed_variables()),
                             parse_field("f1", f1, source_variables()), parse_field("f2", f2, source_variables()),
                             r1, r2};
}

double FirstOrderProblem::speed(int j, double x) const {
    const double v[1] = {x};
    return (j == 0 ? a1 : a2).eval(v);
}

double FirstOrderProblem::source(int j, double t, double x, double u1, double u2) const {
    const double v[4] = {x, u1, u2, t};
    return (j == 0 ? f1 : f2).eval(v);
}

double FirstOrderProblem::diagonal_partial(int j, double t, double x, double u1, double u2) const {
    const double v[4] = {x, u1, u2, t};
    const int wrt[1] = {1 + j};
    return (j == 0 ? f1 : f2).eval_partials(v, wrt).d[0];
}

std::array<double, 2> FirstOrderProblem::partials(int j, double t, double x, double u1, double u2) const {
    const double v[4] = {x, u1, u2, t};
    const int wrt[2] = {1, 2};
    const auto p = (j == 0 ? f1 : f2).eval_partials(v, wrt);
    return {p.d[0], p.d[1]};
}

bool FirstOrderProblem::autonomous() const { return !f1.uses("t") && !f2.uses("t"); }

const std::vector<std::string>& SecondOrderProblem::speed_variables() {
    static const std::vector<std::string> v{"x"};
    return v;
}

const std::vector<std::string>& SecondOrderProblem::source_variables() {
    static const std::vector<std::string> v{"x", "u", "ut", "ux", "t"};
    return v;
}

SecondOrderProblem SecondOrderProblem::from_strings(const std::string& a, const std::string& f) {
    return SecondOrderProblem{parse_field("a", a, speed_variables()), parse_field("f", f, source_variables())};
}

double SecondOrderProblem::speed(double x) const {
    const double v[1] = {x};
    return a.eval(v);
}

double SecondOrderProblem::speed_derivative(double x) const {
    const double v[1] = {x};
    const int wrt[1] = {0};
    return a.eval_partials(v, wrt).d[0];
}

double SecondOrderProblem::source(double t, double x, double u, double ut, double ux) const {
    const double v[5] = {x, u, ut, ux, t};
    return f.eval(v);
}

Expr::Partials SecondOrderProblem::source_partials(double t, double x, double u, double ut, double ux) const {
    const double v[5] = {x, u, ut, ux, t};
    const int wrt[3] = {1, 2, 3};
    return f.eval_partials(v, wrt);
}

bool SecondOrderProblem::autonomous() const { return !f.uses("t"); }

ValidationReport validate_problem(const FirstOrderProblem& p, double tolerance) {
    ValidationReport r;
    r.margin_tolerance = tolerance;
    r.min_abs_a1 = r.min_abs_a2 = r.min_gap = std::numeric_limits<double>::infinity();
    try {
        double lo1 = std::numeric_limits<double>::infinity(), hi1 = -lo1, lo2 = lo1, hi2 = -lo1;
        for (int i = 0; i < kValidationPoints; ++i) {
            const double x = static_cast<double>(i) / (kValidationPoints - 1);
            const double s1 = p.speed(0, x), s2 = p.speed(1, x);
            r.min_abs_a1 = std::min(r.min_abs_a1, std::abs(s1));
            r.min_abs_a2 = std::min(r.min_abs_a2, std::abs(s2));
            r.min_gap = std::min(r.min_gap, std::abs(s1 - s2));
            lo1 = std::min(lo1, s1), hi1 = std::max(hi1, s1);
            lo2 = std::min(lo2, s2), hi2 = std::max(hi2, s2);
        }
        // A sign change between samples forces a zero even if no sample hits it.
        if (lo1 < 0 && hi1 > 0) r.min_abs_a1 = 0.0;
        if (lo2 < 0 && hi2 > 0) r.min_abs_a2 = 0.0;
    } catch (const DomainError& e) {
        r.messages.push_back(e.what());
        r.min_abs_a1 = r.min_abs_a2 = r.min_gap = 0.0;
    }
    if (r.min_abs_a1 <= tolerance) r.messages.push_back("a1 vanishes on [0,1]");
    if (r.min_abs_a2 <= tolerance) r.messages.push_back("a2 vanishes on [0,1]");
    if (r.min_gap <= tolerance) r.messages.push_back("a1 and a2 coincide somewhere on [0,1]");
    r.passed = r.min_abs_a1 > tolerance && r.min_abs_a2 > tolerance && r.min_gap > tolerance;
    return r;
}

ValidationReport validate_problem(const SecondOrderProblem& p, double tolerance) {
    ValidationReport r;
    r.margin_tolerance = tolerance;
    r.min_abs_a1 = std::numeric_limits<double>::infinity();
    r.min_abs_a2 = r.min_gap = 0.0;
    try {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (int i = 0; i < kValidationPoints; ++i) {
            const double x = static_cast<double>(i) / (kValidationPoints - 1);
            const double s = p.speed(x);
            p.speed_derivative(x);  // a must be differentiable everywhere
            r.min_abs_a1 = std::min(r.min_abs_a1, std::abs(s));
            lo = std::min(lo, s), hi = std::max(hi, s);
        }
        if (lo < 0 && hi > 0) r.min_abs_a1 = 0.0;
    } catch (const DomainError& e) {
        r.messages.push_back(e.what());
        r.min_abs_a1 = 0.0;
    }
    if (r.min_abs_a1 <= tolerance) r.messages.push_back("a vanishes on [0,1]");
    r.passed = r.min_abs_a1 > tolerance;
    return r;
}

Problem parse_problem_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("problem file is not valid JSON: ") + e.what());
    }
    auto str = [&](const char* key) -> std::string {
        if (!j.contains(key) || !j[key].is_string()) throw ConfigError(std::string("problem needs string field '") + key + "'");
        return j[key].get<std::string>();
    };
    auto num = [&](const char* key) -> double {
        if (!j.contains(key) || !j[key].is_number()) throw ConfigError(std::string("problem needs numeric field '") + key + "'");
        return j[key].get<double>();
    };
    const std::string kind = j.is_object() ? str("kind") : throw ConfigError("problem must be a JSON object");
    if (kind == "first_order") {
        return FirstOrderProblem::from_strings(str("a1"), str("a2"), str("f1"), str("f2"), num("r1"), num("r2"));
    }
    if (kind == "second_order") return SecondOrderProblem::from_strings(str("a"), str("f"));
    throw ConfigError("unknown problem kind '" + kind + "'");
}

Problem load_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open problem file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_problem_json(ss.str());
}

}  // namespace perihyp
