#include "perihyp/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "perihyp/error.hpp"

namespace perihyp {

Json to_json(const Problem& p) {
    Json j;
    if (const auto* q = std::get_if<FirstOrderProblem>(&p)) {
        j["kind"] = "first_order";
        j["a1"] = q->a1.source();
        j["a2"] = q->a2.source();
        j["f1"] = q->f1.source();
        j["f2"] = q->f2.source();
        j["r1"] = q->r1;
        j["r2"] = q->r2;
    } else {
        const auto& s = std::get<SecondOrderProblem>(p);
        j["kind"] = "second_order";
        j["a"] = s.a.source();
        j["f"] = s.f.source();
    }
    return j;
}

Json to_json(const NonresonanceReport& r) {
    Json j;
    j["condition_id"] = r.condition_id;
    j["form"] = r.form;
    j["threshold"] = r.threshold;
    j["margin"] = r.margin;
    j["satisfied"] = r.satisfied;
    j["reflection_free"] = r.reflection_free;
    j["tolerance"] = r.tolerance;
    j["integral_values"] = r.integral_values;
    return j;
}

Json to_json(const std::array<NonresonanceReport, 2>& r) { return Json::array({to_json(r[0]), to_json(r[1])}); }

Json to_json(const SecondOrderNonresonance& r) {
    Json j;
    j["verdict"] = r.sum[0].satisfied || r.sum[1].satisfied ? "satisfied" : "violated";
    j["sum"] = to_json(r.sum);
    j["as_printed"] = to_json(r.as_printed);
    return j;
}

Json to_json(const ValidationReport& r) {
    Json j;
    j["passed"] = r.passed;
    j["min_abs_a1"] = r.min_abs_a1;
    j["min_abs_a2"] = r.min_abs_a2;
    j["min_gap"] = r.min_gap;
    j["margin_tolerance"] = r.margin_tolerance;
    j["messages"] = r.messages;
    return j;
}

Json to_json(const SolveReport& r) {
    Json j;
    j["status"] = to_string(r.status);
    j["converged"] = r.converged;
    j["iterations"] = r.iterations;
    j["residual_history"] = r.residual_history;
    j["inner_iterations"] = r.inner_iterations;
    j["reduction"] = r.reduction;
    j["message"] = r.message;
    j["nonresonance"] = r.nonresonance ? to_json(*r.nonresonance) : Json();
    return j;
}

Json to_json(const RegularityEstimate& r) {
    Json j;
    j["exponent"] = r.exponent;
    j["spectral_flag"] = r.spectral_flag;
    j["k_min"] = r.k_min;
    j["k_max"] = r.k_max;
    Json profiles = Json::array();
    for (const auto& p : r.profiles) {
        Json q;
        q["component"] = p.component + 1;
        q["x"] = p.x;
        q["exponent"] = p.exponent;
        q["spectral"] = p.spectral;
        profiles.push_back(q);
    }
    j["profiles"] = profiles;
    return j;
}

Json to_json(const std::vector<std::complex<double>>& values) {
    Json out = Json::array();
    for (const auto& z : values) out.push_back(Json{{"re", z.real()}, {"im", z.imag()}});
    return out;
}

namespace {

void format_number(std::ostream& out, double x) {
    if (!std::isfinite(x)) {
        out << "null";
        return;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    out << buf;
}

void emit(std::ostream& out, const Json& j, int depth) {
    const std::string pad(2 * (depth + 1), ' '), close(2 * depth, ' ');
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) {
                out << "{}";
                return;
            }
            out << "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out << ",\n";
                first = false;
                out << pad << Json(it.key()).dump() << ": ";
                emit(out, it.value(), depth + 1);
            }
            out << '\n' << close << '}';
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) {
                out << "[]";
                return;
            }
            out << "[\n";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out << ",\n";
                out << pad;
                emit(out, j[i], depth + 1);
            }
            out << '\n' << close << ']';
            return;
        }
        case Json::value_t::number_float: format_number(out, j.get<double>()); return;
        default: out << j.dump(); return;
    }
}

}  // namespace

std::string dump_json(const Json& j) {
    std::ostringstream out;
    emit(out, j, 0);
    out << '\n';
    return out.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << text;
    if (!out) throw ConfigError("write failed: " + path.string());
}

void write_json(const std::filesystem::path& path, const Json& j) { write_text(path, dump_json(j)); }

void write_field_csv(const std::filesystem::path& path, const PeriodicField& field) {
    std::ostringstream out;
    write_csv(out, field);
    write_text(path, out.str());
}

}  // namespace perihyp
