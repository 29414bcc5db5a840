#pragma once

#include <cmath>
#include <json.hpp>
#include <string>

#include "ccm/error.hpp"
#include "ccm/graph.hpp"
#include "ccm/prob.hpp"
#include "ccm/quantum.hpp"

namespace ccm::jsonutil {

using json = nlohmann::ordered_json;

[[noreturn]] inline void bad(const std::string& why) { throw Error(ErrorKind::ParseError, why); }

inline json parse_text(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        bad(std::string("invalid JSON: ") + e.what());
    }
}

inline const json& field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) bad(std::string("missing field '") + key + "'");
    return j.at(key);
}

inline std::string str(const json& j, const char* what) {
    if (!j.is_string()) bad(std::string(what) + " must be a string");
    return j.get<std::string>();
}

inline int integer(const json& j, const char* what) {
    if (!j.is_number_integer()) bad(std::string(what) + " must be an integer");
    return j.get<int>();
}

inline Rational rational(const json& j) {
    if (j.is_number_integer()) return Rational(j.get<long>());
    if (j.is_string()) return parse_rational(j.get<std::string>());
    bad("probability must be an integer or a \"p/q\" string, got " + j.dump());
}

inline json rational_json(const Rational& q) {
    if (q.get_den() == 1 && q.get_num().fits_slong_p()) return json(q.get_num().get_si());
    return json(rational_text(q));
}

inline double real_literal(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        std::string s = j.get<std::string>();
        if (s == "1/sqrt2") return 1.0 / std::sqrt(2.0);
        if (s == "-1/sqrt2") return -1.0 / std::sqrt(2.0);
        return parse_rational(s).get_d();
    }
    bad("bad numeric literal " + j.dump());
}

inline Scalar scalar(const json& j) {
    Scalar s;
    s.literal = j.dump();
    if (j.is_array()) {
        if (j.size() != 2) bad("complex literal must be [re, im]");
        s.value = Complex(real_literal(j[0]), real_literal(j[1]));
    } else {
        s.value = Complex(real_literal(j), 0.0);
    }
    return s;
}

inline json scalar_json(const Scalar& s) {
    if (!s.literal.empty()) return json::parse(s.literal);
    if (s.value.imag() == 0.0) return json(s.value.real());
    return json::array({s.value.real(), s.value.imag()});
}

inline NodeSet node_set(const json& j) {
    NodeSet s;
    if (j.is_string()) {
        // compact form "AB" for single-character ids
        for (char c : j.get<std::string>()) s.insert(std::string(1, c));
        return s;
    }
    if (!j.is_array()) bad("node set must be an array of ids");
    for (auto& x : j) s.insert(str(x, "node id"));
    return s;
}

inline json node_set_json(const NodeSet& s) {
    json a = json::array();
    for (auto& id : s) a.push_back(id);
    return a;
}

}  // namespace ccm::jsonutil
