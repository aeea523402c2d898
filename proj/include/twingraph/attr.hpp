// Attribute values and positions carried by plant graph elements.
//
// Numeric attributes use fixed canonical units keyed by attribute name:
// volume m3, max_flow m3/h, flow m3/h, diameter m, length m and
// split.<nozzle-id> as a dimensionless fraction.
#pragma once

#include <cmath>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace twingraph {

class AttrValue {
public:
    AttrValue() : v_(0.0) {}
    AttrValue(double n) : v_(n) {}
    AttrValue(bool b) : v_(b) {}
    AttrValue(std::string s) : v_(std::move(s)) {}
    AttrValue(const char* s) : v_(std::string(s)) {}

    bool is_number() const { return std::holds_alternative<double>(v_); }
    bool is_bool() const { return std::holds_alternative<bool>(v_); }
    bool is_text() const { return std::holds_alternative<std::string>(v_); }

    double number() const { return std::get<double>(v_); }
    bool boolean() const { return std::get<bool>(v_); }
    const std::string& text() const { return std::get<std::string>(v_); }

    // Numbers must be finite; NaN and infinities are not representable.
    bool finite() const { return !is_number() || std::isfinite(number()); }

    friend bool operator==(const AttrValue& a, const AttrValue& b) { return a.v_ == b.v_; }
    friend bool operator!=(const AttrValue& a, const AttrValue& b) { return !(a == b); }

    std::string type_name() const {
        return is_number() ? "number" : is_bool() ? "boolean" : "text";
    }

private:
    std::variant<double, bool, std::string> v_;
};

using AttrMap = std::map<std::string, AttrValue>;

enum class CoordFrame { DocumentMM, PlantM };

const char* coord_frame_name(CoordFrame f);

/// Document (mm) or plant (m) coordinates, pair or triple. Carried, never interpreted.
struct Position {
    CoordFrame frame = CoordFrame::DocumentMM;
    std::vector<double> coords;  // size 2 or 3

    friend bool operator==(const Position& a, const Position& b) {
        return a.frame == b.frame && a.coords == b.coords;
    }
};

}  // namespace twingraph
