#include "modat/value.hpp"

#include <array>
#include <charconv>
#include <system_error>

namespace modat {

std::string_view to_string(TypeTag t) {
    switch (t) {
        case TypeTag::Bool: return "BOOL";
        case TypeTag::Int: return "INT";
        case TypeTag::Real: return "REAL";
        case TypeTag::Time: return "TIME";
    }
    return "?";
}

std::optional<TypeTag> parse_type_tag(std::string_view name) {
    if (name == "BOOL") return TypeTag::Bool;
    if (name == "INT") return TypeTag::Int;
    if (name == "REAL") return TypeTag::Real;
    if (name == "TIME") return TypeTag::Time;
    return std::nullopt;
}

Value Value::zero(TypeTag t) {
    switch (t) {
        case TypeTag::Bool: return boolean(false);
        case TypeTag::Int: return integer(0);
        case TypeTag::Real: return real(0.0);
        case TypeTag::Time: return time(Duration{0});
    }
    return boolean(false);
}

std::string format_real(double r) {
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), r);
    std::string s(buf.data(), end);
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    // "1e+20" is not a valid literal in either the DSL or ST; force a mantissa dot.
    if (auto e = s.find('e'); e != std::string::npos && s.find('.') == std::string::npos) {
        s.insert(e, ".0");
    }
    return s;
}

std::string format_literal(const Value& v) {
    switch (v.type()) {
        case TypeTag::Bool: return v.as_bool() ? "TRUE" : "FALSE";
        case TypeTag::Int: return std::to_string(v.as_int());
        case TypeTag::Real: return format_real(v.as_real());
        case TypeTag::Time: return "T#" + std::to_string(v.as_time().count()) + "ms";
    }
    return "?";
}

}  // namespace modat
