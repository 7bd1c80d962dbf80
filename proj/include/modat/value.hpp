#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace modat {

enum class TypeTag { Bool, Int, Real, Time };

std::string_view to_string(TypeTag t);
std::optional<TypeTag> parse_type_tag(std::string_view name);

using Duration = std::chrono::milliseconds;

/// A typed scalar. INT is a 32-bit two's-complement integer (DINT on the
/// target), TIME is a duration with millisecond resolution.
class Value {
public:
    Value() : data_(false) {}

    static Value boolean(bool b) { return Value(b); }
    static Value integer(std::int32_t i) { return Value(i); }
    static Value real(double r) { return Value(r); }
    static Value time(Duration d) { return Value(d); }
    static Value zero(TypeTag t);

    TypeTag type() const { return static_cast<TypeTag>(data_.index()); }

    bool as_bool() const { return std::get<bool>(data_); }
    std::int32_t as_int() const { return std::get<std::int32_t>(data_); }
    double as_real() const { return std::get<double>(data_); }
    Duration as_time() const { return std::get<Duration>(data_); }

    friend bool operator==(const Value&, const Value&) = default;

private:
    template <typename T>
    explicit Value(T v) : data_(v) {}

    // Alternative order must match TypeTag.
    std::variant<bool, std::int32_t, double, Duration> data_;
};

/// Canonical literal text: TRUE/FALSE, decimal integers, reals that always
/// carry a '.' or exponent, and T#<n>ms durations.
std::string format_literal(const Value& v);

/// Shortest decimal text that parses back to exactly `r`.
std::string format_real(double r);

}  // namespace modat
