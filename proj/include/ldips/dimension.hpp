#pragma once

#include <array>
#include <compare>
#include <string>

namespace ldips {

// Exponents over (Length, Time, Mass).
struct Dimension {
    std::array<int, 3> exponents{0, 0, 0};

    constexpr Dimension() = default;
    constexpr Dimension(int length, int time, int mass) : exponents{length, time, mass} {}

    constexpr int length() const { return exponents[0]; }
    constexpr int time() const { return exponents[1]; }
    constexpr int mass() const { return exponents[2]; }
    constexpr bool dimensionless() const { return exponents == std::array<int, 3>{0, 0, 0}; }

    friend constexpr bool operator==(const Dimension&, const Dimension&) = default;
    friend constexpr auto operator<=>(const Dimension&, const Dimension&) = default;

    static constexpr Dimension none() { return {}; }
};

constexpr Dimension dim_add(Dimension a, Dimension b) {
    return {a.exponents[0] + b.exponents[0], a.exponents[1] + b.exponents[1],
            a.exponents[2] + b.exponents[2]};
}

constexpr Dimension dim_sub(Dimension a, Dimension b) {
    return {a.exponents[0] - b.exponents[0], a.exponents[1] - b.exponents[1],
            a.exponents[2] - b.exponents[2]};
}

// "[l,t,m]"
std::string to_string(Dimension d);

enum class TypeKind { Bool, Scalar, Vector };

struct ValueType {
    TypeKind kind = TypeKind::Scalar;
    Dimension dim{};

    static constexpr ValueType boolean() { return {TypeKind::Bool, {}}; }
    static constexpr ValueType scalar(Dimension d = {}) { return {TypeKind::Scalar, d}; }
    static constexpr ValueType vector(Dimension d = {}) { return {TypeKind::Vector, d}; }

    constexpr bool is_scalar() const { return kind == TypeKind::Scalar; }
    constexpr bool is_vector() const { return kind == TypeKind::Vector; }

    friend constexpr bool operator==(const ValueType&, const ValueType&) = default;
    friend constexpr auto operator<=>(const ValueType&, const ValueType&) = default;
};

// "[l,t,m]" for scalars, "V[l,t,m]" for vectors, "bool".
std::string to_string(const ValueType& t);

}  // namespace ldips
