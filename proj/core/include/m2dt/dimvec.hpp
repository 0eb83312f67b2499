#pragma once

#include <compare>
#include <cstdlib>
#include <string>

namespace m2dt {

// Dimension vector for a two-vertex quiver.
struct DimVector {
    int n0 = 0, n1 = 0;

    int total() const { return n0 + n1; }
    bool is_zero() const { return n0 == 0 && n1 == 0; }
    auto operator<=>(const DimVector&) const = default;
    DimVector operator+(const DimVector& o) const { return {n0 + o.n0, n1 + o.n1}; }
    DimVector operator-(const DimVector& o) const { return {n0 - o.n0, n1 - o.n1}; }
    DimVector operator*(int a) const { return {a * n0, a * n1}; }
};

inline std::string to_string(const DimVector& v) {
    return "(" + std::to_string(v.n0) + "," + std::to_string(v.n1) + ")";
}

} // namespace m2dt
