#pragma once

#include "dcmrank/rng.hpp"

#include <string>

namespace dcmrank {

//! Real-valued law for damping factors and personalization values.
struct ScalarLaw {
    enum class Kind { Point, Uniform };

    Kind kind = Kind::Point;
    double lo = 0.0;  // point value when kind == Point
    double hi = 0.0;

    static ScalarLaw point(double value) { return {Kind::Point, value, value}; }
    static ScalarLaw uniform(double lo, double hi);

    double operator()(RandomStream& rng) const {
        return kind == Kind::Point ? lo : lo + (hi - lo) * rng.uniform();
    }

    [[nodiscard]] double mean() const { return 0.5 * (lo + hi); }
    //! E|X|^p for p > -1
    [[nodiscard]] double abs_moment(double p) const;
    [[nodiscard]] double mean_abs() const { return abs_moment(1.0); }
    //! Essential supremum of |X|.
    [[nodiscard]] double sup_abs() const;
    [[nodiscard]] bool is_point() const noexcept { return kind == Kind::Point; }

    [[nodiscard]] std::string describe() const;
};

bool operator==(const ScalarLaw& a, const ScalarLaw& b);

} // namespace dcmrank
