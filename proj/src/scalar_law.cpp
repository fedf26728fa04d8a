#include "dcmrank/scalar_law.hpp"

#include "dcmrank/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dcmrank {

ScalarLaw ScalarLaw::uniform(double lo, double hi) {
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
        throw InvalidParameter("uniform law requires finite lo < hi");
    return {Kind::Uniform, lo, hi};
}

double ScalarLaw::abs_moment(double p) const {
    if (kind == Kind::Point) return lo == 0.0 && p <= 0.0 ? 0.0 : std::pow(std::abs(lo), p);
    // integral of |x|^p over [lo, hi] divided by the width
    auto primitive = [p](double x) {
        const double v = std::pow(std::abs(x), p + 1.0) / (p + 1.0);
        return x < 0 ? -v : v;
    };
    return (primitive(hi) - primitive(lo)) / (hi - lo);
}

double ScalarLaw::sup_abs() const { return std::max(std::abs(lo), std::abs(hi)); }

std::string ScalarLaw::describe() const {
    std::ostringstream os;
    os.precision(17);
    if (kind == Kind::Point)
        os << "point(" << lo << ")";
    else
        os << "uniform(" << lo << "," << hi << ")";
    return os.str();
}

bool operator==(const ScalarLaw& a, const ScalarLaw& b) {
    return a.kind == b.kind && a.lo == b.lo && a.hi == b.hi;
}

} // namespace dcmrank
