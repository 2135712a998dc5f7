#pragma once

#include "bcz/farey_point.hpp"
#include "bcz/rational.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace bcz {

/// Closed axis-aligned rectangle [x0,x1] x [y0,y1] in [0,1]^2 carrying a
/// rational value. Overlapping rectangles add.
struct RectPiece {
    Rational x0, x1, y0, y1;
    Rational value;
};

/// Rational-valued step function over axis-aligned rectangles: the concrete
/// form "piecewise continuous bounded" takes in this library so that orbit
/// sums and the dm-integral stay exact.
class StepFunction {
public:
    StepFunction() = default;
    explicit StepFunction(std::vector<RectPiece> pieces) : pieces_(std::move(pieces)) {
        for (const auto& p : pieces_) {
            if (p.x0 > p.x1 || p.y0 > p.y1) throw std::domain_error("degenerate rectangle");
            if (p.x0 < Rational(0) || p.x1 > Rational(1) || p.y0 < Rational(0) ||
                p.y1 > Rational(1))
                throw std::domain_error("rectangle outside the unit square");
        }
    }

    const std::vector<RectPiece>& pieces() const { return pieces_; }

    Rational operator()(const FareyPoint& p) const {
        const Rational a = p.x();
        const Rational b = p.y();
        Rational v(0);
        for (const auto& r : pieces_)
            if (r.x0 <= a && a <= r.x1 && r.y0 <= b && b <= r.y1) v += r.value;
        return v;
    }

    /// Exact integral against dm = 2 da db over the Farey triangle:
    /// sum of value * 2 * area(rect intersect Omega), each area in closed form.
    Rational integral_dm() const {
        Rational total(0);
        for (const auto& r : pieces_)
            total += r.value * Rational(2) * triangle_clipped_area(r);
        return total;
    }

    /// Parse "x0,x1,y0,y1,value;..." with rational entries like "1/2" or "3".
    static StepFunction parse(const std::string& spec) {
        std::vector<RectPiece> pieces;
        std::stringstream rects(spec);
        std::string rect;
        while (std::getline(rects, rect, ';')) {
            if (rect.empty()) continue;
            std::stringstream fields(rect);
            std::string field;
            std::vector<Rational> vals;
            while (std::getline(fields, field, ',')) vals.push_back(parse_rational(field));
            if (vals.size() != 5)
                throw std::domain_error("rectangle spec needs x0,x1,y0,y1,value: " + rect);
            pieces.push_back(RectPiece{vals[0], vals[1], vals[2], vals[3], vals[4]});
        }
        return StepFunction(std::move(pieces));
    }

    static Rational parse_rational(const std::string& s) {
        const auto slash = s.find('/');
        try {
            if (slash == std::string::npos) return Rational(BigInt(s), BigInt(1));
            return Rational(BigInt(s.substr(0, slash)), BigInt(s.substr(slash + 1)));
        } catch (const std::exception&) {
            throw std::domain_error("cannot parse rational: " + s);
        }
    }

private:
    /// Area of rect intersect {a + b > 1} within the unit square, exact.
    static Rational triangle_clipped_area(const RectPiece& r) {
        const Rational full = (r.x1 - r.x0) * (r.y1 - r.y0);
        return full - area_below_diagonal(r);
    }

    /// Area of {(x,y) in rect : x + y <= 1}. The slice length
    /// max(0, min(y1, 1-x) - y0) is piecewise linear in x with breakpoints at
    /// 1 - y1 and 1 - y0, so each piece integrates as a trapezoid.
    static Rational area_below_diagonal(const RectPiece& r) {
        std::vector<Rational> cuts{r.x0, r.x1};
        for (const Rational& c : {Rational(1) - r.y1, Rational(1) - r.y0})
            if (r.x0 < c && c < r.x1) cuts.push_back(c);
        std::sort(cuts.begin(), cuts.end());

        auto slice = [&](const Rational& x) {
            Rational top = Rational(1) - x;
            if (top > r.y1) top = r.y1;
            Rational len = top - r.y0;
            if (len < Rational(0)) len = Rational(0);
            return len;
        };

        Rational area(0);
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            const Rational lo = cuts[i], hi = cuts[i + 1];
            area += (slice(lo) + slice(hi)) / Rational(2) * (hi - lo);
        }
        return area;
    }

    std::vector<RectPiece> pieces_;
};

}  // namespace bcz
