// contour.hpp: argument-principle zero counting on axis-aligned rectangles

#pragma once

#include <functional>

#include "slabrad/common.hpp"

namespace slabrad {

struct SearchBox {
    double re_min = 0.0;
    double re_max = 0.0;
    double im_min = 0.0;
    double im_max = 0.0;

    double width() const { return re_max - re_min; }
    double height() const { return im_max - im_min; }
    double diameter() const;
    cplx center() const { return {0.5 * (re_min + re_max), 0.5 * (im_min + im_max)}; }
    bool contains(cplx z) const;
    /// Image under omega -> -conj(omega).
    SearchBox mirrored() const { return {-re_max, -re_min, im_min, im_max}; }
};

using Holomorphic = std::function<cplx(cplx)>;

struct ContourOptions {
    int initial_segments = 16;     // per edge
    double max_phase_step = 0.5;   // radians between accepted samples
    int max_depth = 64;            // bisection depth per initial segment
    double integer_tolerance = 0.05;
};

struct WindingResult {
    int count = 0;
    double raw = 0.0;  // accumulated phase / 2 pi
    long evaluations = 0;
};

/// Winding number of f around the box boundary. Throws CertificationFailure if the
/// boundary passes through (or numerically onto) a zero or the phase is not resolved.
WindingResult winding_number(const Holomorphic& f, const SearchBox& box, const ContourOptions& opts = {});

/// Zero count certified by two independent boundary refinements that must agree.
int count_zeros(const Holomorphic& f, const SearchBox& box, const ContourOptions& opts = {});

}  // namespace slabrad
