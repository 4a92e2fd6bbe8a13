#include "slabrad/contour.hpp"

#include <cmath>

#include <fmt/format.h>

namespace slabrad {

double SearchBox::diameter() const { return std::hypot(width(), height()); }

bool SearchBox::contains(cplx z) const {
    return z.real() > re_min && z.real() < re_max && z.imag() > im_min && z.imag() < im_max;
}

namespace {

struct Walker {
    const Holomorphic& f;
    const ContourOptions& opts;
    double length_floor;
    long evaluations = 0;

    cplx eval(cplx z) {
        ++evaluations;
        const cplx v = f(z);
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw CertificationFailure(fmt::format("non-finite function value at ({}, {})", z.real(), z.imag()));
        if (v == cplx{0.0, 0.0})
            throw CertificationFailure(fmt::format("zero on contour at ({}, {})", z.real(), z.imag()));
        return v;
    }

    static double arg_ratio(cplx to, cplx from) { return std::arg(to / from); }

    double segment(cplx a, cplx b, cplx fa, cplx fb, int depth) {
        const double whole = arg_ratio(fb, fa);
        const cplx m = 0.5 * (a + b);
        const cplx fm = eval(m);
        const double left = arg_ratio(fm, fa);
        const double right = arg_ratio(fb, fm);
        const bool small = std::abs(left) < opts.max_phase_step && std::abs(right) < opts.max_phase_step;
        if (small && std::abs(whole) < opts.max_phase_step && std::abs(left + right - whole) < 1e-9)
            return left + right;
        if (depth >= opts.max_depth || std::abs(b - a) < length_floor)
            throw CertificationFailure(
                fmt::format("phase unresolved near ({:.17g}, {:.17g}); a zero lies on or next to the contour",
                            m.real(), m.imag()));
        return segment(a, m, fa, fm, depth + 1) + segment(m, b, fm, fb, depth + 1);
    }
};

}  // namespace

WindingResult winding_number(const Holomorphic& f, const SearchBox& box, const ContourOptions& opts) {
    if (!(box.width() > 0.0) || !(box.height() > 0.0)) throw InvalidParameter("search box must have positive extent");
    const double scale = std::max({std::abs(box.re_min), std::abs(box.re_max), std::abs(box.im_min),
                                   std::abs(box.im_max), box.diameter()});
    Walker w{f, opts, 4e-16 * scale};
    const cplx corners[4] = {{box.re_min, box.im_min},
                             {box.re_max, box.im_min},
                             {box.re_max, box.im_max},
                             {box.re_min, box.im_max}};
    double total = 0.0;
    cplx prev = corners[0];
    cplx fprev = w.eval(prev);
    const cplx f0 = fprev;
    for (int e = 0; e < 4; ++e) {
        const cplx from = corners[e];
        const cplx to = corners[(e + 1) % 4];
        for (int s = 1; s <= opts.initial_segments; ++s) {
            const cplx next = from + (to - from) * (static_cast<double>(s) / opts.initial_segments);
            const cplx fnext = (e == 3 && s == opts.initial_segments) ? f0 : w.eval(next);
            total += w.segment(prev, next, fprev, fnext, 0);
            prev = next;
            fprev = fnext;
        }
    }
    WindingResult r;
    r.raw = total / (2.0 * kPi);
    r.count = static_cast<int>(std::lround(r.raw));
    r.evaluations = w.evaluations;
    if (std::abs(r.raw - r.count) > opts.integer_tolerance)
        throw CertificationFailure(fmt::format("winding number {} is not close to an integer", r.raw));
    return r;
}

int count_zeros(const Holomorphic& f, const SearchBox& box, const ContourOptions& opts) {
    ContourOptions fine = opts;
    fine.initial_segments = opts.initial_segments * 2 + 3;
    fine.max_phase_step = opts.max_phase_step * 0.5;
    const WindingResult coarse = winding_number(f, box, opts);
    const WindingResult refined = winding_number(f, box, fine);
    if (coarse.count != refined.count)
        throw CertificationFailure(
            fmt::format("winding count unstable under refinement ({} vs {})", coarse.count, refined.count));
    return coarse.count;
}

}  // namespace slabrad
