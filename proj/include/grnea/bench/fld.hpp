#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace grnea::bench {

/// One simulated node: principal strain e1 >= minor strain e2.
struct StrainNode {
    double e1 = 0.0, e2 = 0.0;
};

struct StrainField {
    std::vector<StrainNode> nodes;
    double hardening_n = 0.2116;  // strain-hardening exponent
    double thickness_t = 0.8;     // sheet thickness, mm

    void validate() const {
        if (nodes.empty()) throw std::invalid_argument("strain field: no nodes");
        if (!(hardening_n > 0.0) || !(thickness_t > 0.0))
            throw std::invalid_argument("strain field: material constants must be positive");
        for (const auto& n : nodes)
            if (n.e1 < n.e2)
                throw std::invalid_argument("strain field: principal strain below minor strain");
    }
};

/// Plane-strain intercept of the forming-limit curve; thickness influence
/// saturates at 3 mm.
inline double fld0(double hardening_n, double thickness_t) {
    return hardening_n * (23.36 + 14.042 * std::min(thickness_t, 3.0)) / (0.2116 * 100.0);
}

/// Forming-limit curve: rising left branch for e2 <= 0, gently falling right
/// branch for e2 > 0; both meet at fld0 in the plane-strain state.
inline double forming_limit_curve(double e2, double fld0_value) {
    if (e2 <= 0.0) return fld0_value + e2 * (4.2 * e2 - 0.627);
    return fld0_value + e2 * (-0.86 * e2 - 0.785);
}

struct FldResult {
    double fld0_value = 0.0;
    std::vector<double> p;  // per-node breakage excess
    std::vector<double> q;  // per-node wrinkle excess
    double y_p = 0.0, y_q = 0.0;
    double red_pct = 0.0, green_pct = 0.0, wrinkle_pct = 0.0;
};

/// Node classes are disjoint: red iff p > 0; wrinkled iff q > 0 and p = 0;
/// green otherwise. y_p and y_q are the sums of squared excesses.
inline FldResult fld_evaluate(const StrainField& s) {
    s.validate();
    FldResult r;
    r.fld0_value = fld0(s.hardening_n, s.thickness_t);
    const std::size_t m = s.nodes.size();
    r.p.resize(m);
    r.q.resize(m);
    long red = 0, wrinkled = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const auto& n = s.nodes[i];
        r.p[i] = std::max(0.0, n.e1 - forming_limit_curve(n.e2, r.fld0_value));
        r.q[i] = n.e1 < -n.e2 ? -(n.e1 + n.e2) : 0.0;
        r.y_p += r.p[i] * r.p[i];
        r.y_q += r.q[i] * r.q[i];
        if (r.p[i] > 0.0)
            ++red;
        else if (r.q[i] > 0.0)
            ++wrinkled;
    }
    r.red_pct = 100.0 * red / static_cast<double>(m);
    r.wrinkle_pct = 100.0 * wrinkled / static_cast<double>(m);
    r.green_pct = 100.0 - r.red_pct - r.wrinkle_pct;
    return r;
}

/// The sheet-forming objective: green percentage, disqualified to 0 by any
/// red presence.
inline double constrained_objective(const FldResult& r) {
    return r.red_pct < 1e-8 ? r.green_pct : 0.0;
}

}  // namespace grnea::bench
