#pragma once

#include <cmath>

namespace symplembed {

// Septic smoothstep: s(0)=0, s(1)=1 with three vanishing derivatives at both
// ends (C^3 when clamped). Closed-form derivatives up to order 3.
struct SmoothStep {
    static double value(double t) {
        if (t <= 0.0) return 0.0;
        if (t >= 1.0) return 1.0;
        double t4 = t * t * t * t;
        return t4 * (35.0 + t * (-84.0 + t * (70.0 - 20.0 * t)));
    }
    static double d1(double t) {
        if (t <= 0.0 || t >= 1.0) return 0.0;
        double t3 = t * t * t;
        return t3 * (140.0 + t * (-420.0 + t * (420.0 - 140.0 * t)));
    }
    static double d2(double t) {
        if (t <= 0.0 || t >= 1.0) return 0.0;
        double t2 = t * t;
        return t2 * (420.0 + t * (-1680.0 + t * (2100.0 - 840.0 * t)));
    }
    static double d3(double t) {
        if (t <= 0.0 || t >= 1.0) return 0.0;
        return t * (840.0 + t * (-5040.0 + t * (8400.0 - 4200.0 * t)));
    }
};

// antiderivative of the septic smoothstep: int_0^t S
inline double smoothStepIntegral(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return t - 0.5;
    double t2 = t * t, t4 = t2 * t2;
    return t4 * t * (7.0 + t * (-14.0 + t * (10.0 - 2.5 * t)));
}

// integral of the C^3 bump over [0, s], s in [0,1]; bumpIntegral(1) = 1/2
inline double bumpIntegral(double s) {
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 0.5;
    if (s <= 0.5) return 0.5 * smoothStepIntegral(2.0 * s);
    return 0.25 + (0.25 - 0.5 * smoothStepIntegral(2.0 - 2.0 * s));
}

// Smooth transition from 0 at t<=a to 1 at t>=b.
struct Ramp {
    double a = 0.0, b = 1.0;
    Ramp() = default;
    Ramp(double a_, double b_) : a(a_), b(b_) {}
    double u(double t) const { return (t - a) / (b - a); }
    double value(double t) const { return SmoothStep::value(u(t)); }
    double d1(double t) const { return SmoothStep::d1(u(t)) / (b - a); }
    double d2(double t) const { return SmoothStep::d2(u(t)) / ((b - a) * (b - a)); }
};

// C^3 bump on [0,1]: 0 at both ends, 1 at the midpoint.
struct Bump {
    static double value(double t) {
        if (t <= 0.0 || t >= 1.0) return 0.0;
        return t <= 0.5 ? SmoothStep::value(2.0 * t) : SmoothStep::value(2.0 - 2.0 * t);
    }
    static double d1(double t) {
        if (t <= 0.0 || t >= 1.0) return 0.0;
        return t <= 0.5 ? 2.0 * SmoothStep::d1(2.0 * t) : -2.0 * SmoothStep::d1(2.0 - 2.0 * t);
    }
    // integral of value over [0,1] (the septic smoothstep is symmetric:
    // int_0^1 s = 1/2, so the bump integrates to 1/2).
    static constexpr double integral() { return 0.5; }
};

}  // namespace symplembed
