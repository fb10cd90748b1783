#pragma once

#include <memory>
#include <vector>

#include "symplembed/domains.hpp"
#include "symplembed/maps.hpp"

namespace symplembed {

// One piece of the serpentine band circuit. Every piece maps an abstract
// chart (sigma, t) in [0,1] x (-1/2, 1/2) onto a plane region with constant
// Jacobian determinant equal to its area, so the composed flat-torus chart is
// area-preserving exactly.
struct BandPiece {
    enum class Type { Straight, Corner, Channel };
    Type type = Type::Straight;

    Eigen::Vector2d P0{0, 0};  // centerline start
    double theta0 = 0;         // heading at start
    double area = 0;           // image area = det in the abstract chart

    // Straight / Channel
    double length = 0;          // longitudinal extent (straight)
    double w0 = 0, w1 = 0;      // width profile ends (w1 == w0 for straight)
    double lateralShift = 0;    // centerline drift (along left normal)
    // Corner
    double turn = 0;     // total turning angle (+ left, - right)
    double arcLen = 0;   // centerline arc length
    double width = 0;    // constant width through the corner

    // corner centerline prefix table (positions at uniform sigma nodes)
    std::vector<Eigen::Vector2d> prefix;
    Eigen::Vector2d endCached{0, 0};
    bool hasEndCached = false;

    Eigen::Vector2d endPos() const;
    double endTheta() const;

    Eigen::Vector2d eval(double sigma, double t) const;
    // columns: d/dsigma, d/dt
    Eigen::Matrix2d partials(double sigma, double t) const;

    double widthAt(double sigma) const;
    Eigen::Vector2d centerline(double sigma) const;
};

// Parameters and derived data of the immersion i_eps : Sigma(100 eps) -> R^2.
struct SerpentineImmersion {
    double eps = 0, a = 0;       // a = eps^2 (double-point box half-width)
    double A = 0;                // solved strip half-length
    double h = 0;                // pi / (A - a)
    double ell = 0;              // flat torus side sqrt(100 eps)
    double laneLevelTop = 0;     // T1 level
    double highLevel = 0;        // full-width return level H2
    double lowLevel = 0;         // west return depth (negative)
    double seamMargin = 0;       // excluded flat collar around the v-seam (flat units)

    std::vector<BandPiece> pieces;
    std::vector<double> cumArea;  // prefix sums of piece areas (size pieces+1)
    double totalArea = 0;         // = sum of piece areas = measured pullback area

    // lane piece indices (the two strip lanes)
    int laneUpIdx = -1, laneDownIdx = -1;

    // flat chart: u in [0, ell) selects the piece by cumulative area
    int pieceAt(double u, double& sigma) const;
    Vec evalFlat(const Vec& uv) const;    // (u, v) -> image point
    Mat jacobianFlat(const Vec& uv) const;

    // membership of the strip preimage S_eps (lane cores with image x in (-A, A))
    bool inStrip(const Vec& uv) const;

    // samples of the flat torus core (avoids puncture ball and seam collar)
    std::vector<Vec> sampleCore(int count, std::uint64_t seed) const;

    // envelope D_eps: rounded rectangle hull with area exactly 2 pi + c1 eps
    DomainPtr envelope() const;
    double envelopeArea() const;
    double rEps() const;  // sqrt(area(D_eps)/pi)

    // serpentine centerline polyline (for CSV export / figures)
    std::vector<Eigen::Vector2d> centerlinePolyline(int perPiece = 24) const;
};

// area of the serpentine circuit as a function of the strip half-length A
// (the measured p(A); the Moser equality p(A)=100 eps fixes A).
double serpentineArea(double eps, double A);

struct SerpentineRoots {
    double Asmall = 0, Alarge = 0;
    bool smallFeasible = false, largeFeasible = false;
};

// both roots of the measured area equation p(A) = 100 eps; roots >= 1/8
SerpentineRoots solveSerpentineA(double eps);

// Build the immersion at the given eps (default branch: the large root; the
// small root is geometrically infeasible at desk-scale eps, see README).
SerpentineImmersion buildSerpentine(double eps);

// i_eps as a SmoothMap (source: flat torus coordinates)
MapPtr serpentineMap(std::shared_ptr<const SerpentineImmersion> s);

// envelope pad constant: area(D_eps) = 2 pi + kEnvelopeSlope * eps exactly
inline constexpr double kEnvelopeSlope = 470.0;

}  // namespace symplembed
