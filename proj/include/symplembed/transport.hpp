#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "symplembed/domains.hpp"
#include "symplembed/maps.hpp"

namespace symplembed {

// Vertically convex planar domain seen through its slice data.
struct SliceProfile {
    double xlo = 0, xhi = 0;
    std::vector<double> breaks;  // includes endpoints; quadrature respects them
    std::function<std::pair<double, double>(double)> bounds;    // (ylo, yhi)
    std::function<std::pair<double, double>(double)> boundsD1;  // derivatives in x
    bool closedFormCdf = false;
    std::function<double(double)> cdf;  // integral of slice length from xlo
    double area = 0;
};

// Throws if the domain kind is not slice-convex.
SliceProfile sliceProfileFor(const Domain& d, int quadCellsPerBreak = 48);

// Monotone (Knothe) rearrangement between two slice-convex domains of equal
// area: T(x, y) = (T1(x), T2(x, y)) with det J = 1 analytically in x where the
// slice-length functions are smooth.
class TransportMap final : public SmoothMap {
public:
    TransportMap(DomainPtr src, DomainPtr dst, int quadCells = 48);

    int dimIn() const override { return 2; }
    int dimOut() const override { return 2; }
    Vec eval(const Vec& p) const override;
    Mat jacobian(const Vec& p) const override;
    bool analyticJacobian() const override { return true; }

    double forwardX(double x) const;  // T1
    const std::string& method() const { return method_; }
    void setMethod(std::string m) { method_ = std::move(m); }

    // sup |det J - 1| over an interior-core probe grid (core = central
    // coreFraction of the slice data in both axes).
    double detResidual(int grid = 120, double coreFraction = 0.9) const;

private:
    SliceProfile src_, dst_;
    double rho_;  // area ratio dst/src
    std::string method_ = "knothe";
};

using TransportPtr = std::shared_ptr<const TransportMap>;

// Knothe rearrangement (monotone in x then per-slice linear).
// pre: areas equal within 1e-8 relative.
TransportPtr knotheMap(DomainPtr src, DomainPtr dst);

struct CorrectionReport {
    TransportPtr map;
    double initialResidual = 0;
    double finalResidual = 0;
    double maxDisplacement = 0;
    bool reachedTol = true;
};

// Reduce sup|det J - 1| below tolDet on the interior core by refining the
// slice-CDF quadrature (the discrete Moser step for uniform densities);
// returns best effort with a flag when the budget is exhausted.
CorrectionReport moserFlowCorrect(TransportPtr t, double tolDet, int budgetRefinements = 3);

// f : R(sqrt(pi), 2 sqrt(pi)) -> B^2(sqrt(2))   (areas 2 pi)
TransportPtr rectToDisk();
// g : B^2(1) -> Q(sqrt(pi))                     (areas pi)
TransportPtr diskToSquare();

// Per-parameter transport family with area checks at each delta.
class TransportFamily {
public:
    using DomainFn = std::function<DomainPtr(double)>;
    TransportFamily(DomainFn src, DomainFn dst, double lo, double hi);
    TransportPtr at(double delta) const;
    double paramLo() const { return lo_; }
    double paramHi() const { return hi_; }
    // grid-continuity of finite-difference delta-derivatives
    double gridContinuityDefect(const std::vector<double>& grid, const std::vector<Vec>& pts,
                                double h) const;

private:
    DomainFn srcFn_, dstFn_;
    double lo_, hi_;
    mutable std::vector<std::pair<double, TransportPtr>> cache_;
};

}  // namespace symplembed
