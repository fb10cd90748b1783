#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "symplembed/geometry.hpp"
#include "symplembed/rng.hpp"

namespace symplembed {

struct Sampler {
    enum class Strategy { Uniform, Grid, BoundaryBiased };
    std::uint64_t seed = 0;
    Strategy strategy = Strategy::Uniform;
    double boundaryFraction = 0.5;  // only for BoundaryBiased
};

struct MeasureResult {
    double value = 0.0;
    double err = 0.0;
};

class Domain;
using DomainPtr = std::shared_ptr<const Domain>;

// Region descriptor with membership, measure and deterministic sampling.
// All kinds are open sets.
class Domain {
public:
    virtual ~Domain() = default;

    virtual int dim() const = 0;
    virtual std::string kind() const = 0;

    bool contains(const Vec& p) const {
        if (p.size() != dim()) throw std::invalid_argument("Domain::contains: dimension mismatch");
        return containsImpl(p);
    }

    // Signed margin to the boundary (positive inside). Used by containment
    // certificates; need not be the exact Euclidean distance, but must be
    // continuous, positive exactly on the domain.
    virtual double boundaryMargin(const Vec& p) const = 0;

    virtual MeasureResult measure() const = 0;

    // Axis-aligned bounding box (lo, hi); used by rejection sampling and
    // Monte-Carlo measure.
    virtual std::pair<Vec, Vec> boundingBox() const = 0;

    std::vector<Vec> sample(int count, const Sampler& s) const;

    virtual nlohmann::json toJson() const = 0;
    static DomainPtr fromJson(const nlohmann::json& j);

protected:
    virtual bool containsImpl(const Vec& p) const = 0;
    // Hook for kinds that post-process samples (torus normalization).
    virtual Vec normalizeSample(Vec p) const { return p; }
};

// Monte-Carlo measure with standard-error estimate (rejection from the box).
MeasureResult measureMonteCarlo(const Domain& d, long samples, std::uint64_t seed);

// ---------------------------------------------------------------------------

class Ball final : public Domain {
public:
    Ball(int dim, double radius);
    int dim() const override { return dim_; }
    std::string kind() const override { return "ball"; }
    double radius() const { return radius_; }
    double boundaryMargin(const Vec& p) const override { return radius_ - p.norm(); }
    MeasureResult measure() const override;
    std::pair<Vec, Vec> boundingBox() const override;
    nlohmann::json toJson() const override;

protected:
    bool containsImpl(const Vec& p) const override { return p.norm() < radius_; }

private:
    int dim_;
    double radius_;
};

// Open rectangle (0, w1) x (0, w2).
class Rectangle2D : public Domain {
public:
    Rectangle2D(double w1, double w2);
    int dim() const override { return 2; }
    std::string kind() const override { return "rectangle2d"; }
    double w1() const { return w1_; }
    double w2() const { return w2_; }
    double boundaryMargin(const Vec& p) const override;
    MeasureResult measure() const override { return {w1_ * w2_, 0.0}; }
    std::pair<Vec, Vec> boundingBox() const override;
    nlohmann::json toJson() const override;

protected:
    bool containsImpl(const Vec& p) const override {
        return p[0] > 0 && p[0] < w1_ && p[1] > 0 && p[1] < w2_;
    }

private:
    double w1_, w2_;
};

class Square2D final : public Rectangle2D {
public:
    explicit Square2D(double side) : Rectangle2D(side, side) {}
    std::string kind() const override { return "square2d"; }
    nlohmann::json toJson() const override;
};

// { x : (x-c)^T Q (x-c) < 1 } with Q symmetric positive definite.
class Ellipsoid final : public Domain {
public:
    Ellipsoid(Vec center, Mat Q);
    // Axis-aligned symplectic ellipsoid sum_i (x_i^2+y_i^2)/a_i^2 < 1.
    static std::shared_ptr<Ellipsoid> symplectic(const std::vector<double>& semiAxes);
    int dim() const override { return static_cast<int>(center_.size()); }
    std::string kind() const override { return "ellipsoid"; }
    const Vec& center() const { return center_; }
    const Mat& form() const { return Q_; }
    double boundaryMargin(const Vec& p) const override;
    MeasureResult measure() const override;
    std::pair<Vec, Vec> boundingBox() const override;
    nlohmann::json toJson() const override;

protected:
    bool containsImpl(const Vec& p) const override {
        Vec d = p - center_;
        return d.dot(Q_ * d) < 1.0;
    }

private:
    Vec center_;
    Mat Q_;
};

class ProductDomain final : public Domain {
public:
    explicit ProductDomain(std::vector<DomainPtr> factors);
    int dim() const override { return dim_; }
    std::string kind() const override { return "product"; }
    const std::vector<DomainPtr>& factors() const { return factors_; }
    double boundaryMargin(const Vec& p) const override;
    MeasureResult measure() const override;
    std::pair<Vec, Vec> boundingBox() const override;
    nlohmann::json toJson() const override;

protected:
    bool containsImpl(const Vec& p) const override;
    Vec normalizeSample(Vec p) const override;

private:
    std::vector<DomainPtr> factors_;
    int dim_;
};

// Ball^{2k}(R) x R^{2m}. Unbounded; sampling and measure use the declared
// truncation radius on the free factor (an exhausting compactum).
class Cylinder final : public Domain {
public:
    Cylinder(int ballDim, double radius, int freeDim, double truncationRadius);
    int dim() const override { return ballDim_ + freeDim_; }
    std::string kind() const override { return "cylinder"; }
    double radius() const { return radius_; }
    double truncation() const { return trunc_; }
    int ballDim() const { return ballDim_; }
    double boundaryMargin(const Vec& p) const override {
        return radius_ - p.head(ballDim_).norm();
    }
    MeasureResult measure() const override;  // truncated
    std::pair<Vec, Vec> boundingBox() const override;
    nlohmann::json toJson() const override;

protected:
    bool containsImpl(const Vec& p) const override {
        return p.head(ballDim_).norm() < radius_;
    }

private:
    int ballDim_, freeDim_;
    double radius_, trunc_;
};

// (R^2 \ sqrt(s) Z^2) / sqrt(s) Z^2, total area s. Membership and sampling use
// the core at quotient distance > deltaPunct from the lattice so downstream
// maps never evaluate at the singular point.
class PuncturedTorus final : public Domain {
public:
    explicit PuncturedTorus(double area, double deltaPunctRel = 1e-3);
    int dim() const override { return 2; }
    std::string kind() const override { return "punctured_torus"; }
    double area() const { return area_; }
    double latticeScale() const { return scale_; }
    double deltaPunct() const { return deltaPunct_; }
    // quotient distance to the lattice
    double latticeDistance(const Vec& p) const;
    double boundaryMargin(const Vec& p) const override {
        return latticeDistance(p) - deltaPunct_;
    }
    MeasureResult measure() const override { return {area_, 0.0}; }
    std::pair<Vec, Vec> boundingBox() const override;
    Vec normalizeRep(Vec p) const {
        normalizeTorusRep(p, scale_);
        return p;
    }
    nlohmann::json toJson() const override;

protected:
    bool containsImpl(const Vec& p) const override {
        return latticeDistance(p) > deltaPunct_;
    }
    Vec normalizeSample(Vec p) const override { return normalizeRep(std::move(p)); }

private:
    double area_, scale_, deltaPunct_;
};

// Convex polygon with corners rounded at radius r: the Minkowski dilation of
// the inner polygon by an r-disk. Membership, area and vertical slice bounds
// are closed form (err 0).
class Envelope2D final : public Domain {
public:
    // innerVertices: CCW convex polygon; rounding radius r >= 0.
    Envelope2D(std::vector<Eigen::Vector2d> innerVertices, double r);
    static std::shared_ptr<Envelope2D> roundedRect(double x0, double x1, double y0, double y1,
                                                   double r);
    int dim() const override { return 2; }
    std::string kind() const override { return "envelope2d"; }
    double boundaryMargin(const Vec& p) const override;
    MeasureResult measure() const override;
    std::pair<Vec, Vec> boundingBox() const override;

    // vertical slice [ylo, yhi] at abscissa x (empty -> nullopt)
    std::optional<std::pair<double, double>> sliceBounds(double x) const;
    // derivative of the slice bounds in x (piecewise analytic)
    std::optional<std::pair<double, double>> sliceBoundsD1(double x) const;
    std::pair<double, double> xRange() const;
    const std::vector<Eigen::Vector2d>& innerVertices() const { return verts_; }
    double radius() const { return r_; }
    nlohmann::json toJson() const override;

protected:
    bool containsImpl(const Vec& p) const override { return boundaryMargin(p) > 0.0; }

private:
    // signed distance to the inner polygon (negative inside)
    double innerSignedDistance(const Eigen::Vector2d& p) const;
    std::vector<Eigen::Vector2d> verts_;
    double r_;
};

// Convenience builders.
DomainPtr makeBall(int dim, double r);
DomainPtr makeProduct(std::vector<DomainPtr> factors);
DomainPtr makeRect(double w1, double w2);
DomainPtr makeSquare(double side);

}  // namespace symplembed
