#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "symplembed/domains.hpp"
#include "symplembed/geometry.hpp"

namespace symplembed {

// Evaluatable smooth map with a Jacobian (analytic where available, central
// finite differences with step h = 1e-5 (1+|x_i|) otherwise).
class SmoothMap {
public:
    virtual ~SmoothMap() = default;
    virtual int dimIn() const = 0;
    virtual int dimOut() const = 0;
    virtual Vec eval(const Vec& x) const = 0;
    virtual Mat jacobian(const Vec& x) const { return fdJacobian(x); }
    virtual bool analyticJacobian() const { return false; }
    virtual std::string tag() const { return tag_; }
    void setTag(std::string t) { tag_ = std::move(t); }

    DomainPtr source, target;  // declared domains (may be null)

    Mat fdJacobian(const Vec& x) const;

private:
    std::string tag_ = "map";
};

using MapPtr = std::shared_ptr<const SmoothMap>;

class IdentityMap final : public SmoothMap {
public:
    explicit IdentityMap(int d) : d_(d) { setTag("Id"); }
    int dimIn() const override { return d_; }
    int dimOut() const override { return d_; }
    Vec eval(const Vec& x) const override { return x; }
    Mat jacobian(const Vec&) const override { return Mat::Identity(d_, d_); }
    bool analyticJacobian() const override { return true; }

private:
    int d_;
};

class AffineMap final : public SmoothMap {
public:
    AffineMap(Mat A, Vec b) : A_(std::move(A)), b_(std::move(b)) { setTag("affine"); }
    explicit AffineMap(Mat A) : A_(std::move(A)), b_(Vec::Zero(A_.rows())) { setTag("linear"); }
    int dimIn() const override { return static_cast<int>(A_.cols()); }
    int dimOut() const override { return static_cast<int>(A_.rows()); }
    Vec eval(const Vec& x) const override { return A_ * x + b_; }
    Mat jacobian(const Vec&) const override { return A_; }
    bool analyticJacobian() const override { return true; }
    const Mat& matrix() const { return A_; }

private:
    Mat A_;
    Vec b_;
};

// Lambda-backed map with optional analytic Jacobian.
class FuncMap final : public SmoothMap {
public:
    using EvalFn = std::function<Vec(const Vec&)>;
    using JacFn = std::function<Mat(const Vec&)>;
    FuncMap(int din, int dout, EvalFn f, JacFn j = nullptr, std::string tag = "func")
        : din_(din), dout_(dout), f_(std::move(f)), j_(std::move(j)) {
        setTag(std::move(tag));
    }
    int dimIn() const override { return din_; }
    int dimOut() const override { return dout_; }
    Vec eval(const Vec& x) const override { return f_(x); }
    Mat jacobian(const Vec& x) const override { return j_ ? j_(x) : fdJacobian(x); }
    bool analyticJacobian() const override { return static_cast<bool>(j_); }

private:
    int din_, dout_;
    EvalFn f_;
    JacFn j_;
};

MapPtr compose(MapPtr outer, MapPtr inner);              // outer after inner
MapPtr composeChain(std::vector<MapPtr> chain);          // chain.front() applied last
MapPtr product(MapPtr f, MapPtr g);                      // block map on the product
// x |-> lambda f(x / lambda); preserves the symplecticity residual.
MapPtr conjugateDilation(MapPtr f, double lambda);
// Reduce the leading planar factor of the image mod latticeScale * Z^2.
MapPtr torusQuotient(MapPtr f, double latticeScale);
// Coordinate permutation y_i = x_{perm[i]}.
MapPtr permutation(const std::vector<int>& perm);

struct NewtonOptions {
    int maxIter = 60;
    double tol = 1e-11;
};

// Local inverse via damped Newton from seedPoint; throws on non-convergence.
Vec invertLocal(const SmoothMap& f, const Vec& y, const Vec& seedPoint,
                const NewtonOptions& opt = {});
bool tryInvertLocal(const SmoothMap& f, const Vec& y, const Vec& seedPoint, Vec& out,
                    const NewtonOptions& opt = {});

// One-parameter family of maps over an interval, built lazily and cached on a
// value grid. Carries the reference domain B per Definition "smooth family".
class EmbeddingFamily {
public:
    using Builder = std::function<MapPtr(double)>;
    using DomainFn = std::function<DomainPtr(double)>;

    EmbeddingFamily(double paramLo, double paramHi, Builder build, DomainFn domainAt)
        : lo_(paramLo),
          hi_(paramHi),
          build_(std::move(build)),
          domainAt_(std::move(domainAt)),
          cache_(std::make_shared<CacheBox>()) {}

    double paramLo() const { return lo_; }
    double paramHi() const { return hi_; }
    MapPtr at(double t) const;
    DomainPtr domainAt(double t) const { return domainAt_(t); }

    // central finite-difference parameter derivative of t |-> phi_t(x)
    Vec paramDerivative(double t, const Vec& x, double h) const;

    // max jump of successive finite differences of the parameter derivative
    // over a refining grid (numerical smoothness evidence).
    double gridContinuityDefect(const std::vector<double>& grid, const std::vector<Vec>& pts,
                                double h) const;

private:
    struct CacheBox {
        std::mutex mx;
        std::vector<std::pair<double, MapPtr>> entries;
    };
    double lo_, hi_;
    Builder build_;
    DomainFn domainAt_;
    std::shared_ptr<CacheBox> cache_;  // shared across copies; thread-safe
};

// Residual helpers.
double symplecticResidual(const SmoothMap& m, const Vec& x);

// Attach metadata to a freshly built map (combinator outputs are unshared).
inline MapPtr annotate(MapPtr m, std::string tag, DomainPtr src = nullptr, DomainPtr tgt = nullptr) {
    auto mm = std::const_pointer_cast<SmoothMap>(m);
    mm->setTag(std::move(tag));
    if (src) mm->source = std::move(src);
    if (tgt) mm->target = std::move(tgt);
    return mm;
}

}  // namespace symplembed
