#include "symplembed/maps.hpp"

#include <algorithm>
#include <cmath>

namespace symplembed {

Mat SmoothMap::fdJacobian(const Vec& x) const {
    const int n = dimIn(), m = dimOut();
    Mat J(m, n);
    for (int j = 0; j < n; ++j) {
        double h = 1e-5 * (1.0 + std::abs(x[j]));
        Vec xp = x, xm = x;
        xp[j] += h;
        xm[j] -= h;
        J.col(j) = (eval(xp) - eval(xm)) / (2.0 * h);
    }
    return J;
}

namespace {

class ComposeMap final : public SmoothMap {
public:
    ComposeMap(MapPtr outer, MapPtr inner) : f_(std::move(outer)), g_(std::move(inner)) {
        if (g_->dimOut() != f_->dimIn())
            throw std::invalid_argument("compose: domain mismatch (" + g_->tag() + " -> " + f_->tag() + ")");
        setTag(f_->tag() + "∘" + g_->tag());
        source = g_->source;
        target = f_->target;
    }
    int dimIn() const override { return g_->dimIn(); }
    int dimOut() const override { return f_->dimOut(); }
    Vec eval(const Vec& x) const override { return f_->eval(g_->eval(x)); }
    Mat jacobian(const Vec& x) const override {
        Vec mid = g_->eval(x);
        return f_->jacobian(mid) * g_->jacobian(x);
    }
    bool analyticJacobian() const override {
        return f_->analyticJacobian() && g_->analyticJacobian();
    }

private:
    MapPtr f_, g_;
};

class ProductMap final : public SmoothMap {
public:
    ProductMap(MapPtr f, MapPtr g) : f_(std::move(f)), g_(std::move(g)) {
        setTag(f_->tag() + "⊗" + g_->tag());
    }
    int dimIn() const override { return f_->dimIn() + g_->dimIn(); }
    int dimOut() const override { return f_->dimOut() + g_->dimOut(); }
    Vec eval(const Vec& x) const override {
        Vec out(dimOut());
        out.head(f_->dimOut()) = f_->eval(x.head(f_->dimIn()));
        out.tail(g_->dimOut()) = g_->eval(x.tail(g_->dimIn()));
        return out;
    }
    Mat jacobian(const Vec& x) const override {
        Mat J = Mat::Zero(dimOut(), dimIn());
        J.topLeftCorner(f_->dimOut(), f_->dimIn()) = f_->jacobian(x.head(f_->dimIn()));
        J.bottomRightCorner(g_->dimOut(), g_->dimIn()) = g_->jacobian(x.tail(g_->dimIn()));
        return J;
    }
    bool analyticJacobian() const override {
        return f_->analyticJacobian() && g_->analyticJacobian();
    }

private:
    MapPtr f_, g_;
};

class DilationConjugate final : public SmoothMap {
public:
    DilationConjugate(MapPtr f, double lambda) : f_(std::move(f)), l_(lambda) {
        if (lambda <= 0) throw std::invalid_argument("conjugate_dilation: lambda must be positive");
        setTag("τ_" + std::to_string(lambda) + "[" + f_->tag() + "]");
    }
    int dimIn() const override { return f_->dimIn(); }
    int dimOut() const override { return f_->dimOut(); }
    Vec eval(const Vec& x) const override { return l_ * f_->eval(x / l_); }
    Mat jacobian(const Vec& x) const override { return f_->jacobian(x / l_); }
    bool analyticJacobian() const override { return f_->analyticJacobian(); }

private:
    MapPtr f_;
    double l_;
};

class TorusQuotientMap final : public SmoothMap {
public:
    TorusQuotientMap(MapPtr f, double s) : f_(std::move(f)), s_(s) {
        if (f_->dimOut() < 2) throw std::invalid_argument("torus_quotient: needs planar leading factor");
        setTag("Q∘" + f_->tag());
    }
    int dimIn() const override { return f_->dimIn(); }
    int dimOut() const override { return f_->dimOut(); }
    Vec eval(const Vec& x) const override {
        Vec y = f_->eval(x);
        normalizeTorusRep(y, s_);
        return y;
    }
    // the quotient is a local isometry: jacobian unchanged
    Mat jacobian(const Vec& x) const override { return f_->jacobian(x); }
    bool analyticJacobian() const override { return f_->analyticJacobian(); }

private:
    MapPtr f_;
    double s_;
};

class PermutationMap final : public SmoothMap {
public:
    explicit PermutationMap(std::vector<int> perm) : p_(std::move(perm)) { setTag("perm"); }
    int dimIn() const override { return static_cast<int>(p_.size()); }
    int dimOut() const override { return static_cast<int>(p_.size()); }
    Vec eval(const Vec& x) const override {
        Vec y(x.size());
        for (size_t i = 0; i < p_.size(); ++i) y[i] = x[p_[i]];
        return y;
    }
    Mat jacobian(const Vec&) const override {
        Mat J = Mat::Zero(dimOut(), dimIn());
        for (size_t i = 0; i < p_.size(); ++i) J(static_cast<int>(i), p_[i]) = 1.0;
        return J;
    }
    bool analyticJacobian() const override { return true; }

private:
    std::vector<int> p_;
};

}  // namespace

MapPtr compose(MapPtr outer, MapPtr inner) {
    return std::make_shared<ComposeMap>(std::move(outer), std::move(inner));
}

MapPtr composeChain(std::vector<MapPtr> chain) {
    if (chain.empty()) throw std::invalid_argument("composeChain: empty chain");
    MapPtr m = chain.back();
    for (auto it = chain.rbegin() + 1; it != chain.rend(); ++it) m = compose(*it, m);
    return m;
}

MapPtr product(MapPtr f, MapPtr g) { return std::make_shared<ProductMap>(std::move(f), std::move(g)); }

MapPtr conjugateDilation(MapPtr f, double lambda) {
    return std::make_shared<DilationConjugate>(std::move(f), lambda);
}

MapPtr torusQuotient(MapPtr f, double latticeScale) {
    return std::make_shared<TorusQuotientMap>(std::move(f), latticeScale);
}

MapPtr permutation(const std::vector<int>& perm) { return std::make_shared<PermutationMap>(perm); }

bool tryInvertLocal(const SmoothMap& f, const Vec& y, const Vec& seedPoint, Vec& out,
                    const NewtonOptions& opt) {
    Vec x = seedPoint;
    double bestRes = std::numeric_limits<double>::infinity();
    for (int it = 0; it < opt.maxIter; ++it) {
        Vec r = f.eval(x) - y;
        double res = r.norm();
        if (res < opt.tol) {
            out = x;
            return true;
        }
        Mat J = f.jacobian(x);
        Vec step = J.colPivHouseholderQr().solve(r);
        // damped line search on the residual norm
        double alpha = 1.0;
        for (int ls = 0; ls < 30; ++ls) {
            Vec xt = x - alpha * step;
            if ((f.eval(xt) - y).norm() < res) {
                x = xt;
                break;
            }
            alpha *= 0.5;
            if (ls == 29) return false;  // stuck
        }
        bestRes = std::min(bestRes, res);
    }
    if ((f.eval(x) - y).norm() < opt.tol) {
        out = x;
        return true;
    }
    return false;
}

Vec invertLocal(const SmoothMap& f, const Vec& y, const Vec& seedPoint, const NewtonOptions& opt) {
    Vec out;
    if (!tryInvertLocal(f, y, seedPoint, out, opt))
        throw std::runtime_error("invert_local: Newton failed to converge (map " + f.tag() + ")");
    return out;
}

MapPtr EmbeddingFamily::at(double t) const {
    {
        std::lock_guard<std::mutex> lk(cache_->mx);
        for (auto& [v, m] : cache_->entries)
            if (v == t) return m;
    }
    MapPtr m = build_(t);  // built outside the lock (may be expensive)
    std::lock_guard<std::mutex> lk(cache_->mx);
    for (auto& [v, mm] : cache_->entries)
        if (v == t) return mm;
    cache_->entries.emplace_back(t, m);
    if (cache_->entries.size() > 512) cache_->entries.erase(cache_->entries.begin());
    return m;
}

Vec EmbeddingFamily::paramDerivative(double t, const Vec& x, double h) const {
    double tm = std::max(lo_ + 1e-12, t - h), tp = std::min(hi_ - 1e-12, t + h);
    Vec fp = at(tp)->eval(x), fm = at(tm)->eval(x);
    return (fp - fm) / (tp - tm);
}

double EmbeddingFamily::gridContinuityDefect(const std::vector<double>& grid,
                                             const std::vector<Vec>& pts, double h) const {
    double worst = 0.0;
    for (auto& x : pts) {
        Vec prev;
        for (size_t i = 0; i < grid.size(); ++i) {
            Vec d = paramDerivative(grid[i], x, h);
            if (i > 0) worst = std::max(worst, (d - prev).lpNorm<Eigen::Infinity>());
            prev = d;
        }
    }
    return worst;
}

double symplecticResidual(const SmoothMap& m, const Vec& x) {
    Mat J = m.jacobian(x);
    Mat OmIn = omegaMatrix(m.dimIn());
    Mat OmOut = omegaMatrix(m.dimOut());
    return (J.transpose() * OmOut * J - OmIn).cwiseAbs().maxCoeff();
}

}  // namespace symplembed
