#include "symplembed/domains.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

namespace symplembed {

using nlohmann::json;

// ---------------------------------------------------------------- sampling

namespace {

Vec boxPoint(const Vec& lo, const Vec& hi, Rng& rng) {
    Vec p(lo.size());
    for (int i = 0; i < lo.size(); ++i) p[i] = rng.uniform(lo[i], hi[i]);
    return p;
}

}  // namespace

std::vector<Vec> Domain::sample(int count, const Sampler& s) const {
    if (count <= 0) throw std::invalid_argument("Domain::sample: count must be positive");
    auto [lo, hi] = boundingBox();
    Rng rng(hashCombine(s.seed, static_cast<std::uint64_t>(s.strategy) + 0x51ULL));
    std::vector<Vec> out;
    out.reserve(count);

    auto rejectionDraw = [&]() {
        for (int tries = 0; tries < 100000; ++tries) {
            Vec p = boxPoint(lo, hi, rng);
            if (containsImpl(p)) return normalizeSample(std::move(p));
        }
        throw std::runtime_error("Domain::sample: rejection sampling failed (domain too thin?)");
    };

    switch (s.strategy) {
        case Sampler::Strategy::Uniform: {
            for (int i = 0; i < count; ++i) out.push_back(rejectionDraw());
            break;
        }
        case Sampler::Strategy::Grid: {
            // jittered lattice over the box, rejected to the domain
            int d = dim();
            int perAxis = std::max(2, static_cast<int>(std::ceil(std::pow(double(count) * 2.0, 1.0 / d))));
            Vec step = (hi - lo) / perAxis;
            std::vector<int> idx(d, 0);
            while (static_cast<int>(out.size()) < count) {
                Vec p(d);
                for (int k = 0; k < d; ++k)
                    p[k] = lo[k] + (idx[k] + 0.03 + 0.94 * rng.nextDouble()) * step[k];
                if (containsImpl(p)) out.push_back(normalizeSample(std::move(p)));
                int k = 0;
                while (k < d && ++idx[k] == perAxis) idx[k++] = 0;
                if (k == d) {  // lattice exhausted; fall back to uniform fill
                    while (static_cast<int>(out.size()) < count) out.push_back(rejectionDraw());
                }
            }
            break;
        }
        case Sampler::Strategy::BoundaryBiased: {
            for (int i = 0; i < count; ++i) {
                bool nearBoundary = rng.nextDouble() < s.boundaryFraction;
                if (!nearBoundary) {
                    out.push_back(rejectionDraw());
                    continue;
                }
                // keep the draw with the smallest margin among a few candidates
                Vec best;
                double bestMargin = std::numeric_limits<double>::infinity();
                for (int c = 0; c < 8; ++c) {
                    Vec p = rejectionDraw();
                    double m = boundaryMargin(p);
                    if (m < bestMargin) {
                        bestMargin = m;
                        best = p;
                    }
                }
                out.push_back(std::move(best));
            }
            break;
        }
    }
    return out;
}

MeasureResult measureMonteCarlo(const Domain& d, long samples, std::uint64_t seed) {
    auto [lo, hi] = d.boundingBox();
    double boxVol = 1.0;
    for (int i = 0; i < lo.size(); ++i) boxVol *= (hi[i] - lo[i]);
    Rng rng(seed);
    long inside = 0;
    for (long i = 0; i < samples; ++i) {
        Vec p = boxPoint(lo, hi, rng);
        if (d.contains(p)) ++inside;
    }
    double frac = double(inside) / double(samples);
    double se = std::sqrt(std::max(frac * (1.0 - frac), 1e-16) / double(samples));
    return {boxVol * frac, boxVol * se};
}

// -------------------------------------------------------------------- Ball

Ball::Ball(int dim, double radius) : dim_(dim), radius_(radius) {
    if (dim <= 0 || dim % 2 != 0) throw std::invalid_argument("Ball: dimension must be even positive");
    if (radius <= 0) throw std::invalid_argument("Ball: radius must be positive");
}

MeasureResult Ball::measure() const {
    // vol B^{2k}(r) = pi^k r^{2k} / k!
    int k = dim_ / 2;
    double v = 1.0;
    for (int i = 1; i <= k; ++i) v *= M_PI * radius_ * radius_ / i;
    return {v, 0.0};
}

std::pair<Vec, Vec> Ball::boundingBox() const {
    Vec lo = Vec::Constant(dim_, -radius_), hi = Vec::Constant(dim_, radius_);
    return {lo, hi};
}

json Ball::toJson() const {
    return json{{"kind", "ball"}, {"params", {{"dim", dim_}, {"radius", radius_}}}};
}

// ------------------------------------------------------------- Rectangle2D

Rectangle2D::Rectangle2D(double w1, double w2) : w1_(w1), w2_(w2) {
    if (w1 <= 0 || w2 <= 0) throw std::invalid_argument("Rectangle2D: widths must be positive");
}

double Rectangle2D::boundaryMargin(const Vec& p) const {
    return std::min(std::min(p[0], w1_ - p[0]), std::min(p[1], w2_ - p[1]));
}

std::pair<Vec, Vec> Rectangle2D::boundingBox() const {
    Vec lo = Vec::Zero(2), hi(2);
    hi << w1_, w2_;
    return {lo, hi};
}

json Rectangle2D::toJson() const {
    return json{{"kind", "rectangle2d"}, {"params", {{"w1", w1_}, {"w2", w2_}}}};
}

json Square2D::toJson() const {
    return json{{"kind", "square2d"}, {"params", {{"side", w1()}}}};
}

// --------------------------------------------------------------- Ellipsoid

Ellipsoid::Ellipsoid(Vec center, Mat Q) : center_(std::move(center)), Q_(std::move(Q)) {
    if (Q_.rows() != Q_.cols() || Q_.rows() != center_.size())
        throw std::invalid_argument("Ellipsoid: shape mismatch");
    Eigen::SelfAdjointEigenSolver<Mat> es(Q_);
    if (es.eigenvalues().minCoeff() <= 0)
        throw std::invalid_argument("Ellipsoid: form must be positive definite");
}

std::shared_ptr<Ellipsoid> Ellipsoid::symplectic(const std::vector<double>& a) {
    int n = static_cast<int>(a.size());
    Mat Q = Mat::Zero(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) {
        Q(2 * i, 2 * i) = 1.0 / (a[i] * a[i]);
        Q(2 * i + 1, 2 * i + 1) = 1.0 / (a[i] * a[i]);
    }
    return std::make_shared<Ellipsoid>(Vec::Zero(2 * n), Q);
}

double Ellipsoid::boundaryMargin(const Vec& p) const {
    Vec d = p - center_;
    double q = d.dot(Q_ * d);
    return 1.0 - std::sqrt(std::max(q, 0.0));
}

MeasureResult Ellipsoid::measure() const {
    int d = dim();
    // vol = vol(B^d(1)) / sqrt(det Q); even d here
    int k = d / 2;
    double unitVol = 1.0;
    for (int i = 1; i <= k; ++i) unitVol *= M_PI / i;
    return {unitVol / std::sqrt(Q_.determinant()), 0.0};
}

std::pair<Vec, Vec> Ellipsoid::boundingBox() const {
    // conservative: use 1/sqrt(lambda_min)
    Eigen::SelfAdjointEigenSolver<Mat> es(Q_);
    double r = 1.0 / std::sqrt(es.eigenvalues().minCoeff());
    return {center_.array() - r, center_.array() + r};
}

json Ellipsoid::toJson() const {
    std::vector<double> c(center_.data(), center_.data() + center_.size());
    std::vector<std::vector<double>> q;
    for (int i = 0; i < Q_.rows(); ++i)
        q.emplace_back(Q_.row(i).begin(), Q_.row(i).end());
    return json{{"kind", "ellipsoid"}, {"params", {{"center", c}, {"Q", q}}}};
}

// ----------------------------------------------------------- ProductDomain

ProductDomain::ProductDomain(std::vector<DomainPtr> factors) : factors_(std::move(factors)) {
    dim_ = 0;
    for (auto& f : factors_) dim_ += f->dim();
}

bool ProductDomain::containsImpl(const Vec& p) const {
    int off = 0;
    for (auto& f : factors_) {
        if (!f->contains(p.segment(off, f->dim()))) return false;
        off += f->dim();
    }
    return true;
}

Vec ProductDomain::normalizeSample(Vec p) const {
    int off = 0;
    for (auto& f : factors_) {
        if (auto* t = dynamic_cast<const PuncturedTorus*>(f.get())) {
            Vec q = t->normalizeRep(p.segment(off, 2));
            p.segment(off, 2) = q;
        }
        off += f->dim();
    }
    return p;
}

double ProductDomain::boundaryMargin(const Vec& p) const {
    double m = std::numeric_limits<double>::infinity();
    int off = 0;
    for (auto& f : factors_) {
        m = std::min(m, f->boundaryMargin(p.segment(off, f->dim())));
        off += f->dim();
    }
    return m;
}

MeasureResult ProductDomain::measure() const {
    double v = 1.0, relErr = 0.0;
    for (auto& f : factors_) {
        auto m = f->measure();
        v *= m.value;
        if (m.value > 0) relErr += m.err / m.value;
    }
    return {v, v * relErr};
}

std::pair<Vec, Vec> ProductDomain::boundingBox() const {
    Vec lo(dim_), hi(dim_);
    int off = 0;
    for (auto& f : factors_) {
        auto [l, h] = f->boundingBox();
        lo.segment(off, f->dim()) = l;
        hi.segment(off, f->dim()) = h;
        off += f->dim();
    }
    return {lo, hi};
}

json ProductDomain::toJson() const {
    json arr = json::array();
    for (auto& f : factors_) arr.push_back(f->toJson());
    return json{{"kind", "product"}, {"params", {{"factors", arr}}}};
}

// ---------------------------------------------------------------- Cylinder

Cylinder::Cylinder(int ballDim, double radius, int freeDim, double truncationRadius)
    : ballDim_(ballDim), freeDim_(freeDim), radius_(radius), trunc_(truncationRadius) {
    if (ballDim <= 0 || ballDim % 2 || freeDim < 0 || freeDim % 2)
        throw std::invalid_argument("Cylinder: dimensions must be even");
    if (radius <= 0 || truncationRadius <= 0)
        throw std::invalid_argument("Cylinder: radii must be positive");
}

MeasureResult Cylinder::measure() const {
    Ball b(ballDim_, radius_);
    double v = b.measure().value;
    if (freeDim_ > 0) v *= Ball(freeDim_, trunc_).measure().value;
    return {v, 0.0};
}

std::pair<Vec, Vec> Cylinder::boundingBox() const {
    Vec lo(dim()), hi(dim());
    lo.head(ballDim_).setConstant(-radius_);
    hi.head(ballDim_).setConstant(radius_);
    lo.tail(freeDim_).setConstant(-trunc_);
    hi.tail(freeDim_).setConstant(trunc_);
    return {lo, hi};
}

json Cylinder::toJson() const {
    return json{{"kind", "cylinder"},
                {"params",
                 {{"ball_dim", ballDim_},
                  {"radius", radius_},
                  {"free_dim", freeDim_},
                  {"truncation", trunc_}}}};
}

// ---------------------------------------------------------- PuncturedTorus

PuncturedTorus::PuncturedTorus(double area, double deltaPunctRel) : area_(area) {
    if (area <= 0) throw std::invalid_argument("PuncturedTorus: area must be positive");
    scale_ = std::sqrt(area);
    deltaPunct_ = deltaPunctRel * scale_;
}

double PuncturedTorus::latticeDistance(const Vec& p) const {
    double dx = positiveMod(p[0], scale_);
    double dy = positiveMod(p[1], scale_);
    dx = std::min(dx, scale_ - dx);
    dy = std::min(dy, scale_ - dy);
    return std::hypot(dx, dy);
}

std::pair<Vec, Vec> PuncturedTorus::boundingBox() const {
    return {Vec::Zero(2), Vec::Constant(2, scale_)};
}

json PuncturedTorus::toJson() const {
    return json{{"kind", "punctured_torus"},
                {"params", {{"area", area_}, {"delta_punct_rel", deltaPunct_ / scale_}}}};
}

// -------------------------------------------------------------- Envelope2D

Envelope2D::Envelope2D(std::vector<Eigen::Vector2d> innerVertices, double r)
    : verts_(std::move(innerVertices)), r_(r) {
    if (verts_.size() < 3) throw std::invalid_argument("Envelope2D: need at least 3 vertices");
    if (r < 0) throw std::invalid_argument("Envelope2D: radius must be nonnegative");
}

std::shared_ptr<Envelope2D> Envelope2D::roundedRect(double x0, double x1, double y0, double y1,
                                                    double r) {
    std::vector<Eigen::Vector2d> v{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
    return std::make_shared<Envelope2D>(std::move(v), r);
}

double Envelope2D::innerSignedDistance(const Eigen::Vector2d& p) const {
    // convex polygon, CCW: positive outside
    double inside = -std::numeric_limits<double>::infinity();
    double distOut = std::numeric_limits<double>::infinity();
    bool outside = false;
    size_t n = verts_.size();
    for (size_t i = 0; i < n; ++i) {
        const auto& a = verts_[i];
        const auto& b = verts_[(i + 1) % n];
        Eigen::Vector2d e = b - a;
        Eigen::Vector2d nrm(e.y(), -e.x());  // outward for CCW
        nrm.normalize();
        double d = nrm.dot(p - a);
        inside = std::max(inside, d);
        if (d > 0) outside = true;
        // distance to the segment
        double t = std::clamp(e.dot(p - a) / e.squaredNorm(), 0.0, 1.0);
        distOut = std::min(distOut, (p - (a + t * e)).norm());
    }
    return outside ? distOut : inside;  // inside: max halfplane value (negative)
}

double Envelope2D::boundaryMargin(const Vec& p) const {
    return r_ - innerSignedDistance({p[0], p[1]});
}

MeasureResult Envelope2D::measure() const {
    // area(P (+) r-disk) = area(P) + perimeter(P) r + pi r^2 for convex P
    double a2 = 0.0, per = 0.0;
    size_t n = verts_.size();
    for (size_t i = 0; i < n; ++i) {
        const auto& p = verts_[i];
        const auto& q = verts_[(i + 1) % n];
        a2 += p.x() * q.y() - q.x() * p.y();
        per += (q - p).norm();
    }
    return {0.5 * std::abs(a2) + per * r_ + M_PI * r_ * r_, 0.0};
}

std::pair<Vec, Vec> Envelope2D::boundingBox() const {
    Eigen::Vector2d lo = verts_[0], hi = verts_[0];
    for (auto& v : verts_) {
        lo = lo.cwiseMin(v);
        hi = hi.cwiseMax(v);
    }
    Vec l(2), h(2);
    l << lo.x() - r_, lo.y() - r_;
    h << hi.x() + r_, hi.y() + r_;
    return {l, h};
}

std::pair<double, double> Envelope2D::xRange() const {
    auto [lo, hi] = boundingBox();
    return {lo[0], hi[0]};
}

std::optional<std::pair<double, double>> Envelope2D::sliceBounds(double x) const {
    // upper/lower envelope over offset edges and vertex arcs of the dilation
    double yhi = -std::numeric_limits<double>::infinity();
    double ylo = std::numeric_limits<double>::infinity();
    size_t n = verts_.size();
    bool any = false;
    for (size_t i = 0; i < n; ++i) {
        const auto& a = verts_[i];
        const auto& b = verts_[(i + 1) % n];
        Eigen::Vector2d e = b - a;
        Eigen::Vector2d nrm(e.y(), -e.x());
        nrm.normalize();
        Eigen::Vector2d ao = a + r_ * nrm, bo = b + r_ * nrm;
        double xm = std::min(ao.x(), bo.x()), xM = std::max(ao.x(), bo.x());
        if (x >= xm && x <= xM && xM > xm) {
            double t = (x - ao.x()) / (bo.x() - ao.x());
            double y = ao.y() + t * (bo.y() - ao.y());
            any = true;
            yhi = std::max(yhi, y);
            ylo = std::min(ylo, y);
        }
        double dx = x - a.x();
        if (r_ > 0 && std::abs(dx) <= r_) {
            double dy = std::sqrt(std::max(r_ * r_ - dx * dx, 0.0));
            any = true;
            yhi = std::max(yhi, a.y() + dy);
            ylo = std::min(ylo, a.y() - dy);
        }
    }
    if (!any || yhi <= ylo) return std::nullopt;
    return std::make_pair(ylo, yhi);
}

std::optional<std::pair<double, double>> Envelope2D::sliceBoundsD1(double x) const {
    const double h = 1e-6 * (1.0 + std::abs(x));
    auto m = sliceBounds(x - h), p = sliceBounds(x + h);
    if (!m || !p) return std::nullopt;
    return std::make_pair((p->first - m->first) / (2 * h), (p->second - m->second) / (2 * h));
}

json Envelope2D::toJson() const {
    json vs = json::array();
    for (auto& v : verts_) vs.push_back({v.x(), v.y()});
    return json{{"kind", "envelope2d"}, {"params", {{"vertices", vs}, {"corner_radius", r_}}}};
}

// ------------------------------------------------------------------- JSON

DomainPtr Domain::fromJson(const json& j) {
    const std::string kind = j.at("kind");
    const json& p = j.at("params");
    if (kind == "ball") return std::make_shared<Ball>(p.at("dim").get<int>(), p.at("radius").get<double>());
    if (kind == "rectangle2d")
        return std::make_shared<Rectangle2D>(p.at("w1").get<double>(), p.at("w2").get<double>());
    if (kind == "square2d") return std::make_shared<Square2D>(p.at("side").get<double>());
    if (kind == "ellipsoid") {
        auto c = p.at("center").get<std::vector<double>>();
        auto q = p.at("Q").get<std::vector<std::vector<double>>>();
        Vec center = Eigen::Map<Vec>(c.data(), c.size());
        Mat Q(q.size(), q.size());
        for (size_t i = 0; i < q.size(); ++i)
            for (size_t k = 0; k < q.size(); ++k) Q(i, k) = q[i][k];
        return std::make_shared<Ellipsoid>(center, Q);
    }
    if (kind == "product") {
        std::vector<DomainPtr> fs;
        for (auto& f : p.at("factors")) fs.push_back(fromJson(f));
        return std::make_shared<ProductDomain>(std::move(fs));
    }
    if (kind == "cylinder")
        return std::make_shared<Cylinder>(p.at("ball_dim").get<int>(), p.at("radius").get<double>(),
                                          p.at("free_dim").get<int>(), p.at("truncation").get<double>());
    if (kind == "punctured_torus")
        return std::make_shared<PuncturedTorus>(p.at("area").get<double>(),
                                                p.at("delta_punct_rel").get<double>());
    if (kind == "envelope2d") {
        std::vector<Eigen::Vector2d> vs;
        for (auto& v : p.at("vertices")) vs.emplace_back(v[0].get<double>(), v[1].get<double>());
        return std::make_shared<Envelope2D>(std::move(vs), p.at("corner_radius").get<double>());
    }
    throw std::invalid_argument("Domain::fromJson: unknown kind '" + kind + "'");
}

DomainPtr makeBall(int dim, double r) { return std::make_shared<Ball>(dim, r); }
DomainPtr makeProduct(std::vector<DomainPtr> f) { return std::make_shared<ProductDomain>(std::move(f)); }
DomainPtr makeRect(double w1, double w2) { return std::make_shared<Rectangle2D>(w1, w2); }
DomainPtr makeSquare(double s) { return std::make_shared<Square2D>(s); }

// symplectic complement (geometry.hpp)
std::pair<Vec, Vec> symplecticComplementBasis(const Vec& v1, const Vec& v2) {
    if (v1.size() != 4 || v2.size() != 4)
        throw std::invalid_argument("symplecticComplementBasis: expects R^4 vectors");
    Mat Om = omegaMatrix(4);
    Mat C(2, 4);
    C.row(0) = (Om * v1).transpose();
    C.row(1) = (Om * v2).transpose();
    Eigen::FullPivLU<Mat> lu(C);
    Mat K = lu.kernel();
    if (K.cols() != 2)
        throw std::runtime_error("symplecticComplementBasis: degenerate span (complement not 2D)");
    Vec f1 = K.col(0), f2 = K.col(1);
    double w = omega(f1, f2);
    if (std::abs(w) < 1e-14)
        throw std::runtime_error("symplecticComplementBasis: complement plane is omega-degenerate");
    f2 /= w;
    return {f1, f2};
}

}  // namespace symplembed
