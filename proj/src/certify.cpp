#include "symplembed/certify.hpp"

#include <cmath>
#include <unordered_map>

namespace symplembed {

SymplecticReport checkSymplectic(const SmoothMap& m, const std::vector<Vec>& samples) {
    SymplecticReport rep;
    rep.samples = static_cast<long>(samples.size());
    Mat OmIn = omegaMatrix(m.dimIn());
    Mat OmOut = omegaMatrix(m.dimOut());
    for (auto& x : samples) {
        Mat J = m.jacobian(x);
        double r = (J.transpose() * OmOut * J - OmIn).cwiseAbs().maxCoeff();
        rep.maxResidual = std::max(rep.maxResidual, r);
    }
    return rep;
}

namespace {

struct CellKey {
    long long c[4];
    bool operator==(const CellKey& o) const {
        return c[0] == o.c[0] && c[1] == o.c[1] && c[2] == o.c[2] && c[3] == o.c[3];
    }
};

struct CellHash {
    size_t operator()(const CellKey& k) const {
        // large primes, as usual for spatial hashing
        std::uint64_t h = 1469598103934665603ULL;
        const std::uint64_t p[4] = {73856093ULL, 19349663ULL, 83492791ULL, 2654435761ULL};
        for (int i = 0; i < 4; ++i) h ^= static_cast<std::uint64_t>(k.c[i]) * p[i] + (h << 6);
        return static_cast<size_t>(h);
    }
};

}  // namespace

InjectivityReport checkInjective(const SmoothMap& m, const std::vector<Vec>& samples,
                                 double deltaInj, double deltaSrc, bool torusWrapLeading2,
                                 double wrapScale) {
    InjectivityReport rep;
    rep.deltaInj = deltaInj;
    rep.deltaSrc = deltaSrc;
    rep.samples = static_cast<long>(samples.size());

    std::vector<Vec> images(samples.size());
    for (size_t i = 0; i < samples.size(); ++i) images[i] = m.eval(samples[i]);
    const int d = m.dimOut();
    const int hashDims = std::min(d, 4);
    const double cell = deltaInj;

    auto imageDist = [&](const Vec& a, const Vec& b) {
        double s = 0.0;
        for (int k = 0; k < d; ++k) {
            double diff = a[k] - b[k];
            if (torusWrapLeading2 && k < 2) {
                diff = positiveMod(diff, wrapScale);
                diff = std::min(diff, wrapScale - diff);
            }
            s += diff * diff;
        }
        return std::sqrt(s);
    };

    std::unordered_map<CellKey, std::vector<int>, CellHash> grid;
    grid.reserve(samples.size() * 2);
    const long long wrapCells =
        torusWrapLeading2 ? std::max<long long>(1, static_cast<long long>(std::ceil(wrapScale / cell)))
                          : 0;
    auto keyOf = [&](const Vec& p) {
        CellKey k{{0, 0, 0, 0}};
        for (int i = 0; i < hashDims; ++i) {
            double coord = p[i];
            if (torusWrapLeading2 && i < 2) coord = positiveMod(coord, wrapScale);
            k.c[i] = static_cast<long long>(std::floor(coord / cell));
            if (torusWrapLeading2 && i < 2) k.c[i] = ((k.c[i] % wrapCells) + wrapCells) % wrapCells;
        }
        return k;
    };

    for (size_t i = 0; i < images.size(); ++i) {
        CellKey base = keyOf(images[i]);
        // probe the 3^hashDims neighborhood (wrapped on the torus factor)
        int combos = 1;
        for (int k = 0; k < hashDims; ++k) combos *= 3;
        for (int c = 0; c < combos; ++c) {
            CellKey probe = base;
            int cc = c;
            for (int k = 0; k < hashDims; ++k) {
                probe.c[k] += (cc % 3) - 1;
                if (torusWrapLeading2 && k < 2)
                    probe.c[k] = ((probe.c[k] % wrapCells) + wrapCells) % wrapCells;
                cc /= 3;
            }
            auto it = grid.find(probe);
            if (it == grid.end()) continue;
            for (int j : it->second) {
                double di = imageDist(images[i], images[j]);
                if (di >= deltaInj) continue;
                double ds = (samples[i] - samples[j]).norm();
                if (ds > deltaSrc) {
                    ++rep.collisions;
                    if (di < rep.nearestPairDist) {
                        rep.nearestPairDist = di;
                        rep.witness = CollisionWitness{samples[i], samples[j], di, ds};
                    }
                }
            }
        }
        grid[base].push_back(static_cast<int>(i));
    }
    return rep;
}

ContainmentReport checkContained(const SmoothMap& m, const Domain& targetDom,
                                 const std::vector<Vec>& samples) {
    ContainmentReport rep;
    rep.samples = static_cast<long>(samples.size());
    for (auto& x : samples) {
        Vec y = m.eval(x);
        double margin = targetDom.boundaryMargin(y);
        rep.minMargin = std::min(rep.minMargin, margin);
        if (!(margin > 0.0)) ++rep.outside;
    }
    return rep;
}

nlohmann::ordered_json Certificate::toJson() const {
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["subject"] = subject;
    j["seed"] = seed;
    j["sample_count"] = sampleCount;
    j["pass"] = pass();
    nlohmann::ordered_json cs = nlohmann::ordered_json::array();
    for (auto& c : checks)
        cs.push_back({{"name", c.name}, {"pass", c.pass}, {"value", c.value}, {"tolerance", c.tolerance}});
    j["checks"] = cs;
    j["constants"] = constants;
    return j;
}

}  // namespace symplembed
