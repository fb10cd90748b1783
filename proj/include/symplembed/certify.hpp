#pragma once

#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "symplembed/domains.hpp"
#include "symplembed/maps.hpp"

namespace symplembed {

struct SymplecticReport {
    double maxResidual = 0.0;
    long samples = 0;
    bool pass(double tol) const { return maxResidual <= tol; }
};

struct CollisionWitness {
    Vec a, b;
    double imageDist = 0.0, sourceDist = 0.0;
};

struct InjectivityReport {
    long collisions = 0;
    long samples = 0;
    double deltaInj = 1e-6, deltaSrc = 1e-3;
    double nearestPairDist = std::numeric_limits<double>::infinity();
    std::optional<CollisionWitness> witness;
    bool pass() const { return collisions == 0; }
};

struct ContainmentReport {
    double minMargin = std::numeric_limits<double>::infinity();
    long samples = 0;
    long outside = 0;
    bool pass() const { return outside == 0; }
};

// max over samples of || J^T Omega J - Omega ||_inf
SymplecticReport checkSymplectic(const SmoothMap& m, const std::vector<Vec>& samples);

// Spatial-hash scan: pairs with image distance < deltaInj but source distance
// > deltaSrc are collisions. torusWrapLeading2: treat the leading two image
// coordinates modulo `wrapScale` when measuring image distances.
InjectivityReport checkInjective(const SmoothMap& m, const std::vector<Vec>& samples,
                                 double deltaInj = 1e-6, double deltaSrc = 1e-3,
                                 bool torusWrapLeading2 = false, double wrapScale = 1.0);

ContainmentReport checkContained(const SmoothMap& m, const Domain& targetDom,
                                 const std::vector<Vec>& samples);

struct CheckEntry {
    std::string name;
    bool pass = false;
    double value = 0.0;
    double tolerance = 0.0;
};

// Machine-readable verification report. Deterministic given config + seed.
struct Certificate {
    std::string subject;
    std::uint64_t seed = 0;
    long sampleCount = 0;
    std::vector<CheckEntry> checks;
    nlohmann::ordered_json constants;  // provenance-tagged values

    void add(const std::string& name, double value, double tol, bool lessIsPass = true) {
        checks.push_back({name, lessIsPass ? value <= tol : value >= tol, value, tol});
    }
    void addBool(const std::string& name, bool ok) { checks.push_back({name, ok, ok ? 1.0 : 0.0, 1.0}); }
    void addConstant(const std::string& name, double value, const std::string& provenance) {
        constants[name] = {{"value", value}, {"provenance", provenance}};
    }
    bool pass() const {
        for (auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
    nlohmann::ordered_json toJson() const;
};

}  // namespace symplembed
