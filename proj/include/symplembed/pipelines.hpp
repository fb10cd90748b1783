#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "symplembed/certify.hpp"
#include "symplembed/gluing.hpp"
#include "symplembed/hindkerman.hpp"

namespace symplembed {

// ------------------------------------------------------- Theorem 1.1 chain

struct RadiusChain {
    int n = 0;
    std::uint64_t radiusSquared = 0;  // 2^{n-1} + 2^{n-2} - 2 (exact)
    double radius = 0;
    std::vector<double> factorRadii;  // 2^{1/2}, 2^1, ..., 2^{(n-2)/2}, 2^{(n-2)/2}
};
RadiusChain radiusChain(int n);

// ------------------------------------------------- section 7 glued pipeline

struct AnswersResult {
    std::shared_ptr<GluedEmbedding> glued;
    std::shared_ptr<NestedFamily> family;  // keep alive for the glued map
    Certificate certificate;
    std::vector<double> schedule;
};

// Builds the nested family W_e = B^2(1-e) x B^{2(n-1)}(1/e), phi_e = j_{S,R},
// hull per Remark "automatically satisfied", and runs the telescope.
AnswersResult answersPipeline(int n, const std::vector<double>& schedule, long samples,
                              std::uint64_t seed, double truncation = 3.0);

struct FirstResult {
    Certificate certificate;
    RadiusChain chain;
};
// Theorem 1.1 at desk scale: for n = 3 verifies the glued embedding into
// B^4(2) x R^2 on truncated samples; for n > 3 checks the factor-inclusion
// arithmetic on samples.
FirstResult firstPipeline(int n, long samples, std::uint64_t seed, double truncation = 3.0);

struct General0Result {
    Certificate certificate;
    std::string report;  // the symbolic d-nontriviality contradiction
};
General0Result general0Chain(int n, int d, long samples, std::uint64_t seed,
                             double truncation = 3.0);

// ----------------------------------------------------------- capacity axioms

struct CapacityModel {
    enum class Kind { GromovRadius, VolumeCapacity };
    Kind kind = Kind::GromovRadius;
    std::string name() const {
        return kind == Kind::GromovRadius ? "gromov-radius" : "volume-capacity";
    }
    // value normalized so value(B^{2n}(1)) = 1 and value(dilation by sqrt(l))
    // = l * value (the model correspondence for c(M, l w) = l c(M, w)).
    // For gromov-radius the underlying radius (min symplectic semi-axis) is
    // reported alongside; value = radius^2.
    double value(const Domain& d) const;       // may be +inf for cylinders
    double radius(const Domain& d) const;      // gromov radius (closed form)
};

struct MorphismRecord {
    DomainPtr source, target;
    std::string provenance;  // "inclusion" or a pipeline tag
};

struct AxiomReport {
    Certificate certificate;
    std::vector<std::string> violations;
};
AxiomReport axiomHarness(const CapacityModel& model, const std::vector<MorphismRecord>& catalog,
                         std::uint64_t seed);

// the standard model-domain catalog with certified inclusions
std::vector<MorphismRecord> defaultCatalog();

}  // namespace symplembed
