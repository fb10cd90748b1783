// symplembed: build, compose and certify the explicit symplectic embeddings.
#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>

#include "symplembed/certify.hpp"
#include "symplembed/gluing.hpp"
#include "symplembed/guth.hpp"
#include "symplembed/hindkerman.hpp"
#include "symplembed/pipelines.hpp"
#include "symplembed/transport.hpp"

using namespace symplembed;
namespace fs = std::filesystem;

namespace {

struct GlobalOpts {
    std::string configPath;
    std::string outDir = ".";
    std::uint64_t seed = 2024;
    long samples = 10000;
    double trunc = 3.0;
};

void writeJson(const fs::path& p, const nlohmann::ordered_json& j) {
    std::ofstream os(p);
    os << j.dump(2) << "\n";
}

void writeCsv(const fs::path& p, const std::string& header,
              const std::vector<std::vector<double>>& rows) {
    std::ofstream os(p);
    os << header << "\n";
    os.precision(17);
    for (auto& r : rows) {
        for (size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
        os << "\n";
    }
}

int finish(const Certificate& cert, const GlobalOpts& g, const std::string& name) {
    fs::create_directories(g.outDir);
    writeJson(fs::path(g.outDir) / (name + "_certificate.json"), cert.toJson());
    std::cout << (cert.pass() ? "PASS " : "FAIL ") << cert.subject << "\n";
    for (auto& c : cert.checks)
        std::cout << "  [" << (c.pass ? "ok" : "FAIL") << "] " << c.name << " = " << c.value
                  << " (tol " << c.tolerance << ")\n";
    if (!cert.pass()) {
        for (auto& c : cert.checks)
            if (!c.pass) std::cerr << "failing check: " << c.name << "\n";
        return 1;
    }
    return 0;
}

int runGuth(const GlobalOpts& g, double Rlo, double Rhi, int gridN) {
    fs::create_directories(g.outDir);
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < gridN; ++i) {
        double R = Rlo + (Rhi - Rlo) * i / std::max(1, gridN - 1);
        GuthFrame fr = buildGuthFrame(R);
        SpikeFunction sp(fr.rho);
        rows.push_back({R, fr.t, fr.lambda, fr.mu, fr.shadowRadius, fr.rho});
        (void)sp;
    }
    writeCsv(fs::path(g.outDir) / "guth_frames.csv", "R,t,lambda,mu,S,rho", rows);

    Certificate cert;
    cert.subject = "guth";
    cert.seed = g.seed;
    cert.sampleCount = g.samples;
    double worstSym = 0, worstResidual = 0;
    long collisions = 0;
    for (double R : {0.4, 1.0, 2.0}) {
        auto iR = buildGuthFamily(3, R);
        Sampler s;
        s.seed = g.seed;
        auto pts = makeBall(4, R)->sample(g.samples, s);
        worstSym = std::max(worstSym, checkSymplectic(*iR, pts).maxResidual);
        collisions += checkInjective(*iR, pts, 1e-6, 1e-3, true, 1.0).collisions;
        double t = solveT(R);
        worstResidual = std::max(worstResidual, solveTResidual(R, t));
        cert.addConstant("t(R=" + std::to_string(R) + ")", t, "solved");
        cert.addConstant("mu(R=" + std::to_string(R) + ")", buildGuthFrame(R).mu, "closed-form");
        cert.addConstant("S(R=" + std::to_string(R) + ")", projectionRadiusBound(R), "closed-form");
    }
    cert.add("symplectic_residual", worstSym, 1e-10);
    cert.add("solve_t_residual", worstResidual, 1e-12);
    cert.add("injectivity_collisions", double(collisions), 0.0);
    return finish(cert, g, "guth");
}

int runHk(const GlobalOpts& g, double eps, int gridN) {
    fs::create_directories(g.outDir);
    auto b = buildBundle(eps);
    // serpentine + envelope polylines for figures
    std::vector<std::vector<double>> rows;
    for (auto& p : b->serp->centerlinePolyline(24)) rows.push_back({p.x(), p.y()});
    writeCsv(fs::path(g.outDir) / "hk_serpentine.csv", "x,y", rows);
    rows.clear();
    auto env = std::dynamic_pointer_cast<const Envelope2D>(b->envelope);
    if (env)
        for (auto& v : env->innerVertices()) rows.push_back({v.x(), v.y(), env->radius()});
    writeCsv(fs::path(g.outDir) / "hk_envelope.csv", "x,y,corner_radius", rows);

    Certificate cert;
    cert.subject = "hk[eps=" + std::to_string(eps) + "]";
    cert.seed = g.seed;
    cert.sampleCount = g.samples;
    auto roots = solveA(eps);
    HkConstants k = hkConstants();
    cert.addConstant("A_small_limit", roots.limitSmall, "closed-form");
    cert.addConstant("A_large_limit", roots.limitLarge, "closed-form");
    cert.addConstant("A_small_measured", roots.measuredSmall, "solved");
    cert.addConstant("A_large_measured", roots.measuredLarge, "solved");
    cert.addConstant("A_used", b->serp->A, "solved");
    cert.addConstant("eps_tilde", 100.0 * eps, "config");
    cert.addConstant("c_tilde", k.ctilde, "closed-form");
    cert.addConstant("c", k.c, "closed-form");
    cert.addConstant("C", k.C, "closed-form");
    cert.addConstant("C_prime", k.Cprime, "closed-form");
    cert.addConstant("r_eps", b->rEps, "closed-form");
    cert.addConstant("chart_seam_margin", b->serp->seamMargin, "config");

    cert.add("moser_equality_rel",
             std::abs(b->serp->totalArea - 100.0 * eps) / (100.0 * eps), 1e-6);
    long chiViol = 0;
    double A = b->serp->A;
    for (int i = 0; i <= 100000; ++i) {
        double x = -A + 2 * A * i / 100000.0;
        if (std::abs(b->chi->d1(x)) > 1.0 / A + eps) ++chiViol;
        if (x >= -A + eps / 2 && x <= A - eps / 2 &&
            std::abs(b->chi->value(x) - (1.0 - std::abs(x) / A)) > eps)
            ++chiViol;
    }
    cert.add("chi_bound_violations", double(chiViol), 0.0);
    Sampler s;
    s.seed = g.seed;
    cert.add("flow_symplectic_residual",
             checkSymplectic(*b->flow, makeBall(4, 2.0)->sample(g.samples, s)).maxResidual, 1e-12);
    auto ptsI = b->sampleSigmaQ(g.samples, g.seed);
    cert.add("I_collisions", double(checkInjective(*b->I, ptsI, 1e-6, 1e-3).collisions), 0.0);
    auto ptsC = b->sampleSigmaDisk(std::min<long>(g.samples, 5000), g.seed + 1);
    auto con = checkContained(*b->chain, *makeProduct({makeBall(2, b->rEps + 1e-12),
                                                       makeBall(2, std::sqrt(2.0) + 1e-12)}),
                              ptsC);
    cert.add("chain_containment_outside", double(con.outside), 0.0);
    cert.add("chain_symplectic_residual",
             checkSymplectic(*b->chain, {ptsC.begin(), ptsC.begin() + std::min<size_t>(400, ptsC.size())})
                 .maxResidual,
             1e-4);
    (void)gridN;
    return finish(cert, g, "hk");
}

int runGlue(const GlobalOpts& g, const std::string& familyName, int nMax) {
    NestedFamily fam = familyName == "rotation" ? rotationFamily() : translationFamily();
    Sampler s;
    s.seed = g.seed;
    std::vector<Vec> probes;
    for (auto& p : makeBall(2, 0.6)->sample(64, s))
        if (fam.level(p) > 0.4) probes.push_back(p);
    FlowOptions fo;
    fo.odeTol = 1e-10;
    auto glued = theoremCor(fam, nMax, probes, fo);
    std::vector<std::vector<double>> rows;
    int level = 3;
    for (auto& l : glued->levels()) {
        rows.push_back({double(level), 1.0 / (level + 1), 1.0 / level, l.defect, l.symplectic});
        ++level;
    }
    fs::create_directories(g.outDir);
    writeCsv(fs::path(g.outDir) / "glue_defects.csv", "level,t,t_prime,defect,flow_residual", rows);

    Certificate cert;
    cert.subject = "glue[" + familyName + "]";
    cert.seed = g.seed;
    double worstDefect = 0, worstSym = 0;
    for (auto& l : glued->levels()) {
        worstDefect = std::max(worstDefect, l.defect);
        worstSym = std::max(worstSym, l.symplectic);
    }
    cert.add("defect_sup", worstDefect, 1e-6);
    cert.add("flow_symplectic_residual", worstSym, 1e-7);
    return finish(cert, g, "glue");
}

int runProve(const GlobalOpts& g, const std::string& theorem, int n, int d) {
    if (theorem == "first") {
        auto res = firstPipeline(n, g.samples, g.seed, g.trunc);
        res.certificate.addConstant("radius", res.chain.radius, "closed-form");
        return finish(res.certificate, g, "prove_first");
    }
    if (theorem == "answers") {
        auto res = answersPipeline(n, {1.0 / 3, 1.0 / 4, 1.0 / 5}, g.samples, g.seed, g.trunc);
        return finish(res.certificate, g, "prove_answers");
    }
    if (theorem == "general0") {
        auto res = general0Chain(n, d, g.samples, g.seed, g.trunc);
        fs::create_directories(g.outDir);
        std::ofstream rep(fs::path(g.outDir) / "general0_report.txt");
        rep << res.report << "\n";
        std::cout << res.report << "\n";
        return finish(res.certificate, g, "prove_general0");
    }
    std::cerr << "unknown theorem '" << theorem << "'\n";
    return 2;
}

int runCertify(const GlobalOpts& g) {
    // config-driven run: {"driver": "guth"|"hk"|"glue"|"prove"|"axioms", ...}
    if (g.configPath.empty()) {
        std::cerr << "certify requires --config <file>\n";
        return 2;
    }
    std::ifstream is(g.configPath);
    if (!is) {
        std::cerr << "cannot open config " << g.configPath << "\n";
        return 2;
    }
    nlohmann::json cfg;
    try {
        is >> cfg;
    } catch (const std::exception& e) {
        std::cerr << "config parse error: " << e.what() << "\n";
        return 2;
    }
    try {
        std::string driver = cfg.at("driver");
        GlobalOpts local = g;
        local.seed = cfg.value("seed", g.seed);
        local.samples = cfg.value("samples", g.samples);
        local.trunc = cfg.value("trunc", g.trunc);
        if (driver == "guth") return runGuth(local, cfg.value("R_lo", 0.4), cfg.value("R_hi", 2.0), cfg.value("grid", 9));
        if (driver == "hk") return runHk(local, cfg.value("eps", 0.05), cfg.value("grid", 3));
        if (driver == "glue")
            return runGlue(local, cfg.value("family", std::string("translation")), cfg.value("n_max", 6));
        if (driver == "prove")
            return runProve(local, cfg.value("theorem", std::string("first")), cfg.value("n", 3),
                            cfg.value("d", 2));
        if (driver == "axioms") {
            int rc = 0;
            for (auto kind :
                 {CapacityModel::Kind::GromovRadius, CapacityModel::Kind::VolumeCapacity}) {
                CapacityModel m{kind};
                auto rep = axiomHarness(m, defaultCatalog(), local.seed);
                rc |= finish(rep.certificate, local, "axioms_" + m.name());
            }
            return rc;
        }
        std::cerr << "unknown driver '" << driver << "'\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config schema violation: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"symplectic embedding construction and certification toolkit"};
    GlobalOpts g;
    app.add_option("--config", g.configPath, "JSON config file");
    app.add_option("--seed", g.seed, "RNG seed");
    app.add_option("--samples", g.samples, "sample count for certificates");
    app.add_option("--out", g.outDir, "output directory");
    app.add_option("--trunc", g.trunc, "truncation radius for unbounded factors");

    auto* cguth = app.add_subcommand("guth", "Guth family tables and certificate");
    double Rlo = 0.4, Rhi = 2.0;
    int grid = 9;
    cguth->add_option("--R-lo", Rlo);
    cguth->add_option("--R-hi", Rhi);
    cguth->add_option("--grid", grid);

    auto* chk = app.add_subcommand("hk", "Hind-Kerman construction certificate");
    double eps = 0.05;
    int hkGrid = 3;
    chk->add_option("--eps", eps);
    chk->add_option("--grid", hkGrid);

    auto* cglue = app.add_subcommand("glue", "gluing engine on a toy family");
    std::string family = "translation";
    int nMax = 6;
    cglue->add_option("--family", family, "translation|rotation");
    cglue->add_option("--n-max", nMax);

    auto* cprove = app.add_subcommand("prove", "theorem-level drivers");
    std::string theorem = "first";
    int n = 3, d = 2;
    cprove->add_option("--theorem", theorem, "first|answers|general0");
    cprove->add_option("--n", n);
    cprove->add_option("--d", d);

    app.add_subcommand("certify", "run a config-driven certification");

    CLI11_PARSE(app, argc, argv);
    try {
        if (cguth->parsed()) return runGuth(g, Rlo, Rhi, grid);
        if (chk->parsed()) return runHk(g, eps, hkGrid);
        if (cglue->parsed()) return runGlue(g, family, nMax);
        if (cprove->parsed()) return runProve(g, theorem, n, d);
        if (app.get_subcommand("certify")->parsed()) return runCertify(g);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    std::cout << app.help() << "\n";
    return 0;
}
