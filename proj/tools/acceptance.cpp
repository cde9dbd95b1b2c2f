#include "study_options.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <sys/wait.h>
#include <vector>

using namespace gradfem;
namespace fs = std::filesystem;

namespace {

struct Study {
    StudyConfig cfg;
    StudyResult result;
    double seconds = 0.0;
};

struct Verdict {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what)
    {
        pass = pass && ok;
        if (!detail.empty()) detail += "; ";
        detail += what + (ok ? "" : " [FAIL]");
    }
};

std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

bool within(double v, double lo, double hi) { return lo <= v && v <= hi; }

class Runner {
public:
    Runner(fs::path configs, fs::path out) : configs_(std::move(configs)), out_(std::move(out)) {}

    const Study& get(const std::string& name)
    {
        if (auto it = done_.find(name); it != done_.end()) return it->second;
        Study s;
        s.cfg = tools::load_manifest((configs_ / (name + ".cfg")).string());
        s.cfg.output_dir = out_.string();
        const auto t0 = std::chrono::steady_clock::now();
        s.result = run_study(s.cfg);
        s.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("== %s (%.1f s)\n", name.c_str(), s.seconds);
        for (const auto& c : s.result.theory) {
            if (c.covered)
                std::printf("   %s: mu %s %s\n", c.norm.c_str(), c.satisfied ? "satisfies" : "violates",
                            c.note.c_str());
            else
                std::printf("   %s: no estimate applies\n", c.norm.c_str());
        }
        std::printf("%s\n", s.result.table.c_str());
        std::fflush(stdout);
        return done_.emplace(name, std::move(s)).first->second;
    }

private:
    fs::path configs_;
    fs::path out_;
    std::map<std::string, Study> done_;
};

double order(const Study& s, const char* col, bool by_n)
{
    const auto& fits = by_n ? s.result.eoc.by_n : s.result.eoc.by_h;
    const auto it = fits.find(col);
    return s.result.eoc.defined && it != fits.end() ? it->second.order : std::nan("");
}

// Reference magnitudes (x 1e-4) of the 2D point-source studies, h = 2^-4 .. 2^-7.
// The mu = 0.4 L2 entry at h = 2^-5 is 1.473 (a misprint elsewhere reads 1.147).
const std::map<std::string, std::vector<double>> kPoint2dReference{
    {"point2d_mu0.4/L2", {5.802, 1.473, 0.371, 0.093}}, {"point2d_mu0.4/L2beta", {4.076, 1.022, 0.256, 0.064}},
    {"point2d_mu0.6/L2", {5.686, 1.812, 0.575, 0.182}}, {"point2d_mu0.6/L2beta", {2.243, 0.569, 0.144, 0.036}},
    {"point2d_mu1/L2", {9.639, 4.822, 2.411, 1.206}},   {"point2d_mu1/L2beta", {3.783, 1.443, 0.548, 0.208}},
};

Verdict criterion1(Runner& r)
{
    Verdict v;
    double seconds = 0.0;
    const auto& a = r.get("point2d_mu0.4");
    const auto& b = r.get("point2d_mu0.6");
    const auto& c = r.get("point2d_mu1");
    const double a2 = order(a, kErrL2, true);
    const double ab = order(a, kErrL2Beta, true);
    const double b2 = order(b, kErrL2, true);
    const double c2 = order(c, kErrL2, true);
    v.require(within(a2, 1.85, 2.15), "mu=0.4 L2 eoc(N) " + fmt("%.3f", a2));
    v.require(within(ab, 1.90, 2.15), "L2_0.4 " + fmt("%.3f", ab));
    v.require(within(b2, 1.5, 1.85), "mu=0.6 L2 " + fmt("%.3f", b2));
    v.require(within(c2, 0.9, 1.15), "mu=1 L2 " + fmt("%.3f", c2));
    double worst = 0.0;
    for (const Study* s : {&a, &b, &c}) {
        seconds += s->seconds;
        for (const auto& [suffix, col] : {std::pair{"/L2", kErrL2}, std::pair{"/L2beta", kErrL2Beta}}) {
            const auto& ref = kPoint2dReference.at(s->cfg.name + suffix);
            for (std::size_t i = 0; i < ref.size(); ++i) {
                const double got = s->result.records.at(i).errors.at(col) * 1e4;
                worst = std::max(worst, std::abs(got / ref[i] - 1.0));
            }
        }
    }
    v.require(worst <= 0.25, "max magnitude deviation " + fmt("%.1f%%", 100 * worst));
    v.require(seconds < 120.0, "runtime " + fmt("%.1f s", seconds));
    return v;
}

Verdict criterion2(Runner& r)
{
    Verdict v;
    const auto& a = r.get("point3d_mu0.25");
    const auto& b = r.get("point3d_mu0.5");
    const double a2 = order(a, kErrL2, true);
    const double ab = order(a, kErrL2Beta, true);
    const double b2 = order(b, kErrL2, true);
    const double bb = order(b, kErrL2Beta, true);
    v.require(within(a2, 1.75, 2.1), "mu=0.25 L2 eoc(N) " + fmt("%.3f", a2));
    v.require(within(ab, 1.75, 2.1), "L2_0.7 " + fmt("%.3f", ab));
    v.require(within(b2, 0.9, 1.25), "mu=0.5 L2 " + fmt("%.3f", b2));
    v.require(bb >= 1.6, "L2_0.7 " + fmt("%.3f", bb));
    const double n = static_cast<double>(a.result.records.back().vertices);
    v.require(n >= 5e4 && n <= 2e5, "finest N " + fmt("%.0f", n));
    v.require(a.seconds + b.seconds < 1800.0, "runtime " + fmt("%.1f s", a.seconds + b.seconds));
    return v;
}

Verdict criterion3(Runner& r)
{
    Verdict v;
    const auto& an = r.get("segment3d_aniso_mu0.4");
    const auto& un = r.get("segment3d_aniso_mu1");
    const auto& iso = r.get("segment3d_iso_mu0.4");
    const double a2 = order(an, kErrL2, false);
    const double ab = order(an, kErrL2Beta, false);
    const double u2 = order(un, kErrL2, false);
    const double i2 = order(iso, kErrL2, false);
    const double ib = order(iso, kErrL2Beta, false);
    v.require(within(a2, 1.65, 2.1), "aniso mu=0.4 eoc(h) L2 " + fmt("%.3f", a2));
    v.require(within(ab, 1.65, 2.1), "L2_0.4 " + fmt("%.3f", ab));
    v.require(within(u2, 0.7, 1.0), "aniso mu=1 L2 " + fmt("%.3f", u2));
    v.require(within(i2, 1.55, 2.0), "iso mu=0.4 L2 " + fmt("%.3f", i2));
    v.require(within(ib, 1.55, 2.0), "L2_0.4 " + fmt("%.3f", ib));
    v.require(a2 > u2 + 0.5 && i2 > u2 + 0.5, "graded >> ungraded");
    v.require(ab >= a2 && ib >= i2, "weighted >= unweighted order");
    return v;
}

Verdict criterion4(Runner& r)
{
    Verdict v;
    const auto& an = r.get("segment3d_aniso_mu0.4").result.records.back();
    const auto& iso = r.get("segment3d_iso_mu0.4").result.records.back();
    const double ratio = static_cast<double>(an.elements) / static_cast<double>(iso.elements);
    v.require(an.h == 0.1 && iso.h == 0.1, "h = 0.1");
    v.require(an.elements < iso.elements, "NT aniso " + std::to_string(an.elements) + " < iso " +
                                              std::to_string(iso.elements) + ", ratio " + fmt("%.3f", ratio));
    return v;
}

Verdict criterion5(const std::string& tests)
{
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    const int status = std::system((tests + " --minimal > /dev/null 2>&1").c_str());
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    v.require(WIFEXITED(status) && WEXITSTATUS(status) == 0, "unit and property suite");
    v.require(seconds < 60.0, "runtime " + fmt("%.1f s", seconds));
    return v;
}

Verdict criterion6(Runner& r)
{
    Verdict v;
    const auto& s = r.get("interpolant_point2d");
    const double slope = order(s, kErrH1Sigma, false);
    v.require(s.result.records.size() == 3, "3 levels");
    v.require(slope >= 0.85, "truncated interpolant H1_0.5 slope in h " + fmt("%.3f", slope));
    for (const auto& c : s.result.theory)
        if (c.norm.rfind("H1", 0) == 0) v.require(c.covered && c.satisfied, "mu admissible");
    return v;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Acceptance checks; one PASS/FAIL line per criterion"};
    std::string configs = "configs";
    std::string out = "acceptance_output";
    std::string tests = "./gradfem_tests";
    std::vector<int> only;
    app.add_option("--configs", configs, "directory holding the study manifests");
    app.add_option("--output-dir", out, "where study CSV files go");
    app.add_option("--tests", tests, "unit test executable");
    app.add_option("--only", only, "run only these criteria");
    CLI11_PARSE(app, argc, argv);

    fs::create_directories(out);
    Runner runner(configs, out);
    const std::set<int> selected(only.begin(), only.end());
    std::vector<std::pair<int, Verdict>> verdicts;
    for (int k = 1; k <= 6; ++k) {
        if (!selected.empty() && !selected.count(k)) continue;
        Verdict v;
        try {
            switch (k) {
            case 1: v = criterion1(runner); break;
            case 2: v = criterion2(runner); break;
            case 3: v = criterion3(runner); break;
            case 4: v = criterion4(runner); break;
            case 5: v = criterion5(tests); break;
            default: v = criterion6(runner); break;
            }
        } catch (const std::exception& e) {
            v.require(false, std::string("error: ") + e.what());
        }
        verdicts.emplace_back(k, v);
    }
    bool all = true;
    std::printf("\n");
    for (const auto& [k, v] : verdicts) {
        std::printf("criterion %d: %s  %s\n", k, v.pass ? "PASS" : "FAIL", v.detail.c_str());
        all = all && v.pass;
    }
    return all ? 0 : 1;
}
