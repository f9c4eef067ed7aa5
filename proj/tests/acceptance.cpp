// Acceptance harness: one line per criterion, PASS or FAIL, with the worst
// residual (or z-score) and the wall time against the criterion's budget.
//
//   acceptance                 run every criterion
//   acceptance --criterion 7   run one

#include "duality/algebra.hpp"
#include "duality/cli.hpp"
#include "duality/exact.hpp"
#include "duality/montecarlo.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace duality;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Detail {
 public:
  void note(const std::string& label, double value) {
    std::ostringstream s;
    s.precision(3);
    s << label << "=" << value;
    parts_.push_back(s.str());
  }
  void fail(const std::string& what) {
    pass_ = false;
    parts_.push_back("FAILED " + what);
  }
  void require(bool ok, const std::string& what) {
    if (!ok) fail(what);
  }
  Outcome done() const {
    std::string out;
    for (const auto& p : parts_) out += (out.empty() ? "" : "; ") + p;
    return {pass_, out};
  }

 private:
  bool pass_ = true;
  std::vector<std::string> parts_;
};

double max_abs(const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

Matrix dn(int N) {
  return duality_matrix(DualityFamily::hypergeometric(N), Basis::finite(N), Basis::discrete(N));
}

Outcome c1_moran_kingman() {
  Detail d;
  double worst = 0.0;
  for (int N = 2; N <= 10; ++N) {
    double r = 0.0;
    d.require(moran_kingman_exact(N, &r), "rational residual nonzero at N=" + std::to_string(N));
  }
  for (int N = 2; N <= 20; ++N) {
    const Matrix K = generator_matrix(ProcessSpec::moran_multitype(N, 2, 0.0, 2.0)).Q;
    const Matrix Kh = generator_matrix(ProcessSpec::kingman_block(0, 0, N)).Q;
    worst = std::max(worst, check_intertwiner(K, Kh, dn(N)).max_abs_residual);
  }
  d.note("rational N<=10 exact zero, float max residual N<=20", worst);
  d.require(worst <= 1e-10, "float residual");
  return d.done();
}

Outcome c2_commutation() {
  Detail d;
  double worst = 0.0;
  for (int M = 2; M <= 32; ++M) {
    for (auto fam : {RepresentationFamily::HeisenbergContinuous, RepresentationFamily::HeisenbergDiscrete,
                     RepresentationFamily::Su11Continuous, RepresentationFamily::Su11Discrete})
      for (double m : {0.5, 1.0, 3.0})
        for (const auto& r : check_commutation_relations(build_representation(fam, {m, 0}, M)))
          worst = std::max(worst, r.max_abs_residual);
    // Exact rationals: in doubles the alternating sums of a_N^dagger lose
    // about C(N, N/2) ulps, which passes 1e-10 only up to N ~ 18.
    double r = 0.0;
    d.require(finite_heisenberg_exact(M, &r), "finite-N relation at N=" + std::to_string(M));
    worst = std::max(worst, r);
  }
  d.note("max residual over 5 families, M<=32 (finite-N rational)", worst);
  d.require(worst <= 1e-10, "commutation residual");
  return d.done();
}

Outcome c3_binomial() {
  Detail d;
  double worst = 0.0;
  for (int N = 1; N <= 30; ++N) {
    const Matrix D = dn(N);
    for (int n = 0; n <= N; ++n)
      for (double rho : {0.1, 0.5, 0.9})
        worst = std::max(worst, std::fabs(binomial_transform_at(D.col(n), N, rho) - std::pow(rho, n)));
  }
  d.note("max |sum_k D_N(k,n) Bin(N,rho)(k) - rho^n|", worst);
  d.require(worst <= 1e-10, "binomial identity");
  return d.done();
}

Outcome c4_pointwise() {
  Detail d;
  std::vector<EvalPoint> grid;
  for (int i = 1; i <= 9; ++i)
    for (long n = 0; n <= 8; ++n) grid.push_back({{0.1 * i}, {n}});
  const DualityFamily mono = DualityFamily::monomial();
  double worst = 0.0;
  auto pair = [&](const ProcessSpec& wf, const ProcessSpec& dual, const DualityFamily& D) {
    const auto r = check_pointwise_duality(ContinuousSide::from_process(wf),
                                           DiscreteSide::from_generator("dual", generator_matrix(dual, 9)),
                                           D, grid);
    worst = std::max(worst, r.max_abs_residual);
  };
  pair(ProcessSpec::wf_neutral(), ProcessSpec::kingman_block(0, 0), mono);
  pair(ProcessSpec::wf_mutation(0.8), ProcessSpec::kingman_block(0.8, 0), mono);
  pair(ProcessSpec::wf_negative_selection(1.3), ProcessSpec::kingman_block(0, 1.3), mono);
  pair(ProcessSpec::wf_positive_selection(1.3), ProcessSpec::kingman_block(0, 1.3),
       DualityFamily::complement_monomial());

  std::vector<EvalPoint> g2;
  for (double x : {-1.0, 0.0, 0.5, 1.0})
    for (double y : {-1.0, 0.0, 0.5, 1.0}) g2.push_back({{x, y}, {}});
  const auto bm = ContinuousSide::one_dimensional("bm", [](double) { return 0.5; }, {});
  const auto mult = ContinuousSide::one_dimensional("y^2/2", {}, {}, [](double y) { return y * y / 2; });
  worst = std::max(worst, check_pointwise_duality(bm, mult, DualityFamily::exponential(), g2).max_abs_residual);
  for (double c2 : {0.5, 0.0}) {
    const double c1 = 1.0, c3 = -0.3;
    const auto L = ContinuousSide::one_dimensional(
        "L", [=](double x) { return c1 * x * x + c2 * x; }, [=](double x) { return c3 * x; });
    const auto Lh = ContinuousSide::one_dimensional(
        "Lhat", [=](double y) { return c1 * y * y; }, [=](double y) { return c2 * y * y + c3 * y; });
    std::vector<EvalPoint> g3;
    for (double x : {0.0, 0.5, 1.0, 1.5})
      for (double y : {0.0, 0.5, 1.0, 1.5}) g3.push_back({{x, y}, {}});
    worst = std::max(worst, check_pointwise_duality(L, Lh, DualityFamily::exponential(), g3).max_abs_residual);
  }
  d.note("max pointwise residual", worst);
  d.require(worst <= 1e-9, "pointwise residual");
  return d.done();
}

Outcome c5_wf_moran() {
  Detail d;
  Experiment e;
  e.kind = ExperimentKind::WfMoran;
  e.x0 = 0.3;
  e.theta = 0.5;
  e.N = 3;
  e.k1 = 2;
  e.cfg.n_paths = 100000;
  e.cfg.dt = 1e-3;
  e.cfg.t = 0.5;
  e.cfg.seed = 20240501;
  const ComparisonReport r = run_experiment(e);
  d.note("mc", r.lhs.mean);
  d.note("exact", r.rhs.mean);
  d.note("z", r.z);
  d.require(r.pass, "outside 3 SE + 5 dt");
  return d.done();
}

Outcome c6_sip_self() {
  Detail d;
  double worst = 0.0;
  for (double m : {1.0, 2.0, 3.0})
    for (int N = 1; N <= 6; ++N) {
      const ProcessSpec sip = ProcessSpec::sip(2, m);
      const GeneratorMatrix K = generator_matrix(sip, N);
      const GeneratorMatrix Kh = generator_matrix_down_closed(sip, N);
      const Matrix D = duality_matrix(DualityFamily::moran_self_dual(N, m / 4.0, 2), K.index, Kh.index);
      worst = std::max(worst, check_generator_duality(K.Q, Kh.Q, D, "sip", "sip").max_abs_residual);
    }
  d.note("max intertwiner residual", worst);
  d.require(worst <= 1e-10, "self-duality residual");
  return d.done();
}

Outcome c7_heterozygosity() {
  Detail d;
  const double x = 0.3;
  double worst = 0.0;
  for (double t : {0.25, 0.5, 1.0}) {
    ExampleParams p;
    p.x = x;
    p.y = 1 - x;
    p.t = t;
    const ExampleRecord rec = reproduce_example(ExampleId::Heterozygosity, p);
    worst = std::max(worst, std::fabs(rec.oracle_value - x * (1 - x) * std::exp(-t)));
    Experiment e;
    e.kind = ExperimentKind::Heterozygosity;
    e.x0 = x;
    e.cfg.n_paths = 100000;
    e.cfg.dt = 1e-3;
    e.cfg.t = t;
    e.cfg.seed = 7;
    const ComparisonReport r = run_experiment(e);
    d.note("z(t=" + std::to_string(t).substr(0, 4) + ")", r.z);
    d.require(r.pass, "MC at t=" + std::to_string(t));
  }
  d.note("oracle vs xy e^{-t}", worst);
  d.require(worst <= 1e-10, "oracle residual");
  return d.done();
}

Outcome c8_examples() {
  Detail d;
  for (int dim : {2, 3, 4}) {
    ExampleParams p;
    p.d = dim;
    p.t = 0.2;
    const ExampleRecord r = reproduce_example(ExampleId::DTypeProduct, p);
    d.note("d=" + std::to_string(dim) + " |oracle-formula|", r.abs_diff);
    d.require(r.abs_diff <= 1e-10, "d-type product formula at d=" + std::to_string(dim));
  }
  ExampleParams p;
  for (ExampleId id : {ExampleId::X2yTwoType, ExampleId::X2ProductDType}) {
    const ExampleRecord r = reproduce_example(id, p);
    d.note(to_string(id) + " diff (report only)", r.abs_diff);
  }
  return d.done();
}

Outcome c9_determinism() {
  Detail d;
  for (const char* kind : {"wf-kingman", "wf-moran", "heterozygosity", "mc-vs-mc"}) {
    nlohmann::json file = {{"experiment", kind}, {"n_paths", 5000}, {"dt", 0.005}};
    std::string outputs[2][2];
    for (int rep = 0; rep < 2; ++rep) {
      for (int b = 0; b < 2; ++b) {
        file["backend"] = b == 0 ? "serial" : "openmp";
        cli::Overrides ov;
        ov.seed = 42;
        const auto cfg = cli::resolve_config("run-mc", file, ov);
        const cli::Report r = cli::run_command("run-mc", cfg);
        // The backend is part of the recorded config; compare the tables.
        cli::Report stripped = r;
        stripped.config.erase("backend");
        outputs[rep][b] = cli::render_csv(stripped) + cli::render_json(stripped);
      }
    }
    d.require(outputs[0][0] == outputs[1][0], std::string(kind) + " serial rerun differs");
    d.require(outputs[0][1] == outputs[1][1], std::string(kind) + " openmp rerun differs");
    d.require(outputs[0][0] == outputs[0][1], std::string(kind) + " serial vs openmp differs");
  }
  d.note("experiments compared", 4);
  return d.done();
}

Outcome c10_properties() {
  Detail d;
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double rows = 0.0, stoch = 0.0, ident = 0.0;
  for (int rep = 0; rep < 40; ++rep) {
    const int dim = 2 + rep % 3;
    const int N = 1 + rep % 5;
    const double m = 4.0 * u(rng);
    const double theta = m * (dim - 1) / 4.0;
    const GeneratorMatrix sip = generator_matrix(ProcessSpec::sip(dim, m), N);
    const GeneratorMatrix moran = generator_matrix(ProcessSpec::moran_multitype(N, dim, theta));
    ident = std::max(ident, max_abs(sip.Q - moran.Q));
    const GeneratorMatrix king = generator_matrix(ProcessSpec::kingman_block(theta, u(rng), 25));
    for (const GeneratorMatrix* g : {&sip, &moran, &king}) {
      rows = std::max(rows, g->Q.rowwise().sum().cwiseAbs().maxCoeff());
      const Vector one = Vector::Ones(g->Q.rows());
      stoch = std::max(stoch, max_abs(matrix_exponential_apply(*g, one, 1.0) - one));
    }
    // Energy process restricted to the simplex against Wright-Fisher.
    std::vector<double> x(static_cast<size_t>(dim));
    double s = 0.0;
    for (double& v : x) s += (v = -std::log(u(rng)));
    for (double& v : x) v /= s;
    const DriftDiffusion b = restrict_to_simplex(drift_diffusion(ProcessSpec::bep(dim, m), x));
    const DriftDiffusion w = drift_diffusion(ProcessSpec::wf_multitype(dim, theta), x);
    ident = std::max({ident, max_abs(b.drift - w.drift), max_abs(b.diffusion - w.diffusion)});
  }
  d.note("row sums", rows);
  d.note("e^{tQ}1 - 1", stoch);
  d.note("identification", ident);
  d.require(rows <= 1e-12, "row sums");
  d.require(stoch <= 1e-10, "stochasticity");
  d.require(ident <= 1e-12, "identification identities");
  return d.done();
}

struct Criterion {
  int id;
  const char* title;
  double budget_s;  // <= 0: no runtime bound
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "Moran-Kingman exact duality", 1.0, c1_moran_kingman},
      {2, "commutation relations", 1.0, c2_commutation},
      {3, "binomial-transform identity", 1.0, c3_binomial},
      {4, "pointwise generator dualities", 1.0, c4_pointwise},
      {5, "WF with mutation vs Moran (MC vs exact)", 120.0, c5_wf_moran},
      {6, "SIP/Moran self-duality", 1.0, c6_sip_self},
      {7, "heterozygosity decay", 120.0, c7_heterozygosity},
      {8, "d-type product decay", 5.0, c8_examples},
      {9, "Monte Carlo determinism", 0.0, c9_determinism},
      {10, "property suite", 10.0, c10_properties},
  };
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--criterion" && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: acceptance [--criterion N]\n");
      return 2;
    }
  }
  bool all_pass = true;
  bool ran = false;
  for (const Criterion& c : all) {
    if (only && c.id != only) continue;
    ran = true;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = c.budget_s <= 0.0 || secs <= c.budget_s;
    const bool pass = o.pass && in_time;
    all_pass = all_pass && pass;
    std::printf("[%s] C%d %s: %s; time %.2fs", pass ? "PASS" : "FAIL", c.id, c.title,
                o.detail.c_str(), secs);
    if (c.budget_s > 0.0) std::printf(" (budget %.0fs%s)", c.budget_s, in_time ? "" : ", EXCEEDED");
    std::printf("\n");
  }
  if (!ran) {
    std::fprintf(stderr, "no criterion %d\n", only);
    return 2;
  }
  return all_pass ? 0 : 1;
}
