// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 iff all pass.

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tweezersense/cli/commands.hpp"
#include "tweezersense/cli/output.hpp"
#include "tweezersense/detection.hpp"
#include "tweezersense/oracle.hpp"

using namespace tweezersense;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

std::string fmt(double v) { return cli::format_double(v); }

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  if (!pass) ++failures;
  std::printf("%s  %2d  %-32s %s\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<double> linspace(double a, double b, int n) {
  cli::SweepSpec s{cli::SweepQuantity::Displacement, a, b, n};
  return s.values();
}

TweezerConfig at_na(double na) {
  TweezerConfig cfg;
  cfg.numerical_aperture = na;
  return cfg;
}

TransverseField random_unit_field(const Grid2D& g, Plane plane, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  TransverseField f(g, plane);
  for (auto& v : f.ex()) v = {n(rng), n(rng)};
  for (auto& v : f.ey()) v = {n(rng), n(rng)};
  return normalize(f);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Worst relative disagreement between the library inner product and the
// refinement-2 quadrature over a family of overlaps. Exact zeros of the
// family (below 1e-6 of its largest member) have no relative error and are
// counted separately.
struct OracleTally {
  double worst = 0.0;
  int compared = 0;
  int zeros = 0;

  void add_family(const std::vector<std::pair<const TransverseField*, const TransverseField*>>& pairs) {
    std::vector<Complex> lib;
    double peak = 0.0;
    for (const auto& [a, b] : pairs) {
      lib.push_back(inner_product(*a, *b));
      peak = std::max(peak, std::abs(lib.back()));
    }
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      if (std::abs(lib[k]) <= 1e-6 * peak) {
        ++zeros;
        continue;
      }
      const Complex q = oracle::quadrature_overlap(*pairs[k].first, *pairs[k].second, 2);
      worst = std::max(worst, std::abs(q - lib[k]) / std::abs(lib[k]));
      ++compared;
    }
  }
};

}  // namespace

int main() {
  const TweezerConfig ref;
  const Grid2D grid = objective_grid(ref);
  const auto t_all = Clock::now();

  // 1
  {
    const auto t0 = Clock::now();
    const double waist = grid.extent_x() / 16.0;
    std::vector<TransverseField> modes;
    for (auto pol : {Polarization::X, Polarization::Y}) {
      for (int order = 0; order <= 4; ++order) {
        for (int m = 0; m <= order; ++m) modes.push_back(hermite_gauss_mode(grid, m, order - m, waist, pol));
      }
    }
    double worst = 0.0;
    for (std::size_t a = 0; a < modes.size(); ++a) {
      for (std::size_t b = a; b < modes.size(); ++b) {
        worst = std::max(worst, std::abs(inner_product(modes[a], modes[b]) - (a == b ? 1.0 : 0.0)));
      }
    }
    const double t = seconds_since(t0);
    report(1, "mode orthonormality", worst < 1e-6 && t < 5.0,
           "max|<u,u'>-delta| = " + sci(worst) + " (< 1e-6), " + std::to_string(modes.size()) +
               " modes on 512^2, " + fmt(std::round(t * 100) / 100) + " s (< 5 s)");
  }

  // 2
  {
    std::mt19937_64 rng(20);
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
      const auto a = random_unit_field(grid, Plane::Objective, rng);
      const auto b = random_unit_field(grid, Plane::Objective, rng) + a * Complex{0.5, 0.25};
      const Complex direct = inner_product(a, b);
      worst = std::max(worst, std::abs(inner_product(fourier_image(a), fourier_image(b)) - direct) /
                                  std::abs(direct));
    }
    report(2, "Parseval / unitarity", worst < 1e-10,
           "max relative drift = " + sci(worst) + " over 20 random pairs (< 1e-10)");
  }

  // 3
  {
    const auto cfg = at_na(0.2);
    const double loss = aperture_loss(cfg, objective_grid(cfg));
    report(3, "trap clipping at NA 0.2", loss >= 5e-6 && loss <= 30e-6,
           "loss = " + fmt(std::round(loss * 1e8) / 100) + " ppm (in [5, 30] ppm)");
  }

  // 4
  {
    const auto scat = scattered_field_at_objective(ref, Displacement{0.0}, grid);
    const double ratio = inner_product(scat, scat).real() / std::pow(ref.trap_amplitude(), 2);
    report(4, "scattered / trap flux", ratio >= 1e-5 && ratio <= 1e-3,
           "ratio = " + sci(ratio) + " (in [1e-5, 1e-3])");
  }

  const SensingModel model(ref, grid);
  const auto ps = linspace(-2e-6, 2e-6, 41);

  // 5
  {
    const auto t0 = Clock::now();
    const SweepResult sweep = snr_sweep(ref, ps, 0.0, grid);
    const double t = seconds_since(t0);
    double sd = 0.0, sh = 0.0;
    for (std::size_t i = 0; i < ps.size(); ++i) {
      sd = std::max(sd, std::abs(sweep.records[i].snr_sd + sweep.records[40 - i].snr_sd));
      sh = std::max(sh, std::abs(sweep.records[i].snr_sh + sweep.records[40 - i].snr_sh));
    }
    sd /= sweep.max_abs_sd();
    sh /= sweep.max_abs_sh();
    report(5, "SNR odd symmetry", sd < 1e-6 && sh < 1e-6 && t < 60.0,
           "|SNR(p)+SNR(-p)|/max: SD " + sci(sd) + ", SH " + sci(sh) + " (< 1e-6), 41 points in " +
               fmt(std::round(t * 10) / 10) + " s (< 60 s)");
  }

  // 6
  {
    const auto fine = linspace(0.0, 1e-6, 101);
    std::string detail;
    bool pass = true;
    for (auto pol : {Polarization::X, Polarization::Y}) {
      TweezerConfig cfg = ref;
      cfg.polarization = pol;
      const auto r = snr_sweep(cfg, fine, 0.0, grid);
      const auto best = std::max_element(r.records.begin(), r.records.end(), [](auto& a, auto& b) {
        return std::abs(a.snr_sh) < std::abs(b.snr_sh);
      });
      const bool ok = std::abs(best->p - 0.4e-6) <= 0.1e-6 + 1e-15;
      if (pol == Polarization::X) pass = ok;  // reference polarization
      detail += std::string(pol == Polarization::X ? "x-pol" : ", y-pol") + " peak |p| = " +
                fmt(std::round(best->p * 1e8) / 100) + " um";
    }
    report(6, "homodyne SNR peak location", pass, detail + " (x-pol in 0.4 +- 0.1 um)");
  }

  // 7
  {
    const auto fine = linspace(-2e-6, 2e-6, 401);
    const auto r = snr_sweep(ref, fine, 0.4e-6, grid);
    double best_slope = 0.0, at = 0.0;
    for (std::size_t i = 1; i + 1 < fine.size(); ++i) {
      const double slope = (r.records[i + 1].snr_sh - r.records[i - 1].snr_sh) / (fine[i + 1] - fine[i - 1]);
      if (std::abs(slope) > best_slope) {
        best_slope = std::abs(slope);
        at = fine[i];
      }
    }
    report(7, "LO re-optimization at 0.4 um", std::abs(at - 0.4e-6) <= 0.1e-6 + 1e-15,
           "max |dSNR_SH/dp| at p = " + fmt(std::round(at * 1e8) / 100) + " um (0.4 +- 0.1 um)");
  }

  // 8
  const std::vector<double> coarse_na = {0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99};
  {
    const auto r = sensitivity_sweep(ref, coarse_na, GridSpec{});
    bool ordered = true;
    double tightest = INFINITY;
    for (const auto& s : r) {
      ordered = ordered && s.s_sh <= s.s_sd;
      tightest = std::min(tightest, s.ratio());
    }
    std::mt19937_64 rng(8);
    double worst_random = INFINITY;
    const SensitivityResult s = model.sensitivity();
    for (int k = 0; k < 10; ++k) {
      const auto mode = random_unit_field(model.trap_image().grid(), Plane::Image, rng);
      worst_random = std::min(worst_random, model.sensitivity_for_mode(mode) / s.s_sh);
    }
    report(8, "homodyne optimality", ordered && worst_random >= 1.0,
           "min s_sd/s_sh over 9 NAs = " + fmt(std::round(tightest * 1000) / 1000) +
               " (>= 1); min s_random/s_sh over 10 modes = " + sci(worst_random) + " (>= 1)");
  }

  // 9
  std::vector<SensitivityResult> na_sweep;
  {
    const auto nas = cli::default_na_sweep().values();
    na_sweep = sensitivity_sweep(ref, nas, GridSpec{});
    double best = 0.0, best_na = 0.0;
    bool monotone = true;
    for (std::size_t i = 0; i < na_sweep.size(); ++i) {
      if (na_sweep[i].ratio() > best) {
        best = na_sweep[i].ratio();
        best_na = na_sweep[i].na;
      }
      if (i > 0) {
        monotone = monotone && na_sweep[i].s_sd < na_sweep[i - 1].s_sd &&
                   na_sweep[i].s_sh < na_sweep[i - 1].s_sh;
      }
    }
    report(9, "order-of-magnitude improvement", best >= 5.0 && best <= 20.0 && monotone,
           "max s_sd/s_sh = " + fmt(std::round(best * 100) / 100) + " at NA " + fmt(best_na) +
               " (in [5, 20]); both curves strictly decreasing over " +
               std::to_string(na_sweep.size()) + " NAs: " + (monotone ? "yes" : "no"));
  }

  // 10
  {
    OracleTally tally;
    const LOMode lo0 = model.optimal_lo(0.0);
    const LOMode lo4 = model.optimal_lo(0.4e-6);
    std::vector<TransverseField> scat;
    scat.reserve(ps.size());
    for (double p : ps) scat.push_back(model.scattered_image(p));
    for (const LOMode* lo : {&lo0, &lo4}) {
      std::vector<std::pair<const TransverseField*, const TransverseField*>> sd, sh;
      for (const auto& s : scat) {
        sd.push_back({&model.flipped(), &s});
        sh.push_back({&lo->field, &s});
      }
      sh.push_back({&lo->field, &model.trap_image()});
      if (lo == &lo0) tally.add_family(sd);
      tally.add_family(sh);
    }
    for (double na : {0.2, 0.6, 0.99}) {
      const auto cfg = at_na(na);
      const SensingModel m(cfg, objective_grid(cfg));
      const auto d = m.scattered_derivative(0.0);
      tally.add_family({{&m.flipped(), &d}, {&d, &d}});
    }

    const double w = grid.extent_x() / 16.0;
    const double step = 0.01 * w;
    const auto u = hermite_gauss_mode(grid, 0, 0, w, Polarization::X);
    const auto shifted = hermite_gauss_mode(grid, 0, 0, w, Polarization::X, Plane::Objective, step);
    const double slope = inner_product(flipped_mode(u), shifted).real() / step;
    const double slope_err = std::abs(slope / oracle::analytic_flipped_overlap_slope(w) - 1.0);

    report(10, "oracle equivalence", tally.worst < 1e-3 && slope_err < 5e-3,
           "worst |quad2 - lib|/|lib| = " + sci(tally.worst) + " over " + std::to_string(tally.compared) +
               " overlaps (< 1e-3; " + std::to_string(tally.zeros) +
               " exact zeros skipped); flipped slope error = " + sci(slope_err) + " (< 5e-3)");
  }

  // 11
  {
    double worst = 0.0;
    for (double na : coarse_na) {
      const auto cfg = at_na(na);
      const Grid2D g = objective_grid(cfg);
      const auto base = SensingModel(cfg, g).sensitivity();
      const auto half = SensingModel(cfg, g, DetectionOptions{cfg.trap_waist / 2000}).sensitivity();
      worst = std::max({worst, std::abs(half.s_sd / base.s_sd - 1.0), std::abs(half.s_sh / base.s_sh - 1.0)});
    }
    report(11, "finite-difference robustness", worst < 5e-3,
           "max relative change on halving h = " + sci(worst) + " over 9 NAs x 2 schemes (< 5e-3)");
  }

  // 12
  {
    const fs::path root = fs::temp_directory_path() / ("tweezersense_acceptance_" + std::to_string(::getpid()));
    const cli::RunConfig cfg = cli::parse_run_config_text("{}");
    std::vector<std::string> outputs;
    for (unsigned threads : {1u, 2u, 4u, 4u}) {
      cli::CommandOptions opts;
      opts.threads = threads;
      opts.out_dir = root / std::to_string(outputs.size());
      outputs.push_back(slurp(cli::cmd_snr_sweep(cfg, opts)));
    }
    fs::remove_all(root);
    const bool same = std::all_of(outputs.begin(), outputs.end(),
                                  [&](const std::string& s) { return s == outputs.front(); });
    report(12, "determinism", same && !outputs.front().empty(),
           "snr_sweep.csv byte-identical for --threads 1, 2, 4, 4: " + std::string(same ? "yes" : "no"));
  }

  std::printf("%s: %d of 12 criteria failed (%.0f s)\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures,
              seconds_since(t_all));
  return failures == 0 ? 0 : 1;
}
