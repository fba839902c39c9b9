// Command-line front end for the interface sampler: draws explorer paths on
// a grid approximation of a marked Jordan domain and extracts their chordal
// driving functions.
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "harmex/conformal.hpp"
#include "harmex/explorer.hpp"
#include "harmex/lattice.hpp"
#include "harmex/loewner.hpp"

using namespace harmex;

namespace {

// exit codes: 0 ok, 2 usage/config, 3 runtime failure
constexpr int kOk = 0, kConfig = 2, kRuntime = 3;

int load_domain(const std::string& file, double eps,
                lattice::JordanPolygon& poly, lattice::GridDomain& dom) {
  if (!std::filesystem::exists(file)) {
    std::fprintf(stderr, "error: domain file '%s' does not exist\n",
                 file.c_str());
    return kConfig;
  }
  try {
    poly = lattice::JordanPolygon::from_json_file(file);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: cannot parse domain '%s': %s\n", file.c_str(),
                 e.what());
    return kConfig;
  }
  try {
    dom = lattice::build_domain_approximation(poly, eps);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: grid approximation failed: %s\n", e.what());
    return kRuntime;
  }
  return kOk;
}

struct SampleArgs {
  std::string domain, out;
  double eps = 0.0, tol = 1e-10;
  uint64_t seed = 0;
  bool stepped = false;
};

int run_sample(const SampleArgs& a) {
  lattice::JordanPolygon poly;
  lattice::GridDomain dom;
  if (int rc = load_domain(a.domain, a.eps, poly, dom)) return rc;
  try {
    explorer::ExplorerPath path = a.stepped
                                      ? explorer::sample_path(dom, a.seed, a.tol)
                                      : explorer::sample_path_walk(dom, a.seed);
    explorer::write_path_csv(path, a.out);
    std::printf("wrote %s: %d steps at eps=%g, seed=%llu\n", a.out.c_str(),
                path.steps, a.eps, static_cast<unsigned long long>(a.seed));
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: sampling failed: %s\n", e.what());
    return kRuntime;
  }
  return kOk;
}

struct DriveArgs {
  std::string domain, out, map = "closed";
  double eps = 0.0, t_max = 0.5, tol = 1e-10;
  uint64_t seed = 0;
  bool stepped = false;
};

int run_drive(const DriveArgs& a) {
  lattice::JordanPolygon poly;
  lattice::GridDomain dom;
  if (int rc = load_domain(a.domain, a.eps, poly, dom)) return rc;

  conformal::HalfPlaneMap map;
  if (a.map == "welded") {
    try {
      map = conformal::map_to_halfplane(dom);
    } catch (const std::exception& e) {
      std::fprintf(stderr, "error: boundary welding failed: %s\n", e.what());
      return kRuntime;
    }
  } else {
    double R = 0.0;
    if (!conformal::canonical_halfdisk(poly, &R)) {
      std::fprintf(stderr,
                   "error: --map closed needs the canonical half-disk (marks "
                   "at (R,0)/(-R,0)); use --map welded\n");
      return kConfig;
    }
    map = conformal::halfdisk_closed_form(R);
  }

  try {
    explorer::ExplorerPath path = a.stepped
                                      ? explorer::sample_path(dom, a.seed, a.tol)
                                      : explorer::sample_path_walk(dom, a.seed);
    // the end mark maps to infinity: drop the final point, snap the first
    // onto the real axis
    std::vector<cplx> img(path.points.begin(), path.points.end() - 1);
    img = conformal::map_curve(map, img);
    img[0] = cplx(img[0].real(), 0.0);
    loewner::DrivingFunction drv = loewner::extract_driving(img, a.t_max);
    loewner::write_driving_csv(drv, a.out);
    std::printf("wrote %s: %zu cells, capacity %.6g\n", a.out.c_str(),
                drv.t.size() - 1, drv.t.back());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: driving extraction failed: %s\n", e.what());
    return kRuntime;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"harmonic explorer sampling on rescaled triangular grids"};
  app.require_subcommand(1);

  SampleArgs sa;
  CLI::App* sample = app.add_subcommand(
      "sample", "draw one interface path and write it as CSV");
  sample->add_option("--domain", sa.domain, "marked Jordan domain JSON file")
      ->required();
  sample->add_option("--eps", sa.eps, "mesh size")
      ->required()
      ->check(CLI::PositiveNumber);
  sample->add_option("--seed", sa.seed, "random seed")->required();
  sample->add_option("--out", sa.out, "output CSV path")->required();
  sample->add_option("--tol", sa.tol, "field solver tolerance (with --stepped)")
      ->check(CLI::PositiveNumber);
  sample->add_flag("--stepped", sa.stepped,
                   "decide turns by stepping the full field process instead "
                   "of hitting walks (slow on fine meshes)");

  DriveArgs da;
  CLI::App* drive = app.add_subcommand(
      "drive", "sample a path and extract its chordal driving function");
  drive->add_option("--domain", da.domain, "marked Jordan domain JSON file")
      ->required();
  drive->add_option("--eps", da.eps, "mesh size")
      ->required()
      ->check(CLI::PositiveNumber);
  drive->add_option("--seed", da.seed, "random seed")->required();
  drive->add_option("--out", da.out, "output CSV path")->required();
  drive->add_option("--map", da.map, "half-plane map: closed or welded")
      ->check(CLI::IsMember({"closed", "welded"}));
  drive->add_option("--t-max", da.t_max, "capacity horizon")
      ->check(CLI::PositiveNumber);
  drive->add_option("--tol", da.tol, "field solver tolerance (with --stepped)")
      ->check(CLI::PositiveNumber);
  drive->add_flag("--stepped", da.stepped,
                  "use the full field-stepping sampler");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  if (sample->parsed()) return run_sample(sa);
  return run_drive(da);
}
