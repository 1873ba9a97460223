// mdyn: command-line front end.  Exit codes: 0 success, 1 checked failure,
// 2 usage error.
#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "mdyn/arnoux.hpp"
#include "mdyn/bijectivity.hpp"
#include "mdyn/domains.hpp"
#include "mdyn/entropy.hpp"
#include "mdyn/matching.hpp"
#include "mdyn/quilting.hpp"
#include "mdyn/serialize.hpp"

using namespace mdyn;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MapArgs {
  std::string family = "nakada";
  std::string alpha = "1";
  int n = 3;
};

void add_map_options(CLI::App* cmd, MapArgs& m) {
  cmd->add_option("--family", m.family, "nakada | cks | cks-accel")
      ->check(CLI::IsMember({"nakada", "cks", "cks-accel"}));
  cmd->add_option("--alpha", m.alpha, "exact parameter, p/q or decimal");
  cmd->add_option("--n", m.n, "triangle group index (cks families)")->check(CLI::Range(3, 64));
}

Scalar parse_scalar(const std::string& s, const std::string& what) {
  try {
    return Scalar::parse(s);
  } catch (const std::exception&) {
    throw UsageError("cannot parse " + what + ": " + s);
  }
}

PiecewiseMap make_map(const MapArgs& m, const std::string& alpha) {
  const Scalar a = parse_scalar(alpha, "alpha");
  try {
    if (m.family == "nakada") return PiecewiseMap::nakada(a);
    if (m.family == "cks") return PiecewiseMap::cks(m.n, a);
    return PiecewiseMap::cks_accelerated(m.n);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  } catch (const std::domain_error& e) {
    throw UsageError(e.what());
  }
}

PiecewiseMap make_map(const MapArgs& m) { return make_map(m, m.alpha); }

// Default planar domain of each family.
struct Domain {
  Region region;
  std::string construction;
  bool converged = true;
};

Domain make_domain(const MapArgs& m, const PiecewiseMap& T) {
  if (m.family == "nakada") {
    auto r = nakada_lambda(T.alpha());
    return {std::move(r.region), "nakada_lambda", r.converged};
  }
  if (m.family == "cks-accel") return {accelerated_gamma(m.n), "accelerated_gamma", true};
  if (T.alpha() == Scalar(1)) return {cks_omega_one(m.n), "cks_omega_one", true};
  auto h = hull_domain(T);
  return {std::move(h.region), "hull_domain", h.converged};
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string g17(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string status_name(MatchStatus s) {
  switch (s) {
    case MatchStatus::matched: return "matched";
    case MatchStatus::terminating: return "terminating";
    default: return "unknown";
  }
}

Side parse_side(const std::string& s) {
  if (s == "left") return Side::left;
  if (s == "right") return Side::right;
  return Side::exact;
}

// Area-uniform points of a region, for sampling commands.
std::pair<double, double> sample_point(const Region& R, std::mt19937_64& rng) {
  std::vector<double> cum;
  std::vector<std::array<double, 4>> boxes;
  double acc = 0;
  for (const auto& c : R.cells())
    for (const auto& iv : c.ys) {
      const double x0 = c.x0.to_double(), x1 = c.x1.to_double(), y0 = iv.lo.to_double(), y1 = iv.hi.to_double();
      acc += (x1 - x0) * (y1 - y0);
      cum.push_back(acc);
      boxes.push_back({x0, x1, y0, y1});
    }
  std::uniform_real_distribution<double> u(0, 1);
  const double t = u(rng) * acc;
  const size_t i = std::min<size_t>(std::upper_bound(cum.begin(), cum.end(), t) - cum.begin(), boxes.size() - 1);
  const auto& b = boxes[i];
  return {b[0] + u(rng) * (b[1] - b[0]), b[2] + u(rng) * (b[3] - b[2])};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Piecewise Moebius maps: orbits, matching, planar domains, quilting, entropy"};
  app.require_subcommand(1);

  MapArgs map;

  // expand
  auto* expand = app.add_subcommand("expand", "digit expansion of x (CSV)");
  std::string ex_x = "0";
  int ex_steps = 10;
  std::string ex_side = "exact";
  add_map_options(expand, map);
  expand->add_option("--x", ex_x, "start point, exact")->required();
  expand->add_option("--steps", ex_steps)->check(CLI::NonNegativeNumber);
  expand->add_option("--side", ex_side, "exact | left | right")->check(CLI::IsMember({"exact", "left", "right"}));

  // match-scan
  auto* scan = app.add_subcommand("match-scan", "endpoint matching over a parameter grid (CSV)");
  std::string sc_from = "1/2", sc_to = "1";
  int sc_count = 11, sc_horizon = 200;
  add_map_options(scan, map);
  scan->add_option("--from", sc_from);
  scan->add_option("--to", sc_to);
  scan->add_option("--count", sc_count)->check(CLI::Range(2, 1000000));
  scan->add_option("--horizon", sc_horizon)->check(CLI::PositiveNumber);

  // domain
  auto* domain = app.add_subcommand("domain", "default planar domain (Region JSON, optional SVG)");
  std::string out_json, out_svg, out_csv;
  add_map_options(domain, map);
  domain->add_option("--json", out_json, "output path, - for stdout");
  domain->add_option("--svg", out_svg);

  // measure
  auto* measure = app.add_subcommand("measure", "mu of a box or of the default domain (CSV)");
  std::vector<std::string> box;
  add_map_options(measure, map);
  measure->add_option("--box", box, "x0 x1 y0 y1, exact")->expected(4);

  // certify
  auto* cert = app.add_subcommand("certify", "ergodicity certificate (JSON); exit 1 if not granted");
  CertifyParams cp;
  add_map_options(cert, map);
  cert->add_option("--json", out_json);
  cert->add_option("--w-min", cp.w_min);
  cert->add_option("--tol", cp.tol);

  // quilt
  auto* qc = app.add_subcommand("quilt", "quilt the default domain of alpha into one for alpha2 (JSON, SVG)");
  std::string alpha2;
  QuiltParams qp;
  add_map_options(qc, map);
  qc->add_option("--alpha2", alpha2)->required();
  qc->add_option("--max-steps", qp.max_steps)->check(CLI::PositiveNumber);
  qc->add_option("--json", out_json);
  qc->add_option("--svg", out_svg);

  // entropy
  auto* ent = app.add_subcommand("entropy", "Rohlin and Birkhoff entropy (CSV)");
  std::string method = "both";
  BirkhoffParams bp;
  bool have_seed = false;
  add_map_options(ent, map);
  ent->add_option("--method", method)->check(CLI::IsMember({"rohlin", "birkhoff", "both"}));
  ent->add_option("--samples", bp.n, "orbit length")->check(CLI::Range(2L, 1'000'000'000'000L));
  ent->add_option("--burn-in", bp.burn_in)->check(CLI::NonNegativeNumber);
  auto* seed_opt = ent->add_option("--seed", bp.seed);

  // flowcheck
  auto* flow = app.add_subcommand("flowcheck", "flow relation and return times (JSON, CSV histogram)");
  long fl_samples = 10000;
  std::uint64_t fl_seed = 0;
  int fl_words = 0, fl_bins = 20;
  add_map_options(flow, map);
  flow->add_option("--samples", fl_samples)->check(CLI::PositiveNumber);
  flow->add_option("--seed", fl_seed)->required();
  flow->add_option("--word-length", fl_words)->check(CLI::Range(0, 4));
  flow->add_option("--bins", fl_bins)->check(CLI::Range(1, 10000));
  flow->add_option("--json", out_json);
  flow->add_option("--csv", out_csv);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  have_seed = seed_opt->count() > 0;

  try {
    if (*expand) {
      const auto T = make_map(map);
      const Scalar x = parse_scalar(ex_x, "x");
      if (!T.contains(x) && !(x == T.hi())) throw UsageError("x outside the interval of " + T.name());
      std::string out = csv_row({"step", "value", "digit", "approx"});
      for (const auto& p : T.orbit(x, ex_steps, parse_side(ex_side)))
        out += csv_row({std::to_string(p.step), p.value.str(), p.digit ? p.digit->label(T.family()) : "inf",
                        g17(p.value.to_double())});
      write_text("", out);
      return 0;
    }

    if (*scan) {
      const Scalar a = parse_scalar(sc_from, "from"), b = parse_scalar(sc_to, "to");
      if (!(a < b)) throw UsageError("need from < to");
      const Family fam = map.family == "nakada" ? Family::nakada : Family::cks;
      if (map.family == "cks-accel") throw UsageError("match-scan needs nakada or cks");
      std::vector<Scalar> alphas;
      for (int k = 0; k < sc_count; ++k) alphas.push_back(a + (b - a) * Scalar(k, sc_count - 1));
      std::string out = csv_row({"alpha", "status", "m", "n", "value", "typical"});
      for (const auto& r : match_scan(fam, map.n, alphas, sc_horizon))
        out += csv_row({r.alpha.str(), status_name(r.status), std::to_string(r.m), std::to_string(r.n),
                        r.status == MatchStatus::matched ? r.value.str() : "", r.typical ? "1" : "0"});
      write_text("", out);
      return 0;
    }

    if (*domain) {
      const auto T = make_map(map);
      const auto D = make_domain(map, T);
      Json j;
      j["map"] = T.name();
      j["construction"] = D.construction;
      j["converged"] = D.converged;
      j["region"] = to_json(D.region);
      write_text(out_json, dump(j));
      if (!out_svg.empty()) write_text(out_svg, render_svg({{&D.region}}));
      return D.converged ? 0 : 1;
    }

    if (*measure) {
      std::string out = csv_row({"quantity", "value"});
      if (!box.empty()) {
        const Scalar x0 = parse_scalar(box[0], "x0"), x1 = parse_scalar(box[1], "x1");
        const Scalar y0 = parse_scalar(box[2], "y0"), y1 = parse_scalar(box[3], "y1");
        if (!(x0 < x1) || !(y0 < y1)) throw UsageError("box needs x0 < x1 and y0 < y1");
        out += csv_row({"mu_box", g17(mu_box(x0, x1, y0, y1))});
      } else {
        const auto T = make_map(map);
        const auto D = make_domain(map, T);
        out += csv_row({"mu_domain", g17(D.region.mass())});
        out += csv_row({"lebesgue_area", g17(D.region.lebesgue_area())});
      }
      write_text("", out);
      return 0;
    }

    if (*cert) {
      const auto T = make_map(map);
      const auto D = make_domain(map, T);
      const auto c = certify(T, D.region, cp);
      Json j;
      j["map"] = T.name();
      j["construction"] = D.construction;
      j["certificate"] = to_json(c);
      write_text(out_json, dump(j));
      return c.granted ? 0 : 1;
    }

    if (*qc) {
      const auto f = make_map(map), g = make_map(map, alpha2);
      const auto D = make_domain(map, f);
      const auto rep = quilt(f, g, D.region, qp);
      Json j;
      j["f"] = f.name();
      j["g"] = g.name();
      j["report"] = to_json(rep);
      write_text(out_json, dump(j));
      if (!out_svg.empty())
        write_text(out_svg, render_svg({{&D.region, "#4a7fb5", false, 0.35},
                                        {&rep.deleted, "#b53a3a", true, 1.0},
                                        {&rep.added, "#3a9a4a", false, 0.8}}));
      const bool ok = rep.established && (!rep.bijectivity || rep.bijectivity->pass);
      return ok ? 0 : 1;
    }

    if (*ent) {
      if (method != "rohlin" && !have_seed) throw UsageError("birkhoff estimates need --seed");
      const auto T = make_map(map);
      std::string out = csv_row({"alpha", "method", "value", "error", "N", "seed"});
      const std::string alpha = map.family == "cks-accel" ? "1" : T.alpha().str();
      if (method != "birkhoff") {
        const auto D = make_domain(map, T);
        const auto r = rohlin_entropy(T, D.region);
        out += csv_row({alpha, r.method, g17(r.value), g17(r.error), std::to_string(r.n), ""});
      }
      if (method != "rohlin") {
        if (bp.n <= bp.burn_in) throw UsageError("--samples must exceed --burn-in");
        const auto b = birkhoff_entropy(T, bp);
        out += csv_row({alpha, b.method, g17(b.value), g17(b.error), std::to_string(b.n), std::to_string(b.seed)});
      }
      write_text("", out);
      return 0;
    }

    if (*flow) {
      if (map.family != "nakada") throw UsageError("flowcheck supports the nakada family");
      const auto T = make_map(map);
      const auto D = make_domain(map, T);
      std::mt19937_64 rng(fl_seed);
      long count = 0, branch_pos = 0, branch_neg = 0;
      double worst = 0, total = 0;
      std::vector<double> taus;
      for (long k = 0; k < fl_samples; ++k) {
        const auto [xd, yd] = sample_point(D.region, rng);
        const Scalar x = Scalar::from_double(xd), y = Scalar::from_double(yd);
        const auto dg = T.digit_at(x);
        if (!dg) continue;
        // transversal coordinates
        const auto s = verify_flow_relation(dg->M, x, y / (Scalar(1) + x * y));
        ++count;
        ++(s.det > 0 ? branch_pos : branch_neg);
        worst = std::max(worst, s.residual);
        total += s.residual;
        taus.push_back(s.t0);  // return time of T at x
      }
      FirstReturnParams fp;
      fp.samples = fl_samples;
      fp.seed = fl_seed;
      fp.word_length = fl_words;
      const auto fr = first_return_diagnostics(T, D.region, nakada_generators(6), fp);

      Json j;
      j["map"] = T.name();
      j["samples"] = count;
      j["seed"] = fl_seed;
      j["residual_max"] = worst;
      j["residual_mean"] = count ? total / count : 0.0;
      j["det_plus"] = branch_pos;
      j["det_minus"] = branch_neg;
      j["tolerance"] = 1e-10;
      j["pass"] = worst < 1e-10 && fr.negative == 0 && fr.competitors.empty();
      j["first_return"] = to_json(fr);
      write_text(out_json, dump(j));

      if (!out_csv.empty()) {
        double hi = 0;
        for (double t : taus) hi = std::max(hi, t);
        if (!(hi > 0)) hi = 1;
        std::vector<long> bins(fl_bins, 0);
        for (double t : taus) ++bins[std::min<long>(fl_bins - 1, static_cast<long>(t / hi * fl_bins))];
        std::string csv = csv_row({"bin_lo", "bin_hi", "count"});
        for (int b = 0; b < fl_bins; ++b)
          csv += csv_row({g17(hi * b / fl_bins), g17(hi * (b + 1) / fl_bins), std::to_string(bins[b])});
        write_text(out_csv, csv);
      }
      return j["pass"].get<bool>() ? 0 : 1;
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
