#include "mdyn/serialize.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

namespace mdyn {
namespace {

// JSON has no infinity; masses that diverge are written as the string "inf".
Json num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return nullptr;
  return v;
}

Json matrix(const Moebius& M) { return Json::array({M.a.str(), M.b.str(), M.c.str(), M.d.str()}); }

Json region_summary(const Region& r) {
  Json j;
  j["cells"] = r.cells().size();
  j["mass"] = num(r.mass());
  return j;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(8) << v;
  return os.str();
}

}  // namespace

Json to_json(const Region& r) {
  Json j;
  j["mass"] = num(r.mass());
  j["exact"] = r.exact();
  Json cells = Json::array();
  for (const auto& c : r.cells()) {
    Json cj;
    cj["x0"] = c.x0.str();
    cj["x1"] = c.x1.str();
    cj["exact"] = c.exact;
    Json ys = Json::array();
    for (const auto& iv : c.ys) ys.push_back(Json::array({iv.lo.str(), iv.hi.str()}));
    cj["ys"] = std::move(ys);
    cells.push_back(std::move(cj));
  }
  j["cells"] = std::move(cells);
  return j;
}

Json to_json(const BijectivityReport& r) {
  Json j;
  j["pass"] = r.pass;
  j["mass"] = num(r.mass);
  j["defect"] = num(r.defect);
  j["threshold"] = num(r.threshold);
  j["overlap"] = num(r.overlap);
  j["uncovered"] = num(r.uncovered);
  j["excess"] = num(r.excess);
  j["unresolved"] = num(r.unresolved);
  j["pieces"] = r.pieces;
  j["tails"] = r.tails;
  j["tails_closed_form"] = r.tails_closed_form;
  return j;
}

Json to_json(const Certificate& c) {
  Json j;
  j["granted"] = c.granted;
  j["failed"] = c.failed;
  j["b"] = num(c.b);
  j["B"] = num(c.B);
  j["hyperbola_gap"] = num(c.hyperbola_gap);
  j["ratio_min"] = num(c.ratio_min);
  j["ratio_max"] = num(c.ratio_max);
  j["rho"] = num(c.rho);
  j["r"] = c.r;
  if (c.full_cylinder) {
    Json fc;
    fc["lo"] = c.full_cylinder->lo.str();
    fc["hi"] = c.full_cylinder->hi.str();
    fc["digit"] = c.full_cylinder->digit.tag;
    j["full_cylinder"] = std::move(fc);
  } else {
    j["full_cylinder"] = nullptr;
  }
  Json orbits = Json::array();
  for (const auto& o : c.orbits) orbits.push_back(Json{{"start", o.start}, {"status", o.status}, {"length", o.length}});
  j["orbits"] = std::move(orbits);
  j["bijectivity"] = to_json(c.bijectivity);
  return j;
}

Json to_json(const QuiltReport& q) {
  Json j;
  j["established"] = q.established;
  j["failure"] = q.failure;
  j["mass_f"] = num(q.mass_f);
  j["mass_g"] = num(q.mass_g);
  j["entropy_factor"] = num(q.entropy_factor);
  j["defect"] = num(q.defect);
  j["deleted_ratio"] = num(q.deleted_ratio);
  j["unresolved"] = num(q.unresolved);
  j["deleted_overlap"] = num(q.deleted_overlap);
  j["deleted_outside"] = num(q.deleted_outside);
  j["added_overlap"] = num(q.added_overlap);
  j["added_collision"] = num(q.added_collision);
  Json delta = Json::array();
  for (const auto& p : q.delta.pieces)
    delta.push_back(Json{{"lo", p.lo.str()}, {"hi", p.hi.str()}, {"f_digit", p.f_digit.tag},
                         {"g_digit", p.g_digit.tag}, {"rel", matrix(p.rel)}});
  j["delta"] = std::move(delta);
  Json tails = Json::array();
  for (const auto& [lo, hi] : q.delta.tails) tails.push_back(Json::array({lo.str(), hi.str()}));
  j["delta_tails"] = std::move(tails);
  Json groups = Json::array();
  for (const auto& g : q.groups)
    groups.push_back(Json{{"kind", g.kind}, {"lo", g.lo.str()}, {"hi", g.hi.str()}, {"d", g.d}, {"a", g.a},
                          {"mass", num(g.mass)}, {"count", g.count}});
  j["groups"] = std::move(groups);
  j["pieces"] = q.pieces.size();
  j["deleted"] = region_summary(q.deleted);
  j["added"] = region_summary(q.added);
  j["omega_g"] = to_json(q.omega_g);
  j["bijectivity"] = q.bijectivity ? to_json(*q.bijectivity) : Json(nullptr);
  return j;
}

Json to_json(const EntropyEstimate& e) {
  Json j;
  j["method"] = e.method;
  j["value"] = num(e.value);
  j["error"] = num(e.error);
  j["n"] = e.n;
  j["seed"] = e.seed;
  j["burn_in"] = e.burn_in;
  j["restarts"] = e.restarts;
  return j;
}

Json to_json(const FirstReturnReport& r) {
  Json j;
  j["samples"] = r.samples;
  j["tau_min"] = num(r.tau_min);
  j["tau_mean"] = num(r.tau_mean);
  j["negative"] = r.negative;
  j["word_length"] = r.word_length;
  j["words"] = r.words;
  Json comp = Json::array();
  for (const auto& c : r.competitors)
    comp.push_back(Json{{"x", c.x}, {"y", c.y}, {"word", matrix(c.N)}, {"time", c.time}, {"return_time", c.return_time}});
  j["competitors"] = std::move(comp);
  return j;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

std::string csv_row(const std::vector<std::string>& fields) {
  std::string out;
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += csv_field(fields[i]);
  }
  return out + "\r\n";
}

std::string render_svg(const std::vector<SvgLayer>& layers, int width) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  bool negative_xy = false;
  for (const auto& l : layers) {
    if (!l.region) continue;
    for (const auto& c : l.region->cells()) {
      const double a = c.x0.to_double(), b = c.x1.to_double();
      x0 = std::min(x0, a);
      x1 = std::max(x1, b);
      for (const auto& iv : c.ys) {
        const double lo = iv.lo.to_double(), hi = iv.hi.to_double();
        y0 = std::min(y0, lo);
        y1 = std::max(y1, hi);
        if ((a < 0 && hi > 0) || (b > 0 && lo < 0)) negative_xy = true;
      }
    }
  }
  if (!(x0 < x1)) x0 = 0, x1 = 1;
  if (!(y0 < y1)) y0 = 0, y1 = 1;
  const double px = 0.05 * (x1 - x0), py = 0.05 * (y1 - y0);
  x0 -= px, x1 += px, y0 -= py, y1 += py;
  const double w = x1 - x0, h = y1 - y0;
  const int height = std::max(1, static_cast<int>(std::lround(width * h / w)));
  const double stroke = 0.002 * std::max(w, h);

  // SVG y grows downwards: plot (x, -y)
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" viewBox=\"" << fmt(x0) << ' ' << fmt(-y1) << ' ' << fmt(w) << ' ' << fmt(h) << "\">\n";
  os << "<defs><pattern id=\"hatch\" patternUnits=\"userSpaceOnUse\" width=\"" << fmt(0.02 * w) << "\" height=\""
     << fmt(0.02 * w) << "\" patternTransform=\"rotate(45)\"><line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"" << fmt(0.02 * w)
     << "\" stroke=\"#b53a3a\" stroke-width=\"" << fmt(stroke * 2) << "\"/></pattern></defs>\n";
  for (const auto& l : layers) {
    if (!l.region) continue;
    const std::string fill = l.hatched ? "url(#hatch)" : l.fill;
    for (const auto& c : l.region->cells()) {
      const double a = c.x0.to_double(), b = c.x1.to_double();
      for (const auto& iv : c.ys) {
        const double lo = iv.lo.to_double(), hi = iv.hi.to_double();
        os << "<polygon points=\"" << fmt(a) << ',' << fmt(-lo) << ' ' << fmt(b) << ',' << fmt(-lo) << ' ' << fmt(b)
           << ',' << fmt(-hi) << ' ' << fmt(a) << ',' << fmt(-hi) << "\" fill=\"" << fill << "\" fill-opacity=\""
           << fmt(l.opacity) << "\" stroke=\"#222\" stroke-width=\"" << fmt(stroke / 2) << "\"/>\n";
      }
    }
  }
  if (negative_xy) {
    // y = -1/x on both branches; the viewBox clips it, possibly to nothing
    const double ymax = 10 * (std::abs(y0) + std::abs(y1) + 1);
    for (int branch : {-1, 1}) {
      std::ostringstream pts;
      int count = 0;
      for (int k = 0; k <= 400; ++k) {
        const double x = x0 + w * k / 400;
        if (x * branch <= 0) continue;
        const double y = -1 / x;
        if (std::abs(y) > ymax) continue;
        pts << fmt(x) << ',' << fmt(-y) << ' ';
        ++count;
      }
      if (count > 1)
        os << "<polyline class=\"hyperbola\" points=\"" << pts.str() << "\" fill=\"none\" stroke=\"#888\" stroke-dasharray=\""
           << fmt(stroke * 4) << "\" stroke-width=\"" << fmt(stroke) << "\"/>\n";
    }
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace mdyn
