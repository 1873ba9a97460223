// JSON, CSV and SVG output.  JSON objects keep insertion order so identical
// inputs give byte-identical files.
#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "mdyn/arnoux.hpp"
#include "mdyn/bijectivity.hpp"
#include "mdyn/entropy.hpp"
#include "mdyn/quilting.hpp"
#include "mdyn/region.hpp"

namespace mdyn {

using Json = nlohmann::ordered_json;

Json to_json(const Region& r);
Json to_json(const BijectivityReport& r);
Json to_json(const Certificate& c);
Json to_json(const QuiltReport& q);  // regions summarised by mass and cell count
Json to_json(const EntropyEstimate& e);
Json to_json(const FirstReturnReport& r);

// RFC 4180 field: quoted when it holds a comma, quote or line break.
std::string csv_field(const std::string& s);
std::string csv_row(const std::vector<std::string>& fields);

struct SvgLayer {
  const Region* region = nullptr;
  std::string fill = "#4a7fb5";
  bool hatched = false;
  double opacity = 0.6;
};

// One polygon per cell interval, viewBox = bounding box of all layers padded
// by 5%.  The hyperbola xy = -1 is drawn when some cell meets xy < 0.
std::string render_svg(const std::vector<SvgLayer>& layers, int width = 600);

}  // namespace mdyn
