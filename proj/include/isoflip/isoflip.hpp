#pragma once

// Everything except the JSON layer (isoflip/io.hpp), which needs nlohmann_json.
#include "isoflip/dense.hpp"
#include "isoflip/graph.hpp"
#include "isoflip/metric.hpp"
#include "isoflip/nodal.hpp"
#include "isoflip/qnodal.hpp"
#include "isoflip/qspectra.hpp"
#include "isoflip/report.hpp"
#include "isoflip/spectra.hpp"
#include "isoflip/theorems.hpp"
#include "isoflip/trees.hpp"
#include "isoflip/union_find.hpp"
