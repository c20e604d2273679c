#pragma once

// Hand-built expectation for data/fixture20.csv (clip [0,1]).

#include <string>
#include <vector>

#include "aapack/aap.hpp"

namespace aapack::testing {

inline Pack fixture_pack(std::string label, const std::vector<std::vector<double>>& preds,
                         std::vector<double> outcomes) {
    Pack p;
    p.label = std::move(label);
    p.predictions = Matrix(0, 3);
    for (const auto& r : preds) p.predictions.append_row(r);
    p.outcomes = std::move(outcomes);
    return p;
}

/// Months 2006-01 (5 rows), 2006-02 (3), 2006-04 (7), 2007-01 (5), file rows
/// interleaved. Row 4's second expert (1.2) and row 10's target (-0.1) are
/// clipped.
inline PackStream fixture20_expected() {
    PackStream s;
    s.experts = 3;
    s.packs = {
        fixture_pack("2006-01",
                     {{0.4, 0.6, 0.5}, {0.5, 0.7, 0.52}, {0.44, 0.46, 0.40}, {0.58, 0.65, 0.61}, {0.5, 0.55, 0.53}},
                     {0.50, 0.55, 0.45, 0.60, 0.52}),
        fixture_pack("2006-02", {{0.2, 0.35, 0.3}, {0.3, 0.4, 0.33}, {0.42, 0.38, 0.41}}, {0.30, 0.35, 0.40}),
        fixture_pack("2006-04",
                     {{0.15, 0.05, 0.12},
                      {0.25, 0.18, 0.22},
                      {0.05, 0.0, 0.01},
                      {0.31, 0.29, 0.28},
                      {0.24, 0.26, 0.27},
                      {0.16, 0.14, 0.13},
                      {0.33, 0.36, 0.34}},
                     {0.10, 0.20, 0.0, 0.30, 0.25, 0.15, 0.35}),
        fixture_pack("2007-01",
                     {{0.85, 1.0, 0.9}, {0.82, 0.78, 0.81}, {0.84, 0.86, 0.83}, {0.9, 0.97, 0.96}, {0.72, 0.69, 0.71}},
                     {0.90, 0.80, 0.85, 0.95, 0.70}),
    };
    return s;
}

}  // namespace aapack::testing
