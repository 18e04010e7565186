#pragma once

#include "blendrp/core_data.hpp"

#include <cstdint>

namespace blendrp {

struct SyntheticOptions {
    std::uint64_t seed = 7;
    int periods = 12;
    int hours = 6;
    ModelMode mode = ModelMode::gep;
    bool seasonal_storage = true; // adds a hydro reservoir with seasonal inflows
    bool greenfield = false;      // investable producers start with zero units
};

/// Small three-node electricity/hydrogen system with seeded profiles: solar,
/// wind and gas at every node, an expensive peaker per node that keeps any
/// investment plan feasible, a battery, an electrolyzer, a hydrogen producer,
/// two lines and optionally a seasonal reservoir.
EnergySystem make_synthetic_system(const SyntheticOptions& options = {});

} // namespace blendrp
