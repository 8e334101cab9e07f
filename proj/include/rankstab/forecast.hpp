#pragma once

#include <map>
#include <string>
#include <vector>

namespace rankstab {

/// Bottom-level forecasts of one method over the test horizon. Aggregate
/// forecasts are never stored; they are derived by summation.
struct ForecastSet {
    std::string method_id;
    std::map<std::string, std::vector<double>> forecasts;
};

} // namespace rankstab
