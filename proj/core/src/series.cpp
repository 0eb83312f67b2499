#include "m2dt/series.hpp"

#include "json.hpp"

namespace m2dt {

std::string series_to_json(const EvSeries<MotExpr>& s) {
    nlohmann::json j;
    j["trunc"] = s.trunc();
    j["coeffs"] = nlohmann::json::array();
    for (const auto& [n, v] : s.coeffs()) {
        nlohmann::json e;
        e["n"] = {n.n0, n.n1};
        e["value"] = to_string(v);
        j["coeffs"].push_back(e);
    }
    return j.dump();
}

} // namespace m2dt
