#pragma once

#include "coalnet/network.hpp"
#include "coalnet/system.hpp"

#include <string>

namespace coalnet::testing {

inline std::string data_path(const std::string& name) { return std::string(COALNET_DATA_DIR) + "/" + name; }

inline Network data_network(const std::string& name) { return load_network(data_path(name)); }

inline CoalescenceSpec data_spec(const std::string& name) { return load_coalescence_spec(data_path(name)); }

inline RatMat mat(const std::vector<std::vector<int>>& rows) {
    std::vector<RatVec> r;
    for (const auto& row : rows) r.push_back(RatVec(row.begin(), row.end()));
    return RatMat::from_rows(r);
}

inline RatVec vec(const std::vector<int>& v) { return RatVec(v.begin(), v.end()); }

} // namespace coalnet::testing
