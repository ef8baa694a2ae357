#pragma once

#include "oscbound/oscbound.hpp"

#include <map>
#include <memory>
#include <mutex>

namespace testing_support {

using namespace oscbound;

inline Domain unit_disk() { return Domain::disk({0.0, 0.0}, 1.0); }
inline Domain unit_square() { return Domain::rectangle({0.0, 0.0}, {1.0, 1.0}); }

// Meshes are reused across tests in one binary; generation dominates runtime.
inline std::shared_ptr<const Mesh> disk_mesh(double h) {
    static std::map<double, std::shared_ptr<const Mesh>> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto& m = cache[h];
    if (!m) m = std::make_shared<const Mesh>(mesh_domain(unit_disk(), h));
    return m;
}

inline double rel_err(double got, double want) { return std::abs(got - want) / std::max(std::abs(want), 1e-300); }

} // namespace testing_support
