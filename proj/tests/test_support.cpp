#include "test_support.hpp"

#include <cstdio>
#include <filesystem>

namespace peellab::testing {

std::string cache_path() { return "peellab_test_law.tsv"; }

const StepLaw& test_law() {
    static const StepLaw law = [] {
        const std::string path = cache_path();
        if (std::filesystem::exists(path)) {
            try {
                return StepLaw::load(path);
            } catch (const std::exception& e) {
                std::fprintf(stderr, "stale law cache (%s), recalibrating\n", e.what());
            }
        }
        StepLaw fresh = calibrate();
        const std::string tmp = path + ".tmp";
        fresh.save(tmp);
        std::filesystem::rename(tmp, path);
        return fresh;
    }();
    return law;
}

const NuSampler& test_nu() {
    static const NuSampler nu(test_law());
    return nu;
}

} // namespace peellab::testing
