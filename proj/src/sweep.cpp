#include "modmirror/sweep.hpp"

#include <cstdlib>
#include <string>

namespace modmirror {

int default_workers() {
    if (const char* env = std::getenv("MODMIRROR_WORKERS")) {
        try {
            const int k = std::stoi(env);
            if (k >= 1)
                return k;
        } catch (...) {
            // fall through to the OpenMP default
        }
    }
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

} // namespace modmirror
