#include "ampere/error.hpp"

#include "ampere/parallel.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ampere {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::ParamOutOfRange: return "ParamOutOfRange";
        case ErrorKind::DegeneratePatch: return "DegeneratePatch";
        case ErrorKind::DegenerateIntersection: return "DegenerateIntersection";
        case ErrorKind::NonTransversal: return "NonTransversal";
        case ErrorKind::NoConvergence: return "NoConvergence";
        case ErrorKind::NearSingular: return "NearSingular";
        case ErrorKind::CurvesTooClose: return "CurvesTooClose";
        case ErrorKind::NotUnit: return "NotUnit";
        case ErrorKind::DegenerateBase: return "DegenerateBase";
        case ErrorKind::SceneError: return "SceneError";
        case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

bool is_numerical(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::NoConvergence:
        case ErrorKind::NearSingular:
        case ErrorKind::CurvesTooClose:
        case ErrorKind::DegenerateIntersection:
        case ErrorKind::NonTransversal:
        case ErrorKind::DegeneratePatch:
        case ErrorKind::DegenerateBase:
            return true;
        default:
            return false;
    }
}

void set_thread_count(int threads) {
#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#else
    (void)threads;
#endif
}

int max_thread_count() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace ampere
