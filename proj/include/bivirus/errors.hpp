#ifndef BIVIRUS_ERRORS_HPP
#define BIVIRUS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace bivirus {

/// Base class for everything thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define BIVIRUS_DEFINE_ERROR(Name)                                        \
    class Name : public Error {                                           \
    public:                                                               \
        explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
    }

// graph loading / validation
BIVIRUS_DEFINE_ERROR(ParseError);
BIVIRUS_DEFINE_ERROR(SelfLoopError);
BIVIRUS_DEFINE_ERROR(DuplicateEdgeError);
BIVIRUS_DEFINE_ERROR(DisconnectedError);
BIVIRUS_DEFINE_ERROR(NegativeWeightError);

// spectral computations
BIVIRUS_DEFINE_ERROR(NotConvergedError);
BIVIRUS_DEFINE_ERROR(NotIrreducibleError);
BIVIRUS_DEFINE_ERROR(ZeroScaleError);
BIVIRUS_DEFINE_ERROR(ShiftInsufficientError);
BIVIRUS_DEFINE_ERROR(NotAnEquilibriumError);

// dynamics
BIVIRUS_DEFINE_ERROR(StateOutOfDError);
BIVIRUS_DEFINE_ERROR(DimensionMismatchError);
BIVIRUS_DEFINE_ERROR(InvarianceViolatedError);
BIVIRUS_DEFINE_ERROR(RateAssumptionViolatedError);
BIVIRUS_DEFINE_ERROR(NewtonDivergedError);
BIVIRUS_DEFINE_ERROR(LeftStateSpaceError);

// regime classification
BIVIRUS_DEFINE_ERROR(InternalInconsistencyError);

// configuration / experiment orchestration
BIVIRUS_DEFINE_ERROR(ConfigError);

#undef BIVIRUS_DEFINE_ERROR

} // namespace bivirus

#endif
