#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace ibc {

/// Base class of all library errors.  Carries a stable machine-readable
/// code string; the command line tool prints it verbatim and exits nonzero.
class Error : public std::runtime_error {
  public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(code + ": " + what), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

  private:
    std::string code_;
};

#define IBC_DEFINE_ERROR(Name)                                               \
    class Name : public Error {                                              \
      public:                                                                \
        explicit Name(const std::string& what) : Error(#Name, what) {}       \
    }

IBC_DEFINE_ERROR(OvercriticalCoupling);
IBC_DEFINE_ERROR(CouplingOutsideWindow);
IBC_DEFINE_ERROR(InvalidSector);
IBC_DEFINE_ERROR(GridTooCoarse);
IBC_DEFINE_ERROR(CutoffOutsideGrid);
IBC_DEFINE_ERROR(SingularFit);
IBC_DEFINE_ERROR(QuadratureNotConverged);
IBC_DEFINE_ERROR(ConstraintViolated);
IBC_DEFINE_ERROR(ZeroCoupling);
IBC_DEFINE_ERROR(IllConditionedOverlap);
IBC_DEFINE_ERROR(DegenerateProjection);
IBC_DEFINE_ERROR(SolveFailed);
IBC_DEFINE_ERROR(InvalidConfig);

#undef IBC_DEFINE_ERROR

} // namespace ibc
