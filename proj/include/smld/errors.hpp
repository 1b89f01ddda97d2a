#pragma once

#include <stdexcept>
#include <string>

namespace smld {

// Two families of failure. A ContractError means the input is outside what
// the method can handle (complex spectrum, point outside a basin, ...). An
// InvariantError means the implementation contradicted itself and is always
// a bug signal.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

class ContractError : public Error {
public:
    using Error::Error;
};

class InvariantError : public Error {
public:
    using Error::Error;
};

#define SMLD_DEFINE_ERROR(Name, Base)                                      \
    class Name : public Base {                                             \
    public:                                                                \
        explicit Name(const std::string& what) : Base(#Name, what) {}      \
    };

SMLD_DEFINE_ERROR(DimensionError, ContractError)
SMLD_DEFINE_ERROR(SpectrumError, ContractError)
SMLD_DEFINE_ERROR(ConditioningError, ContractError)
SMLD_DEFINE_ERROR(DimensionTooLarge, ContractError)
SMLD_DEFINE_ERROR(SingularSystem, ContractError)
SMLD_DEFINE_ERROR(InvalidMonomialMap, ContractError)
SMLD_DEFINE_ERROR(NotStrong, ContractError)
SMLD_DEFINE_ERROR(OutsideBasin, ContractError)
SMLD_DEFINE_ERROR(NotInvertible, ContractError)
SMLD_DEFINE_ERROR(NotRational, ContractError)
SMLD_DEFINE_ERROR(NotParabolic, ContractError)
SMLD_DEFINE_ERROR(SideNotAttracting, ContractError)
SMLD_DEFINE_ERROR(NoConvergence, ContractError)
SMLD_DEFINE_ERROR(DomainEscape, ContractError)
SMLD_DEFINE_ERROR(InfinityCrossing, ContractError)
SMLD_DEFINE_ERROR(UnsupportedGerm, ContractError)
SMLD_DEFINE_ERROR(ZeroFunction, ContractError)
SMLD_DEFINE_ERROR(TolTooCoarse, ContractError)
SMLD_DEFINE_ERROR(NotPositiveSpectrum, ContractError)
SMLD_DEFINE_ERROR(InvalidVariety, ContractError)

SMLD_DEFINE_ERROR(InconsistentVerdict, InvariantError)
SMLD_DEFINE_ERROR(TrichotomyViolation, InvariantError)

#undef SMLD_DEFINE_ERROR

} // namespace smld
