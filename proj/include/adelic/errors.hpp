#pragma once

#include <stdexcept>
#include <string>

namespace adelic {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define ADELIC_ERROR(Name)                         \
    struct Name : Error {                          \
        using Error::Error;                        \
        Name() : Error(#Name) {}                   \
    }

ADELIC_ERROR(NonMonic);
ADELIC_ERROR(DivisionByZero);
ADELIC_ERROR(FieldMismatch);
ADELIC_ERROR(ZeroInput);
ADELIC_ERROR(IndexDivisor);
ADELIC_ERROR(PrecisionLoss);
ADELIC_ERROR(OutsideConvergenceDomain);
ADELIC_ERROR(ZeroSequence);
ADELIC_ERROR(BOutOfRange);
ADELIC_ERROR(RootOfUnityInput);
ADELIC_ERROR(NonIntegerDegree);
ADELIC_ERROR(NonIntegerFixedPointCount);
ADELIC_ERROR(BudgetExceeded);
ADELIC_ERROR(AllCoefficientsIndistinguishableFromZero);
ADELIC_ERROR(NotNormalized);
ADELIC_ERROR(UnsupportedExactForm);
ADELIC_ERROR(InconsistentOverlap);

#undef ADELIC_ERROR

struct ReduciblePolynomial : Error {
    std::string factor;  // serialized witness factor
    explicit ReduciblePolynomial(std::string witness)
        : Error("ReduciblePolynomial: factor " + witness), factor(std::move(witness)) {}
};

struct StabilityError : Error {
    std::string witness;  // place / section class description
    explicit StabilityError(std::string w)
        : Error("StabilityError: " + w), witness(std::move(w)) {}
};

}  // namespace adelic
