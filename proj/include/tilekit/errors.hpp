#ifndef TILEKIT_ERRORS_HPP
#define TILEKIT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace tilekit {

/** Base of every library error; `code()` is a stable machine-readable tag. */
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(what), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

private:
    std::string code_;
};

#define TILEKIT_ERROR(Name)                                        \
    class Name : public Error {                                    \
    public:                                                        \
        explicit Name(const std::string& what) : Error(#Name, what) {} \
    }

// polyring
TILEKIT_ERROR(NonMonicDivisor);
TILEKIT_ERROR(ZeroConstantTerm);
// cyclotomic
TILEKIT_ERROR(IndexOne);
// spectra
TILEKIT_ERROR(ZeroPolynomial);
TILEKIT_ERROR(CardinalityMismatch);
// phitree
TILEKIT_ERROR(ForeignPrime);
TILEKIT_ERROR(NotATreeNode);
TILEKIT_ERROR(NotAnchored);
// integer_tile
TILEKIT_ERROR(BadPeriod);
TILEKIT_ERROR(IncompleteResidues);
TILEKIT_ERROR(UnequalClassSizes);
TILEKIT_ERROR(NotPrimePowerCardinality);
TILEKIT_ERROR(NotAnIntegerTile);
TILEKIT_ERROR(ChainExtractionFailed);
TILEKIT_ERROR(PreconditionViolated);
TILEKIT_ERROR(SearchExhausted);
// productform
TILEKIT_ERROR(NotAFactorization);
TILEKIT_ERROR(CollisionInSum);
TILEKIT_ERROR(OffsetCollision);
TILEKIT_ERROR(ModulusMismatch);
TILEKIT_ERROR(LayerNotAFactorization);
TILEKIT_ERROR(KernelDivisionFailed);
TILEKIT_ERROR(ParameterOutOfRange);
TILEKIT_ERROR(UnsupportedBase);
TILEKIT_ERROR(ExtractionFailed);
// tilecheck
TILEKIT_ERROR(BudgetExceeded);
TILEKIT_ERROR(NotExpanding);

#undef TILEKIT_ERROR

} // namespace tilekit

#endif
