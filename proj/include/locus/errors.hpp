#ifndef LOCUS_ERRORS_HPP
#define LOCUS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace locus
{
    // Base for all input/consistency errors raised by the workbench. CLI maps
    // these to exit code 2; anything else escaping to main is exit code 1.
    class Error : public std::runtime_error
    {
    public:
        Error(std::string kind, const std::string & message) :
            std::runtime_error(kind + ": " + message),
            _kind(std::move(kind))
        {
        }

        auto kind() const -> const std::string & { return _kind; }

    private:
        std::string _kind;
    };

    struct SyntaxError : Error
    {
        explicit SyntaxError(const std::string & m) : Error("SyntaxError", m) { }
    };

    struct SortError : Error
    {
        explicit SortError(const std::string & m) : Error("SortError", m) { }
    };

    struct AnchorContainsBoundVar : Error
    {
        explicit AnchorContainsBoundVar(const std::string & m) : Error("AnchorContainsBoundVar", m) { }
    };

    struct MonoidLawViolation : Error
    {
        explicit MonoidLawViolation(const std::string & m) : Error("MonoidLawViolation", m) { }
    };

    struct BoundIncomplete : Error
    {
        explicit BoundIncomplete(const std::string & m) : Error("BoundIncomplete", m) { }
    };

    struct SortMismatch : Error
    {
        explicit SortMismatch(const std::string & m) : Error("SortMismatch", m) { }
    };

    struct MissingAnchor : Error
    {
        explicit MissingAnchor(const std::string & m) : Error("MissingAnchor", m) { }
    };

    struct UnknownSymbol : Error
    {
        explicit UnknownSymbol(const std::string & m) : Error("UnknownSymbol", m) { }
    };

    struct UnboundVariable : Error
    {
        explicit UnboundVariable(const std::string & m) : Error("UnboundVariable", m) { }
    };

    struct ClassMismatch : Error
    {
        explicit ClassMismatch(const std::string & m) : Error("ClassMismatch", m) { }
    };

    struct NotLocal : Error
    {
        explicit NotLocal(const std::string & m) : Error("NotLocal", m) { }
    };

    struct ConstantOutsideComponent : Error
    {
        explicit ConstantOutsideComponent(const std::string & m) : Error("ConstantOutsideComponent", m) { }
    };

    struct ConstantsNotContained : Error
    {
        explicit ConstantsNotContained(const std::string & m) : Error("ConstantsNotContained", m) { }
    };

    struct EmptySort : Error
    {
        explicit EmptySort(const std::string & m) : Error("EmptySort", m) { }
    };

    struct IncoherentSystem : Error
    {
        explicit IncoherentSystem(const std::string & m) : Error("IncoherentSystem", m) { }
    };

    struct NotIsolated : Error
    {
        explicit NotIsolated(const std::string & m) : Error("NotIsolated", m) { }
    };

    struct BadInput : Error
    {
        explicit BadInput(const std::string & m) : Error("BadInput", m) { }
    };

    struct SignatureMismatch : Error
    {
        explicit SignatureMismatch(const std::string & m) : Error("SignatureMismatch", m) { }
    };

    struct ParameterOutOfRange : Error
    {
        explicit ParameterOutOfRange(const std::string & m) : Error("ParameterOutOfRange", m) { }
    };

    struct NoWitness : Error
    {
        explicit NoWitness(const std::string & m) : Error("NoWitness", m) { }
    };

    struct UsageError : Error
    {
        explicit UsageError(const std::string & m) : Error("UsageError", m) { }
    };
}

#endif
