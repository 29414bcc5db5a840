#pragma once

#include <map>
#include <stdexcept>
#include <string>

namespace ccm {

enum class ErrorKind {
    UnknownNode,
    OverlappingSets,
    TooManyNodes,
    InvalidGraph,
    UnknownVariable,
    DimensionMismatch,
    InvalidModel,
    Inconsistent,
    NonUnique,
    ZeroPostSelection,
    NotAcyclic,
    NotClassical,
    PreconditionFailed,
    MalformedConditional,
    NotAnAffectsRelation,
    SearchBudgetExceeded,
    NotCyclic,
    UnknownElement,
    MissingLocation,
    InconclusiveGeometry,
    CopyOutsideAccessible,
    UnknownEntry,
    ParseError,
    NonRationalProbability,
    InvalidInput,
};

const char* kind_name(ErrorKind k);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& msg);
    Error(ErrorKind kind, const std::string& msg, std::map<std::string, int> assignment);

    ErrorKind kind() const { return kind_; }
    // Set for Inconsistent / NonUnique: the exogenous (and outcome) assignment that failed.
    const std::map<std::string, int>& assignment() const { return assignment_; }

private:
    ErrorKind kind_;
    std::map<std::string, int> assignment_;
};

}  // namespace ccm
