#include "ccm/error.hpp"

namespace ccm {

const char* kind_name(ErrorKind k) {
    switch (k) {
        case ErrorKind::UnknownNode: return "UnknownNode";
        case ErrorKind::OverlappingSets: return "OverlappingSets";
        case ErrorKind::TooManyNodes: return "TooManyNodes";
        case ErrorKind::InvalidGraph: return "InvalidGraph";
        case ErrorKind::UnknownVariable: return "UnknownVariable";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::InvalidModel: return "InvalidModel";
        case ErrorKind::Inconsistent: return "Inconsistent";
        case ErrorKind::NonUnique: return "NonUnique";
        case ErrorKind::ZeroPostSelection: return "ZeroPostSelection";
        case ErrorKind::NotAcyclic: return "NotAcyclic";
        case ErrorKind::NotClassical: return "NotClassical";
        case ErrorKind::PreconditionFailed: return "PreconditionFailed";
        case ErrorKind::MalformedConditional: return "MalformedConditional";
        case ErrorKind::NotAnAffectsRelation: return "NotAnAffectsRelation";
        case ErrorKind::SearchBudgetExceeded: return "SearchBudgetExceeded";
        case ErrorKind::NotCyclic: return "NotCyclic";
        case ErrorKind::UnknownElement: return "UnknownElement";
        case ErrorKind::MissingLocation: return "MissingLocation";
        case ErrorKind::InconclusiveGeometry: return "InconclusiveGeometry";
        case ErrorKind::CopyOutsideAccessible: return "CopyOutsideAccessible";
        case ErrorKind::UnknownEntry: return "UnknownEntry";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::NonRationalProbability: return "NonRationalProbability";
        case ErrorKind::InvalidInput: return "InvalidInput";
    }
    return "Error";
}

Error::Error(ErrorKind kind, const std::string& msg)
    : std::runtime_error(std::string(kind_name(kind)) + ": " + msg), kind_(kind) {}

Error::Error(ErrorKind kind, const std::string& msg, std::map<std::string, int> assignment)
    : std::runtime_error(std::string(kind_name(kind)) + ": " + msg),
      kind_(kind),
      assignment_(std::move(assignment)) {}

}  // namespace ccm
