#pragma once

#include <stdexcept>
#include <string>

namespace mfsi {

enum class ErrorCode {
    AlphaOutOfRange,
    FieldOutOfRange,
    NonFinite,
    DegeneratePopulation,
    InvalidSpan,
    SingularJacobian,
    NonConvergence,
    NotAnEquilibrium,
    AllDiverged,
    SyntaxError,
    SchemaError,
    UsageError,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string detail)
        : std::runtime_error(make_message(code, detail)),
          code_(code), detail_(std::move(detail)) {}

    ErrorCode code() const { return code_; }
    const std::string& detail() const { return detail_; }

private:
    static std::string make_message(ErrorCode code, const std::string& detail) {
        return std::string(code_name(code)) + ": " + detail;
    }

    static const char* code_name(ErrorCode code) {
        switch (code) {
            case ErrorCode::AlphaOutOfRange: return "AlphaOutOfRange";
            case ErrorCode::FieldOutOfRange: return "FieldOutOfRange";
            case ErrorCode::NonFinite: return "NonFinite";
            case ErrorCode::DegeneratePopulation: return "DegeneratePopulation";
            case ErrorCode::InvalidSpan: return "InvalidSpan";
            case ErrorCode::SingularJacobian: return "SingularJacobian";
            case ErrorCode::NonConvergence: return "NonConvergence";
            case ErrorCode::NotAnEquilibrium: return "NotAnEquilibrium";
            case ErrorCode::AllDiverged: return "AllDiverged";
            case ErrorCode::SyntaxError: return "SyntaxError";
            case ErrorCode::SchemaError: return "SchemaError";
            case ErrorCode::UsageError: return "UsageError";
        }
        return "Error";
    }

    ErrorCode code_;
    std::string detail_;
};

} // namespace mfsi
