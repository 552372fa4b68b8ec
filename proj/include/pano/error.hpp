#pragma once

#include <stdexcept>
#include <string>

namespace pano {

// Error classes surfaced by the pipeline. Each class maps to a distinct
// process exit code in the CLI, so the numeric values are part of the
// external contract and must stay stable.
enum class ErrorCode : int {
    None = 0,
    Usage = 1,
    FileNotFound = 2,
    UnsupportedFormat = 3,
    CorruptImage = 4,
    DimensionMismatch = 5,
    ImageTooSmall = 6,
    EmptyResponse = 7,
    ZeroGradientNeighborhood = 8,
    TooCloseToBorder = 9,
    ZeroDescriptor = 10,
    InsufficientMatches = 11,
    NoConsensus = 12,
    DegenerateTransform = 13,
    PipelineFailure = 14,
    MasterTooSmall = 15,
    ConfigError = 16,
    IoError = 17,
};

inline const char* error_code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::None: return "None";
        case ErrorCode::Usage: return "Usage";
        case ErrorCode::FileNotFound: return "FileNotFound";
        case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
        case ErrorCode::CorruptImage: return "CorruptImage";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::ImageTooSmall: return "ImageTooSmall";
        case ErrorCode::EmptyResponse: return "EmptyResponse";
        case ErrorCode::ZeroGradientNeighborhood: return "ZeroGradientNeighborhood";
        case ErrorCode::TooCloseToBorder: return "TooCloseToBorder";
        case ErrorCode::ZeroDescriptor: return "ZeroDescriptor";
        case ErrorCode::InsufficientMatches: return "InsufficientMatches";
        case ErrorCode::NoConsensus: return "NoConsensus";
        case ErrorCode::DegenerateTransform: return "DegenerateTransform";
        case ErrorCode::PipelineFailure: return "PipelineFailure";
        case ErrorCode::MasterTooSmall: return "MasterTooSmall";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
          code_(code) {}

    ErrorCode code() const noexcept { return code_; }
    int exit_code() const noexcept { return static_cast<int>(code_); }

private:
    ErrorCode code_;
};

}  // namespace pano
