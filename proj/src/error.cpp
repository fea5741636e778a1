#include "hypermult/error.hpp"

namespace hypermult {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingValue: return "MissingValue";
    case ErrorCode::NotBinaryTarget: return "NotBinaryTarget";
    case ErrorCode::EmptyFile: return "EmptyFile";
    case ErrorCode::DegenerateSplit: return "DegenerateSplit";
    case ErrorCode::InvalidDataset: return "InvalidDataset";
    case ErrorCode::UnknownModel: return "UnknownModel";
    case ErrorCode::UnknownParam: return "UnknownParam";
    case ErrorCode::SameParam: return "SameParam";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::Empty: return "Empty";
    case ErrorCode::NoComparableEntry: return "NoComparableEntry";
    case ErrorCode::NotMarginal: return "NotMarginal";
    case ErrorCode::NotPairwise: return "NotPairwise";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::NoDefaultRow: return "NoDefaultRow";
    case ErrorCode::DuplicateDefault: return "DuplicateDefault";
    case ErrorCode::LabelDomainError: return "LabelDomainError";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::EmptyRegion: return "EmptyRegion";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace hypermult
