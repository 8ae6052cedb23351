#include "topoboost/error.hpp"

namespace topoboost {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::NonFiniteDistance: return "non_finite_distance";
    case ErrorCode::InvalidFiltration: return "invalid_filtration";
    case ErrorCode::BadChannelCount: return "bad_channel_count";
    case ErrorCode::NonFiniteFeature: return "non_finite_feature";
    case ErrorCode::LabelOutOfRange: return "label_out_of_range";
    case ErrorCode::EmptyDataset: return "empty_dataset";
    case ErrorCode::SingleClassDataset: return "single_class_dataset";
    case ErrorCode::FeatureCountMismatch: return "feature_count_mismatch";
    case ErrorCode::LengthMismatch: return "length_mismatch";
    case ErrorCode::EmptyInput: return "empty_input";
    case ErrorCode::ShapeMismatch: return "shape_mismatch";
    case ErrorCode::NoClasses: return "no_classes";
    case ErrorCode::UnreadableImage: return "unreadable_image";
    case ErrorCode::ParseError: return "parse_error";
    case ErrorCode::IoError: return "io_error";
  }
  return "unknown";
}

}  // namespace topoboost
