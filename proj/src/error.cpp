#include "pricelab/error.hpp"

namespace pricelab {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::NonPositiveInput: return "NonPositiveInput";
    case Errc::EmptyPool: return "EmptyPool";
    case Errc::OutputExceedsReserve: return "OutputExceedsReserve";
    case Errc::InsufficientInitialLiquidity: return "InsufficientInitialLiquidity";
    case Errc::BurnExceedsSupply: return "BurnExceedsSupply";
    case Errc::InvariantViolation: return "InvariantViolation";
    case Errc::NoSolution: return "NoSolution";
    case Errc::TickOutOfBounds: return "TickOutOfBounds";
    case Errc::NonPositivePrice: return "NonPositivePrice";
    case Errc::RangeMispriced: return "RangeMispriced";
    case Errc::MisalignedBounds: return "MisalignedBounds";
    case Errc::ParseError: return "ParseError";
    case Errc::NonMonotonicTimestamp: return "NonMonotonicTimestamp";
    case Errc::SchemaError: return "SchemaError";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::IntervalMismatch: return "IntervalMismatch";
    case Errc::UnstableConfig: return "UnstableConfig";
    case Errc::SingularMoments: return "SingularMoments";
    case Errc::SampleTooShort: return "SampleTooShort";
    case Errc::LagTooLarge: return "LagTooLarge";
    case Errc::NotPositiveDefinite: return "NotPositiveDefinite";
    case Errc::RankMismatch: return "RankMismatch";
    case Errc::ZeroVector: return "ZeroVector";
    case Errc::DegenerateGeometry: return "DegenerateGeometry";
    case Errc::DegenerateSeries: return "DegenerateSeries";
    case Errc::InvalidGrid: return "InvalidGrid";
    case Errc::ConfigError: return "ConfigError";
    case Errc::IngestError: return "IngestError";
  }
  return "Unknown";
}

bool is_ingest_error(Errc code) noexcept {
  switch (code) {
    case Errc::ParseError:
    case Errc::NonMonotonicTimestamp:
    case Errc::SchemaError:
    case Errc::IngestError:
      return true;
    default:
      return false;
  }
}

}  // namespace pricelab
