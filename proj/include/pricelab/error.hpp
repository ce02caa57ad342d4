#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pricelab {

enum class Errc {
  // amm_v2
  NonPositiveInput,
  EmptyPool,
  OutputExceedsReserve,
  InsufficientInitialLiquidity,
  BurnExceedsSupply,
  InvariantViolation,
  NoSolution,
  // amm_v3
  TickOutOfBounds,
  NonPositivePrice,
  RangeMispriced,
  MisalignedBounds,
  // marketdata
  ParseError,
  NonMonotonicTimestamp,
  SchemaError,
  EmptyInput,
  IntervalMismatch,
  UnstableConfig,
  // vecm / discovery
  SingularMoments,
  SampleTooShort,
  LagTooLarge,
  NotPositiveDefinite,
  RankMismatch,
  ZeroVector,
  DegenerateGeometry,
  // leadlag
  DegenerateSeries,
  InvalidGrid,
  // cli
  ConfigError,
  IngestError,
};

std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Errors raised while reading input files (as opposed to analysing them).
bool is_ingest_error(Errc code) noexcept;

}  // namespace pricelab
