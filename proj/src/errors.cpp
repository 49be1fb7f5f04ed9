#include "ecz/errors.hpp"

namespace ecz {

const char* errc_name(errc c) {
  switch (c) {
    case errc::usage: return "UsageError";
    case errc::io: return "IoError";
    case errc::missing_column: return "MissingColumn";
    case errc::malformed_number: return "MalformedNumber";
    case errc::duplicate_id: return "DuplicateId";
    case errc::length_mismatch: return "LengthMismatch";
    case errc::domain_violation: return "DomainViolation";
    case errc::nonpositive_consumption: return "NonpositiveConsumption";
    case errc::nonpositive_sum: return "NonpositiveSum";
    case errc::empty_zone: return "EmptyZone";
    case errc::too_few_rows: return "TooFewRows";
    case errc::singular_kernel: return "SingularKernel";
    case errc::degenerate_x: return "DegenerateX";
    case errc::degenerate_sample: return "DegenerateSample";
    case errc::degenerate_mixture: return "Degenerate";
    case errc::index_out_of_range: return "IndexOutOfRange";
    case errc::config_error: return "ConfigError";
    case errc::internal: return "InternalError";
  }
  return "UnknownError";
}

}  // namespace ecz
