#pragma once

#include <stdexcept>
#include <string>

namespace tncarve {

// Shared error taxonomy.  Library code throws; the CLI maps exception types
// to process exit codes (see tools/tncarve.cpp).

#define TNCARVE_DEFINE_ERROR(Name)                        \
  struct Name : std::runtime_error {                     \
    explicit Name(const std::string& what)               \
        : std::runtime_error(#Name ": " + what) {}       \
  }

TNCARVE_DEFINE_ERROR(EmptyGraph);
TNCARVE_DEFINE_ERROR(OverlappingSets);
TNCARVE_DEFINE_ERROR(BadPartition);
TNCARVE_DEFINE_ERROR(NoSuchVertex);
TNCARVE_DEFINE_ERROR(NoSuchEdge);
TNCARVE_DEFINE_ERROR(NotPlanar);
TNCARVE_DEFINE_ERROR(NotPlanarEmbedding);
TNCARVE_DEFINE_ERROR(BadShape);
TNCARVE_DEFINE_ERROR(BadLeafMap);
TNCARVE_DEFINE_ERROR(NoSuchArc);
TNCARVE_DEFINE_ERROR(InvalidDecomposition);
TNCARVE_DEFINE_ERROR(TooLarge);
TNCARVE_DEFINE_ERROR(DimensionMismatch);
TNCARVE_DEFINE_ERROR(MalformedSequence);
TNCARVE_DEFINE_ERROR(NoEligibleEdge);
TNCARVE_DEFINE_ERROR(RejectionBudgetExhausted);
TNCARVE_DEFINE_ERROR(MalformedInput);
TNCARVE_DEFINE_ERROR(IoError);
TNCARVE_DEFINE_ERROR(InternalInvariant);

#undef TNCARVE_DEFINE_ERROR

}  // namespace tncarve
