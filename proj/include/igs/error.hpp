#pragma once

#include <stdexcept>
#include <string>

namespace igs {

// Root of every error the library throws. Each subclass names one failure
// class from the module contracts so callers can catch selectively.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define IGS_DEFINE_ERROR(Name)                 \
  class Name : public Error {                  \
   public:                                     \
    using Error::Error;                        \
  }

// groups-and-prompts
IGS_DEFINE_ERROR(SlotError);
IGS_DEFINE_ERROR(ConfigError);

// llm-gateway
IGS_DEFINE_ERROR(AuthError);
IGS_DEFINE_ERROR(TransportError);
IGS_DEFINE_ERROR(RateLimitError);
IGS_DEFINE_ERROR(ReplayMissError);
IGS_DEFINE_ERROR(RunAbortedError);

// sentiment-engine
IGS_DEFINE_ERROR(LexiconError);
IGS_DEFINE_ERROR(ExternalAnalyzerError);

// stats-and-aggregation
IGS_DEFINE_ERROR(InsufficientOverlapError);
IGS_DEFINE_ERROR(DegenerateInputError);
IGS_DEFINE_ERROR(LengthMismatchError);
IGS_DEFINE_ERROR(DomainError);

// reference-polls
IGS_DEFINE_ERROR(SchemaError);
IGS_DEFINE_ERROR(RangeError);
IGS_DEFINE_ERROR(UnknownGroupError);

// reporting-cli
IGS_DEFINE_ERROR(MissingTranscriptError);

#undef IGS_DEFINE_ERROR

}  // namespace igs
