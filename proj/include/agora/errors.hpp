#pragma once

#include <stdexcept>
#include <string>

namespace agora {

// Base class for every error this library throws. Subtypes mirror the
// error names used in the per-operation contracts so callers can catch
// precisely what they care about.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define AGORA_DEFINE_ERROR(NAME)                                      \
  class NAME : public Error {                                         \
   public:                                                            \
    explicit NAME(const std::string& what = #NAME) : Error(what) {}   \
  }

// core-model
AGORA_DEFINE_ERROR(UnsupportedGroupSize);
AGORA_DEFINE_ERROR(InvalidConversation);

// agent-gateway
AGORA_DEFINE_ERROR(EmptyReply);
AGORA_DEFINE_ERROR(AuthError);
AGORA_DEFINE_ERROR(RateLimited);
AGORA_DEFINE_ERROR(Timeout);

class ProviderError : public Error {
 public:
  ProviderError(int status, const std::string& body)
      : Error("provider error: status " + std::to_string(status) + ": " + body),
        status_(status),
        body_(body) {}
  explicit ProviderError(const std::string& what) : Error(what), status_(0) {}
  int status() const { return status_; }
  const std::string& body() const { return body_; }

 private:
  int status_;
  std::string body_;
};

// sim-engine
AGORA_DEFINE_ERROR(EmptyPool);
AGORA_DEFINE_ERROR(MissingDebateFile);

// corpus-io
AGORA_DEFINE_ERROR(ParseError);
AGORA_DEFINE_ERROR(ScoreOutOfRange);
AGORA_DEFINE_ERROR(IoError);
AGORA_DEFINE_ERROR(SchemaVersionMismatch);

// semantic-metrics
AGORA_DEFINE_ERROR(EmptyText);
AGORA_DEFINE_ERROR(ZeroVector);
AGORA_DEFINE_ERROR(DimensionMismatch);
AGORA_DEFINE_ERROR(TooShort);
AGORA_DEFINE_ERROR(EmptyInput);

// topic-metrics
AGORA_DEFINE_ERROR(KeywordAbsent);

// lexical-metrics
AGORA_DEFINE_ERROR(EmptyLexicon);

// role-census
AGORA_DEFINE_ERROR(NoCodeFound);
AGORA_DEFINE_ERROR(AllUnresolved);

// stats-report
AGORA_DEFINE_ERROR(EmptySample);
AGORA_DEFINE_ERROR(DegenerateVariance);
AGORA_DEFINE_ERROR(TooFew);
AGORA_DEFINE_ERROR(UnknownFigure);

// cli / config
AGORA_DEFINE_ERROR(ConfigError);
AGORA_DEFINE_ERROR(CredentialsError);

#undef AGORA_DEFINE_ERROR

}  // namespace agora
