#pragma once

#include <stdexcept>
#include <string>

namespace gtg {

// Common base so the CLI can map any library failure onto its exit-code
// contract in one place.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// linalg
class NotPositiveDefinite : public Error { public: using Error::Error; };
class DimensionMismatch : public Error { public: using Error::Error; };

// descriptor
class PatchTooSmall : public Error { public: using Error::Error; };
class DegeneratePatch : public Error { public: using Error::Error; };

// graph
class InvalidSigma : public Error { public: using Error::Error; };

// game
class MissingClass : public Error { public: using Error::Error; };
class InstanceTooLarge : public Error { public: using Error::Error; };

// tracking
class MalformedAnnotation : public Error { public: using Error::Error; };
class BBoxOutOfFrame : public Error { public: using Error::Error; };
class UnreadableImage : public Error { public: using Error::Error; };
class KTooLarge : public Error { public: using Error::Error; };
class UnknownTarget : public Error { public: using Error::Error; };
class MissingGroundTruth : public Error { public: using Error::Error; };

// synth & config validation
class InvalidParams : public Error { public: using Error::Error; };

// filesystem failures (missing files, write errors)
class IoError : public Error { public: using Error::Error; };

}  // namespace gtg
