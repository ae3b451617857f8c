#pragma once

#include <stdexcept>
#include <string>

namespace tvc {

enum class Err {
    NonDivisibleGeometry,
    GeometryMismatch,
    NonDivisibleLength,
    ShapeMismatch,
    NonFiniteLoss,
    IndexOutOfRange,
    EmptyHistory,
    InsufficientSamples,
    MixedModalityBatch,
    FrozenBundle,
    BundleNotFrozen,
    EmptyCorpus,
    EmptySubset,
    WindowTooLarge,
    InfeasibleShape,
    NoReferences,
    LengthMismatch,
    OutpainterContractViolation,
    ParseError,
    EmptyFile,
    UnsupportedFormat,
    CorruptHeader,
    ChecksumMismatch,
    VersionUnsupported,
    MissingCheckpoint,
};

const char* err_name(Err e);

class Error : public std::runtime_error {
public:
    Error(Err kind, const std::string& msg)
        : std::runtime_error(std::string(err_name(kind)) + ": " + msg), kind_(kind) {}
    Err kind() const { return kind_; }

private:
    Err kind_;
};

[[noreturn]] inline void fail(Err kind, const std::string& msg) { throw Error(kind, msg); }

inline void require(bool cond, Err kind, const std::string& msg) {
    if (!cond) fail(kind, msg);
}

}  // namespace tvc
