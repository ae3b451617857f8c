#include "tvc/error.hpp"

namespace tvc {

const char* err_name(Err e) {
    switch (e) {
        case Err::NonDivisibleGeometry: return "NonDivisibleGeometry";
        case Err::GeometryMismatch: return "GeometryMismatch";
        case Err::NonDivisibleLength: return "NonDivisibleLength";
        case Err::ShapeMismatch: return "ShapeMismatch";
        case Err::NonFiniteLoss: return "NonFiniteLoss";
        case Err::IndexOutOfRange: return "IndexOutOfRange";
        case Err::EmptyHistory: return "EmptyHistory";
        case Err::InsufficientSamples: return "InsufficientSamples";
        case Err::MixedModalityBatch: return "MixedModalityBatch";
        case Err::FrozenBundle: return "FrozenBundle";
        case Err::BundleNotFrozen: return "BundleNotFrozen";
        case Err::EmptyCorpus: return "EmptyCorpus";
        case Err::EmptySubset: return "EmptySubset";
        case Err::WindowTooLarge: return "WindowTooLarge";
        case Err::InfeasibleShape: return "InfeasibleShape";
        case Err::NoReferences: return "NoReferences";
        case Err::LengthMismatch: return "LengthMismatch";
        case Err::OutpainterContractViolation: return "OutpainterContractViolation";
        case Err::ParseError: return "ParseError";
        case Err::EmptyFile: return "EmptyFile";
        case Err::UnsupportedFormat: return "UnsupportedFormat";
        case Err::CorruptHeader: return "CorruptHeader";
        case Err::ChecksumMismatch: return "ChecksumMismatch";
        case Err::VersionUnsupported: return "VersionUnsupported";
        case Err::MissingCheckpoint: return "MissingCheckpoint";
    }
    return "UnknownError";
}

}  // namespace tvc
