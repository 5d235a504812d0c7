#pragma once

#include <stdexcept>
#include <string>

namespace rnls {

// Error classes mirror the distinct failure modes surfaced by the CLI
// (each maps to its own exit code, see cli.hpp).

struct InvalidField : std::runtime_error {
    explicit InvalidField(const std::string& msg) : std::runtime_error(msg) {}
};

struct UnsupportedGrid : std::runtime_error {
    explicit UnsupportedGrid(const std::string& msg) : std::runtime_error(msg) {}
};

struct AmplitudeOverflow : std::runtime_error {
    explicit AmplitudeOverflow(const std::string& msg) : std::runtime_error(msg) {}
};

struct NoGroundState : std::runtime_error {
    explicit NoGroundState(const std::string& msg) : std::runtime_error(msg) {}
};

struct ValidationFailure : std::runtime_error {
    explicit ValidationFailure(const std::string& msg) : std::runtime_error(msg) {}
};

struct HypothesisViolation : std::runtime_error {
    explicit HypothesisViolation(const std::string& msg) : std::runtime_error(msg) {}
};

struct BlowupSuspected : std::runtime_error {
    explicit BlowupSuspected(const std::string& msg) : std::runtime_error(msg) {}
};

struct BoundaryContamination : std::runtime_error {
    explicit BoundaryContamination(const std::string& msg) : std::runtime_error(msg) {}
};

struct MissingGroundState : std::runtime_error {
    explicit MissingGroundState(const std::string& msg) : std::runtime_error(msg) {}
};

struct ConfigInvalid : std::runtime_error {
    explicit ConfigInvalid(const std::string& msg) : std::runtime_error(msg) {}
};

struct DomainTooSmall : std::runtime_error {
    explicit DomainTooSmall(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace rnls
