#pragma once

#include <stdexcept>
#include <string>

namespace kfactor {

enum class ErrorKind {
    InvalidSpec,
    GenerationExhausted,
    EmptyQuery,
    NotRegular,
    TooLargeForExhaustive,
    NotFound,
    NotRemovable,
    ConstructionFailed,
    NotAMatching,
    Failed,
    ParameterRange,
    Stalled,
    TooManyDeleted,
    CertificationFailed,
    SearchExhausted,
    StageFailed,
    DivisibilityViolation,
    PhaseFailed,
    TooLarge,
    Infeasible,
};

const char* to_string(ErrorKind kind);

// `primary` / `secondary` carry the numeric context some kinds need:
// Failed -> (round, index), Stalled -> (step), StageFailed -> (stage),
// PhaseFailed -> (phase).
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what, int primary = -1, int secondary = -1)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what),
          kind_(kind), primary_(primary), secondary_(secondary) {}

    ErrorKind kind() const noexcept { return kind_; }
    int primary() const noexcept { return primary_; }
    int secondary() const noexcept { return secondary_; }

private:
    ErrorKind kind_;
    int primary_;
    int secondary_;
};

}  // namespace kfactor
