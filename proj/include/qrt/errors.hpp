#pragma once

#include <stdexcept>
#include <string>

namespace qrt {

enum class ErrorKind {
    InvalidInput,
    InfiniteK,
    DegeneratePoint,
    IndeterminatePoint,
    DegeneratePencil,
    NotBiquadraticInY,
    ExhaustedSearch,
    DegenerateTransform,
    DegenerateQuartic,
    PoleOfQuadratic,
    StepCollapse,
    PathTooCloseToBranchPoint,
    SheetMismatch,
    ChartDegenerate,
    TauNotInUpperHalfPlane,
    DegenerateLattice,
    PoleAtU,
    CurveNotSmooth,
    ParseError,
};

const char* to_string(ErrorKind kind);

// Every failure in the library is reported through this type. `stage` is
// filled in by the solver so that CLI diagnostics can name the pipeline step.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what, std::string stage = {})
        : std::runtime_error(what), kind_(kind), stage_(std::move(stage)) {}

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& stage() const noexcept { return stage_; }

    Error with_stage(std::string stage) const { return Error(kind_, what(), std::move(stage)); }

private:
    ErrorKind kind_;
    std::string stage_;
};

}  // namespace qrt
