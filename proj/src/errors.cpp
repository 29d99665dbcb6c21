#include "qrt/errors.hpp"

namespace qrt {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidInput: return "InvalidInput";
        case ErrorKind::InfiniteK: return "InfiniteK";
        case ErrorKind::DegeneratePoint: return "DegeneratePoint";
        case ErrorKind::IndeterminatePoint: return "IndeterminatePoint";
        case ErrorKind::DegeneratePencil: return "DegeneratePencil";
        case ErrorKind::NotBiquadraticInY: return "NotBiquadraticInY";
        case ErrorKind::ExhaustedSearch: return "ExhaustedSearch";
        case ErrorKind::DegenerateTransform: return "DegenerateTransform";
        case ErrorKind::DegenerateQuartic: return "DegenerateQuartic";
        case ErrorKind::PoleOfQuadratic: return "PoleOfQuadratic";
        case ErrorKind::StepCollapse: return "StepCollapse";
        case ErrorKind::PathTooCloseToBranchPoint: return "PathTooCloseToBranchPoint";
        case ErrorKind::SheetMismatch: return "SheetMismatch";
        case ErrorKind::ChartDegenerate: return "ChartDegenerate";
        case ErrorKind::TauNotInUpperHalfPlane: return "TauNotInUpperHalfPlane";
        case ErrorKind::DegenerateLattice: return "DegenerateLattice";
        case ErrorKind::PoleAtU: return "PoleAtU";
        case ErrorKind::CurveNotSmooth: return "CurveNotSmooth";
        case ErrorKind::ParseError: return "ParseError";
    }
    return "Unknown";
}

}  // namespace qrt
