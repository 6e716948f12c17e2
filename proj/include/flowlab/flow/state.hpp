#pragma once

#include <string>
#include <vector>

#include "flowlab/geom/ops.hpp"

namespace flowlab {

enum class Formulation {
    SRF,
    SKRF_metric,
    SKRF_symplectic,
    BackwardKRF_gauged,
    Baby_closed_form,
};

inline const char* to_string(Formulation f) {
    switch (f) {
        case Formulation::SRF: return "SRF";
        case Formulation::SKRF_metric: return "SKRF_metric";
        case Formulation::SKRF_symplectic: return "SKRF_symplectic";
        case Formulation::BackwardKRF_gauged: return "BackwardKRF_gauged";
        case Formulation::Baby_closed_form: return "Baby_closed_form";
    }
    return "?";
}

/// One point of a flow of Kahler structures: time, metric, complex
/// structure, the associated form, and the normalized potential.
/// omega = g J and exp(-f) omega = Omega hold within integration tolerance.
struct FlowState {
    double t = 0.0;
    TensorField g;
    ComplexStructureField j;
    TwoFormField omega;
    ScalarField f;
};

struct FlowSpec {
    Formulation formulation = Formulation::SKRF_metric;
    VolumeForm vol;          ///< the fixed volume form Omega
    double dt = 1e-3;
    double horizon = 10.0;
    int stride = 100;        ///< record every stride-th step plus endpoints
    int filter_degree = 8;   ///< band degree of the smooth projector
    double divergence_tol = 1e-4;
};

enum class RunStatus { Completed, PositivityLoss, Divergence };

struct Sample {
    double t = 0.0;
    TensorField g;
    ComplexStructureField j;
    TwoFormField omega;
    ScalarField f;
    double gdot_linf = 0.0;
    double jdot_linf = 0.0;
    double gdot_l2 = 0.0;
    double jdot_l2 = 0.0;
    TensorField gdot;        ///< instantaneous velocity fields at the sample
    ComplexStructureField jdot;
};

struct Trajectory {
    Formulation formulation = Formulation::SKRF_metric;
    std::vector<Sample> samples;
    RunStatus status = RunStatus::Completed;
    double fail_time = -1.0;
    std::string note;
};

/// Raise the recorded failure as the matching exception.
inline void require_complete(const Trajectory& tr) {
    if (tr.status == RunStatus::PositivityLoss)
        throw PositivityLoss("flow: metric lost positive definiteness", tr.fail_time);
    if (tr.status == RunStatus::Divergence)
        throw DivergenceError("flow: " + tr.note, tr.fail_time);
}

} // namespace flowlab
