#pragma once

#include "crio/linalg.hpp"
#include "crio/transcript.hpp"
#include "crio/types.hpp"

namespace crio {

/// Star graph state on n qubits: qubit 0 (the controller) CZ-linked to each of
/// the others, all initialized |+>. For n=3 this is the tripartite state with
/// amplitude pattern (1,1,1,1,1,-1,-1,1)/(2*sqrt(2)) on |abc>.
StateVector prepare_graph_state(int n_parties);

/// Append `psi_target` as a new last factor and entangle it with qubit
/// `control_index` via U = |0><0| (x) I + |1><1| (x) sigma_n.
StateVector attach_control(const StateVector& state, int control_index,
                           const StateVector& psi_target, const BlochAxis& axis);

struct StatorCheck {
    bool holds = false;
    double fid_identity = 0.0;  // |0>_b branch residual vs I psi
    double fid_sigma_n = 0.0;   // |1>_b branch residual vs sigma_n psi
};

struct ProtocolBranchOutcome {
    std::string label;
    double prob = 0.0;
    StateVector state;               // post-protocol state of the surviving qubits
    std::vector<double> fidelities;  // per-receiver fidelity to the ideal state
};

struct StatorResult {
    StateVector stator;  // common (b, C) state across branches
    std::vector<ProtocolBranchOutcome> branches;
    ProtocolTranscript transcript;
    StatorCheck check;
};

/// Execute the controller and receiver-side X measurements (with conditional
/// sigma_x / sigma_z fixes on the sender qubit) on every branch of the
/// tripartite state with an attached target, yielding the stator state
/// (|0>_b I + |1>_b sigma_n)(|+>_b psi)/sqrt(2) on (b, C).
StatorResult reduce_to_stator(const StateVector& prepared, const BlochAxis& axis,
                              const StateVector& psi_target);

struct TransmitResult {
    std::vector<ProtocolBranchOutcome> branches;  // final psi_C per branch
    ProtocolTranscript transcript;
};

/// Sender rotation e^{i alpha sigma_x} on b, Z measurement, and the
/// message-gated e^{i pi sigma_n / 2} fix on the |1>_b branch.
TransmitResult bob_transmit(const StateVector& stator, double alpha,
                            const BlochAxis& axis);

struct CrioConfig {
    int n_parties = 3;
    std::vector<double> alphas;
    std::vector<BlochAxis> axes;
    std::vector<StateVector> targets;
    /// When false the controller never measures or broadcasts; the protocol
    /// halts after preparation and no downstream event is reachable.
    bool alice_participates = true;
};

struct CrioResult {
    std::vector<ProtocolBranchOutcome> branches;
    ProtocolTranscript transcript;
};

/// Full (2N+1)-party protocol: each sender j transmits e^{i alpha_j sigma_n_j}
/// onto receiver j's target qubit, with every downstream action causally gated
/// on the controller's broadcast. Channel 1 runs through the controller's
/// graph edges; channels j>=2 use a direct sender-receiver CZ pair (a single
/// central measurement cannot produce two independent stators with unit
/// per-branch fidelity, see README).
CrioResult run_crio(const CrioConfig& config);

}  // namespace crio
