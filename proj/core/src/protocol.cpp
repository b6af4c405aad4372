#include "crio/protocol.hpp"

#include <cmath>
#include <functional>

namespace crio {

namespace {

const double INV_SQRT2 = 1.0 / std::sqrt(2.0);

Vec ket_plus() {
    Vec v(2);
    v << INV_SQRT2, INV_SQRT2;
    return v;
}

Vec ket_minus() {
    Vec v(2);
    v << INV_SQRT2, -INV_SQRT2;
    return v;
}

Vec ket_z(int b) {
    Vec v = Vec::Zero(2);
    v(b) = 1.0;
    return v;
}

Operator rot_x(double alpha) {
    Mat m = std::cos(alpha) * Mat::Identity(2, 2) +
            Complex(0, 1) * std::sin(alpha) * pauli_x();
    return Operator(std::move(m), true, false);
}

// e^{i pi sigma_n / 2} = i sigma_n.
Operator half_pi_rotation(const BlochAxis& axis) {
    return Operator(Complex(0, 1) * bloch_operator(axis).mat, true, false);
}

StateVector rotated_target(double alpha, const BlochAxis& axis,
                           const StateVector& psi) {
    Mat u = std::cos(alpha) * Mat::Identity(2, 2) +
            Complex(0, 1) * std::sin(alpha) * bloch_operator(axis).mat;
    return StateVector({2}, u * psi.amps);
}

int role_index(const std::vector<std::string>& roles, const std::string& r) {
    for (int i = 0; i < static_cast<int>(roles.size()); ++i)
        if (roles[i] == r) return i;
    throw InvalidInput("protocol: unknown role " + r);
}

struct PBranch {
    StateVector st;
    std::vector<std::string> roles;
    std::string label;
    double prob = 1.0;
    std::vector<TranscriptEvent> ev;  // local event list, local depends_on
    int alice_msg = -1;               // local index of the controller's broadcast
};

void append_label(PBranch& b, const std::string& actor, const std::string& out) {
    if (!b.label.empty()) b.label += ",";
    b.label += actor + ":" + out;
}

// Measure `role` on every branch in the given basis, emitting measurement and
// message events and applying the message-gated correction when the callback
// provides one.
using CorrectionFn =
    std::function<void(PBranch&, int /*outcome*/, int /*msg local idx*/)>;

std::vector<PBranch> measure_role(std::vector<PBranch> in, const std::string& role,
                                  bool x_basis, const std::string& actor,
                                  const CorrectionFn& fix) {
    std::vector<PBranch> out;
    for (auto& br : in) {
        const int idx = role_index(br.roles, role);
        for (int o = 0; o < 2; ++o) {
            Vec bra = x_basis ? (o == 0 ? ket_plus() : ket_minus()) : ket_z(o);
            StateVector proj = project_out(br.st, idx, bra);
            const double p = proj.amps.squaredNorm();
            if (p < 1e-12) continue;
            PBranch nb;
            nb.st = StateVector(proj.dims, proj.amps / std::sqrt(p));
            nb.roles = br.roles;
            nb.roles.erase(nb.roles.begin() + idx);
            nb.prob = br.prob * p;
            nb.label = br.label;
            nb.ev = br.ev;
            nb.alice_msg = br.alice_msg;
            const std::string oname = x_basis ? (o == 0 ? "+" : "-")
                                              : std::to_string(o);
            append_label(nb, actor, oname);
            const int mi = static_cast<int>(nb.ev.size());
            nb.ev.push_back({EventKind::Measurement, actor,
                             std::string(x_basis ? "measure X " : "measure Z ") +
                                 role + " -> " + oname,
                             -1, nb.alice_msg});
            nb.ev.push_back({EventKind::Message, actor,
                             "announce " + role + "=" + oname, -1, mi});
            if (fix) fix(nb, o, mi + 1);
            out.push_back(std::move(nb));
        }
    }
    return out;
}

void apply_on_role(PBranch& b, const Operator& op, const std::string& role) {
    b.st = apply(op, {role_index(b.roles, role)}, b.st);
}

}  // namespace

StateVector prepare_graph_state(int n_parties) {
    if (n_parties < 3 || n_parties % 2 == 0)
        throw InvalidInput("prepare_graph_state: n_parties must be odd and >= 3");
    StateVector st = StateVector::plus();
    for (int i = 1; i < n_parties; ++i) st = kron(st, StateVector::plus());
    Operator cz(cz_gate(), true, true);
    for (int i = 1; i < n_parties; ++i) st = apply(cz, {0, i}, st);
    return st;
}

StateVector attach_control(const StateVector& state, int control_index,
                           const StateVector& psi_target, const BlochAxis& axis) {
    if (psi_target.dim() != 2)
        throw InvalidInput("attach_control: target must be a single qubit");
    StateVector st = kron(state, psi_target);
    Mat u = Mat::Zero(4, 4);
    u.block(0, 0, 2, 2) = Mat::Identity(2, 2);
    u.block(2, 2, 2, 2) = bloch_operator(axis).mat;
    Operator ucc(std::move(u), true, false);
    const int last = static_cast<int>(st.dims.size()) - 1;
    return apply(ucc, {control_index, last}, st);
}

StatorResult reduce_to_stator(const StateVector& prepared, const BlochAxis& axis,
                              const StateVector& psi_target) {
    if (prepared.dims != std::vector<int>{2, 2, 2, 2})
        throw InvalidInput("reduce_to_stator: expected (a,b,c,C) qubit register");

    StatorResult res;
    res.transcript.add({EventKind::Preparation, "Alice",
                        "prepare |h3> and attach target at c", -1, -1});

    PBranch init;
    init.st = prepared;
    init.roles = {"a", "b", "c", "C"};

    const Operator sx(pauli_x(), true, true);
    const Operator sz(pauli_z(), true, true);

    auto branches = measure_role(
        {init}, "a", true, "Alice",
        [&](PBranch& b, int o, int msg) {
            if (o == 1) {
                apply_on_role(b, sx, "b");
                b.ev.push_back({EventKind::Correction, "Bob", "apply sigma_x b",
                                -1, msg});
            }
            b.alice_msg = msg;
        });
    branches = measure_role(
        std::move(branches), "c", true, "Charlie",
        [&](PBranch& b, int o, int msg) {
            if (o == 1) {
                apply_on_role(b, sz, "b");
                b.ev.push_back({EventKind::Correction, "Bob", "apply sigma_z b",
                                -1, msg});
            }
        });

    // Expected stator state (|0>_b I + |1>_b sigma_n) (|+>_b psi)/sqrt(2).
    StateVector expected =
        attach_control(StateVector::plus(), 0, psi_target, axis);

    for (auto& b : branches) {
        ProtocolBranchOutcome o;
        o.label = b.label;
        o.prob = b.prob;
        o.state = b.st;
        o.fidelities = {overlap2(b.st, expected)};
        // Remap local event indices onto the global transcript.
        const int base = static_cast<int>(res.transcript.events().size());
        for (auto e : b.ev) {
            e.branch = static_cast<int>(res.branches.size());
            if (e.depends_on >= 0) e.depends_on += base;
            res.transcript.add(std::move(e));
        }
        res.branches.push_back(std::move(o));
    }

    res.stator = res.branches.front().state;
    // Residuals per b-basis value.
    StateVector psi0 = project_out(res.stator, 0, ket_z(0));
    StateVector psi1 = project_out(res.stator, 0, ket_z(1));
    StateVector sn_psi({2}, bloch_operator(axis).mat * psi_target.amps);
    res.check.fid_identity =
        std::norm(psi0.amps.dot(psi_target.amps)) / psi0.amps.squaredNorm();
    res.check.fid_sigma_n =
        std::norm(psi1.amps.dot(sn_psi.amps)) / psi1.amps.squaredNorm();
    res.check.holds = res.check.fid_identity > 1.0 - 1e-10 &&
                      res.check.fid_sigma_n > 1.0 - 1e-10;
    return res;
}

TransmitResult bob_transmit(const StateVector& stator, double alpha,
                            const BlochAxis& axis) {
    if (stator.dims != std::vector<int>{2, 2})
        throw InvalidInput("bob_transmit: expected (b, C) register");

    // Initial target state, recovered from the |0>_b component.
    StateVector psi0 = project_out(stator, 0, ket_z(0));
    StateVector psi({2}, psi0.amps / psi0.amps.norm());
    StateVector expected = rotated_target(alpha, axis, psi);

    TransmitResult res;
    res.transcript.add({EventKind::Rotation, "Bob",
                        "apply exp(i alpha sigma_x) on b", -1, -1});
    PBranch init;
    init.st = apply(rot_x(alpha), {0}, stator);
    init.roles = {"b", "C"};

    auto branches = measure_role(
        {init}, "b", false, "Bob",
        [&](PBranch& b, int o, int msg) {
            if (o == 1) {
                apply_on_role(b, half_pi_rotation(axis), "C");
                b.ev.push_back({EventKind::Correction, "Charlie",
                                "apply exp(i pi sigma_n / 2) on C", -1, msg});
            }
        });

    for (auto& b : branches) {
        ProtocolBranchOutcome o;
        o.label = b.label;
        o.prob = b.prob;
        o.state = b.st;
        o.fidelities = {overlap2(b.st, expected)};
        const int base = static_cast<int>(res.transcript.events().size());
        for (auto e : b.ev) {
            e.branch = static_cast<int>(res.branches.size());
            if (e.depends_on >= 0) e.depends_on += base;
            res.transcript.add(std::move(e));
        }
        res.branches.push_back(std::move(o));
    }
    return res;
}

CrioResult run_crio(const CrioConfig& config) {
    const int n = config.n_parties;
    if (n < 3 || n % 2 == 0)
        throw InvalidInput("run_crio: n_parties must be odd and >= 3");
    const int nch = (n - 1) / 2;
    if (static_cast<int>(config.alphas.size()) != nch ||
        static_cast<int>(config.axes.size()) != nch ||
        static_cast<int>(config.targets.size()) != nch)
        throw InvalidInput("run_crio: need one (alpha, axis, target) per channel");

    auto sender_name = [&](int j) -> std::string {
        if (j == 0) return "Bob";
        if (j == 1 && nch == 2) return "Charlie";
        return "Sender" + std::to_string(j + 1);
    };
    auto receiver_name = [&](int j) -> std::string {
        if (nch == 1) return "Charlie";
        if (j == 0) return "David";
        if (j == 1 && nch == 2) return "Eve";
        return "Receiver" + std::to_string(j + 1);
    };

    CrioResult res;

    // Entanglement layout: channel 1 through the controller (a-s1, a-r1);
    // channels j>=2 as direct sender-receiver pairs.
    StateVector st = StateVector::plus();
    std::vector<std::string> roles = {"a"};
    for (int j = 0; j < nch; ++j) {
        st = kron(st, StateVector::plus());
        roles.push_back("s" + std::to_string(j + 1));
    }
    for (int j = 0; j < nch; ++j) {
        st = kron(st, StateVector::plus());
        roles.push_back("r" + std::to_string(j + 1));
    }
    Operator cz(cz_gate(), true, true);
    st = apply(cz, {role_index(roles, "a"), role_index(roles, "s1")}, st);
    st = apply(cz, {role_index(roles, "a"), role_index(roles, "r1")}, st);
    for (int j = 1; j < nch; ++j)
        st = apply(cz,
                   {role_index(roles, "s" + std::to_string(j + 1)),
                    role_index(roles, "r" + std::to_string(j + 1))},
                   st);
    res.transcript.add({EventKind::Preparation, "Alice",
                        "prepare protocol graph state (" + std::to_string(n) +
                            " qubits)", -1, -1});
    for (int j = 0; j < nch; ++j) {
        st = attach_control(st, role_index(roles, "r" + std::to_string(j + 1)),
                            config.targets[j], config.axes[j]);
        roles.push_back("T" + std::to_string(j + 1));
        res.transcript.add({EventKind::Preparation, receiver_name(j),
                            "attach target T" + std::to_string(j + 1) +
                                " at r" + std::to_string(j + 1), -1, -1});
    }

    if (!config.alice_participates) return res;  // nothing downstream is reachable

    const Operator sx(pauli_x(), true, true);
    const Operator sz(pauli_z(), true, true);
    const Operator h(hadamard(), true, true);

    PBranch init;
    init.st = st;
    init.roles = roles;

    // Controller's broadcast gates everything downstream; her "-" outcome is
    // fixed by sigma_x on the channel-1 sender qubit.
    auto branches = measure_role(
        {init}, "a", true, "Alice",
        [&](PBranch& b, int o, int msg) {
            b.alice_msg = msg;
            if (o == 1) {
                apply_on_role(b, sx, "s1");
                b.ev.push_back({EventKind::Correction, sender_name(0),
                                "apply sigma_x s1", -1, msg});
            }
        });

    for (int j = 0; j < nch; ++j) {
        const std::string sj = "s" + std::to_string(j + 1);
        const std::string rj = "r" + std::to_string(j + 1);
        const std::string tj = "T" + std::to_string(j + 1);
        const bool direct = j > 0;  // direct pair, not routed through a

        branches = measure_role(
            std::move(branches), rj, true, receiver_name(j),
            [&](PBranch& b, int o, int msg) {
                if (direct) {
                    apply_on_role(b, h, sj);
                    b.ev.push_back({EventKind::Rotation, sender_name(j),
                                    "apply H " + sj, -1, msg});
                }
                if (o == 1) {
                    apply_on_role(b, sz, sj);
                    b.ev.push_back({EventKind::Correction, sender_name(j),
                                    "apply sigma_z " + sj, -1, msg});
                }
            });

        for (auto& b : branches) {
            apply_on_role(b, rot_x(config.alphas[j]), sj);
            b.ev.push_back({EventKind::Rotation, sender_name(j),
                            "apply exp(i alpha sigma_x) " + sj, -1, b.alice_msg});
        }
        branches = measure_role(
            std::move(branches), sj, false, sender_name(j),
            [&](PBranch& b, int o, int msg) {
                if (o == 1) {
                    apply_on_role(b, half_pi_rotation(config.axes[j]), tj);
                    b.ev.push_back({EventKind::Correction, receiver_name(j),
                                    "apply exp(i pi sigma_n / 2) " + tj, -1,
                                    msg});
                }
            });
    }

    // Per-receiver fidelities against e^{i alpha sigma_n} psi.
    std::vector<StateVector> expected;
    for (int j = 0; j < nch; ++j)
        expected.push_back(
            rotated_target(config.alphas[j], config.axes[j], config.targets[j]));

    for (auto& b : branches) {
        ProtocolBranchOutcome o;
        o.label = b.label;
        o.prob = b.prob;
        o.state = b.st;
        DensityMatrix rho = DensityMatrix::pure(b.st);
        for (int j = 0; j < nch; ++j) {
            const int idx = role_index(b.roles, "T" + std::to_string(j + 1));
            DensityMatrix red = partial_trace(rho, {idx});
            o.fidelities.push_back(state_fidelity(red, expected[j]));
        }
        const int base = static_cast<int>(res.transcript.events().size());
        for (auto e : b.ev) {
            e.branch = static_cast<int>(res.branches.size());
            if (e.depends_on >= 0) e.depends_on += base;
            res.transcript.add(std::move(e));
        }
        res.branches.push_back(std::move(o));
    }
    return res;
}

}  // namespace crio
