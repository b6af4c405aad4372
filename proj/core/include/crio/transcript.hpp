#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "crio/types.hpp"

namespace crio {

enum class EventKind { Preparation, Measurement, Message, Correction, Rotation };

struct TranscriptEvent {
    EventKind kind = EventKind::Preparation;
    std::string actor;
    std::string action;
    int branch = -1;       // branch id, -1 for branch-independent events
    int depends_on = -1;   // index of the causal predecessor event, -1 if none
};

/// Ordered classical-communication event log. Corrections must name the
/// classical message they are gated on, and that message must already be in
/// the log — the controller's permission is causally enforced, not implied.
class ProtocolTranscript {
public:
    int add(TranscriptEvent e);
    const std::vector<TranscriptEvent>& events() const { return events_; }

    int count(EventKind kind) const;
    int count(EventKind kind, int branch) const;

    /// One JSON object per line: {"actor":..., "action":..., "branch":...}.
    void write_jsonl(std::ostream& os) const;

private:
    std::vector<TranscriptEvent> events_;
};

}  // namespace crio
