#include "crio/transcript.hpp"

#include <ostream>

namespace crio {

namespace {

std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

int ProtocolTranscript::add(TranscriptEvent e) {
    const int idx = static_cast<int>(events_.size());
    if (e.depends_on >= idx)
        throw InvalidInput("transcript: dependency on a future event");
    if (e.kind == EventKind::Correction) {
        if (e.depends_on < 0)
            throw InvalidInput("transcript: correction without a gating message");
        if (events_[e.depends_on].kind != EventKind::Message)
            throw InvalidInput("transcript: correction must depend on a message");
    }
    events_.push_back(std::move(e));
    return idx;
}

int ProtocolTranscript::count(EventKind kind) const {
    int n = 0;
    for (const auto& e : events_)
        if (e.kind == kind) ++n;
    return n;
}

int ProtocolTranscript::count(EventKind kind, int branch) const {
    int n = 0;
    for (const auto& e : events_)
        if (e.kind == kind && (e.branch == branch || e.branch == -1)) ++n;
    return n;
}

void ProtocolTranscript::write_jsonl(std::ostream& os) const {
    for (const auto& e : events_) {
        os << "{\"actor\":\"" << json_escape(e.actor) << "\",\"action\":\""
           << json_escape(e.action) << "\",\"branch\":" << e.branch << "}\n";
    }
}

}  // namespace crio
