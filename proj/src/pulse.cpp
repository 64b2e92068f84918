#include "cespin/pulse.hpp"

#include "cespin/errors.hpp"

namespace cespin {

const char* to_string(SequenceKind k) {
    switch (k) {
        case SequenceKind::ramsey: return "ramsey";
        case SequenceKind::hahn: return "hahn";
        case SequenceKind::cpmg: return "cpmg";
    }
    return "?";
}

SequenceKind sequence_kind_from_string(const std::string& s) {
    if (s == "ramsey") return SequenceKind::ramsey;
    if (s == "hahn") return SequenceKind::hahn;
    if (s == "cpmg") return SequenceKind::cpmg;
    throw ConfigError("unknown sequence kind '" + s + "'");
}

std::vector<double> PulseSequence::pulse_times() const {
    std::vector<double> out(fractions.size());
    for (std::size_t i = 0; i < fractions.size(); ++i)
        out[i] = fractions[i] * total_time;
    return out;
}

std::vector<double> PulseSequence::boundaries(double t) const {
    std::vector<double> out;
    out.reserve(fractions.size() + 2);
    out.push_back(0.0);
    for (double f : fractions) out.push_back(f * t);
    out.push_back(t);
    return out;
}

PulseSequence build_sequence(SequenceKind kind, int N, double total_time) {
    if (total_time <= 0.0)
        throw ConfigError("build_sequence: total_time must be > 0");
    PulseSequence seq;
    seq.kind = kind;
    seq.total_time = total_time;
    switch (kind) {
        case SequenceKind::ramsey:
            seq.n_pulses = 0;
            break;
        case SequenceKind::hahn:
            seq.n_pulses = 1;
            seq.fractions = {0.5};
            seq.axes = {'Y'};
            break;
        case SequenceKind::cpmg:
            if (N < 1) throw ConfigError("build_sequence: cpmg needs N >= 1");
            seq.n_pulses = N;
            for (int j = 1; j <= N; ++j)
                seq.fractions.push_back((2.0 * j - 1.0) / (2.0 * N));
            seq.axes.assign(N, 'Y');
            break;
    }
    return seq;
}

} // namespace cespin
