#pragma once

#include <string>
#include <vector>

namespace cespin {

enum class SequenceKind { ramsey, hahn, cpmg };

const char* to_string(SequenceKind k);
SequenceKind sequence_kind_from_string(const std::string& s);

// Instantaneous pi pulses between free-evolution segments; the framing pi/2
// pulses are implicit.  `fractions` are the pulse positions as fractions of
// the total time, so the same shape can be rescaled across a time grid.
struct PulseSequence {
    SequenceKind kind = SequenceKind::hahn;
    int n_pulses = 1;
    double total_time = 0.0;           // us
    std::vector<double> fractions;     // strictly increasing, in (0,1)
    std::vector<char> axes;            // 'Y' for every pi pulse here

    std::vector<double> pulse_times() const; // fractions * total_time
    // Segment boundaries 0 = t0 < t1 < ... < t_{n+1} = t for a total time t.
    std::vector<double> boundaries(double t) const;
};

// ramsey: no pi pulses; hahn: one at 1/2; cpmg(N): at (2j-1)/(2N), Y axes.
// cpmg(1) equals hahn field-for-field.  Throws ConfigError for cpmg N = 0
// or total_time <= 0.
PulseSequence build_sequence(SequenceKind kind, int N, double total_time);

} // namespace cespin
