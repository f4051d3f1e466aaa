#pragma once

#include <complex>
#include <vector>

namespace fsolink {

// Symbol constellation with unit average energy; produced either by the
// square-QAM mapper or by the transmitter network.
struct Constellation {
    int order = 0;
    std::vector<std::complex<double>> points;

    double average_energy() const;
};

struct OneHot {
    int length;
    int hot_index;

    OneHot(int length_, int hot_index_);
    std::vector<double> dense() const;
};

// Square-grid M-QAM, Gray-ordered along each axis, unit average energy.
// Throws std::invalid_argument unless M is a perfect square >= 4.
Constellation qam_constellation(int order);

OneHot one_hot(int index, int order);

// Constellation point for a symbol index; bounds-checked.
std::complex<double> modulate(int index, const Constellation& c);

// Scales all points by one common positive factor so the average energy is 1.
// Throws std::invalid_argument on an all-zero input.
Constellation normalize_constellation(std::vector<std::complex<double>> raw_points);

// Index of the closest constellation point; ties go to the lowest index.
int nearest_index(const Constellation& c, std::complex<double> z);

}  // namespace fsolink
