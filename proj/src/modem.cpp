#include "fsolink/modem.hpp"

#include <cmath>
#include <stdexcept>

namespace fsolink {

double Constellation::average_energy() const {
    double e = 0.0;
    for (const auto& p : points) e += std::norm(p);
    return points.empty() ? 0.0 : e / static_cast<double>(points.size());
}

OneHot::OneHot(int length_, int hot_index_) : length(length_), hot_index(hot_index_) {
    if (length < 1 || hot_index < 0 || hot_index >= length)
        throw std::out_of_range("OneHot: index out of range");
}

std::vector<double> OneHot::dense() const {
    std::vector<double> v(static_cast<std::size_t>(length), 0.0);
    v[static_cast<std::size_t>(hot_index)] = 1.0;
    return v;
}

namespace {

int gray_inverse(int g) {
    int b = 0;
    for (; g; g >>= 1) b ^= g;
    return b;
}

// Amplitude level of an axis label under Gray ordering: the label's position
// in the Gray sequence, mapped onto {-(k-1), ..., k-1} in steps of 2.
int gray_level(int label, int levels) {
    return 2 * gray_inverse(label) - (levels - 1);
}

}  // namespace

Constellation qam_constellation(int order) {
    if (order < 4) throw std::invalid_argument("qam_constellation: order must be >= 4");
    const int k = static_cast<int>(std::lround(std::sqrt(static_cast<double>(order))));
    if (k * k != order)
        throw std::invalid_argument("qam_constellation: order must be a perfect square");
    std::vector<std::complex<double>> pts;
    pts.reserve(static_cast<std::size_t>(order));
    for (int m = 0; m < order; ++m) {
        const int ai = m / k;
        const int aq = m % k;
        pts.emplace_back(static_cast<double>(gray_level(ai, k)),
                         static_cast<double>(gray_level(aq, k)));
    }
    return normalize_constellation(std::move(pts));
}

OneHot one_hot(int index, int order) { return {order, index}; }

std::complex<double> modulate(int index, const Constellation& c) {
    if (index < 0 || index >= c.order)
        throw std::out_of_range("modulate: index out of range");
    return c.points[static_cast<std::size_t>(index)];
}

Constellation normalize_constellation(std::vector<std::complex<double>> raw_points) {
    if (raw_points.size() < 2)
        throw std::invalid_argument("normalize_constellation: need at least 2 points");
    double energy = 0.0;
    for (const auto& p : raw_points) {
        if (!std::isfinite(p.real()) || !std::isfinite(p.imag()))
            throw std::invalid_argument("normalize_constellation: non-finite point");
        energy += std::norm(p);
    }
    if (energy == 0.0)
        throw std::invalid_argument("normalize_constellation: all points are zero");
    const double scale =
        std::sqrt(static_cast<double>(raw_points.size()) / energy);
    for (auto& p : raw_points) p *= scale;
    return {static_cast<int>(raw_points.size()), std::move(raw_points)};
}

int nearest_index(const Constellation& c, std::complex<double> z) {
    if (c.points.empty()) throw std::invalid_argument("nearest_index: empty constellation");
    int best = 0;
    double best_d = std::norm(z - c.points[0]);
    for (int m = 1; m < c.order; ++m) {
        const double d = std::norm(z - c.points[static_cast<std::size_t>(m)]);
        if (d < best_d) {
            best_d = d;
            best = m;
        }
    }
    return best;
}

}  // namespace fsolink
