#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "srslab/error.hpp"

namespace srslab {

/// Population-level means of the study variable and the two auxiliaries.
struct Means {
    double y = 0.0;
    double x = 0.0;
    double z = 0.0;
};

/// A finite population of N units carrying (y, x, z) per unit.
/// y is the study variable; x and z are the auxiliary variables whose
/// population means are assumed known to the estimators.
class Population {
public:
    Population(std::vector<double> y, std::vector<double> x, std::vector<double> z)
        : y_(std::move(y)), x_(std::move(x)), z_(std::move(z)) {
        if (y_.empty()) throw InputError("population is empty");
        if (y_.size() != x_.size() || y_.size() != z_.size())
            throw InputError("population columns y, x, z must have equal length");
        for (std::size_t i = 0; i < y_.size(); ++i) {
            if (!std::isfinite(y_[i]) || !std::isfinite(x_[i]) || !std::isfinite(z_[i]))
                throw InputError("non-finite value in population row " + std::to_string(i));
        }
        means_.y = column_mean(y_);
        means_.x = column_mean(x_);
        means_.z = column_mean(z_);
    }

    [[nodiscard]] int size() const { return static_cast<int>(y_.size()); }
    [[nodiscard]] const std::vector<double>& y() const { return y_; }
    [[nodiscard]] const std::vector<double>& x() const { return x_; }
    [[nodiscard]] const std::vector<double>& z() const { return z_; }
    [[nodiscard]] const Means& means() const { return means_; }

private:
    static double column_mean(const std::vector<double>& v) {
        double s = 0.0;
        for (double a : v) s += a;
        return s / static_cast<double>(v.size());
    }

    std::vector<double> y_, x_, z_;
    Means means_;
};

/// Require nonzero means before any normalization by powers of them.
inline void require_nonzero_means(const Means& m) {
    if (m.y == 0.0 || m.x == 0.0 || m.z == 0.0)
        throw NumericError("zero population mean: relative-error terms are undefined");
}

/// A sample of n distinct unit indices into a population, with its
/// sample means precomputed.
class SampleView {
public:
    SampleView(const Population& pop, std::span<const int> indices) {
        if (indices.empty()) throw NumericError("sample is empty");
        const int N = pop.size();
        std::vector<char> seen(static_cast<std::size_t>(N), 0);
        double sy = 0.0, sx = 0.0, sz = 0.0;
        for (int i : indices) {
            if (i < 0 || i >= N) throw NumericError("sample index out of range");
            if (seen[static_cast<std::size_t>(i)]) throw NumericError("duplicate sample index");
            seen[static_cast<std::size_t>(i)] = 1;
            sy += pop.y()[static_cast<std::size_t>(i)];
            sx += pop.x()[static_cast<std::size_t>(i)];
            sz += pop.z()[static_cast<std::size_t>(i)];
        }
        n_ = static_cast<int>(indices.size());
        const double inv = 1.0 / static_cast<double>(n_);
        ybar_ = sy * inv;
        xbar_ = sx * inv;
        zbar_ = sz * inv;
    }

    [[nodiscard]] int n() const { return n_; }
    [[nodiscard]] double ybar() const { return ybar_; }
    [[nodiscard]] double xbar() const { return xbar_; }
    [[nodiscard]] double zbar() const { return zbar_; }

private:
    int n_ = 0;
    double ybar_ = 0.0, xbar_ = 0.0, zbar_ = 0.0;
};

}  // namespace srslab
