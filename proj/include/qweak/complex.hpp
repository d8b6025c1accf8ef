// Copyright 2026 The qweak Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <complex>
#include <iterator>
#include <set>

namespace qweak {

using Complex = std::complex<double>;

inline constexpr double kDefaultTolerance = 1e-13;

/// Componentwise tolerance test: both |re| and |im| below tol.
inline bool approx_zero(Complex c, double tol = kDefaultTolerance) {
    return std::abs(c.real()) < tol && std::abs(c.imag()) < tol;
}

inline bool approx_equal(Complex a, Complex b, double tol = kDefaultTolerance) {
    return approx_zero(a - b, tol);
}

inline bool is_finite(Complex c) {
    return std::isfinite(c.real()) && std::isfinite(c.imag());
}

/// Squared magnitude |c|^2 (std::norm, spelled out for readability at call sites).
inline double mag2(Complex c) {
    return c.real() * c.real() + c.imag() * c.imag();
}

/// Interns real numbers so that values within a window of an already stored
/// value collapse onto the closest one. The default window is `tol`; callers
/// that know their inputs carry more error may pass a wider one.
class RealTable {
  public:
    explicit RealTable(double tol = kDefaultTolerance) : tol_(tol) {
        seed();
    }

    double tolerance() const {
        return tol_;
    }

    double intern(double x) {
        return intern(x, tol_);
    }

    double intern(double x, double window) {
        if (std::abs(x) < window) {
            return 0.0;
        }
        if (!std::isfinite(x)) {
            return x;
        }
        auto hi = values_.lower_bound(x);
        const double *best = nullptr;
        double best_dist = window;
        if (hi != values_.end() && *hi - x < best_dist) {
            best_dist = *hi - x;
            best = &*hi;
        }
        if (hi != values_.begin()) {
            auto lo = std::prev(hi);
            if (x - *lo < best_dist) {
                best = &*lo;
            }
        }
        if (best != nullptr) {
            return *best;
        }
        values_.insert(hi, x);
        return x;
    }

    Complex intern(Complex c) {
        return intern(c, tol_);
    }

    Complex intern(Complex c, double window) {
        return {intern(c.real(), window), intern(c.imag(), window)};
    }

    /// Stores x as-is, without snapping. Used when rebuilding after collection.
    void insert_exact(double x) {
        if (x != 0.0 && std::isfinite(x)) {
            values_.insert(x);
        }
    }

    void clear() {
        values_.clear();
        seed();
    }

    std::size_t size() const {
        return values_.size();
    }

  private:
    void seed() {
        const double r = std::sqrt(0.5);
        for (double v : {1.0, -1.0, 0.5, -0.5, r, -r}) {
            insert_exact(v);
        }
    }

    double tol_;
    std::set<double> values_;
};

}  // namespace qweak
