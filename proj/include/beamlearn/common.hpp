// SPDX-License-Identifier: Apache-2.0
//
// beamlearn: decentralized interference-aware beam codebook learning
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef BEAMLEARN_COMMON_HPP
#define BEAMLEARN_COMMON_HPP

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace beamlearn
{
    using cdouble = std::complex<double>;
    using CVector = Eigen::VectorXcd;
    using CMatrix = Eigen::MatrixXcd;
    using Rng = std::mt19937_64;

    inline constexpr double pi = std::numbers::pi;
    inline constexpr cdouble j1{0.0, 1.0};

    // Invalid user-supplied parameters (config values, geometry, ranges)
    class ConfigError : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    // Vector/matrix sizes that do not agree
    class DimensionError : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    // Numerical preconditions that fail at run time (e.g. a matrix that should be positive definite)
    class NumericalError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // Malformed input files
    class FormatError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // SplitMix64 finalizer, used to derive independent RNG streams from (seed, tag...) tuples.
    inline constexpr std::uint64_t mix_seed(std::uint64_t x)
    {
        x += 0x9E3779B97F4A7C15ULL;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
        return x ^ (x >> 31);
    }

    inline constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0)
    {
        return mix_seed(mix_seed(mix_seed(mix_seed(seed) ^ a) ^ (b + 0x51ED27ULL)) ^ (c + 0xA5A5ULL));
    }

    inline Rng make_stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0)
    {
        return Rng(derive_seed(seed, a, b, c));
    }

    // Uniform integer in [0, n). Avoids std::uniform_int_distribution so that streams are identical across
    // standard library implementations.
    inline std::size_t uniform_index(Rng &rng, std::size_t n)
    {
        if (n == 0)
            throw std::invalid_argument("uniform_index: empty range");
        const std::uint64_t limit = Rng::max() - (Rng::max() % n);
        std::uint64_t v;
        do
            v = rng();
        while (v >= limit);
        return static_cast<std::size_t>(v % n);
    }

    // Uniform double in [0, 1) with 53 random bits.
    inline double uniform_unit(Rng &rng)
    {
        return static_cast<double>(rng() >> 11) * 0x1.0p-53;
    }

    inline double uniform_real(Rng &rng, double lo, double hi)
    {
        return lo + (hi - lo) * uniform_unit(rng);
    }

    // Standard normal via Box-Muller (single output, portable).
    inline double standard_normal(Rng &rng)
    {
        double u1 = uniform_unit(rng);
        while (u1 <= 0.0)
            u1 = uniform_unit(rng);
        const double u2 = uniform_unit(rng);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * pi * u2);
    }

    inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
    inline double linear_to_db(double x) { return 10.0 * std::log10(x); }
}

#endif
