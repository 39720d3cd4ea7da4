#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace splitlab {

// Edge/site subsets are bit masks over contiguous ids 0..N-1.
using EdgeMask = std::uint64_t;

// Dense amplitude vector over the 2^N z-basis configurations.
// Bit i of the basis index = 1 means spin i is flipped from +z.
using StateVector = std::vector<double>;

inline int popcount(EdgeMask m) { return std::popcount(m); }

// (-1)^popcount(m)
inline double parity_sign(EdgeMask m) { return (std::popcount(m) & 1) ? -1.0 : 1.0; }

struct InvalidGeometry : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InvalidRegion : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct CapExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConvergenceFailure : std::runtime_error {
    std::vector<double> residuals;
    ConvergenceFailure(const std::string& what, std::vector<double> res)
        : std::runtime_error(what), residuals(std::move(res)) {}
};

struct SectorAmbiguous : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnsupportedFamily : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SchemaError : std::runtime_error {
    std::string field_path;
    SchemaError(std::string path, const std::string& what)
        : std::runtime_error(path + ": " + what), field_path(std::move(path)) {}
};

}  // namespace splitlab
