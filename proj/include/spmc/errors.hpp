#pragma once

#include <stdexcept>
#include <string>

namespace spmc {

/// Requested direction lies outside the array's observable sector (-pi/2, pi/2).
class OutOfSectorError : public std::domain_error {
public:
    explicit OutOfSectorError(const std::string& what) : std::domain_error(what) {}
};

/// Every baseline of an observation was flagged unreliable; nothing to fuse.
class NoSignalError : public std::runtime_error {
public:
    explicit NoSignalError(const std::string& what) : std::runtime_error(what) {}
};

/// A bearing or gradient was requested for coincident points.
class DegenerateGeometryError : public std::domain_error {
public:
    explicit DegenerateGeometryError(const std::string& what) : std::domain_error(what) {}
};

} // namespace spmc
