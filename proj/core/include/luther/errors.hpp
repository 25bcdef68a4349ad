// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the lutherfilter Project.

#pragma once

#include <stdexcept>
#include <string>

namespace luther
{

/// Base class for all errors raised by the library.
class Error : public std::runtime_error
{
public:
    explicit Error( const std::string &msg ) : std::runtime_error( msg ) {}
};

/// Mismatched grids, vector lengths or matrix shapes.
class DimensionError : public Error
{
public:
    using Error::Error;
};

/// Invalid solver or run configuration (out-of-range option values).
class ConfigError : public Error
{
public:
    using Error::Error;
};

/// Malformed or physically invalid input data, including file I/O problems.
class DataError : public Error
{
public:
    using Error::Error;
};

/// The constraint system admits no feasible point.
class InfeasibleError : public Error
{
public:
    using Error::Error;
};

/// An iterative method ran out of its iteration budget.
class ConvergenceError : public Error
{
public:
    using Error::Error;
};

} // namespace luther
