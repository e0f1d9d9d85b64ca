/*
 * Copyright 2026 Mess toolkit contributors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mess {

/// Base class for all toolkit errors. Input/format problems map to CLI exit
/// code 2, simulation/runtime problems to exit code 3.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Structural problems in an input file (missing columns, bad header).
class FormatError : public Error {
public:
    using Error::Error;
};

/// A syntactically valid row carrying an out-of-domain value.
class ValueError : public Error {
public:
    ValueError(uint64_t row, const std::string& what)
        : Error("row " + std::to_string(row) + ": " + what), row_(row) {}
    uint64_t row() const { return row_; }

private:
    uint64_t row_;
};

/// Input file contains no data rows.
class EmptyInputError : public Error {
public:
    using Error::Error;
};

/// Malformed trace line; carries the 1-based line number.
class ParseError : public Error {
public:
    ParseError(uint64_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    uint64_t line() const { return line_; }

private:
    uint64_t line_;
};

/// Requests presented to a device out of arrival order.
class ProtocolError : public Error {
public:
    using Error::Error;
};

/// Demand at or beyond a device's bandwidth pole.
class SaturationError : public Error {
public:
    using Error::Error;
};

/// Inconsistent simulation state (e.g. zero-length window).
class SimulationError : public Error {
public:
    using Error::Error;
};

/// Fixed-point solver could not bracket a root.
class OracleError : public Error {
public:
    using Error::Error;
};

} // namespace mess
