#pragma once

#include <stdexcept>
#include <string>

namespace lawson {

// Every failure raised by the library derives from Error so callers can
// catch the whole family at the CLI boundary.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InputError : public Error {
public:
    using Error::Error;
};

class UsageError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class ConsistencyError : public Error {
public:
    using Error::Error;
};

class BoundaryDegenerateError : public Error {
public:
    using Error::Error;
};

class SolverDivergedError : public Error {
public:
    using Error::Error;
};

class MeshQualityError : public Error {
public:
    using Error::Error;
};

class AssemblyError : public Error {
public:
    using Error::Error;
};

class TopologyError : public Error {
public:
    using Error::Error;
};

class SymmetryError : public Error {
public:
    using Error::Error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

} // namespace lawson
