#pragma once

#include <stdexcept>
#include <string>

namespace meshtrack {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

// geometry
class NoIntersection : public Error {
public:
    using Error::Error;
};

class DegenerateMesh : public Error {
public:
    explicit DegenerateMesh(const std::string& msg, int window = -1)
        : Error(msg), window_index(window) {}
    int window_index;
};

// dsp
class SeriesTooShort : public Error {
public:
    using Error::Error;
};

class AllFlat : public Error {
public:
    using Error::Error;
};

class PairMismatch : public Error {
public:
    using Error::Error;
};

// direction
class InsufficientPackets : public Error {
public:
    using Error::Error;
};

// speed
class LengthMismatch : public Error {
public:
    using Error::Error;
};

class EmptyCandidates : public Error {
public:
    using Error::Error;
};

class NonpositiveInterval : public Error {
public:
    using Error::Error;
};

// trajectory / eval
class EmptyMatrix : public Error {
public:
    using Error::Error;
};

class EmptyInput : public Error {
public:
    using Error::Error;
};

}  // namespace meshtrack
