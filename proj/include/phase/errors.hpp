// errors.hpp
// Exception hierarchy for the phase library. Every failure mode callers are
// expected to handle gets its own type; all derive from phase::Error.

#pragma once

#include <stdexcept>
#include <string>

namespace phase {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// core-linalg
class NotHermitian : public Error {
public:
    explicit NotHermitian(const std::string& what) : Error(what) {}
};

class RankDeficient : public Error {
public:
    explicit RankDeficient(const std::string& what) : Error(what) {}
};

class ShapeMismatch : public Error {
public:
    explicit ShapeMismatch(const std::string& what) : Error(what) {}
};

// states
class NotFullRank : public Error {
public:
    explicit NotFullRank(const std::string& what) : Error(what) {}
};

class ConventionMismatch : public Error {
public:
    explicit ConventionMismatch(const std::string& what) : Error(what) {}
};

class DimMismatch : public Error {
public:
    explicit DimMismatch(const std::string& what) : Error(what) {}
};

class NormExceedsOne : public Error {
public:
    explicit NormExceedsOne(const std::string& what) : Error(what) {}
};

// transport
class DegenerateSpectrum : public Error {
public:
    explicit DegenerateSpectrum(const std::string& what) : Error(what) {}
};

class LevelCrossing : public Error {
public:
    explicit LevelCrossing(const std::string& what) : Error(what) {}
};

class UndefinedPhase : public Error {
public:
    explicit UndefinedPhase(const std::string& what) : Error(what) {}
};

// cli
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(what) {}
};

class NumericError : public Error {
public:
    explicit NumericError(const std::string& what) : Error(what) {}
};

} // namespace phase
