#pragma once

#include <stdexcept>
#include <string>

namespace star {

// Base class for all library failures. what() is a single line.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input text (vocabulary files, graph files, program sentences).
class ParseError : public Error {
public:
    using Error::Error;
};

// A structural rule of the data model is broken.
class ValidationError : public Error {
public:
    using Error::Error;
};

// A program referenced an identifier that does not resolve in the
// vocabulary or in the graph under execution.
class DanglingIdError : public Error {
public:
    using Error::Error;
};

// A program produced an empty intermediate result: the question cannot
// be answered from the evidence present in the graph. An empty set at
// the root is a legal value and does not raise this.
class Unanswerable : public Error {
public:
    using Error::Error;
};

// Question/option generation could not proceed (no candidate, exhausted
// corpus, duplicate options, ...).
class GenerationError : public Error {
public:
    using Error::Error;
};

}  // namespace star
