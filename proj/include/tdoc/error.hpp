#pragma once

#include <stdexcept>
#include <string>

namespace tdoc {

// Base of everything the library throws on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A caller broke an operation's precondition.
class InvalidInput : public Error {
public:
    using Error::Error;
};

class IngestError : public Error {
public:
    using Error::Error;
};

class ManifestError : public Error {
public:
    using Error::Error;
};

class ExportError : public Error {
public:
    using Error::Error;
};

class TrainingError : public Error {
public:
    using Error::Error;
};

// Malformed external file; message carries the offending line number.
class SchemaError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace tdoc
