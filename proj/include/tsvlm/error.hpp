// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace tsvlm {

// Argument outside an operation's contract.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Operation called on a state its precondition excludes.
class PreconditionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// New anomaly interval overlaps one already labeled.
class ConflictError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Model response without a usable boxed interval list.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    IoError(const std::string& what, std::string path)
        : std::runtime_error(what + ": " + path), path_(std::move(path)) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

class CredentialError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class TransportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ProtocolError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Evaluation stopped after too many windows failed; the response log written
// so far is kept.
class PartialResultsError : public std::runtime_error {
public:
    PartialResultsError(const std::string& what, int failed, int completed, int total)
        : std::runtime_error(what), failed_(failed), completed_(completed), total_(total) {}
    int failed() const noexcept { return failed_; }
    int completed() const noexcept { return completed_; }
    int total() const noexcept { return total_; }

private:
    int failed_, completed_, total_;
};

} // namespace tsvlm
