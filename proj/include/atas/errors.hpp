#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace atas {

// Bad tile content, unknown label bases, unstable unions.
struct ConfigurationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A tile type spec that cannot be instantiated (overlap, bad level, bad reference).
struct SpecError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Asked for a value outside a table's domain.
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// complete() exceeded its potential bound. Should never happen.
struct CompletionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Built-in corpus failed its loader audit.
struct CorpusIntegrityError : std::runtime_error {
    CorpusIntegrityError(const std::string& what, std::vector<std::string> missing)
        : std::runtime_error(what), unreproduced(std::move(missing)) {}
    std::vector<std::string> unreproduced;
};

} // namespace atas
