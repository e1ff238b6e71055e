#pragma once

#include <stdexcept>
#include <string>

namespace attn {

// Malformed input data (files, lines, labels). The CLI maps this to exit 3.
struct DataError : std::runtime_error {
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Numeric domain violation (delta outside (0,1), non-positive std, ...). Exit 4.
struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

// Model/example dimension disagreement.
struct DimensionError : DomainError {
    explicit DimensionError(const std::string& what) : DomainError(what) {}
};

// Broken API precondition (wrong outcome kind, permutation length mismatch).
struct ContractError : std::logic_error {
    explicit ContractError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace attn
