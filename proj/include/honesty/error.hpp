#pragma once

#include <stdexcept>
#include <string>

namespace honesty {

/// Base of every error the library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad configuration or missing input files. The CLI maps these to exit code 2.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed or insufficient data. The CLI maps these to exit code 3.
class DataError : public Error {
public:
    using Error::Error;
};

class NoTokensInVocabulary : public DataError {
public:
    NoTokensInVocabulary() : DataError("no token is present in the embedding vocabulary") {}
};

class ZeroNormVector : public DataError {
public:
    ZeroNormVector() : DataError("cosine similarity is undefined for a zero-norm vector") {}
};

class UnknownTerm : public DataError {
public:
    explicit UnknownTerm(const std::string& term) : DataError("unknown term: " + term) {}
};

class EmptyCategory : public DataError {
public:
    explicit EmptyCategory(const std::string& category)
        : DataError("category has no tokens: " + category) {}
};

class UnparseableUrl : public DataError {
public:
    explicit UnparseableUrl(const std::string& url) : DataError("unparseable URL: " + url) {}
};

class RankDeficient : public DataError {
public:
    RankDeficient() : DataError("design matrix is rank deficient") {}
};

class InsufficientData : public DataError {
public:
    using DataError::DataError;
};

}  // namespace honesty
