#pragma once

#include <stdexcept>

namespace fpix::crypto {

class CryptoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Off-curve point, bad encoding prefix or wrong encoded length.
class PointError : public CryptoError {
public:
    using CryptoError::CryptoError;
};

/// Tag mismatch: tampered ciphertext or wrong private key.
class IntegrityError : public CryptoError {
public:
    using CryptoError::CryptoError;
};

/// Ciphertext or plaintext bytes that do not have the expected layout.
class MalformedCiphertext : public CryptoError {
public:
    using CryptoError::CryptoError;
};

class RngError : public CryptoError {
public:
    using CryptoError::CryptoError;
};

class CurveParamError : public CryptoError {
public:
    using CryptoError::CryptoError;
};

class KeyError : public CryptoError {
public:
    using CryptoError::CryptoError;
};

}  // namespace fpix::crypto
