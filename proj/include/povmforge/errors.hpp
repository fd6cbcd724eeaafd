/*
 * This code is part of povm-forge.
 *
 * (C) Copyright 2026 povm-forge contributors.
 *
 * Licensed under the Apache License, Version 2.0; see the LICENSE file in
 * the repository root or http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace povmforge {

// Base class for every domain error thrown by the library.
class PovmForgeError : public std::runtime_error {
 public:
  explicit PovmForgeError(const std::string& what) : std::runtime_error(what) {}
};

// Operands have incompatible shapes or act on different spaces.
class DimensionMismatch : public PovmForgeError {
 public:
  using PovmForgeError::PovmForgeError;
};

// A matrix required to be Hermitian is not, beyond tolerance.
class NotHermitian : public PovmForgeError {
 public:
  using PovmForgeError::PovmForgeError;
};

// A matrix required to be positive semidefinite has a negative eigenvalue
// beyond tolerance.
class NotPsd : public PovmForgeError {
 public:
  using PovmForgeError::PovmForgeError;
};

// A family of operators fails its normalization (sum-to-identity, unit
// trace, trace preservation) beyond tolerance.
class NotNormalized : public PovmForgeError {
 public:
  using PovmForgeError::PovmForgeError;
};

// Two observables or an observable and a relabeling disagree on the
// outcome set.
class OutcomeMismatch : public PovmForgeError {
 public:
  using PovmForgeError::PovmForgeError;
};

// A normalizer that must be inverted is numerically singular.
class SingularNormalizer : public PovmForgeError {
 public:
  using PovmForgeError::PovmForgeError;
};

// A claimed dilation fails its defining identities.
class InvalidDilation : public PovmForgeError {
 public:
  using PovmForgeError::PovmForgeError;
};

// A feasibility problem is structurally inconsistent (block shapes,
// equation sizes) before any solving happens.
class IllFormedProblem : public PovmForgeError {
 public:
  using PovmForgeError::PovmForgeError;
};

// Document-level failures: malformed text, schema violations, or objects
// whose declared shape disagrees with their data.
class SyntaxError : public PovmForgeError {
 public:
  using PovmForgeError::PovmForgeError;
};

class SchemaError : public PovmForgeError {
 public:
  using PovmForgeError::PovmForgeError;
};

class DimensionError : public PovmForgeError {
 public:
  using PovmForgeError::PovmForgeError;
};

// The CLI was asked for a command or named object that does not exist.
class UnknownCommand : public PovmForgeError {
 public:
  using PovmForgeError::PovmForgeError;
};

class MissingObject : public PovmForgeError {
 public:
  using PovmForgeError::PovmForgeError;
};

}  // namespace povmforge
