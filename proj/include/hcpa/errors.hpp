/*
 Copyright 2026 The hcpa Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#ifndef HCPA_ERRORS_HPP
#define HCPA_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace hcpa {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid parameters or configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// lambda_P fell below the configured floor; the cash-flow feedback b/lambda_P is near-singular.
class MultiplierFloor : public Error {
public:
    using Error::Error;
};

/// Base for numerical failures (CLI exit code 2).
class NumericalError : public Error {
public:
    using Error::Error;
};

/// An ODE state component exceeded the blow-up threshold (finite-time escape).
class BlowUp : public NumericalError {
public:
    BlowUp(const std::string& what, double time) : NumericalError(what), time_(time) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

class NonFinite : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class CflViolation : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class QuadratureDomain : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// The heat-equation solution reached v <= 0, so log v is undefined.
class NonPositiveV : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class OutOfRange : public Error {
public:
    using Error::Error;
};

/// Participation threshold is not attainable on the multiplier range (CLI exit code 3).
class Infeasible : public Error {
public:
    using Error::Error;
};

class NotBracketed : public Infeasible {
public:
    NotBracketed(const std::string& what, double ja_low, double ja_high)
        : Infeasible(what), ja_low_(ja_low), ja_high_(ja_high) {}
    /// JA range [ja_low, ja_high] that was actually reachable.
    double ja_low() const noexcept { return ja_low_; }
    double ja_high() const noexcept { return ja_high_; }

private:
    double ja_low_;
    double ja_high_;
};

class ThresholdBelowWc : public Infeasible {
public:
    ThresholdBelowWc(const std::string& what, double wc) : Infeasible(what), wc_(wc) {}
    double wc() const noexcept { return wc_; }

private:
    double wc_;
};

}  // namespace hcpa

#endif  // HCPA_ERRORS_HPP
