// Copyright 2026 The pulseqml authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace pulseqml {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

inline constexpr int kMaxQubits = 10;
inline constexpr Complex kImag{0.0, 1.0};

// A closure / submodule iteration would exceed its dimension cap. For Lie
// closures this usually signals full controllability of the system.
class MaxDimExceeded : public std::runtime_error {
public:
    explicit MaxDimExceeded(const std::string& what) : std::runtime_error(what) {}
};

// Two independently seeded ideal splits disagreed on block dimensions.
class DecompositionUnstable : public std::runtime_error {
public:
    explicit DecompositionUnstable(const std::string& what) : std::runtime_error(what) {}
};

inline std::string version_string() { return "0.1.0"; }

}  // namespace pulseqml
