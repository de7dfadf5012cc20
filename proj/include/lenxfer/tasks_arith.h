// Copyright 2026 The LenXfer Authors
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

#ifndef LENXFER_TASKS_ARITH_H_
#define LENXFER_TASKS_ARITH_H_

#include <stdexcept>
#include <string>
#include <string_view>

#include "lenxfer/rng.h"
#include "lenxfer/task.h"

namespace lenxfer {

class NegativeResult : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BadMultiplierWidth : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// All operands and results below are digit strings written least
// significant digit first ("reversed"). "n" is max(|a|, |b|).

// Reversed a+b, zero padded to width n+1.
std::string SolveReverseAdd(std::string_view a, std::string_view b);

// Digit-wise (a[i] + b[i]) mod 10, width n+1.
std::string SolveNoCarry(std::string_view a, std::string_view b);

// '1' at every position that receives a carry from the position below,
// width n+1. Position 0 is always '0'.
std::string SolveCarryOnly(std::string_view a, std::string_view b);

// Reversed a-b, width n+1. Throws NegativeResult when b > a.
std::string SolveReverseSubtract(std::string_view a, std::string_view b);

// Chain-of-thought product of a and a 3-digit multiplier b:
//   "P0+P1= S1+P2= F"
// Pk is a*b[k]*10^k padded to |a|+1+k digits, S1 = P0+P1 and F = a*b at
// their natural widths. Throws BadMultiplierWidth unless |b| == 3.
std::string SolveCotMultiply(std::string_view a, std::string_view b);

// Copies the first operand.
std::string SolveCopyFirstOp(std::string_view a, std::string_view b);

struct ArithInstance {
  Task task = Task::kReverseAdd;
  int length = 0;
  std::string a;
  std::string b;

  char Op() const;
  // "a<op>b="
  std::string Input() const;
  std::string Target() const;
};

// Draws operands whose longer digit count is exactly `length`. The most
// significant digit of every operand is nonzero unless the operand is "0".
// Subtraction swaps operands so a >= b; CoT multiply uses |a| = length and
// a 3-digit multiplier.
ArithInstance SampleArithInstance(Task task, int length, Rng& rng);

// Helpers on reversed digit strings, shared with the solvers.
namespace reversed {

std::string Add(std::string_view a, std::string_view b);
// Requires a >= b.
std::string Subtract(std::string_view a, std::string_view b);
std::string MultiplyDigit(std::string_view a, int digit);
std::string ShiftLeft(std::string_view a, int places);
// Drops high-order zeros, keeping at least one digit.
std::string Trim(std::string_view a);
std::string PadTo(std::string_view a, size_t width);
int Compare(std::string_view a, std::string_view b);

}  // namespace reversed

}  // namespace lenxfer

#endif  // LENXFER_TASKS_ARITH_H_
