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

#include "lenxfer/tasks_arith.h"

#include <algorithm>

namespace lenxfer {
namespace reversed {
namespace {

int DigitAt(std::string_view s, size_t i) { return i < s.size() ? s[i] - '0' : 0; }

}  // namespace

std::string Trim(std::string_view a) {
  size_t len = a.size();
  while (len > 1 && a[len - 1] == '0') --len;
  if (len == 0) return "0";
  return std::string(a.substr(0, len));
}

std::string PadTo(std::string_view a, size_t width) {
  std::string out(a);
  if (out.size() < width) out.append(width - out.size(), '0');
  return out;
}

int Compare(std::string_view a, std::string_view b) {
  const std::string ta = Trim(a), tb = Trim(b);
  if (ta.size() != tb.size()) return ta.size() < tb.size() ? -1 : 1;
  for (size_t i = ta.size(); i-- > 0;) {
    if (ta[i] != tb[i]) return ta[i] < tb[i] ? -1 : 1;
  }
  return 0;
}

std::string Add(std::string_view a, std::string_view b) {
  const size_t n = std::max(a.size(), b.size());
  std::string out;
  out.reserve(n + 1);
  int carry = 0;
  for (size_t i = 0; i < n; ++i) {
    const int s = DigitAt(a, i) + DigitAt(b, i) + carry;
    out.push_back(static_cast<char>('0' + s % 10));
    carry = s / 10;
  }
  if (carry) out.push_back('1');
  return out;
}

std::string Subtract(std::string_view a, std::string_view b) {
  if (Compare(a, b) < 0) throw NegativeResult("subtraction would be negative");
  std::string out;
  out.reserve(a.size());
  int borrow = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    int d = DigitAt(a, i) - DigitAt(b, i) - borrow;
    borrow = d < 0;
    if (borrow) d += 10;
    out.push_back(static_cast<char>('0' + d));
  }
  return out;
}

std::string MultiplyDigit(std::string_view a, int digit) {
  std::string out;
  out.reserve(a.size() + 1);
  int carry = 0;
  for (char c : a) {
    const int p = (c - '0') * digit + carry;
    out.push_back(static_cast<char>('0' + p % 10));
    carry = p / 10;
  }
  if (carry) out.push_back(static_cast<char>('0' + carry));
  return out;
}

std::string ShiftLeft(std::string_view a, int places) {
  return std::string(static_cast<size_t>(places), '0') + std::string(a);
}

}  // namespace reversed

namespace {

size_t Width(std::string_view a, std::string_view b) { return std::max(a.size(), b.size()) + 1; }

void CheckOperands(std::string_view a, std::string_view b) {
  for (auto s : {a, b}) {
    if (s.empty()) throw std::invalid_argument("empty operand");
    for (char c : s) {
      if (c < '0' || c > '9') throw std::invalid_argument("operand is not a digit string");
    }
  }
}

// Random digit string of `digits` digits, reversed, with a nonzero most
// significant digit (a lone digit may be zero).
std::string RandomOperand(int digits, Rng& rng) {
  std::string s;
  s.reserve(static_cast<size_t>(digits));
  for (int i = 0; i < digits; ++i) {
    const bool msd = i == digits - 1 && digits > 1;
    s.push_back(static_cast<char>('0' + rng.UniformInt(msd ? 1 : 0, 9)));
  }
  return s;
}

}  // namespace

std::string SolveReverseAdd(std::string_view a, std::string_view b) {
  CheckOperands(a, b);
  return reversed::PadTo(reversed::Add(a, b), Width(a, b));
}

std::string SolveNoCarry(std::string_view a, std::string_view b) {
  CheckOperands(a, b);
  const size_t width = Width(a, b);
  std::string out(width, '0');
  for (size_t i = 0; i + 1 < width; ++i) {
    const int da = i < a.size() ? a[i] - '0' : 0;
    const int db = i < b.size() ? b[i] - '0' : 0;
    out[i] = static_cast<char>('0' + (da + db) % 10);
  }
  return out;
}

std::string SolveCarryOnly(std::string_view a, std::string_view b) {
  CheckOperands(a, b);
  const size_t width = Width(a, b);
  std::string out(width, '0');
  int carry = 0;
  for (size_t i = 0; i + 1 < width; ++i) {
    const int da = i < a.size() ? a[i] - '0' : 0;
    const int db = i < b.size() ? b[i] - '0' : 0;
    carry = (da + db + carry) >= 10;
    out[i + 1] = carry ? '1' : '0';
  }
  return out;
}

std::string SolveReverseSubtract(std::string_view a, std::string_view b) {
  CheckOperands(a, b);
  return reversed::PadTo(reversed::Subtract(a, b), Width(a, b));
}

std::string SolveCotMultiply(std::string_view a, std::string_view b) {
  CheckOperands(a, b);
  if (b.size() != 3) {
    throw BadMultiplierWidth("CoT multiply needs a 3-digit multiplier, got " +
                             std::to_string(b.size()));
  }
  const size_t n = a.size();
  std::string partial[3];
  for (int k = 0; k < 3; ++k) {
    const std::string product =
        reversed::ShiftLeft(reversed::Trim(reversed::MultiplyDigit(a, b[static_cast<size_t>(k)] - '0')), k);
    partial[k] = reversed::PadTo(reversed::Trim(product), n + 1 + static_cast<size_t>(k));
  }
  const std::string s1 = reversed::Trim(reversed::Add(partial[0], partial[1]));
  const std::string total = reversed::Trim(reversed::Add(s1, partial[2]));
  return partial[0] + "+" + partial[1] + "= " + s1 + "+" + partial[2] + "= " + total;
}

std::string SolveCopyFirstOp(std::string_view a, std::string_view /*b*/) { return std::string(a); }

char ArithInstance::Op() const {
  switch (task) {
    case Task::kReverseSubtract:
      return '-';
    case Task::kCotMultiply:
      return '*';
    default:
      return '+';
  }
}

std::string ArithInstance::Input() const { return a + Op() + b + "="; }

std::string ArithInstance::Target() const {
  switch (task) {
    case Task::kReverseAdd:
      return SolveReverseAdd(a, b);
    case Task::kNoCarry:
      return SolveNoCarry(a, b);
    case Task::kCarryOnly:
      return SolveCarryOnly(a, b);
    case Task::kReverseSubtract:
      return SolveReverseSubtract(a, b);
    case Task::kCotMultiply:
      return SolveCotMultiply(a, b);
    case Task::kCopyFirstOp:
      return SolveCopyFirstOp(a, b);
    default:
      throw std::invalid_argument("not an arithmetic task: " + std::string(TaskName(task)));
  }
}

ArithInstance SampleArithInstance(Task task, int length, Rng& rng) {
  if (length < 1) throw std::invalid_argument("arithmetic length must be >= 1");
  if (!IsArithmetic(task)) {
    throw std::invalid_argument("not an arithmetic task: " + std::string(TaskName(task)));
  }
  ArithInstance inst;
  inst.task = task;
  inst.length = length;
  if (task == Task::kCotMultiply) {
    inst.a = RandomOperand(length, rng);
    inst.b = RandomOperand(3, rng);
    return inst;
  }
  int len_a, len_b;
  do {
    len_a = static_cast<int>(rng.UniformInt(1, length));
    len_b = static_cast<int>(rng.UniformInt(1, length));
  } while (std::max(len_a, len_b) != length);
  inst.a = RandomOperand(len_a, rng);
  inst.b = RandomOperand(len_b, rng);
  if (task == Task::kReverseSubtract && reversed::Compare(inst.a, inst.b) < 0) {
    std::swap(inst.a, inst.b);
  }
  return inst;
}

}  // namespace lenxfer
