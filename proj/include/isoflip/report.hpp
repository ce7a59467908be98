#pragma once

#include <string>
#include <utility>
#include <vector>

namespace isoflip {

enum class Verdict { pass, fail, inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    default: return "inconclusive";
  }
}

struct Assertion {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double bound = 0.0;
  bool precondition = false;  ///< failing preconditions make the report inconclusive
};

/// Outcome of one claim check. Precondition failures yield `inconclusive`;
/// otherwise the verdict is `pass` iff every assertion passed.
struct VerificationReport {
  std::string claim;
  std::vector<std::pair<std::string, std::string>> inputs;
  std::vector<Assertion> assertions;
  std::vector<std::string> notes;

  void input(std::string key, std::string value) { inputs.emplace_back(std::move(key), std::move(value)); }

  /// Value of the first input with this key, or "" if absent.
  std::string input_value(const std::string& key) const {
    for (const auto& [k, v] : inputs)
      if (k == key) return v;
    return {};
  }

  bool check(std::string name, bool pass, double measured = 0.0, double bound = 0.0) {
    assertions.push_back({std::move(name), pass, measured, bound, false});
    return pass;
  }

  /// measured <= bound
  bool check_le(std::string name, double measured, double bound) {
    return check(std::move(name), measured <= bound, measured, bound);
  }

  bool require(std::string name, bool pass, double measured = 0.0, double bound = 0.0) {
    assertions.push_back({std::move(name), pass, measured, bound, true});
    return pass;
  }

  void note(std::string text) { notes.push_back(std::move(text)); }

  Verdict verdict() const {
    bool all = true;
    for (const auto& a : assertions) {
      if (a.precondition && !a.pass) return Verdict::inconclusive;
      all = all && a.pass;
    }
    return all ? Verdict::pass : Verdict::fail;
  }

  bool passed() const { return verdict() == Verdict::pass; }

  const Assertion* find(const std::string& name) const {
    for (const auto& a : assertions)
      if (a.name == name) return &a;
    return nullptr;
  }
};

}  // namespace isoflip
