#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "refac/adapter.hpp"
#include "refac/program.hpp"

namespace refac {

class Value;
using Env = std::map<std::string, Value>;
using EnvPtr = std::shared_ptr<const Env>;

struct IntV {
  std::int64_t value = 0;
};
struct ListV {
  std::vector<Value> items;
};
/// Environments bind only the identifiers free in the body.
struct ClosureV {
  std::vector<std::string> params;
  Term body;
  EnvPtr env;
};
struct AtomV {
  std::string name;
};
/// An intrinsic used as a value, possibly partially applied (MFH).
struct PrimV {
  std::string name;
  int arity = 0;
  std::vector<Value> args;
};

class Value {
 public:
  using Variant = std::variant<IntV, ListV, ClosureV, AtomV, PrimV>;

  Value() : v_(IntV{}) {}
  Value(IntV x) : v_(std::move(x)) {}
  Value(ListV x) : v_(std::move(x)) {}
  Value(ClosureV x) : v_(std::move(x)) {}
  Value(AtomV x) : v_(std::move(x)) {}
  Value(PrimV x) : v_(std::move(x)) {}

  template <class T>
  const T* as() const {
    return std::get_if<T>(&v_);
  }
  const Variant& variant() const { return v_; }
  bool is_function() const { return as<ClosureV>() || as<PrimV>(); }

 private:
  Variant v_;
};

Value int_value(std::int64_t v);
Value list_value(const std::vector<std::int64_t>& xs);

std::string to_string(const Value& v, Flavor flavor);

enum class ErrKind { UnboundName, ArityMismatch, NotAFunction, BadOperand };
std::string_view to_string(ErrKind kind);

struct Outcome {
  enum class Kind { ok, err, timeout };
  Kind kind = Kind::timeout;
  Value value;
  ErrKind err = ErrKind::UnboundName;

  static Outcome ok(Value v) { return {Kind::ok, std::move(v), {}}; }
  static Outcome error(ErrKind e) { return {Kind::err, {}, e}; }
  static Outcome timeout() { return {}; }
};

std::string to_string(const Outcome& o, Flavor flavor);

inline constexpr std::size_t kDefaultFuel = 100000;
// Nested applications beyond this depth count as running out of fuel.
inline constexpr int kMaxCallDepth = 2000;

/// Strict, left-to-right evaluation of `entry` applied to `args`.
/// Object-level faults are reported in the Outcome, never thrown.
Outcome interpret(const Program& p, const FunKey& entry,
                  const std::vector<Value>& args,
                  std::size_t fuel = kDefaultFuel);

/// Evaluates a closed term against the definitions of `p`.
Outcome interpret_term(const Program& p, const Term& t,
                       std::size_t fuel = kDefaultFuel);

/// Applies a function value (all arguments at once in MFE, one at a time in
/// MFH).
Outcome apply_value(const Program& p, const Value& fn,
                    const std::vector<Value>& args,
                    std::size_t fuel = kDefaultFuel);

enum class Shape { int_, list_int, fun_int_int };
std::string_view to_string(Shape s);
Shape parse_shape(std::string_view s);

/// Deterministic in `seed`: ints uniform in [-100, 100], lists of length
/// 0..5, functions drawn from a fixed pool of eight unary closures.
std::vector<Value> gen_values(Shape shape, std::uint64_t seed, std::size_t n,
                              Flavor flavor);

/// The pool used for fun_int_int, in order: identity, +1, *2, constant 0,
/// negate, *-3, +40, square.
const std::vector<Term>& closure_pool(Flavor flavor);

/// Parameter shapes of `entry` guessed from how each parameter is used.
std::vector<Shape> infer_shapes(const Program& p, const FunKey& entry);

struct EquivOptions {
  std::size_t samples = 100;
  std::size_t fuel = kDefaultFuel;
  std::uint64_t seed = 1;
};

/// Outcome equality; function values are compared by applying both to five
/// generated ints.
bool outcomes_agree(const Program& pa, const Outcome& a, const Program& pb,
                    const Outcome& b, std::size_t fuel = kDefaultFuel);

enum class Verdict { equivalent_on_samples, counterexample_found, inconclusive };
std::string_view to_string(Verdict v);

struct Disagreement {
  std::vector<Value> args;
  Outcome old_outcome;
  Outcome new_outcome;
};

struct EquivReport {
  Flavor flavor = Flavor::mfe;
  std::size_t samples = 0;
  std::size_t agreements = 0;
  std::size_t inconclusive = 0;
  std::vector<Disagreement> disagreements;
  Verdict verdict = Verdict::inconclusive;
};

EquivReport check_equiv(const Program& old_p, const Program& new_p,
                        const FunKey& entry, const std::vector<Shape>& shapes,
                        const EquivOptions& opts = {});

EquivReport check_equiv(const Program& old_p, const FunKey& old_entry,
                        const Program& new_p, const FunKey& new_entry,
                        const std::vector<Shape>& shapes,
                        const EquivOptions& opts = {});

/// Tests the adapter against the definition it replaces: the target in `p`
/// versus a wrapper `__old_N(params) -> adapter(params)` in a program where
/// the target is replaced by the new definitions.
EquivReport check_obligation(const Program& p, const AdapterSpec& spec,
                             const EquivOptions& opts = {});

std::string report_text(const EquivReport& r);
std::string report_json(const EquivReport& r);

}  // namespace refac
