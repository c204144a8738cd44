#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ipelicit::synth {

// Sequence-transformation tasks for in-context learning with controllable
// casing noise. Inputs and clean outputs are uppercase A-Z.

enum class TransformKind { kRotation, kCyclicShift };
enum class ShiftDirection { kLeft, kRight };

std::string_view to_string(TransformKind kind);
TransformKind transform_kind_from_string(std::string_view name);

struct TransformStep {
  TransformKind kind;
  int n;  // >= 0
};

struct TransformSpec {
  std::vector<TransformStep> steps;
  ShiftDirection shift_direction = ShiftDirection::kLeft;

  // Rotation by 13 followed by a cyclic shift by 1.
  static TransformSpec base_setup();
  // Parses "rotation:13,cyclic_shift:1".
  static TransformSpec parse(std::string_view text);
  std::string describe() const;
};

struct NoiseSpec {
  double p = 0.0;  // per-letter lowercase probability
  std::uint64_t rng_seed = 0;
};

struct IclExample {
  std::string input;
  std::string output;  // noisy
};

struct IclTask {
  std::vector<IclExample> examples;
  std::string query_input;
  std::string clean_query_output;
  int m = 0;
};

struct CaseVariant {
  std::string text;
  int lowercase_count = 0;
  double prob = 0.0;
};

// Caesar rotation: each letter advanced n places, Z wraps to A.
std::string apply_rotation(std::string_view s, int n);

// Positional rotation by n mod |s| (left by default).
std::string apply_cyclic_shift(std::string_view s, int n,
                               ShiftDirection dir = ShiftDirection::kLeft);

std::string apply_transform(const TransformSpec& spec, std::string_view s);

// Lowercases each letter independently with probability p; deterministic in
// the seed.
std::string inject_case_noise(std::string_view s, const NoiseSpec& noise);

IclTask generate_icl_task(const TransformSpec& spec, const NoiseSpec& noise,
                          int m, int word_length, std::uint64_t rng_seed);

// "Input: X → Output: Y" lines, then the query line with an empty output.
std::string render_icl_question(const IclTask& task);

// p^l (1-p)^(L-l), with 0^0 = 1.
double casing_probability(int letters, int lowercase, double p);

inline constexpr std::uint64_t kDefaultMaxEnum = std::uint64_t{1} << 20;

// All case variants of `clean` with non-zero probability, ordered by the
// number of lowercased letters and then by which letters they are (earlier
// letters first).
std::vector<CaseVariant> ground_truth_variants(
    std::string_view clean, double p, std::uint64_t max_enum = kDefaultMaxEnum);

// uppercase(trim(prediction)) == clean_truth.
bool permissive_match(std::string_view prediction, std::string_view clean_truth);

}  // namespace ipelicit::synth
