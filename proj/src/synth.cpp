#include "ipelicit/synth.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "ipelicit/error.hpp"

namespace ipelicit::synth {
namespace {

// Portable [0,1) draw; std::uniform_real_distribution differs across
// standard libraries.
double unit_draw(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

bool is_upper_alpha(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return c >= 'A' && c <= 'Z'; });
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string_view to_string(TransformKind kind) {
  return kind == TransformKind::kRotation ? "rotation" : "cyclic_shift";
}

TransformKind transform_kind_from_string(std::string_view name) {
  if (name == "rotation") return TransformKind::kRotation;
  if (name == "cyclic_shift") return TransformKind::kCyclicShift;
  throw Error(ErrorCode::kConfigInvalid, "unknown transform " + std::string(name));
}

TransformSpec TransformSpec::base_setup() {
  return TransformSpec{{{TransformKind::kRotation, 13},
                        {TransformKind::kCyclicShift, 1}},
                       ShiftDirection::kLeft};
}

TransformSpec TransformSpec::parse(std::string_view text) {
  TransformSpec spec;
  std::string item;
  std::istringstream in{std::string(text)};
  while (std::getline(in, item, ',')) {
    const auto t = trim(item);
    if (t.empty()) continue;
    const auto colon = t.find(':');
    if (colon == std::string_view::npos) {
      throw Error(ErrorCode::kConfigInvalid, "transform step needs kind:n, got " +
                                                 std::string(t));
    }
    const std::string count(t.substr(colon + 1));
    int n = 0;
    try {
      n = std::stoi(count);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kConfigInvalid, "bad step count " + count);
    }
    if (n < 0) throw Error(ErrorCode::kConfigInvalid, "step count must be >= 0");
    spec.steps.push_back({transform_kind_from_string(t.substr(0, colon)), n});
  }
  return spec;
}

std::string TransformSpec::describe() const {
  std::string out;
  for (const auto& step : steps) {
    if (!out.empty()) out += ',';
    out += std::string(to_string(step.kind)) + ":" + std::to_string(step.n);
  }
  return out;
}

std::string apply_rotation(std::string_view s, int n) {
  if (!is_upper_alpha(s)) {
    throw Error(ErrorCode::kNonAlphabetInput,
                "rotation needs uppercase A-Z, got '" + std::string(s) + "'");
  }
  if (n < 0) throw Error(ErrorCode::kValueOutOfRange, "rotation count must be >= 0");
  const int shift = n % 26;
  std::string out(s);
  for (char& c : out) c = static_cast<char>('A' + (c - 'A' + shift) % 26);
  return out;
}

std::string apply_cyclic_shift(std::string_view s, int n, ShiftDirection dir) {
  if (s.empty()) throw Error(ErrorCode::kEmptyString, "cannot shift an empty string");
  if (n < 0) throw Error(ErrorCode::kValueOutOfRange, "shift count must be >= 0");
  std::string out(s);
  const auto k = static_cast<std::size_t>(n) % out.size();
  if (dir == ShiftDirection::kLeft) {
    std::rotate(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(k), out.end());
  } else {
    std::rotate(out.rbegin(), out.rbegin() + static_cast<std::ptrdiff_t>(k), out.rend());
  }
  return out;
}

std::string apply_transform(const TransformSpec& spec, std::string_view s) {
  if (!is_upper_alpha(s)) {
    throw Error(ErrorCode::kNonAlphabetInput,
                "transform needs uppercase A-Z, got '" + std::string(s) + "'");
  }
  std::string cur(s);
  for (const auto& step : spec.steps) {
    cur = step.kind == TransformKind::kRotation
              ? apply_rotation(cur, step.n)
              : apply_cyclic_shift(cur, step.n, spec.shift_direction);
  }
  return cur;
}

std::string inject_case_noise(std::string_view s, const NoiseSpec& noise) {
  if (!(noise.p >= 0.0 && noise.p <= 1.0)) {
    throw Error(ErrorCode::kValueOutOfRange, "noise p outside [0,1]");
  }
  std::mt19937_64 rng(noise.rng_seed);
  std::string out(s);
  for (char& c : out) {
    if (!std::isalpha(static_cast<unsigned char>(c))) continue;
    if (unit_draw(rng) < noise.p) {
      c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
  }
  return out;
}

IclTask generate_icl_task(const TransformSpec& spec, const NoiseSpec& noise,
                          int m, int word_length, std::uint64_t rng_seed) {
  if (m < 0) throw Error(ErrorCode::kValueOutOfRange, "m must be >= 0");
  if (word_length < 1) throw Error(ErrorCode::kValueOutOfRange, "word_length must be >= 1");
  // 26^L distinct inputs exist; stop counting once it clearly exceeds m + 1.
  double vocab = 1.0;
  for (int i = 0; i < word_length && vocab <= m + 1.0; ++i) vocab *= 26.0;
  if (vocab < m + 1.0) {
    throw Error(ErrorCode::kVocabularyExhausted,
                "cannot draw " + std::to_string(m + 1) + " distinct inputs of length " +
                    std::to_string(word_length));
  }

  std::mt19937_64 rng(rng_seed);
  std::set<std::string> used;
  auto fresh_word = [&] {
    for (;;) {
      std::string w(static_cast<std::size_t>(word_length), 'A');
      for (char& c : w) c = static_cast<char>('A' + rng() % 26);
      if (used.insert(w).second) return w;
    }
  };

  IclTask task;
  task.m = m;
  for (int j = 0; j < m; ++j) {
    std::string input = fresh_word();
    // Each example gets its own noise stream derived from the noise seed.
    NoiseSpec per_example{noise.p, noise.rng_seed * 1000003ULL + static_cast<std::uint64_t>(j)};
    std::string output = inject_case_noise(apply_transform(spec, input), per_example);
    task.examples.push_back({std::move(input), std::move(output)});
  }
  task.query_input = fresh_word();
  task.clean_query_output = apply_transform(spec, task.query_input);
  return task;
}

std::string render_icl_question(const IclTask& task) {
  std::string out =
      "Infer the transformation rule from the examples and apply it to the last input.\n";
  for (const auto& ex : task.examples) {
    out += "Input: " + ex.input + " → Output: " + ex.output + "\n";
  }
  out += "Input: " + task.query_input + " → Output:";
  return out;
}

double casing_probability(int letters, int lowercase, double p) {
  return std::pow(p, lowercase) * std::pow(1.0 - p, letters - lowercase);
}

std::vector<CaseVariant> ground_truth_variants(std::string_view clean, double p,
                                               std::uint64_t max_enum) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::kValueOutOfRange, "p outside [0,1]");
  std::vector<std::size_t> letter_pos;
  for (std::size_t i = 0; i < clean.size(); ++i) {
    const char c = clean[i];
    if (c >= 'a' && c <= 'z') {
      throw Error(ErrorCode::kNonAlphabetInput, "clean output must be uppercase");
    }
    if (c >= 'A' && c <= 'Z') letter_pos.push_back(i);
  }
  const int letters = static_cast<int>(letter_pos.size());
  if (letters >= 63 || (std::uint64_t{1} << letters) > max_enum) {
    throw Error(ErrorCode::kEnumerationTooLarge,
                "2^" + std::to_string(letters) + " variants exceeds the cap");
  }
  // Bit (letters-1-k) marks letter k as lowercase, so for equal popcount a
  // larger mask lowercases earlier letters.
  std::vector<std::uint64_t> masks(std::uint64_t{1} << letters);
  for (std::uint64_t mask = 0; mask < masks.size(); ++mask) masks[mask] = mask;
  std::sort(masks.begin(), masks.end(), [](std::uint64_t a, std::uint64_t b) {
    const int pa = std::popcount(a);
    const int pb = std::popcount(b);
    return pa != pb ? pa < pb : a > b;
  });

  std::vector<CaseVariant> out;
  for (std::uint64_t mask : masks) {
    const int lower = std::popcount(mask);
    const double prob = casing_probability(letters, lower, p);
    if (prob == 0.0) continue;
    std::string text(clean);
    for (int k = 0; k < letters; ++k) {
      if (mask & (std::uint64_t{1} << (letters - 1 - k))) {
        char& c = text[letter_pos[static_cast<std::size_t>(k)]];
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      }
    }
    out.push_back({std::move(text), lower, prob});
  }
  return out;
}

bool permissive_match(std::string_view prediction, std::string_view clean_truth) {
  std::string up(trim(prediction));
  for (char& c : up) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return up == clean_truth;
}

}  // namespace ipelicit::synth
