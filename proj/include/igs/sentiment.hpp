#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "igs/lexicon.hpp"

namespace igs {

struct SentimentScore {
  double compound = 0.0;  // always within [-1, +1]
};

// x / sqrt(x^2 + alpha): odd, strictly increasing, bounded by (-1, +1).
double normalize_valence_sum(double x, double alpha = 15.0);

// Rule constants of the lexicon-and-rules analyzer.
namespace vader {
inline constexpr double kBoosterIncrement = 0.293;
inline constexpr double kBoosterDecrement = -0.293;
inline constexpr double kAllCapsIncrement = 0.733;
inline constexpr double kNegationScalar = -0.74;
inline constexpr double kNormalizationAlpha = 15.0;
inline constexpr double kExclamationIncrement = 0.292;
inline constexpr int kMaxExclamations = 4;
inline constexpr double kQuestionIncrement = 0.18;
inline constexpr double kQuestionCap = 0.96;
inline constexpr double kButBeforeWeight = 0.5;
inline constexpr double kButAfterWeight = 1.5;
inline constexpr double kSecondWordDecay = 0.95;
inline constexpr double kThirdWordDecay = 0.9;
inline constexpr double kNeverSoBoost = 1.25;
}  // namespace vader

enum class AnalyzerKind { builtin_lexicon_rules, external_command };

struct AnalyzerDescriptor {
  std::string analyzer_id = "vader";
  AnalyzerKind kind = AnalyzerKind::builtin_lexicon_rules;
  // builtin_lexicon_rules
  std::filesystem::path lexicon_path;
  std::filesystem::path emoji_lexicon_path;  // optional
  // external_command: argv, executed without a shell
  std::vector<std::string> command;
};

class SentimentAnalyzer {
 public:
  virtual ~SentimentAnalyzer() = default;

  virtual SentimentScore analyze(std::string_view text) const = 0;

  virtual const AnalyzerDescriptor& descriptor() const = 0;
  // Identifies the scoring function: lexicon checksum for the builtin
  // analyzer, a digest of the argv for external commands.
  virtual std::string fingerprint() const = 0;
};

// Lexicon valence lookup with booster/dampener distance decay, negation
// scoping, ALL-CAPS emphasis, "no"/"least"/"but" handling, idiom special
// cases and punctuation amplification, reduced to one normalized compound.
// Immutable after construction; safe for concurrent callers.
class LexiconRuleAnalyzer final : public SentimentAnalyzer {
 public:
  LexiconRuleAnalyzer(AnalyzerDescriptor descriptor, ValenceLexicon lexicon, EmojiLexicon emoji);
  explicit LexiconRuleAnalyzer(AnalyzerDescriptor descriptor);

  SentimentScore analyze(std::string_view text) const override;
  // Sum of rule-adjusted valences before normalization.
  double valence_sum(std::string_view text) const;

  const AnalyzerDescriptor& descriptor() const override { return descriptor_; }
  std::string fingerprint() const override { return lexicon_.checksum(); }
  const ValenceLexicon& lexicon() const { return lexicon_; }

 private:
  AnalyzerDescriptor descriptor_;
  ValenceLexicon lexicon_;
  EmojiLexicon emoji_;
};

// Spawns the configured command per call, writes the text to its stdin and
// reads one decimal number in [-1, +1] from its stdout. Throws
// ExternalAnalyzerError on spawn failure, non-zero exit or malformed output.
class ExternalCommandAnalyzer final : public SentimentAnalyzer {
 public:
  explicit ExternalCommandAnalyzer(AnalyzerDescriptor descriptor);

  SentimentScore analyze(std::string_view text) const override;
  const AnalyzerDescriptor& descriptor() const override { return descriptor_; }
  std::string fingerprint() const override;

 private:
  AnalyzerDescriptor descriptor_;
};

std::unique_ptr<SentimentAnalyzer> make_analyzer(const AnalyzerDescriptor& descriptor);

inline SentimentScore analyze(const SentimentAnalyzer& analyzer, std::string_view text) {
  return analyzer.analyze(text);
}

}  // namespace igs
