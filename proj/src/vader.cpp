#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

#include "igs/sentiment.hpp"
#include "unicode.hpp"

namespace igs {

double normalize_valence_sum(double x, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("normalize_valence_sum: alpha must be positive");
  const double norm = x / std::sqrt(x * x + alpha);
  return std::clamp(norm, -1.0, 1.0);
}

namespace {

using namespace vader;

const std::unordered_set<std::string_view>& negation_words() {
  static const std::unordered_set<std::string_view> words = {
      "aint",     "arent",    "cannot",   "cant",     "couldnt",  "darent",  "didnt",   "doesnt",
      "ain't",    "aren't",   "can't",    "couldn't", "daren't",  "didn't",  "doesn't", "dont",
      "hadnt",    "hasnt",    "havent",   "isnt",     "mightnt",  "mustnt",  "neither", "don't",
      "hadn't",   "hasn't",   "haven't",  "isn't",    "mightn't", "mustn't", "neednt",  "needn't",
      "never",    "none",     "nope",     "nor",      "not",      "nothing", "nowhere", "oughtnt",
      "shant",    "shouldnt", "uhuh",     "wasnt",    "werent",   "oughtn't", "shan't", "shouldn't",
      "uh-uh",    "wasn't",   "weren't",  "without",  "wont",     "wouldnt", "won't",   "wouldn't",
      "rarely",   "seldom",   "despite"};
  return words;
}

const std::unordered_map<std::string_view, double>& booster_words() {
  static const std::unordered_map<std::string_view, double> words = [] {
    std::unordered_map<std::string_view, double> m;
    for (std::string_view w :
         {"absolutely", "amazingly", "awfully", "completely", "considerable", "considerably",
          "decidedly", "deeply", "effing", "enormous", "enormously", "entirely", "especially",
          "exceptional", "exceptionally", "extreme", "extremely", "fabulously", "flipping", "flippin",
          "frackin", "fracking", "fricking", "frickin", "frigging", "friggin", "fully", "fuckin",
          "fucking", "fuggin", "fugging", "greatly", "hella", "highly", "hugely", "incredible",
          "incredibly", "intensely", "major", "majorly", "more", "most", "particularly", "purely",
          "quite", "really", "remarkably", "so", "substantially", "thoroughly", "total", "totally",
          "tremendous", "tremendously", "uber", "unbelievably", "unusually", "utter", "utterly",
          "very"}) {
      m.emplace(w, kBoosterIncrement);
    }
    for (std::string_view w :
         {"almost", "barely", "hardly", "just enough", "kind of", "kinda", "kindof", "kind-of",
          "less", "little", "marginal", "marginally", "occasional", "occasionally", "partly",
          "scarce", "scarcely", "slight", "slightly", "somewhat", "sort of", "sorta", "sortof",
          "sort-of"}) {
      m.emplace(w, kBoosterDecrement);
    }
    return m;
  }();
  return words;
}

// Idioms and phrases that contain lexicon words.
const std::unordered_map<std::string_view, double>& special_cases() {
  static const std::unordered_map<std::string_view, double> cases = {
      {"the shit", 3},        {"the bomb", 3},       {"bad ass", 1.5},      {"badass", 1.5},
      {"bus stop", 0.0},      {"yeah right", -2},    {"kiss of death", -1.5}, {"to die for", 3},
      {"beating heart", 3.5}};
  return cases;
}

const double* booster(std::string_view lowered) {
  const auto& m = booster_words();
  const auto it = m.find(lowered);
  return it == m.end() ? nullptr : &it->second;
}

const double* special_case(const std::string& phrase) {
  const auto& m = special_cases();
  const auto it = m.find(phrase);
  return it == m.end() ? nullptr : &it->second;
}

bool negated(std::string_view lowered) {
  return negation_words().contains(lowered) || lowered.find("n't") != std::string_view::npos;
}

struct Token {
  std::string lower;
  bool all_caps = false;
};

std::string join(std::initializer_list<const std::string*> parts) {
  std::string out;
  for (const auto* p : parts) {
    if (!out.empty()) out.push_back(' ');
    out += *p;
  }
  return out;
}

class Scorer {
 public:
  Scorer(const ValenceLexicon& lexicon, std::vector<Token> tokens)
      : lexicon_(lexicon), tokens_(std::move(tokens)) {
    std::size_t caps = 0;
    for (const auto& t : tokens_) caps += t.all_caps ? 1 : 0;
    const std::size_t diff = tokens_.size() - caps;
    cap_diff_ = diff > 0 && diff < tokens_.size();
  }

  std::vector<double> sentiments() const {
    std::vector<double> out;
    out.reserve(tokens_.size());
    const std::size_t n = tokens_.size();
    for (std::size_t i = 0; i < n; ++i) {
      const auto& lw = tokens_[i].lower;
      if (booster(lw) || (i + 1 < n && lw == "kind" && tokens_[i + 1].lower == "of")) {
        out.push_back(0.0);
        continue;
      }
      out.push_back(word_valence(i));
    }
    but_check(out);
    return out;
  }

 private:
  const std::string& lw(std::size_t i) const { return tokens_[i].lower; }
  bool in_lexicon(std::size_t i) const { return lexicon_.find_lowered(lw(i)) != nullptr; }

  double scalar_inc_dec(std::size_t j, double valence) const {
    double scalar = 0.0;
    if (const double* b = booster(lw(j))) {
      scalar = *b;
      if (valence < 0) scalar *= -1;
      if (tokens_[j].all_caps && cap_diff_) {
        scalar += valence > 0 ? kAllCapsIncrement : -kAllCapsIncrement;
      }
    }
    return scalar;
  }

  double word_valence(std::size_t i) const {
    const double* lexval = lexicon_.find_lowered(lw(i));
    if (!lexval) return 0.0;
    const std::size_t n = tokens_.size();
    double valence = *lexval;

    // "no" directly before another lexicon word acts as a negator, not a word
    if (lw(i) == "no" && i != n - 1 && in_lexicon(i + 1)) valence = 0.0;
    if ((i > 0 && lw(i - 1) == "no") || (i > 1 && lw(i - 2) == "no") ||
        (i > 2 && lw(i - 3) == "no" && (lw(i - 1) == "or" || lw(i - 1) == "nor"))) {
      valence = *lexval * kNegationScalar;
    }

    if (tokens_[i].all_caps && cap_diff_) {
      valence += valence > 0 ? kAllCapsIncrement : -kAllCapsIncrement;
    }

    for (std::size_t start = 0; start < 3; ++start) {
      if (i > start && !in_lexicon(i - (start + 1))) {
        double s = scalar_inc_dec(i - (start + 1), valence);
        if (start == 1 && s != 0) s *= kSecondWordDecay;
        if (start == 2 && s != 0) s *= kThirdWordDecay;
        valence = valence + s;
        valence = negation_check(valence, start, i);
        if (start == 2) valence = special_idioms_check(valence, i);
      }
    }
    return least_check(valence, i);
  }

  double negation_check(double valence, std::size_t start, std::size_t i) const {
    if (start == 0) {
      if (negated(lw(i - 1))) valence *= kNegationScalar;
    } else if (start == 1) {
      if (lw(i - 2) == "never" && (lw(i - 1) == "so" || lw(i - 1) == "this")) {
        valence *= kNeverSoBoost;
      } else if (lw(i - 2) == "without" && lw(i - 1) == "doubt") {
        // unchanged
      } else if (negated(lw(i - 2))) {
        valence *= kNegationScalar;
      }
    } else {
      if ((lw(i - 3) == "never" && (lw(i - 2) == "so" || lw(i - 2) == "this")) ||
          (lw(i - 1) == "so" || lw(i - 1) == "this")) {
        valence *= kNeverSoBoost;
      } else if (lw(i - 3) == "without" && (lw(i - 2) == "doubt" || lw(i - 1) == "doubt")) {
        // unchanged
      } else if (negated(lw(i - 3))) {
        valence *= kNegationScalar;
      }
    }
    return valence;
  }

  double special_idioms_check(double valence, std::size_t i) const {
    const std::size_t n = tokens_.size();
    const std::string one_zero = join({&lw(i - 1), &lw(i)});
    const std::string two_one_zero = join({&lw(i - 2), &lw(i - 1), &lw(i)});
    const std::string two_one = join({&lw(i - 2), &lw(i - 1)});
    const std::string three_two_one = join({&lw(i - 3), &lw(i - 2), &lw(i - 1)});
    const std::string three_two = join({&lw(i - 3), &lw(i - 2)});

    for (const auto* seq : {&one_zero, &two_one_zero, &two_one, &three_two_one, &three_two}) {
      if (const double* v = special_case(*seq)) {
        valence = *v;
        break;
      }
    }
    if (n - 1 > i) {
      if (const double* v = special_case(join({&lw(i), &lw(i + 1)}))) valence = *v;
    }
    if (n - 1 > i + 1) {
      if (const double* v = special_case(join({&lw(i), &lw(i + 1), &lw(i + 2)}))) valence = *v;
    }
    // booster/dampener bigrams such as "kind of"
    for (const auto* gram : {&three_two_one, &three_two, &two_one}) {
      if (const double* b = booster(*gram)) valence = valence + *b;
    }
    return valence;
  }

  double least_check(double valence, std::size_t i) const {
    if (i > 1 && !in_lexicon(i - 1) && lw(i - 1) == "least") {
      if (lw(i - 2) != "at" && lw(i - 2) != "very") valence *= kNegationScalar;
    } else if (i > 0 && !in_lexicon(i - 1) && lw(i - 1) == "least") {
      valence *= kNegationScalar;
    }
    return valence;
  }

  // Contrastive "but": halves everything before the first "but" and boosts
  // everything after it. Each value is located by its first equal occurrence,
  // which is how the reference implementation behaves when values repeat.
  void but_check(std::vector<double>& s) const {
    const auto it = std::find_if(tokens_.begin(), tokens_.end(),
                                 [](const Token& t) { return t.lower == "but"; });
    if (it == tokens_.end()) return;
    const auto bi = static_cast<std::size_t>(it - tokens_.begin());
    for (std::size_t k = 0; k < s.size(); ++k) {
      const double sentiment = s[k];
      const auto si = static_cast<std::size_t>(std::find(s.begin(), s.end(), sentiment) - s.begin());
      if (si < bi) {
        s[si] = sentiment * kButBeforeWeight;
      } else if (si > bi) {
        s[si] = sentiment * kButAfterWeight;
      }
    }
  }

  const ValenceLexicon& lexicon_;
  std::vector<Token> tokens_;
  bool cap_diff_ = false;
};

struct Prepared {
  std::u32string text;  // emoji replaced and whitespace stripped
  std::vector<Token> tokens;
};

Prepared prepare(std::string_view raw, const EmojiLexicon& emoji) {
  const std::u32string decoded = unicode::decode_utf8(raw);
  std::u32string replaced;
  replaced.reserve(decoded.size());
  bool prev_space = true;
  for (char32_t cp : decoded) {
    if (const auto* desc = emoji.find(cp)) {
      if (!prev_space) replaced.push_back(U' ');
      replaced += *desc;
      prev_space = false;
    } else {
      replaced.push_back(cp);
      prev_space = cp == U' ';
    }
  }

  Prepared out;
  out.text = std::u32string(unicode::strip_space(replaced));
  const std::u32string_view text = out.text;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && unicode::is_space(text[pos])) ++pos;
    if (pos >= text.size()) break;
    std::size_t end = pos;
    while (end < text.size() && !unicode::is_space(text[end])) ++end;
    std::u32string_view word = text.substr(pos, end - pos);
    pos = end;

    // Strip surrounding punctuation unless that leaves <= 2 characters,
    // which is probably an emoticon.
    std::size_t b = 0;
    std::size_t e = word.size();
    while (b < e && unicode::is_ascii_punct(word[b])) ++b;
    while (e > b && unicode::is_ascii_punct(word[e - 1])) --e;
    if (e - b > 2) word = word.substr(b, e - b);

    out.tokens.push_back(
        Token{unicode::encode_utf8(unicode::to_lower(word)), unicode::is_upper_word(word)});
  }
  return out;
}

double punctuation_emphasis(std::u32string_view text) {
  const auto ep = std::min<std::ptrdiff_t>(std::count(text.begin(), text.end(), U'!'), kMaxExclamations);
  const auto qm = std::count(text.begin(), text.end(), U'?');
  double qm_amp = 0.0;
  if (qm > 1) qm_amp = qm <= 3 ? static_cast<double>(qm) * kQuestionIncrement : kQuestionCap;
  return static_cast<double>(ep) * kExclamationIncrement + qm_amp;
}

}  // namespace

LexiconRuleAnalyzer::LexiconRuleAnalyzer(AnalyzerDescriptor descriptor, ValenceLexicon lexicon,
                                         EmojiLexicon emoji)
    : descriptor_(std::move(descriptor)), lexicon_(std::move(lexicon)), emoji_(std::move(emoji)) {}

LexiconRuleAnalyzer::LexiconRuleAnalyzer(AnalyzerDescriptor descriptor)
    : descriptor_(std::move(descriptor)),
      lexicon_(ValenceLexicon::load(descriptor_.lexicon_path)),
      emoji_(descriptor_.emoji_lexicon_path.empty() ? EmojiLexicon{}
                                                    : EmojiLexicon::load(descriptor_.emoji_lexicon_path)) {}

double LexiconRuleAnalyzer::valence_sum(std::string_view text) const {
  Prepared p = prepare(text, emoji_);
  if (p.tokens.empty()) return 0.0;
  const auto sentiments = Scorer(lexicon_, std::move(p.tokens)).sentiments();
  double sum = 0.0;
  for (double s : sentiments) sum += s;
  const double amp = punctuation_emphasis(p.text);
  if (sum > 0) {
    sum += amp;
  } else if (sum < 0) {
    sum -= amp;
  }
  return sum;
}

SentimentScore LexiconRuleAnalyzer::analyze(std::string_view text) const {
  return SentimentScore{normalize_valence_sum(valence_sum(text), kNormalizationAlpha)};
}

std::unique_ptr<SentimentAnalyzer> make_analyzer(const AnalyzerDescriptor& descriptor) {
  switch (descriptor.kind) {
    case AnalyzerKind::builtin_lexicon_rules:
      return std::make_unique<LexiconRuleAnalyzer>(descriptor);
    case AnalyzerKind::external_command:
      return std::make_unique<ExternalCommandAnalyzer>(descriptor);
  }
  throw std::invalid_argument("unknown analyzer kind");
}

}  // namespace igs
