#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace mmgenre {

struct TokenSequence {
    std::vector<std::string> tokens; // lowercase, stemmed, alnum only
};

// Sparse vector keyed by a 64-bit hash of the term/feature identity.
// The projection module consumes this keying directly.
using SparseVector = std::vector<std::pair<std::uint64_t, double>>;

// FNV-1a 64 of the term bytes; the stable key used for sparse interchange.
std::uint64_t term_key(const std::string& term);

// Removes SRT cue numbers, timestamp lines and angle-bracket tags;
// remaining lines are joined with single spaces.
std::string strip_subtitle_markup(const std::string& srt_text);

// Lowercase, split on non-alphanumeric runs, Porter-stem purely
// alphabetic tokens. No stop-word removal.
TokenSequence preprocess(const std::string& text);

// Classic Porter (1980) suffix-stripping stemmer; expects a lowercase word.
std::string porter_stem(const std::string& word);

struct TfidfModel {
    std::size_t n = 1; // n-gram order, 1..4
    // n-gram (tokens joined with '\x1f') -> dense column index, in first-
    // occurrence order over the corpus.
    std::unordered_map<std::string, std::size_t> vocabulary;
    std::vector<std::string> terms;    // index -> n-gram
    std::vector<std::size_t> df;       // index -> document frequency
    std::size_t doc_count = 0;
};

std::string join_ngram(const std::vector<std::string>& tokens, std::size_t start, std::size_t n);

TfidfModel tfidf_fit(const std::vector<TokenSequence>& corpus, std::size_t n);

// weight(t) = tf(t) * (ln((1+N)/(1+df(t))) + 1), L2 normalized;
// out-of-vocabulary n-grams are ignored. Keys are term_key(ngram).
SparseVector tfidf_transform(const TokenSequence& doc, const TfidfModel& model);

} // namespace mmgenre
