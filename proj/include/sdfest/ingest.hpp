#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "error.hpp"
#include "estimators.hpp"

namespace sdfest
{
//! Malformed UTF-8 input
class EncodingError : public ConfigError
{
  public:
    EncodingError(std::size_t offset, std::string const& what)
        : ConfigError("invalid UTF-8 at byte " + std::to_string(offset) + ": "
                      + what)
        , offset_(offset)
    {
    }

    std::size_t offset() const noexcept { return offset_; }

  private:
    std::size_t offset_;
};

struct TokenizerConfig
{
    //! ASCII case folding; other code points are kept as is
    bool lowercase{true};
    //! Treat ASCII digits as word characters
    bool keep_digits{true};
};

//---------------------------------------------------------------------------//
/*!
 * Tokenized text with its vocabulary.
 *
 * Word j (0-based) is the j-th distinct word in order of first occurrence;
 * counts[j] is its number of occurrences.
 */
struct Corpus
{
    std::vector<std::string> tokens;
    std::vector<std::string> words;
    std::unordered_map<std::string, std::size_t> vocab;
    std::vector<std::uint64_t> counts;

    std::uint64_t n() const { return tokens.size(); }
    std::uint64_t num_words() const { return words.size(); }  //!< M
};

// Tokens are maximal runs of word characters: ASCII letters, ASCII digits
// (unless disabled) and every non-ASCII code point. Everything else
// separates tokens.
Corpus tokenize(std::string_view text, TokenizerConfig const& rules = {});

// Reads a file and tokenizes it; read failures raise IoError
Corpus tokenize_file(std::string const& path, TokenizerConfig const& rules = {});

// Throws EncodingError at the first invalid sequence
void validate_utf8(std::string_view text);

struct CorpusEstimate
{
    EstimatorOutput estimate;
    std::uint64_t observed_words{};  //!< M
    std::uint64_t phantom_cells{};   //!< zero-count cells added for padding
    double lambda_hat{};             //!< n / M
    RegimeDiagnostics regime;
    std::vector<std::string> notes;
};

// Pads the vocabulary with zero-count cells up to a multiple of m, orders
// cells by observed count and applies the grouped estimator with the corpus
// size as n
CorpusEstimate estimate_from_corpus(Corpus const& corpus, std::uint64_t m);
}  // namespace sdfest
