#include "sdfest/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iterator>
#include <sstream>

namespace sdfest
{
void validate_utf8(std::string_view text)
{
    auto const* s = reinterpret_cast<unsigned char const*>(text.data());
    std::size_t const size = text.size();
    std::size_t i = 0;
    while (i < size)
    {
        unsigned char c = s[i];
        if (c < 0x80)
        {
            ++i;
            continue;
        }
        std::size_t len;
        std::uint32_t cp;
        if ((c & 0xE0) == 0xC0)
        {
            len = 2;
            cp = c & 0x1F;
        }
        else if ((c & 0xF0) == 0xE0)
        {
            len = 3;
            cp = c & 0x0F;
        }
        else if ((c & 0xF8) == 0xF0)
        {
            len = 4;
            cp = c & 0x07;
        }
        else
        {
            throw EncodingError(i, "invalid lead byte");
        }
        if (i + len > size)
            throw EncodingError(i, "truncated sequence");
        for (std::size_t k = 1; k < len; ++k)
        {
            if ((s[i + k] & 0xC0) != 0x80)
                throw EncodingError(i + k, "invalid continuation byte");
            cp = (cp << 6) | (s[i + k] & 0x3F);
        }
        static constexpr std::uint32_t min_cp[] = {0, 0, 0x80, 0x800, 0x10000};
        if (cp < min_cp[len])
            throw EncodingError(i, "overlong encoding");
        if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))
            throw EncodingError(i, "code point out of range");
        i += len;
    }
}

Corpus tokenize(std::string_view text, TokenizerConfig const& rules)
{
    validate_utf8(text);

    auto is_word = [&](unsigned char c) {
        if (c >= 0x80)
            return true;
        if (std::isalpha(c))
            return true;
        return rules.keep_digits && std::isdigit(c) != 0;
    };

    Corpus corpus;
    std::string current;
    auto flush = [&] {
        if (current.empty())
            return;
        auto [it, inserted] = corpus.vocab.try_emplace(current, corpus.words.size());
        if (inserted)
        {
            corpus.words.push_back(current);
            corpus.counts.push_back(0);
        }
        ++corpus.counts[it->second];
        corpus.tokens.push_back(std::move(current));
        current.clear();
    };
    for (char ch : text)
    {
        auto c = static_cast<unsigned char>(ch);
        if (is_word(c))
        {
            if (rules.lowercase && c < 0x80)
                c = static_cast<unsigned char>(std::tolower(c));
            current.push_back(static_cast<char>(c));
        }
        else
        {
            flush();
        }
    }
    flush();

    if (corpus.tokens.empty())
        throw ConfigError("empty corpus");
    return corpus;
}

Corpus tokenize_file(std::string const& path, TokenizerConfig const& rules)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError(path, "cannot open for reading");
    std::string text{std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>()};
    if (in.bad())
        throw IoError(path, "read failed");
    return tokenize(text, rules);
}

CorpusEstimate estimate_from_corpus(Corpus const& corpus, std::uint64_t m)
{
    std::uint64_t const M = corpus.num_words();
    if (M == 0)
        throw ConfigError("empty corpus");
    if (m == 0 || m > M)
    {
        throw ConfigError("m must lie in [1, M] = [1, " + std::to_string(M)
                          + "], got " + std::to_string(m));
    }

    std::uint64_t const phantom = (m - M % m) % m;
    CountsVector counts;
    counts.kind = CountsKind::multinomial;
    counts.counts.assign(phantom, 0);
    counts.counts.insert(counts.counts.end(), corpus.counts.begin(),
                         corpus.counts.end());
    std::sort(counts.counts.begin(), counts.counts.end());
    counts.nominal_size = corpus.n();
    counts.realized_size = corpus.n();

    auto scheme = GroupingScheme::make(counts.counts.size(), m, false);

    CorpusEstimate out{
        grouped_estimator(counts, scheme, corpus.n()),
        M,
        phantom,
        static_cast<double>(corpus.n()) / static_cast<double>(M),
        check_regime(counts.counts.size(), corpus.n(), m),
        {},
    };
    if (phantom > 0)
    {
        out.notes.push_back("padded with " + std::to_string(phantom)
                            + " zero-count phantom cells");
    }
    out.notes.emplace_back(
        "exploratory: cells are ordered by observed frequency as a proxy for "
        "the unknown probability ordering; no consistency claim for real "
        "corpora");
    return out;
}
}  // namespace sdfest
