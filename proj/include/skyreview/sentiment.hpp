#ifndef SKYREVIEW_SENTIMENT_HPP
#define SKYREVIEW_SENTIMENT_HPP

#include <cstdint>
#include <functional>
#include <mutex>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "skyreview/data.hpp"

namespace skyreview {

struct SentimentScore {
    double value = 0.0;   // in [-1, +1]
    std::size_t n_tokens = 0;
    std::size_t n_hits = 0;
};

struct Lexicon {
    std::unordered_map<std::string, double> entries;  // token -> polarity in [-1,+1]
    std::unordered_set<std::string> negators;
    int negation_window = 3;

    void validate() const;  // throws if a token is both entry and negator
};

/// Default shipped lexicon (see data/lexicon.tsv).
const Lexicon& default_lexicon();

/// Load a `token<TAB>polarity` file; '#' starts a comment line.
Lexicon load_lexicon(const std::string& path);
Lexicon parse_lexicon(const std::string& text);

/// Average polarity of lexicon hits, each sign-flipped when a negator
/// occurs within the preceding negation window. Always in [-1, +1].
SentimentScore score(const std::string& text, const Lexicon& lex);

using Scorer = std::function<SentimentScore(const std::string&)>;

class SentimentError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Client for the remote scoring protocol: POST {"text": ...} -> {"score": ...}.
/// Results go to an append-only JSONL cache keyed by content hash; cache
/// hits never touch the network.
class RemoteScorer {
public:
    RemoteScorer(std::string endpoint, std::string cache_path);

    SentimentScore operator()(const std::string& text);

    std::size_t network_calls() const { return network_calls_; }

    static std::uint64_t content_hash(const std::string& text);  // FNV-1a 64

private:
    std::string host_;
    int port_ = 80;
    std::string path_;
    std::string cache_path_;
    std::unordered_map<std::uint64_t, double> cache_;
    std::mutex mu_;
    std::size_t network_calls_ = 0;
};

/// Fill in missing sentiment values (all of them when force is set).
Dataset annotate(const Dataset& d, const Scorer& scorer, bool force = false);

}  // namespace skyreview

#endif
