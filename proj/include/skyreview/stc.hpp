#ifndef SKYREVIEW_STC_HPP
#define SKYREVIEW_STC_HPP

#include <set>
#include <string>
#include <vector>

#include "skyreview/data.hpp"

namespace skyreview::stc {

using Phrase = std::vector<std::string>;
using Sentence = std::vector<std::string>;
using Document = std::vector<Sentence>;

struct Options {
    std::size_t max_phrase_len = 6;
    std::size_t top_k_bases = 500;
    double overlap_threshold = 0.5;
};

/// Sentence split on terminal punctuation, lowercase, stopword removal,
/// suffix stemming. Deterministic.
Document preprocess(const std::string& text);

bool is_stopword(const std::string& token);

/// Light suffix stemmer (plural / -ed / -ing / -ly style endings).
std::string stem(const std::string& token);

struct BaseCluster {
    Phrase phrase;
    std::set<std::size_t> docs;
    double score = 0.0;
};

/// Phrase-length weight: 0.5 for single words, rising linearly to 1.0 at
/// the length cap.
double phrase_weight(std::size_t len, std::size_t max_len = 6);

/// Word-level generalized suffix tree over all sentences; every node whose
/// phrase occurs in >= 2 documents becomes a base cluster. Top `top_k_bases`
/// by score, ties broken lexicographically by phrase.
std::vector<BaseCluster> base_clusters(const std::vector<Document>& docs,
                                       const Options& opt = {});

struct Cluster {
    Phrase label;                  // phrase of the highest-scoring member base
    std::set<std::size_t> docs;    // union of member doc sets
    double score = 0.0;            // summed base scores
    std::size_t n_bases = 0;
};

/// Merge mutually-overlapping base clusters into connected components.
std::vector<Cluster> merge(const std::vector<BaseCluster>& bases,
                           double overlap_threshold = 0.5);

struct ClusterSet {
    bool positive = true;
    std::vector<Cluster> clusters;
};

struct TopicReport {
    ClusterSet positive;
    ClusterSet negative;
};

/// Partition labeled records by recommendation, cluster each side, keep the
/// top k clusters per polarity.
TopicReport topics_by_polarity(const Dataset& d, std::size_t k,
                               const Options& opt = {});

std::string topic_report_to_json(const TopicReport& rep, const Options& opt);
std::string topic_report_to_table(const TopicReport& rep);

// --- word-level suffix tree (exposed for tests) ---

class SuffixTree {
public:
    explicit SuffixTree(std::size_t max_depth) : max_depth_(max_depth) {
        nodes_.emplace_back();
    }

    /// Insert every suffix of `sentence` for document `doc`, capped at
    /// max_depth words per path.
    void add_sentence(std::size_t doc, const Sentence& sentence);

    /// Visit each node shared by >= 2 documents.
    template <typename F>
    void for_each_shared_phrase(F&& fn) const {
        Phrase path;
        walk(0, path, fn);
    }

    std::size_t node_count() const { return nodes_.size(); }

private:
    struct Node {
        std::vector<std::pair<std::string, std::size_t>> children;  // sorted by token
        std::set<std::size_t> docs;
    };

    std::size_t child(std::size_t node, const std::string& token);

    template <typename F>
    void walk(std::size_t node, Phrase& path, F&& fn) const {
        if (!path.empty() && nodes_[node].docs.size() >= 2) fn(path, nodes_[node].docs);
        for (const auto& [tok, idx] : nodes_[node].children) {
            path.push_back(tok);
            walk(idx, path, fn);
            path.pop_back();
        }
    }

    std::size_t max_depth_;
    std::vector<Node> nodes_;
};

}  // namespace skyreview::stc

#endif
