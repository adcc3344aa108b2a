#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <deque>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fpbs/qap_core.hpp"

namespace fpbs {

using Item = int;

// A set of item ids, kept sorted ascending and duplicate-free.
struct Transaction {
    std::vector<Item> items;

    static Transaction of(std::vector<Item> items) {
        std::sort(items.begin(), items.end());
        items.erase(std::unique(items.begin(), items.end()), items.end());
        return Transaction{std::move(items)};
    }
};

// Bijection between assignment pairs and item ids: a 1-indexed pair (x, y)
// maps to z = x*n + y, so ids range over [n+1, n*n+n].
struct ItemEncoding {
    int n = 0;

    Item encode(int x, int y) const { return x * n + y; }  // 1-indexed x, y

    std::pair<int, int> decode(Item z) const {
        const int x = (z - 1) / n;
        return {x, z - x * n};
    }
};

// Decomposes a permutation into its n facility-location pairs.
inline Transaction permutation_to_transaction(const Permutation& pi,
                                              const ItemEncoding& enc) {
    std::vector<Item> items;
    items.reserve(pi.size());
    for (int i = 0; i < static_cast<int>(pi.size()); ++i)
        items.push_back(enc.encode(i + 1, pi[i] + 1));
    return Transaction::of(std::move(items));
}

// One transaction per line, space-separated item ids. Debug exchange format
// for cross-checking against external miners.
inline std::string dump_transactions(const std::vector<Transaction>& db) {
    std::ostringstream out;
    for (const auto& t : db) {
        for (std::size_t i = 0; i < t.items.size(); ++i)
            out << (i ? " " : "") << t.items[i];
        out << "\n";
    }
    return out.str();
}

// A maximal set of facility-location pairs (0-indexed) shared by at least
// `support` elite solutions.
struct Pattern {
    std::vector<std::pair<int, int>> pairs;  // sorted, (facility, location)
    long long support = 0;

    int size() const { return static_cast<int>(pairs.size()); }
};

// Prefix tree of discovered maximal frequent itemsets for one projection
// base. Paths are stored in ascending item-id order, which makes subset
// checking independent of any per-tree frequency ordering.
class MfiTree {
public:
    explicit MfiTree(std::vector<Item> base = {}) : base_(std::move(base)) {}

    const std::vector<Item>& base() const { return base_; }

    // True if some stored itemset is a superset of (or equal to) `itemset`.
    // Itemset must be sorted ascending; itemsets are relative to base().
    bool covered(const std::vector<Item>& itemset) const {
        return covered_from(root_, itemset, 0);
    }

    // Inserts unless covered, evicting any stored subsets of the new
    // itemset; the stored family is an antichain whatever the discovery
    // order. Returns true when inserted.
    bool insert_if_maximal(const std::vector<Item>& itemset, long long support) {
        if (covered(itemset)) return false;
        remove_subsets_of(root_, itemset, 0);
        Node* node = &root_;
        for (Item item : itemset) {
            Node* child = node->child(item);
            if (!child) {
                node->kids.push_back(std::make_unique<Node>(item));
                child = node->kids.back().get();
            }
            node = child;
        }
        node->terminal = true;
        node->support = support;
        ++count_;
        return true;
    }

    std::size_t size() const { return count_; }

    // All stored itemsets (relative to base), with their supports.
    std::vector<std::pair<std::vector<Item>, long long>> extract() const {
        std::vector<std::pair<std::vector<Item>, long long>> out;
        std::vector<Item> path;
        extract_from(root_, path, out);
        return out;
    }

private:
    struct Node {
        explicit Node(Item i = -1) : item(i) {}
        Item item;
        bool terminal = false;
        long long support = 0;
        std::vector<std::unique_ptr<Node>> kids;

        Node* child(Item i) const {
            for (const auto& k : kids)
                if (k->item == i) return k.get();
            return nullptr;
        }
    };

    static bool covered_from(const Node& node, const std::vector<Item>& itemset,
                             std::size_t idx) {
        if (idx == itemset.size()) return subtree_has_terminal(node);
        for (const auto& kid : node.kids) {
            if (kid->item == itemset[idx]) {
                if (covered_from(*kid, itemset, idx + 1)) return true;
            } else if (kid->item < itemset[idx]) {
                if (covered_from(*kid, itemset, idx)) return true;
            }
            // kid->item > itemset[idx]: paths are ascending, prune.
        }
        return false;
    }

    static bool subtree_has_terminal(const Node& node) {
        if (node.terminal) return true;
        for (const auto& kid : node.kids)
            if (subtree_has_terminal(*kid)) return true;
        return false;
    }

    // Unmarks every stored itemset that is a subset of `itemset` and prunes
    // branches left without terminals.
    void remove_subsets_of(Node& node, const std::vector<Item>& itemset,
                           std::size_t idx) {
        for (auto& kid : node.kids) {
            const auto at = std::lower_bound(itemset.begin() + idx, itemset.end(),
                                             kid->item);
            if (at == itemset.end() || *at != kid->item) continue;  // kid not covered
            const auto next = static_cast<std::size_t>(at - itemset.begin()) + 1;
            if (kid->terminal) {
                kid->terminal = false;
                --count_;
            }
            remove_subsets_of(*kid, itemset, next);
        }
        std::erase_if(node.kids, [](const std::unique_ptr<Node>& kid) {
            return !kid->terminal && kid->kids.empty();
        });
    }

    static void extract_from(const Node& node, std::vector<Item>& path,
                             std::vector<std::pair<std::vector<Item>, long long>>& out) {
        if (node.terminal) out.emplace_back(path, node.support);
        for (const auto& kid : node.kids) {
            path.push_back(kid->item);
            extract_from(*kid, path, out);
            path.pop_back();
        }
    }

    Node root_;
    std::vector<Item> base_;
    std::size_t count_ = 0;
};

// FP-tree: a frequency-ordered prefix tree over the frequent items of a
// (possibly conditional) transaction database. When `use_array` is set the
// tree also accumulates pairwise co-occurrence counts (the array technique),
// which lets FPmax* derive conditional frequent items without walking the
// conditional pattern base.
class FpTree {
public:
    struct HeaderEntry {
        Item item;
        long long count;
        std::uint64_t mask;  // supporting transactions, when the db fits 64
    };

    FpTree(const std::vector<Transaction>& db, long long theta, bool use_array = true)
        : theta_(theta), use_array_(use_array),
          base_support_(static_cast<long long>(db.size())),
          masks_valid_(db.size() <= 64) {
        if (theta < 1) throw std::invalid_argument("FpTree: theta must be >= 1");
        if (db.empty()) throw std::invalid_argument("FpTree: database must be non-empty");
        std::unordered_map<Item, long long> freq;
        for (const auto& t : db)
            for (Item item : t.items) freq[item] += 1;
        init_header(freq);
        std::vector<int> ranks;
        for (std::size_t t = 0; t < db.size(); ++t) {
            ranks.clear();
            for (Item item : db[t].items) {
                const auto it = rank_.find(item);
                if (it != rank_.end()) ranks.push_back(it->second);
            }
            std::sort(ranks.begin(), ranks.end());
            insert_path(ranks, 1, masks_valid_ ? (std::uint64_t{1} << t) : 0);
        }
    }

    bool empty() const { return header_.empty(); }
    const std::vector<Item>& base() const { return base_; }
    long long base_support() const { return base_support_; }
    long long theta() const { return theta_; }
    bool uses_array() const { return use_array_; }
    bool masks_valid() const { return masks_valid_; }

    std::vector<HeaderEntry> header_items() const { return header_; }

    // True when every node has at most one child (including an empty tree).
    bool single_path() const {
        const Node* node = &root_;
        while (true) {
            if (node->kids.size() > 1) return false;
            if (node->kids.empty()) return true;
            node = node->kids.front();
        }
    }

    // Items along the single path with their counts, root-down.
    std::vector<std::pair<Item, long long>> single_path_items() const {
        std::vector<std::pair<Item, long long>> out;
        const Node* node = &root_;
        while (!node->kids.empty()) {
            node = node->kids.front();
            out.emplace_back(header_[node->rank].item, node->count);
        }
        return out;
    }

    // Conditional frequent items for header position `idx` with their
    // conditional supports, from the co-occurrence array. Sorted by
    // decreasing conditional count (ties toward the smaller item id), the
    // order the conditional tree is built in.
    std::vector<std::pair<Item, long long>> tail_from_array(int idx) const {
        std::vector<std::pair<Item, long long>> tail;
        for (int j = 0; j < idx; ++j) {
            const long long c = pair_count(idx, j);
            if (c >= theta_) tail.emplace_back(header_[j].item, c);
        }
        sort_tail(tail);
        return tail;
    }

    // Same, by walking idx's conditional pattern base.
    std::vector<std::pair<Item, long long>> tail_from_paths(int idx) const {
        std::vector<long long> acc(idx, 0);
        for (const Node* node = header_links_[idx]; node; node = node->next_link)
            for (const Node* up = node->parent; up->rank >= 0; up = up->parent)
                acc[up->rank] += node->count;
        std::vector<std::pair<Item, long long>> tail;
        for (int j = 0; j < idx; ++j)
            if (acc[j] >= theta_) tail.emplace_back(header_[j].item, acc[j]);
        sort_tail(tail);
        return tail;
    }

    std::vector<std::pair<Item, long long>> conditional_tail(int idx) const {
        return use_array_ ? tail_from_array(idx) : tail_from_paths(idx);
    }

    // Projection onto base + {header item at idx}, restricted to `tail`.
    FpTree conditional(int idx, const std::vector<std::pair<Item, long long>>& tail) const {
        FpTree sub(theta_, use_array_);
        sub.masks_valid_ = masks_valid_;
        sub.base_ = base_;
        sub.base_.push_back(header_[idx].item);
        std::sort(sub.base_.begin(), sub.base_.end());
        sub.base_support_ = header_[idx].count;
        sub.header_.reserve(tail.size());
        for (const auto& [item, count] : tail) {
            sub.rank_.emplace(item, static_cast<int>(sub.header_.size()));
            sub.header_.push_back({item, count, 0});
        }
        sub.finish_header_init();
        std::vector<int> parent_ranks;
        std::vector<int> ranks;
        for (const Node* node = header_links_[idx]; node; node = node->next_link) {
            parent_ranks.clear();
            for (const Node* up = node->parent; up->rank >= 0; up = up->parent)
                parent_ranks.push_back(up->rank);
            ranks.clear();
            for (int r : parent_ranks) {
                const auto it = sub.rank_.find(header_[r].item);
                if (it != sub.rank_.end()) ranks.push_back(it->second);
            }
            std::sort(ranks.begin(), ranks.end());
            sub.insert_path(ranks, node->count, node->mask);
        }
        return sub;
    }

private:
    struct Node {
        int rank = -1;  // position in the header table; -1 for the root
        long long count = 0;
        std::uint64_t mask = 0;  // transactions through this node
        Node* parent = nullptr;
        Node* next_link = nullptr;
        std::vector<Node*> kids;
    };

    FpTree(long long theta, bool use_array)
        : theta_(theta), use_array_(use_array), base_support_(0) {}

    // Decreasing conditional count, ties toward the smaller item id.
    static void sort_tail(std::vector<std::pair<Item, long long>>& tail) {
        std::sort(tail.begin(), tail.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return a.first < b.first;
        });
    }

    void init_header(const std::unordered_map<Item, long long>& freq) {
        std::vector<std::pair<Item, long long>> frequent;
        for (const auto& [item, count] : freq)
            if (count >= theta_) frequent.emplace_back(item, count);
        std::sort(frequent.begin(), frequent.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return a.first < b.first;
        });
        header_.reserve(frequent.size());
        for (const auto& [item, count] : frequent) {
            rank_.emplace(item, static_cast<int>(header_.size()));
            header_.push_back({item, count, 0});
        }
        finish_header_init();
    }

    void finish_header_init() {
        header_links_.assign(header_.size(), nullptr);
        link_tails_.assign(header_.size(), nullptr);
        if (use_array_ && header_.size() > 1)
            pair_counts_.assign(header_.size() * (header_.size() - 1) / 2, 0);
    }

    long long pair_count(int hi, int lo) const {
        return pair_counts_[static_cast<std::size_t>(hi) * (hi - 1) / 2 + lo];
    }

    void bump_pair(int hi, int lo, long long by) {
        pair_counts_[static_cast<std::size_t>(hi) * (hi - 1) / 2 + lo] += by;
    }

    // `ranks` must be sorted ascending (most frequent first along the path).
    void insert_path(const std::vector<int>& ranks, long long count,
                     std::uint64_t mask) {
        if (use_array_)
            for (std::size_t p = 0; p + 1 < ranks.size(); ++p)
                for (std::size_t q = p + 1; q < ranks.size(); ++q)
                    bump_pair(ranks[q], ranks[p], count);
        Node* node = &root_;
        for (int rank : ranks) {
            Node* child = nullptr;
            for (Node* kid : node->kids)
                if (kid->rank == rank) {
                    child = kid;
                    break;
                }
            if (!child) {
                arena_.emplace_back();
                child = &arena_.back();
                child->rank = rank;
                child->parent = node;
                node->kids.push_back(child);
                if (link_tails_[rank])
                    link_tails_[rank]->next_link = child;
                else
                    header_links_[rank] = child;
                link_tails_[rank] = child;
            }
            child->count += count;
            child->mask |= mask;
            header_[rank].mask |= mask;
            node = child;
        }
    }

    long long theta_;
    bool use_array_;
    std::vector<Item> base_;
    long long base_support_;
    bool masks_valid_ = false;
    std::vector<HeaderEntry> header_;
    std::unordered_map<Item, int> rank_;
    std::vector<Node*> header_links_;
    std::vector<Node*> link_tails_;
    std::vector<long long> pair_counts_;
    Node root_;
    std::deque<Node> arena_;
};

// FPmax*: grows projections item by item (least frequent first), records
// single-path projections as maximal itemsets, and prunes a branch when
// base+item+tail is already covered by a recorded itemset. One MFI-tree is
// threaded through the whole recursion so every recorded itemset prunes all
// later branches. Stored itemsets are absolute (projection base included).
//
// `fuel`, when given, bounds the number of projections examined; the walk
// reports false as soon as the budget is exhausted (dense databases at very
// low support can make any item-lattice miner blow up combinatorially).
inline bool fpmax(const FpTree& tree, MfiTree& mfi, long long* fuel = nullptr) {
    if (fuel && --*fuel < 0) return false;
    if (tree.empty()) {
        if (!tree.base().empty()) mfi.insert_if_maximal(tree.base(), tree.base_support());
        return true;
    }
    if (tree.single_path()) {
        const auto path = tree.single_path_items();
        std::vector<Item> itemset = tree.base();
        itemset.reserve(itemset.size() + path.size());
        long long support = path.front().second;
        for (const auto& [item, count] : path) {
            itemset.push_back(item);
            support = std::min(support, count);
        }
        std::sort(itemset.begin(), itemset.end());
        mfi.insert_if_maximal(itemset, support);
        return true;
    }
    const auto header = tree.header_items();
    const int width = static_cast<int>(header.size());
    // Items held by every base-supporting transaction sort to the front and
    // belong to the closure of every maximal extension; they are never
    // branched on. This collapses trees with a large common core.
    int forced = 0;
    while (forced < width && header[forced].count == tree.base_support()) ++forced;
    for (int idx = width - 1; idx >= forced; --idx) {
        // A branch whose support set is covered by a later (less frequent)
        // item duplicates part of that item's branch; everything below it
        // could be extended by that item, so nothing maximal is lost.
        if (tree.masks_valid()) {
            const std::uint64_t support_set = header[idx].mask;
            bool redundant = false;
            for (int later = idx + 1; later < width; ++later)
                if ((header[later].mask & support_set) == support_set) {
                    redundant = true;
                    break;
                }
            if (redundant) continue;
        }
        const auto tail = tree.conditional_tail(idx);
        std::vector<Item> candidate = tree.base();
        candidate.reserve(candidate.size() + tail.size() + 1);
        candidate.push_back(header[idx].item);
        for (const auto& [item, count] : tail) candidate.push_back(item);
        std::sort(candidate.begin(), candidate.end());
        if (mfi.covered(candidate)) continue;
        FpTree conditional = tree.conditional(idx, tail);
        if (!fpmax(conditional, mfi, fuel)) return false;
    }
    // The forced prefix alone, over the full base support.
    std::vector<Item> closure = tree.base();
    closure.reserve(closure.size() + forced);
    for (int pos = 0; pos < forced; ++pos) closure.push_back(header[pos].item);
    std::sort(closure.begin(), closure.end());
    mfi.insert_if_maximal(closure, tree.base_support());
    return true;
}

// Exact maximal-itemset mining by enumeration over transaction subsets:
// every closed frequent itemset is the intersection of the transactions
// supporting it. The walk adds transactions in index order, skips additions
// already implied by the current support set, abandons empty intersections,
// and deduplicates closed sets by their support mask, so its cost scales
// with the number of distinct closed sets rather than with density.
inline std::vector<std::pair<std::vector<Item>, long long>>
enumerate_maximal_by_rows(const std::vector<Transaction>& db, long long theta) {
    const int k = static_cast<int>(db.size());
    if (k > 64)
        throw std::invalid_argument("enumerate_maximal_by_rows: database too large");
    std::unordered_map<Item, std::uint64_t> mask_of;
    for (int t = 0; t < k; ++t)
        for (Item item : db[t].items) mask_of[item] |= std::uint64_t{1} << t;

    struct Entry {
        Item item;
        std::uint64_t mask;
    };
    std::unordered_map<std::uint64_t, std::vector<Item>> closed;  // by support set

    struct Walker {
        int k;
        long long theta;
        const std::vector<Transaction>* db;
        const std::unordered_map<Item, std::uint64_t>* mask_of;
        std::unordered_map<std::uint64_t, std::vector<Item>>* closed;

        void descend(const std::vector<Entry>& inter, std::uint64_t support,
                     int next_t) {
            if (std::popcount(support) >= theta) {
                auto& slot = (*closed)[support];
                if (slot.empty()) {
                    slot.reserve(inter.size());
                    for (const auto& e : inter) slot.push_back(e.item);
                }
            }
            for (int t = next_t; t < k; ++t) {
                if ((support >> t) & 1) continue;  // already implied
                std::vector<Entry> narrowed;
                narrowed.reserve(inter.size());
                std::uint64_t narrowed_support = ~std::uint64_t{0};
                const std::uint64_t t_bit = std::uint64_t{1} << t;
                for (const auto& e : inter)
                    if (e.mask & t_bit) {
                        narrowed.push_back(e);
                        narrowed_support &= e.mask;
                    }
                if (narrowed.empty()) continue;
                descend(narrowed, narrowed_support, t + 1);
            }
        }
    } walker{k, theta, &db, &mask_of, &closed};

    for (int t = 0; t < k; ++t) {
        std::vector<Entry> inter;
        std::uint64_t support = ~std::uint64_t{0};
        for (Item item : db[t].items) {
            const std::uint64_t mask = mask_of.at(item);
            inter.push_back({item, mask});
            support &= mask;
        }
        if (inter.empty()) continue;
        // canonical: transaction t starts a walk only if no earlier
        // transaction already implies it
        if (support & ((std::uint64_t{1} << t) - 1)) continue;
        walker.descend(inter, support, t + 1);
    }

    std::vector<std::pair<std::vector<Item>, long long>> sets;
    sets.reserve(closed.size());
    for (auto& [support, items] : closed) {
        std::sort(items.begin(), items.end());
        sets.emplace_back(std::move(items), std::popcount(support));
    }
    std::sort(sets.begin(), sets.end(), [](const auto& a, const auto& b) {
        return a.first.size() > b.first.size();
    });
    MfiTree mfi;
    for (auto& [itemset, support] : sets) mfi.insert_if_maximal(itemset, support);
    return mfi.extract();
}

// All maximal frequent itemsets of `db` at minimum support `theta`, as
// (ascending item ids, support) pairs. FPmax* does the mining; if its
// projection walk exceeds `fuel` nodes (pathologically dense pools) and the
// database is small enough, the exact subset enumeration finishes the job.
inline std::vector<std::pair<std::vector<Item>, long long>> mine_maximal_itemsets(
    const std::vector<Transaction>& db, long long theta, bool use_array = true,
    long long fuel = 20000) {
    FpTree tree(db, theta, use_array);
    MfiTree mfi;
    if (fuel > 0 && db.size() <= 64) {
        long long budget = fuel;
        if (fpmax(tree, mfi, &budget)) return mfi.extract();
        return enumerate_maximal_by_rows(db, theta);
    }
    fpmax(tree, mfi);
    return mfi.extract();
}

// Mines the elite set and returns the m largest patterns (by pair count;
// ties by higher support, then lexicographic pair order).
inline std::vector<Pattern> mine_patterns(const std::vector<Assignment>& elite,
                                          long long theta, int m, int n,
                                          bool use_array = true) {
    if (theta < 1) throw std::invalid_argument("mine_patterns: theta must be >= 1");
    if (m < 1) throw std::invalid_argument("mine_patterns: m must be >= 1");
    if (static_cast<long long>(elite.size()) < theta)
        throw std::invalid_argument("mine_patterns: elite set smaller than theta");
    const ItemEncoding enc{n};
    std::vector<Transaction> db;
    db.reserve(elite.size());
    for (const auto& member : elite)
        db.push_back(permutation_to_transaction(member.pi, enc));
    auto mfis = mine_maximal_itemsets(db, theta, use_array);

    std::vector<Pattern> patterns;
    patterns.reserve(mfis.size());
    for (auto& [items, support] : mfis) {
        Pattern p;
        p.support = support;
        p.pairs.reserve(items.size());
        for (Item z : items) {
            const auto [x, y] = enc.decode(z);
            p.pairs.emplace_back(x - 1, y - 1);
        }
        std::sort(p.pairs.begin(), p.pairs.end());
        patterns.push_back(std::move(p));
    }
    std::sort(patterns.begin(), patterns.end(), [](const Pattern& a, const Pattern& b) {
        if (a.size() != b.size()) return a.size() > b.size();
        if (a.support != b.support) return a.support > b.support;
        return a.pairs < b.pairs;
    });
    if (static_cast<int>(patterns.size()) > m) patterns.resize(m);
    return patterns;
}

}  // namespace fpbs
