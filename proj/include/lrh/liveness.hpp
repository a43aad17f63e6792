#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace lrh {

// Per-node alive/dead flags; mutable independently of the (immutable) Ring.
// Mutation must be externally synchronized between assignment passes.
class LivenessMask {
  public:
    LivenessMask() = default;

    static LivenessMask all_alive(std::uint32_t n_nodes) {
        LivenessMask m;
        m.alive_.assign(n_nodes, 1);
        m.n_alive_ = n_nodes;
        return m;
    }

    static LivenessMask with_failed(std::uint32_t n_nodes, std::span<const std::uint32_t> failed) {
        LivenessMask m = all_alive(n_nodes);
        for (std::uint32_t f : failed) {
            m.kill(f);
        }
        return m;
    }

    bool is_alive(std::uint32_t node) const { return alive_[node] != 0; }

    void kill(std::uint32_t node) {
        if (alive_.at(node)) {
            alive_[node] = 0;
            --n_alive_;
        }
    }

    void revive(std::uint32_t node) {
        if (!alive_.at(node)) {
            alive_[node] = 1;
            ++n_alive_;
        }
    }

    std::uint32_t n_alive() const { return n_alive_; }
    std::uint32_t size() const { return static_cast<std::uint32_t>(alive_.size()); }

  private:
    std::vector<std::uint8_t> alive_;
    std::uint32_t n_alive_ = 0;
};

// Positive per-node weights, stored apart from the Ring so weight updates
// never touch tokens.
class WeightTable {
  public:
    explicit WeightTable(std::uint32_t n_nodes, double initial = 1.0) {
        set_all(n_nodes, initial);
    }

    void set_all(std::uint32_t n_nodes, double w) {
        check(w);
        weights_.assign(n_nodes, w);
    }

    void set(std::uint32_t node, double w) {
        check(w);
        weights_.at(node) = w;
    }

    double get(std::uint32_t node) const { return weights_[node]; }
    std::uint32_t size() const { return static_cast<std::uint32_t>(weights_.size()); }

  private:
    static void check(double w) {
        if (!(w > 0.0)) {
            throw std::domain_error("WeightTable: weights must be positive");
        }
    }

    std::vector<double> weights_;
};

}  // namespace lrh
