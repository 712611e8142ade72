#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "treedyn/errors.hpp"

namespace treedyn {

/// Address of a vertex inside a finite window of the directed tree:
/// the sequence of child indices descending from the window's anchor root.
/// The anchor root has an empty path; layer decreases by one per step down.
struct VertexRef {
    std::vector<std::uint8_t> path;
    int layer = 0;

    bool is_root() const { return path.empty(); }
    bool operator==(const VertexRef&) const = default;
};

/// Finite window of the infinite d-ary directed tree. Vertices at or below
/// base_layer carry boundary conditions and are never navigated into.
class TreeWindow {
public:
    TreeWindow(int arity, int anchor_layer, int base_layer)
        : arity_(arity), anchor_layer_(anchor_layer), base_layer_(base_layer) {
        if (arity < 2)
            throw config_error("TreeWindow: arity must be at least 2");
        if (base_layer > anchor_layer)
            throw config_error("TreeWindow: base_layer must not exceed anchor_layer");
    }

    int arity() const { return arity_; }
    int anchor_layer() const { return anchor_layer_; }
    int base_layer() const { return base_layer_; }
    int depth() const { return anchor_layer_ - base_layer_; }

    VertexRef root() const { return VertexRef{{}, anchor_layer_}; }

    bool contains(const VertexRef& v) const {
        return v.layer >= base_layer_ &&
               anchor_layer_ - v.layer == static_cast<int>(v.path.size());
    }

    std::vector<VertexRef> children(const VertexRef& v) const {
        if (v.layer <= base_layer_)
            throw contract_violation("children: vertex at or below base layer");
        std::vector<VertexRef> out;
        out.reserve(static_cast<std::size_t>(arity_));
        for (int c = 0; c < arity_; ++c) {
            VertexRef child = v;
            child.path.push_back(static_cast<std::uint8_t>(c));
            child.layer = v.layer - 1;
            out.push_back(std::move(child));
        }
        return out;
    }

    std::optional<VertexRef> parent(const VertexRef& v) const {
        if (v.is_root()) return std::nullopt;
        VertexRef p = v;
        p.path.pop_back();
        p.layer = v.layer + 1;
        return p;
    }

    /// Number of vertices in the window: sum of d^j for j = 0..depth.
    std::uint64_t subtree_size() const {
        std::uint64_t total = 0;
        std::uint64_t level = 1;
        for (int j = 0; j <= depth(); ++j) {
            if (total > std::numeric_limits<std::uint64_t>::max() - level)
                throw cost_guard_error("subtree_size: count overflows 64 bits");
            total += level;
            if (j < depth()) {
                if (level > std::numeric_limits<std::uint64_t>::max() / arity_)
                    throw cost_guard_error("subtree_size: count overflows 64 bits");
                level *= static_cast<std::uint64_t>(arity_);
            }
        }
        return total;
    }

private:
    int arity_;
    int anchor_layer_;
    int base_layer_;
};

} // namespace treedyn
