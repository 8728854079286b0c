#pragma once

#include <cstdint>
#include <vector>

#include "facets/network.hpp"
#include "facets/trainer.hpp"

namespace facets::testing {

/// Hand-crafted 2-2-1 net solving the +-1 XOR table:
/// f(x,y) = [1 -2] relu([[1,1],[1,1]](x,y) + (1,0)) - 1.
/// Its three realizable facets are -x-y, x+y and the constant -1.
inline Mlp xor_net() {
    std::vector<Layer> layers;
    layers.push_back({Matrix{{1, 1}, {1, 1}}, Vector{1, 0}, true});
    layers.push_back({Matrix{{1, -2}}, Vector{-1}, false});
    return Mlp(std::move(layers));
}

/// Integer 3-3-3-3 fixture with two hidden ReLU layers; small enough to
/// compose masked maps by hand.
inline Mlp two_hidden_integer_net() {
    std::vector<Layer> layers;
    layers.push_back({Matrix{{3, 0, 4}, {5, 9, 1}, {6, 1, 2}}, Vector{7, 2, 9}, true});
    layers.push_back({Matrix{{2, 9, 5}, {1, 3, 3}, {8, 7, 0}}, Vector{7, 7, 8}, true});
    layers.push_back({Matrix{{7, 9, 6}, {4, 0, 9}, {7, 3, 7}}, Vector{5, 5, 2}, false});
    return Mlp(std::move(layers));
}

/// The hand-imposed pattern used with two_hidden_integer_net in tests:
/// layer 1 keeps units 0 and 2, layer 2 keeps unit 1.
inline ActivationPattern two_hidden_pattern() {
    ActivationPattern p;
    p.masks = {{true, false, true}, {false, true, false}};
    return p;
}

inline Mlp random_net(const std::vector<std::size_t>& widths, std::uint64_t seed) {
    return init_net(widths, seed);
}

} // namespace facets::testing
