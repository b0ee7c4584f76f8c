#pragma once

// Slow, obviously-correct reference implementations used only by the tests.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "fcl/grid_geometry.hpp"

namespace oracle {

/// Squared distance to the nearest seed by exhaustive search.
inline std::vector<std::uint32_t> brute_force_edt(const fcl::BitMask& m) {
    std::vector<std::pair<int, int>> seeds;
    for (int j = 0; j < m.height; ++j)
        for (int i = 0; i < m.width; ++i)
            if (m(i, j)) seeds.emplace_back(i, j);
    std::vector<std::uint32_t> out(m.bits.size());
    for (int j = 0; j < m.height; ++j)
        for (int i = 0; i < m.width; ++i) {
            std::int64_t best = std::numeric_limits<std::int64_t>::max();
            for (auto [a, b] : seeds) {
                const std::int64_t dx = i - a, dy = j - b;
                best = std::min(best, dx * dx + dy * dy);
            }
            out[m.index(i, j)] = static_cast<std::uint32_t>(best);
        }
    return out;
}

inline int count_components(const fcl::BitMask& m, bool value, bool eight, bool skip_touching_border) {
    const int W = m.width, H = m.height;
    std::vector<char> seen(m.bits.size(), 0);
    int count = 0;
    std::vector<std::pair<int, int>> stack;
    for (int j0 = 0; j0 < H; ++j0)
        for (int i0 = 0; i0 < W; ++i0) {
            if (m(i0, j0) != value || seen[m.index(i0, j0)]) continue;
            bool border = false;
            stack.assign(1, {i0, j0});
            seen[m.index(i0, j0)] = 1;
            while (!stack.empty()) {
                auto [i, j] = stack.back();
                stack.pop_back();
                if (i == 0 || j == 0 || i == W - 1 || j == H - 1) border = true;
                for (int dj = -1; dj <= 1; ++dj)
                    for (int di = -1; di <= 1; ++di) {
                        if (di == 0 && dj == 0) continue;
                        if (!eight && di != 0 && dj != 0) continue;
                        const int a = i + di, b = j + dj;
                        if (a < 0 || b < 0 || a >= W || b >= H) continue;
                        if (m(a, b) != value || seen[m.index(a, b)]) continue;
                        seen[m.index(a, b)] = 1;
                        stack.emplace_back(a, b);
                    }
            }
            if (!(skip_touching_border && border)) ++count;
        }
    return count;
}

/// χ of closed cells: 8-connected foreground components minus bounded
/// 4-connected background components.
inline long long flood_fill_euler(const fcl::BitMask& m) {
    return count_components(m, true, true, false) - count_components(m, false, false, true);
}

inline fcl::BitMask random_mask(std::mt19937_64& rng, int w, int h, double density) {
    fcl::BitMask m(w, h);
    std::bernoulli_distribution coin(density);
    for (auto& b : m.bits) b = coin(rng) ? 1 : 0;
    return m;
}

/// Exact E C_k(F(ε)) for the gasket family by counting holes: at a node of
/// size s, a G level opens one hole of inradius s·L/2, an H level opens three
/// of inradius s·L/3. A hole with inradius ρ > ε contributes
/// (−1, 3√3(ρ−ε), −3√3(ρ−ε)²) to (C0, C1, C2).
inline std::array<double, 3> gasket_expected_curvature(double p, double eps) {
    const double s3 = std::sqrt(3.0), L = s3 / 6.0, pi = std::numbers::pi;
    std::array<double, 3> c{1.0, 1.5 + pi * eps, s3 / 4.0 + 3.0 * eps + pi * eps * eps};
    // expected number of nodes of size s, by exponent pair (a, b): s = 2^-a 3^-b
    auto add_hole = [&](double weight, double rho) {
        if (rho <= eps) return;
        c[0] -= weight;
        c[1] += weight * 3.0 * s3 * (rho - eps);
        c[2] -= weight * 3.0 * s3 * (rho - eps) * (rho - eps);
    };
    // recursion over levels: weight of nodes with size s, carried as a list
    std::vector<std::pair<double, double>> level{{1.0, 1.0}};  // (size, expected count)
    while (!level.empty()) {
        std::vector<std::pair<double, double>> next;
        for (auto [s, w] : level) {
            if (s * L / 2.0 <= eps) continue;
            if (p > 0.0) {
                add_hole(w * p, s * L / 2.0);
                next.emplace_back(s / 2.0, w * p * 3.0);
            }
            if (p < 1.0) {
                add_hole(w * (1.0 - p) * 3.0, s * L / 3.0);
                next.emplace_back(s / 3.0, w * (1.0 - p) * 6.0);
            }
        }
        // merge equal sizes
        std::sort(next.begin(), next.end());
        level.clear();
        for (auto [s, w] : next) {
            if (!level.empty() && std::abs(level.back().first - s) <= 1e-12 * s)
                level.back().second += w;
            else
                level.emplace_back(s, w);
        }
    }
    return c;
}

}  // namespace oracle
