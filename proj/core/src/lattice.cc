// Copyright 2026 The QFE Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qfe/lattice.h"

#include <algorithm>
#include <string>

#include "qfe/error.h"
#include "qfe/rng.h"

namespace qfe {

std::string_view gate_name(GateKind k) {
    switch (k) {
        case GateKind::I:
            return "I";
        case GateKind::X:
            return "X";
        case GateKind::Y:
            return "Y";
        case GateKind::Z:
            return "Z";
        case GateKind::H:
            return "H";
        case GateKind::T:
            return "T";
        case GateKind::Tdag:
            return "TD";
        case GateKind::CX:
            return "CX";
        case GateKind::CZ:
            return "CZ";
    }
    return "?";
}

GateKind parse_gate_name(std::string_view name) {
    for (GateKind k : {GateKind::I, GateKind::X, GateKind::Y, GateKind::Z, GateKind::H, GateKind::T,
                       GateKind::Tdag, GateKind::CX, GateKind::CZ}) {
        if (gate_name(k) == name) {
            return k;
        }
    }
    throw FormatError("unknown gate name '" + std::string(name) + "'");
}

char direction_name(Direction d) {
    static constexpr char kNames[] = {'N', 'E', 'S', 'W'};
    return kNames[static_cast<int>(d)];
}

Direction parse_direction(std::string_view name) {
    if (name.size() == 1) {
        for (Direction d : kAllDirections) {
            if (direction_name(d) == name[0]) {
                return d;
            }
        }
    }
    throw FormatError("unknown direction '" + std::string(name) + "'");
}

Site step(Site s, Direction d) {
    switch (d) {
        case Direction::North:
            return {s.x - 1, s.y};
        case Direction::East:
            return {s.x, s.y + 1};
        case Direction::South:
            return {s.x + 1, s.y};
        case Direction::West:
            return {s.x, s.y - 1};
    }
    return s;
}

namespace {

std::string describe(Site s) { return "(" + std::to_string(s.x) + ", " + std::to_string(s.y) + ")"; }

}  // namespace

LatticeCircuit::LatticeCircuit(int rows, int cols, int depth) : rows_(rows), cols_(cols) {
    if (rows < 1 || cols < 1) {
        throw ParameterError("lattice dimensions must be positive");
    }
    if (depth < 0) {
        throw ParameterError("depth must be non-negative");
    }
    moments_.assign(depth, std::vector<Gate>(static_cast<std::size_t>(rows) * cols));
}

std::vector<bool> LatticeCircuit::occupancy(int moment) const {
    std::vector<bool> occupied(num_qubits(), false);
    for (int q = 0; q < num_qubits(); ++q) {
        const Gate &g = moments_[moment][q];
        if (g.is_identity()) {
            continue;
        }
        occupied[q] = true;
        if (is_two_qubit(g.kind)) {
            occupied[qubit(step(site(q), *g.dir))] = true;
        }
    }
    return occupied;
}

void LatticeCircuit::validate() const {
    for (int m = 0; m < depth(); ++m) {
        std::vector<int> used(num_qubits(), 0);
        for (int q = 0; q < num_qubits(); ++q) {
            const Gate &g = moments_[m][q];
            const Site s = site(q);
            if (is_two_qubit(g.kind) != g.dir.has_value()) {
                throw ValidationError("gate " + std::string(gate_name(g.kind)) + " at " + describe(s) +
                                      " in moment " + std::to_string(m) + " has the wrong direction arity");
            }
            if (g.is_identity()) {
                continue;
            }
            ++used[q];
            if (is_two_qubit(g.kind)) {
                const Site p = step(s, *g.dir);
                if (!contains(p)) {
                    throw ValidationError("two-qubit gate at " + describe(s) + " in moment " + std::to_string(m) +
                                          " points off the lattice");
                }
                ++used[qubit(p)];
            }
        }
        for (int q = 0; q < num_qubits(); ++q) {
            if (used[q] > 1) {
                throw ValidationError("site " + describe(site(q)) + " takes part in " + std::to_string(used[q]) +
                                      " gates in moment " + std::to_string(m));
            }
        }
    }
}

std::size_t LatticeCircuit::count(GateKind k) const {
    std::size_t n = 0;
    for (const auto &moment : moments_) {
        n += static_cast<std::size_t>(std::count_if(moment.begin(), moment.end(),
                                                    [k](const Gate &g) { return g.kind == k; }));
    }
    return n;
}

LatticeCircuit concatenate(const LatticeCircuit &first, const LatticeCircuit &second) {
    if (first.rows() != second.rows() || first.cols() != second.cols()) {
        throw ParameterError("cannot concatenate circuits on different lattices");
    }
    LatticeCircuit out(first.rows(), first.cols(), first.depth() + second.depth());
    for (int m = 0; m < out.depth(); ++m) {
        const LatticeCircuit &src = m < first.depth() ? first : second;
        const int sm = m < first.depth() ? m : m - first.depth();
        for (int q = 0; q < out.num_qubits(); ++q) {
            out.set(m, out.site(q), src.at(sm, src.site(q)));
        }
    }
    return out;
}

bool Palette::allows(GateKind k) const {
    if (k == GateKind::I) {
        return true;
    }
    if (k == GateKind::T || k == GateKind::Tdag) {
        return t_channels;
    }
    const auto &pool = is_two_qubit(k) ? two_qubit : single_qubit;
    return std::find(pool.begin(), pool.end(), k) != pool.end();
}

Palette Palette::single_moment() {
    return Palette{{GateKind::X, GateKind::Y, GateKind::Z, GateKind::H}, {GateKind::CX, GateKind::CZ}, false, 1.0};
}

Palette Palette::clifford() {
    Palette p = single_moment();
    p.t_channels = true;
    return p;
}

Palette Palette::full() {
    return Palette{{GateKind::X, GateKind::Y, GateKind::Z, GateKind::H, GateKind::T, GateKind::Tdag},
                   {GateKind::CX, GateKind::CZ},
                   true,
                   1.0};
}

void Tiling::validate(int rows, int cols) const {
    if (tiles.empty()) {
        throw ParameterError("tiling has no tiles");
    }
    std::vector<int> cover(static_cast<std::size_t>(rows) * cols, 0);
    for (const Rect &r : tiles) {
        if (r.x_extent < 1 || r.y_extent < 1 || r.x0 < 0 || r.y0 < 0 || r.x0 + r.x_extent > rows ||
            r.y0 + r.y_extent > cols) {
            throw ParameterError("tile at " + describe({r.x0, r.y0}) + " does not fit the " + std::to_string(rows) +
                                 "x" + std::to_string(cols) + " lattice");
        }
        for (int x = r.x0; x < r.x0 + r.x_extent; ++x) {
            for (int y = r.y0; y < r.y0 + r.y_extent; ++y) {
                if (++cover[x * cols + y] > 1) {
                    throw ParameterError("tiles overlap at " + describe({x, y}));
                }
            }
        }
    }
    for (int q = 0; q < rows * cols; ++q) {
        if (cover[q] == 0) {
            throw ParameterError("tiling leaves " + describe({q / cols, q % cols}) + " uncovered");
        }
    }
}

std::vector<int> Tiling::tile_map(int rows, int cols) const {
    std::vector<int> map(static_cast<std::size_t>(rows) * cols, -1);
    for (int t = 0; t < static_cast<int>(tiles.size()); ++t) {
        const Rect &r = tiles[t];
        for (int x = r.x0; x < r.x0 + r.x_extent; ++x) {
            for (int y = r.y0; y < r.y0 + r.y_extent; ++y) {
                map[x * cols + y] = t;
            }
        }
    }
    return map;
}

namespace {

void enumerate_rec(int rows, int cols, int max_side, std::vector<bool> &filled, Tiling &current,
                   std::vector<Tiling> &out, std::size_t limit) {
    if (out.size() >= limit) {
        return;
    }
    const auto first_free = std::find(filled.begin(), filled.end(), false);
    if (first_free == filled.end()) {
        out.push_back(current);
        return;
    }
    const int q = static_cast<int>(first_free - filled.begin());
    const int x0 = q / cols;
    const int y0 = q % cols;
    for (int dx = 1; dx <= max_side && x0 + dx <= rows; ++dx) {
        for (int dy = 1; dy <= max_side && y0 + dy <= cols; ++dy) {
            bool fits = true;
            for (int x = x0; x < x0 + dx && fits; ++x) {
                for (int y = y0; y < y0 + dy && fits; ++y) {
                    fits = !filled[x * cols + y];
                }
            }
            if (!fits) {
                // Growing further along y only hits the same blocked cell.
                break;
            }
            for (int x = x0; x < x0 + dx; ++x) {
                for (int y = y0; y < y0 + dy; ++y) {
                    filled[x * cols + y] = true;
                }
            }
            current.tiles.push_back(Rect{x0, y0, dx, dy});
            enumerate_rec(rows, cols, max_side, filled, current, out, limit);
            current.tiles.pop_back();
            for (int x = x0; x < x0 + dx; ++x) {
                for (int y = y0; y < y0 + dy; ++y) {
                    filled[x * cols + y] = false;
                }
            }
        }
    }
}

void compositions(int total, const std::vector<int> &parts, std::vector<int> &current,
                  std::vector<std::vector<int>> &out) {
    if (total == 0) {
        out.push_back(current);
        return;
    }
    for (int p : parts) {
        if (p <= total) {
            current.push_back(p);
            compositions(total - p, parts, current, out);
            current.pop_back();
        }
    }
}

}  // namespace

std::vector<Tiling> enumerate_tilings(int rows, int cols, int max_side, std::size_t limit) {
    if (rows < 1 || cols < 1 || max_side < 1) {
        throw ParameterError("enumerate_tilings needs positive dimensions and max_side");
    }
    std::vector<Tiling> out;
    std::vector<bool> filled(static_cast<std::size_t>(rows) * cols, false);
    Tiling current;
    enumerate_rec(rows, cols, max_side, filled, current, out, limit);
    return out;
}

std::vector<Tiling> band_tilings(int rows, int cols, const std::vector<int> &widths) {
    for (int w : widths) {
        if (w < 1) {
            throw ParameterError("band widths must be positive");
        }
    }
    std::vector<int> parts = widths;
    std::sort(parts.begin(), parts.end());
    parts.erase(std::unique(parts.begin(), parts.end()), parts.end());

    std::vector<Tiling> out;
    std::vector<std::vector<int>> splits;
    std::vector<int> scratch;
    compositions(rows, parts, scratch, splits);
    for (const auto &split : splits) {
        Tiling t;
        int x = 0;
        for (int h : split) {
            t.tiles.push_back(Rect{x, 0, h, cols});
            x += h;
        }
        out.push_back(std::move(t));
    }
    splits.clear();
    compositions(cols, parts, scratch, splits);
    for (const auto &split : splits) {
        Tiling t;
        int y = 0;
        for (int w : split) {
            t.tiles.push_back(Rect{0, y, rows, w});
            y += w;
        }
        // A single band is the same tiling in both orientations.
        if (std::find(out.begin(), out.end(), t) == out.end()) {
            out.push_back(std::move(t));
        }
    }
    return out;
}

LatticeCircuit generate_circuit(const CircuitRecipe &recipe, std::uint64_t seed, GenerationStats *stats) {
    const int rows = recipe.rows;
    const int cols = recipe.cols;
    if (rows < 1 || cols < 1 || recipe.depth < 1) {
        throw ParameterError("rows, cols and depth must all be at least 1");
    }
    if (!(recipe.two_qubit_fraction >= 0.0 && recipe.two_qubit_fraction <= 1.0)) {
        throw ParameterError("two_qubit_fraction must lie in [0, 1]");
    }
    if (!(recipe.pair_rate >= 0.0 && recipe.pair_rate <= 1.0)) {
        throw ParameterError("pair_rate must lie in [0, 1]");
    }
    if (!(recipe.palette.identity_weight >= 0.0)) {
        throw ParameterError("identity_weight must be non-negative");
    }
    for (GateKind k : recipe.palette.single_qubit) {
        if (is_two_qubit(k) || k == GateKind::I) {
            throw ParameterError("single-qubit palette lists " + std::string(gate_name(k)));
        }
        if (!is_clifford(k) && !recipe.palette.t_channels) {
            throw ParameterError("palette draws T/Tdag but its channel layout has no T channels");
        }
    }
    for (GateKind k : recipe.palette.two_qubit) {
        if (!is_two_qubit(k)) {
            throw ParameterError("two-qubit palette lists " + std::string(gate_name(k)));
        }
    }
    if (recipe.pair_rate > 0.0 && !recipe.palette.t_channels) {
        throw ParameterError("T pairs need a palette with T channels");
    }
    if (recipe.palette.single_qubit.empty() && recipe.palette.identity_weight <= 0.0) {
        throw ParameterError("palette has no single-qubit choice");
    }

    std::vector<int> tile_of;
    if (recipe.tiling) {
        recipe.tiling->validate(rows, cols);
        tile_of = recipe.tiling->tile_map(rows, cols);
    } else {
        tile_of.assign(static_cast<std::size_t>(rows) * cols, 0);
    }

    Rng rng(seed);
    LatticeCircuit c(rows, cols, recipe.depth);
    const int n = c.num_qubits();
    std::vector<std::vector<bool>> reserved(recipe.depth, std::vector<bool>(n, false));

    if (recipe.pair_rate > 0.0) {
        for (int m = 0; m + 1 < recipe.depth; m += 2) {
            for (int q = 0; q < n; ++q) {
                if (rng.uniform() >= recipe.pair_rate) {
                    continue;
                }
                bool reversed = recipe.reversed_pairs && rng.uniform() < 0.5;
                c.set(m, c.site(q), Gate::single(reversed ? GateKind::Tdag : GateKind::T));
                c.set(m + 1, c.site(q), Gate::single(reversed ? GateKind::T : GateKind::Tdag));
                reserved[m][q] = true;
                reserved[m + 1][q] = true;
            }
        }
    }

    const auto &singles = recipe.palette.single_qubit;
    const auto &doubles = recipe.palette.two_qubit;
    const double single_total = recipe.palette.identity_weight + static_cast<double>(singles.size());

    std::vector<int> order(n);
    std::vector<Site> free_neighbors;
    for (int m = 0; m < recipe.depth; ++m) {
        std::vector<bool> occupied = reserved[m];
        for (int q = 0; q < n; ++q) {
            order[q] = q;
        }
        rng.shuffle(std::span<int>(order));
        for (int q : order) {
            if (occupied[q]) {
                continue;
            }
            const Site s = c.site(q);
            free_neighbors.clear();
            for (Direction d : kAllDirections) {
                const Site p = step(s, d);
                if (c.contains(p) && !occupied[c.qubit(p)] && tile_of[c.qubit(p)] == tile_of[q]) {
                    free_neighbors.push_back(p);
                }
            }
            if (stats) {
                ++stats->decisions;
                stats->eligible_decisions += !free_neighbors.empty();
            }
            if (!doubles.empty() && rng.uniform() < recipe.two_qubit_fraction) {
                if (!free_neighbors.empty()) {
                    const Site p = free_neighbors[rng.below(free_neighbors.size())];
                    const GateKind kind = doubles[rng.below(doubles.size())];
                    Site anchor = s;
                    Site partner = p;
                    if (kind == GateKind::CZ && partner < anchor) {
                        std::swap(anchor, partner);
                    }
                    Direction dir = Direction::North;
                    for (Direction d : kAllDirections) {
                        if (step(anchor, d) == partner) {
                            dir = d;
                        }
                    }
                    c.set(m, anchor, Gate::two(kind, dir));
                    occupied[q] = true;
                    occupied[c.qubit(p)] = true;
                    if (stats) {
                        ++stats->two_qubit_gates;
                    }
                    continue;
                }
            }
            const double draw = rng.uniform() * single_total;
            GateKind kind = GateKind::I;
            if (draw >= recipe.palette.identity_weight && !singles.empty()) {
                const auto idx = static_cast<std::size_t>(draw - recipe.palette.identity_weight);
                kind = singles[std::min(idx, singles.size() - 1)];
            }
            c.set(m, s, Gate::single(kind));
            occupied[q] = true;
        }
    }
    return c;
}

LatticeCircuit random_circuit(int rows, int cols, int depth, const Palette &palette, double two_qubit_fraction,
                              std::uint64_t seed) {
    CircuitRecipe r;
    r.rows = rows;
    r.cols = cols;
    r.depth = depth;
    r.palette = palette;
    r.two_qubit_fraction = two_qubit_fraction;
    return generate_circuit(r, seed);
}

LatticeCircuit clifford_reducible_circuit(int rows, int cols, int depth, double pair_rate, std::uint64_t seed,
                                          const CliffordReducibleOptions &options) {
    if (depth < 2) {
        throw ParameterError("Clifford-reducible circuits need depth >= 2");
    }
    for (GateKind k : options.palette.single_qubit) {
        if (!is_clifford(k)) {
            throw ParameterError("Clifford-reducible base palette must be Clifford");
        }
    }
    CircuitRecipe r;
    r.rows = rows;
    r.cols = cols;
    r.depth = depth;
    r.palette = options.palette;
    r.palette.t_channels = true;
    r.two_qubit_fraction = options.two_qubit_fraction;
    r.tiling = options.tiling;
    r.pair_rate = pair_rate;
    r.reversed_pairs = options.reversed_pairs;
    return generate_circuit(r, seed);
}

LatticeCircuit tiled_circuit(int rows, int cols, const Tiling &tiling, int depth, const Palette &palette,
                             double two_qubit_fraction, std::uint64_t seed) {
    CircuitRecipe r;
    r.rows = rows;
    r.cols = cols;
    r.depth = depth;
    r.palette = palette;
    r.two_qubit_fraction = two_qubit_fraction;
    r.tiling = tiling;
    return generate_circuit(r, seed);
}

LatticeCircuit reduce_to_clifford(const LatticeCircuit &circuit) {
    LatticeCircuit out = circuit;
    for (int q = 0; q < circuit.num_qubits(); ++q) {
        const Site s = circuit.site(q);
        for (int m = 0; m < circuit.depth(); ++m) {
            const GateKind k = out.at(m, s).kind;
            if (k != GateKind::T && k != GateKind::Tdag) {
                continue;
            }
            const GateKind inverse = k == GateKind::T ? GateKind::Tdag : GateKind::T;
            if (m + 1 >= circuit.depth() || out.at(m + 1, s).kind != inverse) {
                throw ValidationError("unmatched " + std::string(gate_name(k)) + " at site " + describe(s) +
                                      " in moment " + std::to_string(m));
            }
            out.set(m, s, Gate{});
            out.set(m + 1, s, Gate{});
            ++m;
        }
    }
    return out;
}

std::vector<std::pair<Site, Site>> lattice_couplers(int rows, int cols) {
    std::vector<std::pair<Site, Site>> out;
    for (int x = 0; x < rows; ++x) {
        for (int y = 0; y < cols; ++y) {
            if (y + 1 < cols) {
                out.push_back({Site{x, y}, Site{x, y + 1}});
            }
            if (x + 1 < rows) {
                out.push_back({Site{x, y}, Site{x + 1, y}});
            }
        }
    }
    return out;
}

std::vector<double> gate_count_features(const LatticeCircuit &circuit) {
    const int n = circuit.num_qubits();
    const auto couplers = lattice_couplers(circuit.rows(), circuit.cols());
    std::vector<double> features(n + couplers.size(), 0.0);
    for (int m = 0; m < circuit.depth(); ++m) {
        for (int q = 0; q < n; ++q) {
            const Site s = circuit.site(q);
            const Gate &g = circuit.at(m, s);
            if (g.is_identity()) {
                continue;
            }
            if (!is_two_qubit(g.kind)) {
                features[q] += 1.0;
                continue;
            }
            Site a = s;
            Site b = step(s, *g.dir);
            if (b < a) {
                std::swap(a, b);
            }
            // East edges precede South edges of the same site.
            std::size_t idx = 0;
            for (; idx < couplers.size(); ++idx) {
                if (couplers[idx].first == a && couplers[idx].second == b) {
                    break;
                }
            }
            features[n + idx] += 1.0;
        }
    }
    return features;
}

}  // namespace qfe
