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

#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

namespace qfe {

/// Direction from a two-qubit gate's anchor site to its partner site.
/// North decreases x, South increases x, East increases y, West decreases y.
enum class Direction : std::uint8_t { North = 0, East = 1, South = 2, West = 3 };

inline constexpr Direction kAllDirections[] = {Direction::North, Direction::East, Direction::South,
                                               Direction::West};

enum class GateKind : std::uint8_t { I, X, Y, Z, H, T, Tdag, CX, CZ };

constexpr bool is_two_qubit(GateKind k) { return k == GateKind::CX || k == GateKind::CZ; }
constexpr bool is_clifford(GateKind k) { return k != GateKind::T && k != GateKind::Tdag; }

/// Short names used by the circuit text form: I X Y Z H T TD CX CZ.
std::string_view gate_name(GateKind k);
GateKind parse_gate_name(std::string_view name);
char direction_name(Direction d);
Direction parse_direction(std::string_view name);

/// Lattice coordinate. x indexes rows, y indexes columns.
struct Site {
    int x = 0;
    int y = 0;
    auto operator<=>(const Site &) const = default;
};

Site step(Site s, Direction d);

/// One gate slot. Two-qubit kinds always carry a direction, single-qubit
/// kinds never do. For CX the anchor is the control.
struct Gate {
    GateKind kind = GateKind::I;
    std::optional<Direction> dir;

    static Gate single(GateKind k) { return Gate{k, std::nullopt}; }
    static Gate two(GateKind k, Direction d) { return Gate{k, d}; }
    bool is_identity() const { return kind == GateKind::I; }
    bool operator==(const Gate &) const = default;
};

/// Gates placed on a rows x cols square lattice over a fixed number of
/// moments. Storage is dense: a site without a gate holds Identity, and the
/// partner site of a two-qubit gate also holds Identity (only the anchor
/// records the gate).
class LatticeCircuit {
   public:
    LatticeCircuit(int rows, int cols, int depth);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int depth() const { return static_cast<int>(moments_.size()); }
    int num_qubits() const { return rows_ * cols_; }

    bool contains(Site s) const { return s.x >= 0 && s.y >= 0 && s.x < rows_ && s.y < cols_; }
    /// Row-major qubit index shared by tensors, programs and states.
    int qubit(Site s) const { return s.x * cols_ + s.y; }
    Site site(int qubit) const { return Site{qubit / cols_, qubit % cols_}; }

    const Gate &at(int moment, Site s) const { return moments_[moment][qubit(s)]; }
    void set(int moment, Site s, Gate g) { moments_[moment][qubit(s)] = g; }

    /// Which sites take part in some gate during `moment`, anchors and
    /// partners alike. Requires a valid moment.
    std::vector<bool> occupancy(int moment) const;

    /// Throws ValidationError on an off-lattice partner, a site used twice in
    /// one moment, or a direction on the wrong gate arity.
    void validate() const;

    std::size_t count(GateKind k) const;

    bool operator==(const LatticeCircuit &) const = default;

   private:
    int rows_;
    int cols_;
    std::vector<std::vector<Gate>> moments_;
};

/// Concatenates the moments of two circuits on the same lattice.
LatticeCircuit concatenate(const LatticeCircuit &first, const LatticeCircuit &second);

/// Gate set the generators draw from plus the one-hot channel layout.
struct Palette {
    /// Non-identity single-qubit kinds. Identity is always available.
    std::vector<GateKind> single_qubit;
    std::vector<GateKind> two_qubit;
    /// Channel layout includes T/Tdag (15 channels) or not (13).
    bool t_channels = false;
    /// Relative weight of Identity against each single-qubit kind (weight 1).
    double identity_weight = 1.0;

    int channels() const { return t_channels ? 15 : 13; }
    bool allows(GateKind k) const;

    /// X Y Z H, CX CZ, 13 channels.
    static Palette single_moment();
    /// Clifford gates with the 15-channel layout, for Clifford-reducible circuits.
    static Palette clifford();
    /// X Y Z H T Tdag, CX CZ, 15 channels.
    static Palette full();
};

/// Axis-aligned block of sites: x in [x0, x0 + x_extent), y in [y0, y0 + y_extent).
struct Rect {
    int x0 = 0;
    int y0 = 0;
    int x_extent = 1;
    int y_extent = 1;

    bool contains(Site s) const {
        return s.x >= x0 && s.x < x0 + x_extent && s.y >= y0 && s.y < y0 + y_extent;
    }
    bool operator==(const Rect &) const = default;
};

struct Tiling {
    std::vector<Rect> tiles;

    static Tiling whole(int rows, int cols) { return Tiling{{Rect{0, 0, rows, cols}}}; }

    /// Throws ParameterError unless the tiles are disjoint and cover the lattice.
    void validate(int rows, int cols) const;
    /// Tile index of every site, row-major. Requires a valid tiling.
    std::vector<int> tile_map(int rows, int cols) const;

    bool operator==(const Tiling &) const = default;
};

/// Every partition of the lattice into rectangles whose sides are at most
/// `max_side`, in a deterministic order. Stops after `limit` tilings.
std::vector<Tiling> enumerate_tilings(int rows, int cols, int max_side, std::size_t limit = 100000);

/// Partitions into full-width horizontal bands and full-height vertical bands
/// whose thicknesses are drawn from `widths`. The 5x5 catalog uses {2, 3};
/// the 3x3 catalog uses {1, 2}.
std::vector<Tiling> band_tilings(int rows, int cols, const std::vector<int> &widths);

/// Everything a generator needs. The public generators below are thin
/// wrappers around `generate_circuit`.
struct CircuitRecipe {
    int rows = 3;
    int cols = 3;
    int depth = 1;
    Palette palette = Palette::single_moment();
    double two_qubit_fraction = 0.3;
    /// Two-qubit gates stay inside one tile when set.
    std::optional<Tiling> tiling;
    /// Probability that a site receives a (T, Tdag) pair over moments
    /// (2m, 2m + 1). Zero disables pairs.
    double pair_rate = 0.0;
    /// Place Tdag-then-T pairs half of the time as well.
    bool reversed_pairs = false;
};

/// Counters filled by generate_circuit. A decision is an unoccupied site
/// visited while filling a moment; it is eligible when some neighbor in the
/// same tile is still free at that point.
struct GenerationStats {
    std::size_t decisions = 0;
    std::size_t eligible_decisions = 0;
    std::size_t two_qubit_gates = 0;
};

/// Moment rule: T pairs are reserved first; then, per moment, sites are
/// visited in random order and each free site gets, with probability
/// `two_qubit_fraction`, a two-qubit gate toward a uniformly chosen free
/// neighbor in the same tile, otherwise (or when no such neighbor exists) a
/// single-qubit draw weighted `identity_weight` for Identity and 1 for each
/// palette kind. CZ is anchored at the lexicographically smaller site.
LatticeCircuit generate_circuit(const CircuitRecipe &recipe, std::uint64_t seed, GenerationStats *stats = nullptr);

LatticeCircuit random_circuit(int rows, int cols, int depth, const Palette &palette,
                              double two_qubit_fraction, std::uint64_t seed);

struct CliffordReducibleOptions {
    Palette palette = Palette::clifford();
    double two_qubit_fraction = 0.3;
    bool reversed_pairs = false;
    std::optional<Tiling> tiling;
};

LatticeCircuit clifford_reducible_circuit(int rows, int cols, int depth, double pair_rate, std::uint64_t seed,
                                          const CliffordReducibleOptions &options = {});

LatticeCircuit tiled_circuit(int rows, int cols, const Tiling &tiling, int depth, const Palette &palette,
                             double two_qubit_fraction, std::uint64_t seed);

/// Replaces every adjacent-moment (T, Tdag) or (Tdag, T) pair on a site by
/// Identity. Throws ValidationError naming the site and moment of any
/// unmatched T or Tdag.
LatticeCircuit reduce_to_clifford(const LatticeCircuit &circuit);

/// Lattice edges in feature order: for each site row-major, its East edge
/// then its South edge.
std::vector<std::pair<Site, Site>> lattice_couplers(int rows, int cols);

/// Per-site counts of non-identity single-qubit gates over all moments,
/// followed by per-coupler counts of two-qubit gates.
std::vector<double> gate_count_features(const LatticeCircuit &circuit);

}  // namespace qfe
