// Copyright 2026 The wnrqc Authors
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

#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "wnrqc/errors.hpp"
#include "wnrqc/rng.hpp"

namespace wnrqc {

struct GatePair {
    uint32_t i;
    uint32_t j;
    bool operator==(const GatePair &) const = default;
};

enum class ArchKind { ring1d, complete_graph, lattice, custom };

inline std::string_view to_string(ArchKind kind) {
    switch (kind) {
        case ArchKind::ring1d:
            return "ring1d";
        case ArchKind::complete_graph:
            return "complete_graph";
        case ArchKind::lattice:
            return "lattice";
        case ArchKind::custom:
            return "custom";
    }
    return "?";
}

inline ArchKind parse_arch_kind(std::string_view text) {
    if (text == "ring1d") return ArchKind::ring1d;
    if (text == "complete_graph" || text == "cg") return ArchKind::complete_graph;
    if (text == "lattice") return ArchKind::lattice;
    if (text == "custom") return ArchKind::custom;
    throw ParameterError("unknown architecture '" + std::string(text) + "'");
}

/// Ordered sequence of two-qudit gate locations on n qudits.
struct CircuitDiagram {
    uint32_t n = 0;
    std::vector<GatePair> gates;
    ArchKind kind = ArchKind::custom;

    size_t size() const { return gates.size(); }

    /// Throws ParameterError unless every pair has distinct in-range indices.
    void validate() const {
        for (const auto &g : gates) {
            if (g.i >= n || g.j >= n || g.i == g.j) {
                std::ostringstream msg;
                msg << "invalid gate pair (" << g.i << "," << g.j << ") for n=" << n;
                throw ParameterError(msg.str());
            }
        }
    }

    /// Every consecutive block of n/2 gates touches each qudit exactly once.
    bool is_layered() const {
        if (n % 2 != 0 || n == 0 || gates.size() % (n / 2) != 0) {
            return false;
        }
        size_t per_layer = n / 2;
        for (size_t start = 0; start < gates.size(); start += per_layer) {
            std::vector<bool> seen(n, false);
            for (size_t k = start; k < start + per_layer; k++) {
                const auto &g = gates[k];
                if (seen[g.i] || seen[g.j]) {
                    return false;
                }
                seen[g.i] = seen[g.j] = true;
            }
        }
        return true;
    }

    bool operator==(const CircuitDiagram &) const = default;
};

/// Periodic brickwork on a ring: odd layers (0,1),(2,3),...; even layers
/// (1,2),...,(n-1,0).
inline CircuitDiagram gen_ring1d(uint32_t n, uint32_t depth) {
    detail::require(n % 2 == 0, "ring1d requires an even number of qudits");
    detail::require(n >= 4, "ring1d requires n >= 4");
    CircuitDiagram d{n, {}, ArchKind::ring1d};
    d.gates.reserve(static_cast<size_t>(depth) * n / 2);
    for (uint32_t layer = 0; layer < depth; layer++) {
        uint32_t offset = layer % 2;
        for (uint32_t k = offset; k < n + offset; k += 2) {
            d.gates.push_back({k % n, (k + 1) % n});
        }
    }
    return d;
}

/// Maps an index in [0, n(n-1)/2) to the pair (i<j) in lexicographic order.
inline GatePair unrank_pair(uint32_t n, uint64_t rank) {
    uint32_t i = 0;
    uint64_t row = n - 1;
    while (rank >= row) {
        rank -= row;
        i++;
        row--;
    }
    return {i, static_cast<uint32_t>(i + 1 + rank)};
}

/// One uniformly random pair among the n(n-1)/2.
inline GatePair sample_complete_graph_pair(uint32_t n, Rng &rng) {
    uint64_t pairs = static_cast<uint64_t>(n) * (n - 1) / 2;
    return unrank_pair(n, uniform_below(rng, pairs));
}

/// Infinite seeded pair source for complete-graph runs too long to materialize.
class CompleteGraphStream {
   public:
    CompleteGraphStream(uint32_t n, uint64_t seed) : n_(n), rng_(stream_rng(seed, 0)) {
        detail::require(n >= 2, "complete graph requires n >= 2");
    }
    GatePair next() { return sample_complete_graph_pair(n_, rng_); }

   private:
    uint32_t n_;
    Rng rng_;
};

inline CircuitDiagram gen_complete_graph(uint32_t n, size_t s, uint64_t seed) {
    CompleteGraphStream stream(n, seed);
    CircuitDiagram d{n, {}, ArchKind::complete_graph};
    d.gates.reserve(s);
    for (size_t t = 0; t < s; t++) {
        d.gates.push_back(stream.next());
    }
    return d;
}

/// Same distribution as gen_complete_graph but drawing from a caller's stream.
inline CircuitDiagram gen_complete_graph(uint32_t n, size_t s, Rng &rng) {
    detail::require(n >= 2, "complete graph requires n >= 2");
    CircuitDiagram d{n, {}, ArchKind::complete_graph};
    d.gates.reserve(s);
    for (size_t t = 0; t < s; t++) {
        d.gates.push_back(sample_complete_graph_pair(n, rng));
    }
    return d;
}

/// Periodic D-dimensional brickwork. Layers cycle axis-major with even parity
/// first: (axis 0, even), (axis 0, odd), (axis 1, even), ... Site index has
/// axis 0 fastest, so dims={n} reproduces gen_ring1d.
inline CircuitDiagram gen_lattice(const std::vector<uint32_t> &dims, uint32_t depth) {
    detail::require(!dims.empty(), "lattice needs at least one dimension");
    uint32_t n = 1;
    std::vector<uint32_t> stride(dims.size());
    for (size_t a = 0; a < dims.size(); a++) {
        detail::require(dims[a] >= 2 && dims[a] % 2 == 0, "lattice dimensions must be even and >= 2");
        stride[a] = n;
        n *= dims[a];
    }
    CircuitDiagram d{n, {}, ArchKind::lattice};
    d.gates.reserve(static_cast<size_t>(depth) * n / 2);
    size_t period = 2 * dims.size();
    for (uint32_t layer = 0; layer < depth; layer++) {
        size_t axis = (layer % period) / 2;
        uint32_t parity = layer % 2;
        for (uint32_t site = 0; site < n; site++) {
            uint32_t coord = (site / stride[axis]) % dims[axis];
            if (coord % 2 != parity) {
                continue;
            }
            uint32_t next_coord = (coord + 1) % dims[axis];
            uint32_t partner = site - coord * stride[axis] + next_coord * stride[axis];
            d.gates.push_back({site, partner});
        }
    }
    return d;
}

/// Recipe for drawing diagrams. Layered kinds are deterministic; complete
/// graph draws a fresh diagram each time, realizing the diagram average.
struct ArchitectureSpec {
    ArchKind kind = ArchKind::complete_graph;
    uint32_t n = 0;
    /// Depth for ring1d and lattice, gate count s for complete_graph.
    uint64_t size = 0;
    std::vector<uint32_t> dims;
    CircuitDiagram custom;

    static ArchitectureSpec ring1d(uint32_t n, uint32_t depth) {
        return {ArchKind::ring1d, n, depth, {}, {}};
    }
    static ArchitectureSpec complete_graph(uint32_t n, uint64_t s) {
        return {ArchKind::complete_graph, n, s, {}, {}};
    }
    static ArchitectureSpec lattice(std::vector<uint32_t> dims, uint32_t depth) {
        uint32_t n = 1;
        for (uint32_t d : dims) {
            n *= d;
        }
        return {ArchKind::lattice, n, depth, std::move(dims), {}};
    }
    static ArchitectureSpec fixed(CircuitDiagram d) {
        uint32_t n = d.n;
        return {ArchKind::custom, n, d.gates.size(), {}, std::move(d)};
    }

    CircuitDiagram draw(Rng &rng) const {
        switch (kind) {
            case ArchKind::ring1d:
                return gen_ring1d(n, static_cast<uint32_t>(size));
            case ArchKind::complete_graph:
                return gen_complete_graph(n, size, rng);
            case ArchKind::lattice:
                return gen_lattice(dims, static_cast<uint32_t>(size));
            case ArchKind::custom:
                return custom;
        }
        throw ParameterError("unknown architecture");
    }
};

/// Text form: a header line "n s kind", then one "i j" line per gate.
inline void write_diagram(std::ostream &out, const CircuitDiagram &d) {
    out << d.n << ' ' << d.gates.size() << ' ' << to_string(d.kind) << '\n';
    for (const auto &g : d.gates) {
        out << g.i << ' ' << g.j << '\n';
    }
}

inline CircuitDiagram read_diagram(std::istream &in) {
    CircuitDiagram d;
    std::string line;
    size_t line_no = 0;
    auto next_line = [&]() -> bool {
        while (std::getline(in, line)) {
            line_no++;
            if (!line.empty() && line.find_first_not_of(" \t\r") != std::string::npos) {
                return true;
            }
        }
        return false;
    };
    if (!next_line()) {
        throw ParameterError("diagram: missing header line");
    }
    size_t s = 0;
    std::string kind;
    {
        std::istringstream header(line);
        if (!(header >> d.n >> s >> kind)) {
            throw ParameterError("diagram: malformed header on line " + std::to_string(line_no));
        }
    }
    d.kind = parse_arch_kind(kind);
    d.gates.reserve(s);
    for (size_t t = 0; t < s; t++) {
        if (!next_line()) {
            throw ParameterError("diagram: expected " + std::to_string(s) + " gates, found " + std::to_string(t));
        }
        std::istringstream row(line);
        long long i = -1;
        long long j = -1;
        if (!(row >> i >> j) || i < 0 || j < 0) {
            throw ParameterError("diagram: malformed gate on line " + std::to_string(line_no));
        }
        d.gates.push_back({static_cast<uint32_t>(i), static_cast<uint32_t>(j)});
    }
    d.validate();
    return d;
}

}  // namespace wnrqc
