#include "driftev/wells.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <numeric>

namespace driftev {

Lattice Lattice::of(const Grid1D& g) {
    Lattice L;
    L.fx = g.n + 2;
    L.fy = 1;
    L.hx = g.h;
    L.hy = g.h;
    L.x0 = -g.l;
    return L;
}

Lattice Lattice::of(const Grid2D& g) {
    Lattice L;
    L.fx = g.full_x();
    L.fy = g.full_y();
    L.hx = g.hx;
    L.hy = g.hy;
    L.x0 = -g.lx;
    L.y0 = -g.ly;
    return L;
}

bool Lattice::on_boundary(std::size_t k) const {
    const std::size_t i = k % fx, j = k / fx;
    if (i == 0 || i + 1 == fx) return true;
    return fy > 1 && (j == 0 || j + 1 == fy);
}

Well Well::basin_well() const {
    Well w = *this;
    w.barrier_value = basin_level;
    w.depth = basin_level - min_value;
    w.region_mask = basin_mask;
    w.dies_into_boundary = false;
    return w;
}

std::vector<std::uint8_t> sublevel_component(const Lattice& L, std::span<const double> b,
                                             std::size_t seed, double level) {
    std::vector<std::uint8_t> mask(L.size(), 0);
    if (L.on_boundary(seed) || !(b[seed] < level)) return mask;
    std::deque<std::size_t> queue{seed};
    mask[seed] = 1;
    while (!queue.empty()) {
        const std::size_t k = queue.front();
        queue.pop_front();
        L.for_each_neighbor(k, [&](std::size_t m, double) {
            if (!mask[m] && !L.on_boundary(m) && b[m] < level) {
                mask[m] = 1;
                queue.push_back(m);
            }
        });
    }
    return mask;
}

namespace {

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    void attach(std::size_t child_root, std::size_t parent_root) { parent_[child_root] = parent_root; }

private:
    std::vector<std::size_t> parent_;
};

struct Component {
    double birth = 0.0;
    std::size_t min_node = 0;
    double first_merge = std::numeric_limits<double>::infinity();
};

struct Death {
    std::size_t min_node;
    double birth, death, first_merge;
    bool into_boundary;
};

}  // namespace

WellReport detect_wells(const Lattice& L, std::span<const double> b, double tol) {
    if (L.size() == 0 || b.size() != L.size()) throw InvalidArgument("detect_wells: empty grid");
    if (tol < 0.0) throw InvalidArgument("detect_wells: tol must be >= 0");

    const std::size_t N = L.size();
    const std::size_t boundary_id = N;  // virtual node standing for the whole boundary ring

    std::vector<std::size_t> order;
    double boundary_level = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < N; ++k) {
        if (L.on_boundary(k))
            boundary_level = std::min(boundary_level, b[k]);
        else
            order.push_back(k);
    }
    std::sort(order.begin(), order.end(), [&](std::size_t u, std::size_t v) {
        return b[u] < b[v] || (b[u] == b[v] && u < v);
    });

    UnionFind uf(N + 1);
    std::vector<Component> comp(N + 1);
    std::vector<std::uint8_t> active(N + 1, 0);
    std::vector<Death> deaths;

    // Merge a set of roots at `level`; the eldest survives (boundary is eldest).
    auto merge_roots = [&](std::vector<std::size_t>& roots, double level) -> std::size_t {
        std::sort(roots.begin(), roots.end());
        roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
        auto elder = [&](std::size_t u, std::size_t v) {
            if (u == boundary_id || v == boundary_id) return u == boundary_id;
            if (comp[u].birth != comp[v].birth) return comp[u].birth < comp[v].birth;
            return comp[u].min_node < comp[v].min_node;
        };
        const std::size_t survivor = *std::min_element(roots.begin(), roots.end(), elder);
        if (roots.size() > 1) {
            const bool boundary_involved = survivor == boundary_id;
            for (std::size_t r : roots) {
                comp[r].first_merge = std::min(comp[r].first_merge, level);
                if (r == survivor) continue;
                deaths.push_back({comp[r].min_node, comp[r].birth, level, comp[r].first_merge,
                                  boundary_involved});
                uf.attach(r, survivor);
            }
        }
        return survivor;
    };

    auto activate_boundary = [&] {
        active[boundary_id] = 1;
        std::vector<std::size_t> roots{boundary_id};
        for (std::size_t k = 0; k < N; ++k) {
            if (!L.on_boundary(k)) continue;
            L.for_each_neighbor(k, [&](std::size_t m, double) {
                if (!L.on_boundary(m) && active[m]) roots.push_back(uf.find(m));
            });
        }
        merge_roots(roots, boundary_level);
    };

    for (std::size_t v : order) {
        if (!active[boundary_id] && b[v] >= boundary_level) activate_boundary();
        active[v] = 1;
        std::vector<std::size_t> roots;
        L.for_each_neighbor(v, [&](std::size_t m, double) {
            if (L.on_boundary(m)) {
                if (active[boundary_id]) roots.push_back(uf.find(boundary_id));
            } else if (active[m]) {
                roots.push_back(uf.find(m));
            }
        });
        if (roots.empty()) {
            comp[v] = Component{b[v], v};
            continue;
        }
        const std::size_t survivor = merge_roots(roots, b[v]);
        uf.attach(v, survivor);
    }
    if (!active[boundary_id]) activate_boundary();

    WellReport report;
    report.lattice = L;
    for (const Death& d : deaths) {
        const double depth = d.death - d.birth;
        if (!(depth > tol)) continue;
        Well w;
        w.min_node = d.min_node;
        w.x = L.x(d.min_node);
        w.y = L.y(d.min_node);
        w.min_value = d.birth;
        w.barrier_value = d.death;
        w.depth = depth;
        w.dies_into_boundary = d.into_boundary;
        w.region_mask = sublevel_component(L, b, d.min_node, d.death);
        w.basin_level = d.first_merge;
        w.basin_mask = sublevel_component(L, b, d.min_node, d.first_merge);
        report.wells.push_back(std::move(w));
    }
    std::stable_sort(report.wells.begin(), report.wells.end(),
                     [](const Well& u, const Well& v) { return u.depth > v.depth; });
    if (!report.wells.empty()) {
        report.deepest = 0;
        report.b0 = report.wells.front().depth;
    }
    return report;
}

WellReport detect_wells(const Potential1D& pot, std::optional<double> tol) {
    return detect_wells(Lattice::of(pot.grid()), pot.b(), tol.value_or(default_tolerance(pot)));
}

WellReport detect_wells(const Field2D& field, std::optional<double> tol) {
    return detect_wells(Lattice::of(field.grid()), field.b(), tol.value_or(default_tolerance(field)));
}

}  // namespace driftev
