#pragma once
// Fixed-dimension rtree behind a runtime-dimension interface.

#include <boost/geometry.hpp>
#include <boost/geometry/index/rtree.hpp>

#include <memory>
#include <stdexcept>
#include <vector>

namespace reachset::detail {

class NeighborIndex {
public:
    virtual ~NeighborIndex() = default;
    // Indices of points inside the axis-aligned box of half-width r around q.
    virtual void in_box(const double* q, double r, std::vector<size_t>& out) const = 0;
    virtual size_t nearest(const double* q) const = 0;
    virtual bool empty() const = 0;
};

template <int D>
class RtreeIndex final : public NeighborIndex {
    using Point = boost::geometry::model::point<double, D, boost::geometry::cs::cartesian>;
    using Box = boost::geometry::model::box<Point>;
    using Value = std::pair<Point, size_t>;
    using Tree = boost::geometry::index::rtree<Value, boost::geometry::index::rstar<16>>;

    static Point make(const double* x) {
        Point p;
        set<0>(p, x);
        return p;
    }
    template <int I>
    static void set(Point& p, const double* x) {
        if constexpr (I < D) {
            boost::geometry::set<I>(p, x[I]);
            set<I + 1>(p, x);
        }
    }
    static Point shifted(const double* x, double r) {
        std::vector<double> y(x, x + D);
        for (auto& v : y) v += r;
        return make(y.data());
    }

public:
    RtreeIndex(const std::vector<double>& data, size_t n) {
        std::vector<Value> v;
        v.reserve(n);
        for (size_t i = 0; i < n; ++i) v.emplace_back(make(data.data() + i * D), i);
        tree_ = Tree(v.begin(), v.end());
    }
    void in_box(const double* q, double r, std::vector<size_t>& out) const override {
        out.clear();
        const Box b(shifted(q, -r), shifted(q, r));
        std::vector<Value> hits;
        tree_.query(boost::geometry::index::intersects(b), std::back_inserter(hits));
        for (const auto& h : hits) out.push_back(h.second);
    }
    size_t nearest(const double* q) const override {
        std::vector<Value> hits;
        tree_.query(boost::geometry::index::nearest(make(q), 1), std::back_inserter(hits));
        if (hits.empty()) throw std::logic_error("nearest on an empty index");
        return hits.front().second;
    }
    bool empty() const override { return tree_.empty(); }

private:
    Tree tree_;
};

inline std::unique_ptr<NeighborIndex> make_index(int dim, const std::vector<double>& data) {
    const size_t n = data.size() / static_cast<size_t>(dim);
    switch (dim) {
        case 2: return std::make_unique<RtreeIndex<2>>(data, n);
        case 3: return std::make_unique<RtreeIndex<3>>(data, n);
        case 6: return std::make_unique<RtreeIndex<6>>(data, n);
        default: throw std::invalid_argument("unsupported index dimension");
    }
}

}  // namespace reachset::detail
