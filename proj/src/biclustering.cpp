#include "clusterlab/biclustering.hpp"

#include <stdexcept>
#include <string>

namespace clusterlab {

BiClustering::BiClustering(int k_, std::vector<int> rows, std::vector<int> cols)
    : k(k_), row_assign(std::move(rows)), col_assign(std::move(cols)) {
    validate();
}

void BiClustering::validate() const {
    if (k < 1) throw std::domain_error("BiClustering: k must be at least 1");
    if (row_assign.empty() || col_assign.empty()) {
        throw std::domain_error("BiClustering: empty assignment vector");
    }
    auto check = [this](const std::vector<int>& ids, const char* side) {
        std::vector<bool> seen(static_cast<std::size_t>(k), false);
        for (std::size_t i = 0; i < ids.size(); ++i) {
            if (ids[i] < 0 || ids[i] >= k) {
                throw std::domain_error("BiClustering: " + std::string(side) + " id " +
                                        std::to_string(ids[i]) + " at position " +
                                        std::to_string(i) + " out of range [0, " +
                                        std::to_string(k) + ")");
            }
            seen[static_cast<std::size_t>(ids[i])] = true;
        }
        for (int c = 0; c < k; ++c) {
            if (!seen[static_cast<std::size_t>(c)]) {
                throw std::domain_error("BiClustering: cluster " + std::to_string(c) +
                                        " has no " + std::string(side) + " members");
            }
        }
    };
    check(row_assign, "row");
    check(col_assign, "col");
}

bool equivalent_clusterings(const BiClustering& a, const BiClustering& b) {
    if (a.row_assign.size() != b.row_assign.size()) return false;
    if (a.col_assign.size() != b.col_assign.size()) return false;
    const int cap = std::max(a.k, b.k);
    std::vector<int> fwd(static_cast<std::size_t>(cap), -1);
    std::vector<int> rev(static_cast<std::size_t>(cap), -1);
    auto walk = [&](const std::vector<int>& xs, const std::vector<int>& ys) {
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const int x = xs[i];
            const int y = ys[i];
            if (fwd[x] == -1 && rev[y] == -1) {
                fwd[x] = y;
                rev[y] = x;
            } else if (fwd[x] != y || rev[y] != x) {
                return false;
            }
        }
        return true;
    };
    return walk(a.row_assign, b.row_assign) && walk(a.col_assign, b.col_assign);
}

}  // namespace clusterlab
