#pragma once

#include "dcurv/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dcurv {

/// N points in R^n, stored one point per row. Immutable once constructed.
class PointCloud {
public:
    /// Validates N >= 2, n >= 1, finite coordinates and unique ids (when given).
    explicit PointCloud(Matrix points, std::vector<std::string> ids = {});

    const Matrix& points() const noexcept { return points_; }
    Index size() const noexcept { return static_cast<Index>(points_.rows()); }
    Index dim() const noexcept { return static_cast<Index>(points_.cols()); }

    bool has_ids() const noexcept { return !ids_.empty(); }
    const std::vector<std::string>& ids() const noexcept { return ids_; }

    /// Label of point i: its id when present, otherwise the decimal index.
    std::string label(Index i) const;

private:
    Matrix points_;
    std::vector<std::string> ids_;
};

}  // namespace dcurv
