#include "dcurv/point_cloud.hpp"

#include "dcurv/error.hpp"

#include <unordered_set>

namespace dcurv {

PointCloud::PointCloud(Matrix points, std::vector<std::string> ids)
    : points_(std::move(points)), ids_(std::move(ids)) {
    require(points_.rows() >= 2, ErrorKind::InvalidInput, "point cloud needs at least 2 points");
    require(points_.cols() >= 1, ErrorKind::InvalidInput, "point cloud needs ambient dimension >= 1");
    require(points_.allFinite(), ErrorKind::InvalidInput, "point cloud has non-finite coordinates");
    if (!ids_.empty()) {
        require(ids_.size() == size(), ErrorKind::InvalidInput, "id count does not match point count");
        std::unordered_set<std::string> seen(ids_.begin(), ids_.end());
        require(seen.size() == ids_.size(), ErrorKind::InvalidInput, "point ids are not unique");
    }
}

std::string PointCloud::label(Index i) const {
    return ids_.empty() ? std::to_string(i) : ids_.at(i);
}

}  // namespace dcurv
