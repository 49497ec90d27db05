#pragma once

#include "sfksd/types.hpp"

#include <string>

namespace sfksd {

enum class DomainKind { FullSpace, Box, UnitBall, SimplexChart };

/// Support of a target distribution. Points are always given in chart
/// coordinates; for the simplex with d parts that is the first d-1
/// barycentric coordinates, the last one being implied.
class DomainDescriptor {
public:
    static DomainDescriptor full_space(int dim);
    static DomainDescriptor box(Vector lower, Vector upper);
    static DomainDescriptor unit_ball(int dim, double radius = 1.0);
    static DomainDescriptor simplex_chart(int parts);

    DomainKind kind() const noexcept { return kind_; }
    int dim() const noexcept { return dim_; }
    bool compact() const noexcept { return kind_ != DomainKind::FullSpace; }

    const Vector &lower() const noexcept { return lower_; }
    const Vector &upper() const noexcept { return upper_; }
    double radius() const noexcept { return radius_; }
    int parts() const noexcept { return dim_ + 1; }

    /// Strict interior membership.
    bool contains(const Eigen::Ref<const Vector> &x) const;

    /// Euclidean distance to the boundary (infinity for full space). For the
    /// simplex chart this is the minimum barycentric coordinate.
    double boundary_distance(const Eigen::Ref<const Vector> &x) const;

    std::string describe() const;

    bool operator==(const DomainDescriptor &other) const;

private:
    DomainKind kind_ = DomainKind::FullSpace;
    int dim_ = 0;
    Vector lower_;
    Vector upper_;
    double radius_ = 0.0;
};

/// All d barycentric coordinates of a simplex chart point.
Vector barycentric(const Eigen::Ref<const Vector> &chart);

void require_interior(const DomainDescriptor &domain, const Eigen::Ref<const Vector> &x,
                      std::ptrdiff_t row = -1);

}  // namespace sfksd
