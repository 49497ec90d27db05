#include "sfksd/domain.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace sfksd {

DomainDescriptor DomainDescriptor::full_space(int dim) {
    if (dim < 1) throw ConstructionError("full-space domain needs dim >= 1");
    DomainDescriptor d;
    d.kind_ = DomainKind::FullSpace;
    d.dim_ = dim;
    return d;
}

DomainDescriptor DomainDescriptor::box(Vector lower, Vector upper) {
    if (lower.size() == 0 || lower.size() != upper.size())
        throw ConstructionError("box bounds must be non-empty and of equal length");
    for (Eigen::Index i = 0; i < lower.size(); ++i)
        if (!(lower[i] < upper[i]))
            throw ConstructionError("box requires lower[i] < upper[i] for every i");
    DomainDescriptor d;
    d.kind_ = DomainKind::Box;
    d.dim_ = static_cast<int>(lower.size());
    d.lower_ = std::move(lower);
    d.upper_ = std::move(upper);
    return d;
}

DomainDescriptor DomainDescriptor::unit_ball(int dim, double radius) {
    if (dim < 1) throw ConstructionError("ball domain needs dim >= 1");
    if (!(radius > 0.0)) throw ConstructionError("ball radius must be positive");
    DomainDescriptor d;
    d.kind_ = DomainKind::UnitBall;
    d.dim_ = dim;
    d.radius_ = radius;
    return d;
}

DomainDescriptor DomainDescriptor::simplex_chart(int parts) {
    if (parts < 2) throw ConstructionError("simplex needs at least 2 parts");
    DomainDescriptor d;
    d.kind_ = DomainKind::SimplexChart;
    d.dim_ = parts - 1;
    return d;
}

bool DomainDescriptor::contains(const Eigen::Ref<const Vector> &x) const {
    if (x.size() != dim_) return false;
    if (!x.allFinite()) return false;
    switch (kind_) {
    case DomainKind::FullSpace:
        return true;
    case DomainKind::Box:
        return (x.array() > lower_.array()).all() && (x.array() < upper_.array()).all();
    case DomainKind::UnitBall:
        return x.squaredNorm() < radius_ * radius_;
    case DomainKind::SimplexChart:
        return (x.array() > 0.0).all() && x.sum() < 1.0;
    }
    return false;
}

double DomainDescriptor::boundary_distance(const Eigen::Ref<const Vector> &x) const {
    switch (kind_) {
    case DomainKind::FullSpace:
        return std::numeric_limits<double>::infinity();
    case DomainKind::Box:
        return std::min((x - lower_).minCoeff(), (upper_ - x).minCoeff());
    case DomainKind::UnitBall:
        return radius_ - x.norm();
    case DomainKind::SimplexChart:
        return std::min(x.minCoeff(), 1.0 - x.sum());
    }
    return 0.0;
}

std::string DomainDescriptor::describe() const {
    std::ostringstream os;
    switch (kind_) {
    case DomainKind::FullSpace:
        os << "full-space(" << dim_ << ")";
        break;
    case DomainKind::Box:
        os << "box(" << dim_ << ")";
        break;
    case DomainKind::UnitBall:
        os << "ball(dim=" << dim_ << ", radius=" << radius_ << ")";
        break;
    case DomainKind::SimplexChart:
        os << "simplex(parts=" << parts() << ")";
        break;
    }
    return os.str();
}

bool DomainDescriptor::operator==(const DomainDescriptor &o) const {
    if (kind_ != o.kind_ || dim_ != o.dim_) return false;
    if (kind_ == DomainKind::Box) return lower_ == o.lower_ && upper_ == o.upper_;
    if (kind_ == DomainKind::UnitBall) return radius_ == o.radius_;
    return true;
}

Vector barycentric(const Eigen::Ref<const Vector> &chart) {
    Vector full(chart.size() + 1);
    full.head(chart.size()) = chart;
    full[chart.size()] = 1.0 - chart.sum();
    return full;
}

void require_interior(const DomainDescriptor &domain, const Eigen::Ref<const Vector> &x,
                      std::ptrdiff_t row) {
    if (!domain.contains(x))
        throw DomainError("point is not strictly inside " + domain.describe(), row);
}

}  // namespace sfksd
