#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace capserv::oracles {

namespace {

// Any two non-parallel vectors give a usable in-plane basis.
void plane_basis(const Vec3& axis, Vec3& u, Vec3& v) {
  const Vec3 seed = std::abs(axis.z()) < 0.9 ? Vec3::UnitZ() : Vec3::UnitX();
  u = axis.cross(seed).normalized();
  v = axis.cross(u).normalized();
}

}  // namespace

SurfaceSamples sample_limb_surface(const std::vector<LimbSegment>& segments,
                                   std::size_t target_points) {
  double area = 0.0;
  for (const auto& seg : segments) {
    const double r_mean = 0.5 * (seg.radius_base + seg.radius_tip);
    area += 2.0 * M_PI * r_mean * seg.length;
    area += M_PI * (seg.radius_base * seg.radius_base + seg.radius_tip * seg.radius_tip);
  }
  const double spacing = std::sqrt(area / static_cast<double>(target_points));
  const double axial = spacing / std::sqrt(2.0);
  const double azimuthal = spacing * std::sqrt(2.0);

  SurfaceSamples out;
  out.spacing = spacing;
  out.axial_spacing = axial;
  out.points.reserve(target_points + target_points / 4);
  out.segment.reserve(out.points.capacity());

  for (int si = 0; si < static_cast<int>(segments.size()); ++si) {
    const auto& seg = segments[si];
    Vec3 u, v;
    plane_basis(seg.axis, u, v);

    const int n_s = std::max(2, static_cast<int>(std::ceil(seg.length / axial)));
    for (int i = 0; i <= n_s; ++i) {
      const double s = seg.length * i / n_s;
      const double r = seg.radius_at(s);
      const int n_phi = std::max(8, static_cast<int>(std::ceil(2.0 * M_PI * r / azimuthal)));
      const Vec3 center = seg.base + s * seg.axis;
      for (int k = 0; k < n_phi; ++k) {
        const double phi = 2.0 * M_PI * k / n_phi;
        out.points.push_back(center + r * (std::cos(phi) * u + std::sin(phi) * v));
        out.segment.push_back(si);
      }
    }

    // End-cap disks.
    for (int cap = 0; cap < 2; ++cap) {
      const double s = cap == 0 ? 0.0 : seg.length;
      const double r_cap = cap == 0 ? seg.radius_base : seg.radius_tip;
      const Vec3 center = seg.base + s * seg.axis;
      const int n_r = std::max(1, static_cast<int>(std::ceil(r_cap / spacing)));
      for (int i = 1; i <= n_r; ++i) {
        const double r = r_cap * i / n_r;
        const int n_phi = std::max(6, static_cast<int>(std::ceil(2.0 * M_PI * r / spacing)));
        for (int k = 0; k < n_phi; ++k) {
          const double phi = 2.0 * M_PI * k / n_phi;
          out.points.push_back(center + r * (std::cos(phi) * u + std::sin(phi) * v));
          out.segment.push_back(si);
        }
      }
      out.points.push_back(center);
      out.segment.push_back(si);
    }
  }
  return out;
}

std::optional<Vec3> k_star_by_sampling(const std::vector<LimbSegment>& segments,
                                       const SurfaceSamples& samples, const Vec3& query) {
  // Nearest segment by clamped point-to-axis distance.
  int nearest = 0;
  double best = std::numeric_limits<double>::infinity();
  for (int si = 0; si < static_cast<int>(segments.size()); ++si) {
    const auto& seg = segments[si];
    const double s = std::clamp((query - seg.base).dot(seg.axis), 0.0, seg.length);
    const double d = (query - (seg.base + s * seg.axis)).norm();
    if (d <= best) {
      best = d;
      nearest = si;
    }
  }

  const auto& seg = segments[nearest];
  const double s0 = std::clamp((query - seg.base).dot(seg.axis), 0.0, seg.length);
  const Vec3 k0 = seg.base + s0 * seg.axis;

  const double band = 1.05 * samples.axial_spacing;
  std::optional<Vec3> top;
  for (std::size_t i = 0; i < samples.points.size(); ++i) {
    if (samples.segment[i] != nearest) continue;
    const Vec3& k = samples.points[i];
    if (std::abs(seg.axis.dot(k - k0)) > band) continue;
    if (!top || k.z() > top->z()) top = k;
  }
  return top;
}

double clearance_by_sampling(const std::vector<LimbSegment>& segments,
                             const SurfaceSamples& samples, const Vec3& query) {
  double d2 = std::numeric_limits<double>::infinity();
  for (const auto& p : samples.points) d2 = std::min(d2, (query - p).squaredNorm());
  const double dist = std::sqrt(d2);

  bool inside = false;
  for (const auto& seg : segments) {
    const double s = (query - seg.base).dot(seg.axis);
    if (s < 0.0 || s > seg.length) continue;
    const double rho = (query - (seg.base + s * seg.axis)).norm();
    if (rho <= seg.radius_at(s)) inside = true;
  }
  return inside ? -dist : dist;
}

}  // namespace capserv::oracles
