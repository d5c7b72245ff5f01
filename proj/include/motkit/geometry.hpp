#pragma once

#include <algorithm>
#include <cmath>
#include <utility>

#include "motkit/errors.hpp"

namespace motkit {

// Axis-aligned box in pixel units, top-left origin.
struct BoundingBox {
    double x_left = 0.0;
    double y_top = 0.0;
    double width = 0.0;
    double height = 0.0;

    double x_right() const { return x_left + width; }
    double y_bottom() const { return y_top + height; }
    double area() const { return width * height; }

    std::pair<double, double> center() const {
        return {x_left + width / 2.0, y_top + height / 2.0};
    }

    bool valid() const { return width > 0.0 && height > 0.0; }
};

inline double iou(const BoundingBox& a, const BoundingBox& b) {
    const double ix = std::max(0.0, std::min(a.x_right(), b.x_right()) -
                                        std::max(a.x_left, b.x_left));
    const double iy = std::max(0.0, std::min(a.y_bottom(), b.y_bottom()) -
                                        std::max(a.y_top, b.y_top));
    const double inter = ix * iy;
    if (inter <= 0.0) return 0.0;
    const double uni = a.area() + b.area() - inter;
    return inter / uni;
}

// Box center mapped into the unit square: x over image width, y over height.
inline std::pair<double, double> normalized_center(const BoundingBox& box,
                                                   double image_width,
                                                   double image_height) {
    if (image_width <= 0.0 || image_height <= 0.0) {
        throw ValidationError("normalized_center: image dimensions must be positive");
    }
    const auto [cx, cy] = box.center();
    return {cx / image_width, cy / image_height};
}

inline double center_distance_normalized(const BoundingBox& a, const BoundingBox& b,
                                         double image_width, double image_height) {
    const auto [ax, ay] = normalized_center(a, image_width, image_height);
    const auto [bx, by] = normalized_center(b, image_width, image_height);
    return std::hypot(ax - bx, ay - by);
}

} // namespace motkit
