#pragma once

#include <vector>

#include "cstrd/devernay.hpp"
#include "cstrd/geometry.hpp"
#include "cstrd/raster.hpp"

namespace cstrd {

// Angle in degrees between the pith->p direction and the gradient at p;
// negative when the gradient vanishes.
double ray_gradient_angle(Point p, double cy, double cx, const GradientField& grad);

// Drops points with angle >= alpha, splits curves there, keeps pieces with >= 2
// points and appends the border curve last.
std::vector<EdgeCurve> filter_edges(const std::vector<EdgeCurve>& curves, double cy, double cx,
                                    const GradientField& grad, double alpha_deg, const GrayImage& img);

// Disk outline from the 255-background mask.
EdgeCurve get_border_curve(const GrayImage& img, int id);

}  // namespace cstrd
