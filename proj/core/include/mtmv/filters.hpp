#pragma once

#include "mtmv/types.hpp"

// 3x3 image filters used to derive the synthetic views. All filters pad the
// image border by replicating the nearest edge pixel, so output size equals
// input size.
namespace mtmv::filters {

// All-ones kernel scaled to sum 1 (box blur).
Matrix averaging3();

// Gaussian kernel exp(-(dx^2+dy^2)/(2 sigma^2)) on the 3x3 grid, scaled to
// sum 1.
Matrix gaussian3(double sigma = 0.5);

// Discrete Laplacian with corner weight alpha, matching the classic
// 4/(alpha+1) * [[alpha/4, (1-alpha)/4, alpha/4], ...] construction.
Matrix laplacian3(double alpha = 0.2);

// Horizontal edge detector: rows [1 1 1; 0 0 0; -1 -1 -1].
Matrix prewitt_horizontal3();

// Sliding 3x3 dot product of kernel with image (replicate border).
Matrix convolve3_replicate(const Matrix& image, const Matrix& kernel);

// Nonlinear filter: each output pixel is the max of its 3x3 neighborhood.
Matrix max3_replicate(const Matrix& image);

} // namespace mtmv::filters
