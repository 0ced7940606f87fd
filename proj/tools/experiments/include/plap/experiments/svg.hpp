#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace plap::experiments::svg {

struct Series {
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
  std::string label;
  double radius = 2.5;
  bool connect = false;  // polyline instead of dots
};

struct Axes {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::string description;  // goes into <desc>
};

/// Scatter or line plot. `diagonal` draws y = x across the shared range.
std::string plot(const Axes& axes, const std::vector<Series>& series, bool diagonal = false);

/// Row i of `values` is drawn at ys[i] (bottom to top). Non-finite cells are grey.
std::string heatmap(const Axes& axes, const Eigen::MatrixXd& values, double x_lo, double x_hi,
                    double y_lo, double y_hi,
                    const std::vector<std::pair<double, double>>& markers = {});

std::string histogram(const Axes& axes, const std::vector<double>& values, int bins = 30);

}  // namespace plap::experiments::svg
