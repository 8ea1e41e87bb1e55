#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace hvroc {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using MatSeq = std::vector<Mat>;
using VecSeq = std::vector<Vec>;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidTask : public Error {
public:
    using Error::Error;
};

class InvalidCost : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

// Raised when a matrix that must be inverted is not positive definite.
class SolverDegenerate : public Error {
public:
    SolverDegenerate(const std::string& what, int step)
        : Error(what + " (time step " + std::to_string(step) + ")"), step_(step) {}
    int step() const { return step_; }

private:
    int step_;
};

class OptimizationFailed : public Error {
public:
    using Error::Error;
};

inline Mat symmetrize(const Mat& m) { return 0.5 * (m + m.transpose()); }

// Smallest eigenvalue of the symmetric part.
double min_eigenvalue(const Mat& m);

} // namespace hvroc
