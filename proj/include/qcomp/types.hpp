#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qcomp {

using cdouble = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

// Users are addressed by (cell, user-in-cell); flat index k = cell * n_users + user.
struct UserIndex {
    std::size_t cell = 0;
    std::size_t user = 0;
};

inline std::size_t flat_index(UserIndex id, std::size_t n_users) { return id.cell * n_users + id.user; }

inline UserIndex user_of(std::size_t k, std::size_t n_users) { return {k / n_users, k % n_users}; }

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class NumericalError : public Error {
public:
    using Error::Error;
};

// Raised when a fixed-point power iterate blows past the configured cap:
// the requested SINR targets cannot be met simultaneously.
class InfeasibleTargetError : public Error {
public:
    InfeasibleTargetError(const std::string& what, RVec last_lambda)
        : Error(what), lambda(std::move(last_lambda)) {}
    RVec lambda;
};

class NegativePowerError : public Error {
public:
    NegativePowerError(const std::string& what, RVec tau_values)
        : Error(what), tau(std::move(tau_values)) {}
    RVec tau;
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

}  // namespace qcomp
