#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace fpflux {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;

// Error taxonomy shared by every module. The CLI maps each kind to an exit code.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InputError : Error {
    using Error::Error;
};
struct ResourceError : Error {
    using Error::Error;
};
struct SingularityError : Error {
    using Error::Error;
};
struct UnsupportedError : Error {
    using Error::Error;
};
struct SubnormalizationError : Error {
    using Error::Error;
};
struct SolverError : Error {
    using Error::Error;
};
struct CertificateError : Error {
    using Error::Error;
};
struct SamplerError : Error {
    using Error::Error;
};
struct NumericError : Error {
    using Error::Error;
};
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace fpflux
