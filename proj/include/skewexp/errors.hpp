#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace skewexp {

/// Base class for every error thrown by this library.
class error : public std::runtime_error {
public:
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Bad input: dimension mismatch, invalid index, non-finite data, failed
/// orthogonality validation, precondition violations.
class domain_error : public error {
public:
    explicit domain_error(const std::string& msg) : error(msg) {}
};

class bounds_error : public domain_error {
public:
    explicit bounds_error(const std::string& msg) : domain_error(msg) {}
};

/// cotc evaluated within pole_tol of a nonzero multiple of pi.
class pole_error : public domain_error {
public:
    explicit pole_error(const std::string& msg) : domain_error(msg) {}
};

/// A kernel pair (a,b), (c,d) or (r,s) vanished; names the pair.
class singular_kernel_error : public domain_error {
public:
    explicit singular_kernel_error(const std::string& msg) : domain_error(msg) {}
};

/// One violated angle condition theta_i +- theta_j = 2*l*pi (or theta_j = 2*l*pi
/// for odd n, reported with i == j).
struct angle_violation {
    enum class kind { sum, diff, star };
    kind which;
    std::size_t i; ///< 1-based block indices
    std::size_t j;
    long l;        ///< the nonzero integer of the violated condition
};

std::string describe(const angle_violation& v);

/// dexp/core map not invertible at the given angles; carries every violation.
class not_invertible_error : public domain_error {
public:
    not_invertible_error(const std::string& msg, std::vector<angle_violation> violations)
        : domain_error(msg), violations_(std::move(violations)) {}
    const std::vector<angle_violation>& violations() const noexcept { return violations_; }

private:
    std::vector<angle_violation> violations_;
};

/// log_so asked for an angle within the rejection margin of +-pi.
class principal_branch_error : public domain_error {
public:
    explicit principal_branch_error(const std::string& msg) : domain_error(msg) {}
};

/// Iterative method exceeded its budget (QR sweeps, Newton iterations, tracking dt underflow).
class convergence_error : public error {
public:
    explicit convergence_error(const std::string& msg) : error(msg) {}
};

/// Newton residual rotation reached the principal branch cut: the requested
/// step was too large for the local inverse.
class step_too_large_error : public convergence_error {
public:
    explicit step_too_large_error(const std::string& msg) : convergence_error(msg) {}
};

/// An iterate left the bijectivity ball B_pi(A0).
class out_of_domain_error : public domain_error {
public:
    explicit out_of_domain_error(const std::string& msg) : domain_error(msg) {}
};

class io_error : public error {
public:
    explicit io_error(const std::string& msg) : error(msg) {}
};

inline std::string describe(const angle_violation& v) {
    std::string s;
    switch (v.which) {
        case angle_violation::kind::sum:
            s = "theta_" + std::to_string(v.i) + " + theta_" + std::to_string(v.j);
            break;
        case angle_violation::kind::diff:
            s = "theta_" + std::to_string(v.i) + " - theta_" + std::to_string(v.j);
            break;
        case angle_violation::kind::star:
            s = "theta_" + std::to_string(v.j);
            break;
    }
    return s + " = 2*pi*" + std::to_string(v.l);
}

} // namespace skewexp
