#include "sdm/parametrization.hpp"

#include "sdm/errors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace sdm {

namespace {

constexpr double kMaxDerivative = 1e12;
constexpr double kMaxCondition = 1e12;

[[noreturn]] void outside(const Link& l, double f) {
    std::ostringstream os;
    os << "link argument " << f << " outside its domain";
    if (l.kind == Link::Kind::Log) {
        os << " (" << l.lower << ", inf)";
    } else if (l.kind == Link::Kind::Logit) {
        os << " (" << l.lower << ", " << l.upper << ")";
    }
    throw DomainError(os.str());
}

bool is_diagonal(const Mat& m) {
    for (int i = 0; i < m.rows(); ++i) {
        for (int j = 0; j < m.cols(); ++j) {
            if (i != j && m(i, j) != 0.0) {
                return false;
            }
        }
    }
    return true;
}

}  // namespace

Link Link::logit(double a, double b) {
    if (!(a < b)) {
        throw InvalidModel("logit link requires a < b");
    }
    return {Kind::Logit, a, b};
}

bool Link::in_domain(double f) const noexcept {
    if (!std::isfinite(f)) {
        return false;
    }
    switch (kind) {
        case Kind::Identity: return true;
        case Kind::Log: return f > lower;
        case Kind::Logit: return f > lower && f < upper;
    }
    return false;
}

double Link::apply(double f) const {
    if (!in_domain(f)) {
        outside(*this, f);
    }
    switch (kind) {
        case Kind::Identity: return f;
        case Kind::Log: return std::log(f - lower);
        case Kind::Logit: return std::log((f - lower) / (upper - f));
    }
    return f;
}

double Link::inverse(double f_tilde) const noexcept {
    switch (kind) {
        case Kind::Identity: return f_tilde;
        case Kind::Log: return lower + std::exp(f_tilde);
        case Kind::Logit: return lower + (upper - lower) / (1.0 + std::exp(-f_tilde));
    }
    return f_tilde;
}

double Link::derivative(double f) const {
    if (!in_domain(f)) {
        outside(*this, f);
    }
    switch (kind) {
        case Kind::Identity: return 1.0;
        case Kind::Log: return 1.0 / (f - lower);
        case Kind::Logit: return (upper - lower) / ((f - lower) * (upper - f));
    }
    return 1.0;
}

void check_links(const DistributionSpec& dist, const LinkSet& links) {
    if (static_cast<int>(links.size()) != dist.num_params) {
        throw InvalidModel(std::string(dist.name) + ": expected " +
                           std::to_string(dist.num_params) + " links, got " +
                           std::to_string(links.size()));
    }
}

Vec link(const LinkSet& links, const Vec& f) {
    Vec out(f.size());
    for (int i = 0; i < f.size(); ++i) {
        out(i) = links[static_cast<std::size_t>(i)].apply(f(i));
    }
    return out;
}

Vec unlink(const LinkSet& links, const Vec& f_tilde) {
    Vec out(f_tilde.size());
    for (int i = 0; i < f_tilde.size(); ++i) {
        out(i) = links[static_cast<std::size_t>(i)].inverse(f_tilde(i));
    }
    return out;
}

Vec jacobian_link(const LinkSet& links, const Vec& f) {
    Vec out(f.size());
    for (int i = 0; i < f.size(); ++i) {
        out(i) = links[static_cast<std::size_t>(i)].derivative(f(i));
    }
    return out;
}

Mat inverse_information_factor(const DistributionSpec& dist, const Vec& f) {
    const Mat info = fisher_information(dist, f);
    const int k = static_cast<int>(info.rows());
    if (is_diagonal(info)) {
        const auto d = info.diagonal();
        const double lo = d.minCoeff();
        const double hi = d.maxCoeff();
        if (!(lo > 0.0) || !(hi / lo <= kMaxCondition)) {
            throw SingularInformation(std::string(dist.name) + ": Fisher information is singular");
        }
        Mat j = Mat::Zero(k, k);
        for (int i = 0; i < k; ++i) {
            j(i, i) = 1.0 / std::sqrt(d(i));
        }
        return j;
    }
    Eigen::SelfAdjointEigenSolver<Mat> eig(info, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (eig.info() != Eigen::Success || !(lo > 0.0) || !(hi / lo <= kMaxCondition)) {
        throw SingularInformation(std::string(dist.name) + ": Fisher information is singular");
    }
    const Mat inv = info.ldlt().solve(Mat::Identity(k, k));
    Eigen::LLT<Mat> llt(0.5 * (inv + inv.transpose()));
    if (llt.info() != Eigen::Success) {
        throw SingularInformation(std::string(dist.name) +
                                  ": inverse Fisher information is not positive definite");
    }
    return llt.matrixL();
}

Vec scaled_score(const DistributionSpec& dist, const LinkSet& links, const Vec& f, double y,
                 Scaling d) {
    if (!dist.supports(d)) {
        throw UnsupportedScaling(std::string(dist.name) + " does not support scaling d = " +
                                 std::to_string(scaling_exponent(d)));
    }
    const Vec hdot = jacobian_link(links, f);
    for (int i = 0; i < hdot.size(); ++i) {
        if (!(std::abs(hdot(i)) <= kMaxDerivative)) {
            throw FilterDivergence("link derivative overflow: parameter pinned to its boundary");
        }
    }
    const Vec grad = score(dist, f, y);
    switch (d) {
        case Scaling::Identity: return grad.cwiseQuotient(hdot);
        case Scaling::InverseSquareRoot: return inverse_information_factor(dist, f) * grad;
        case Scaling::Inverse: {
            const Mat j = inverse_information_factor(dist, f);
            const Vec natural = j * (j.transpose() * grad);
            return hdot.cwiseProduct(natural);
        }
    }
    return grad;
}

}  // namespace sdm
