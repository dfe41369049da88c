#pragma once

#include <string>
#include <vector>

namespace torusric {

enum class Branch { Principal, Shifted };
enum class Side { Left, Right };

std::string to_string(Branch b);
Branch branch_from_string(const std::string& s);

struct MetricParams {
    double epsilon = 0.1;
    double delta = 0.15;
    double nu = 0.05;
    double Delta = 1.0;
    double k2 = 10.0;
    double k1 = 0.0;  // solved
    double x0 = 0.0;  // solved
    double mu1 = 0.2;
    double mu = 0.05;
    double r = 0.0;  // solved; 0 means not yet known
    Branch branch = Branch::Shifted;

    // Throws PreconditionError naming the violated inequality.
    void validate() const;
};

// Checks eps(pi-1) > delta > nu > 0.
void check_profile_params(double eps, double delta, double nu);

struct ProfileSample {
    double g = 0.0;
    double dg = 0.0;
    double ddg = 0.0;
};

// A warping profile for ds0^2 = dx^2 + G(x)^2 dy^2 on [domain_start, domain_end).
class SurfaceProfile {
public:
    virtual ~SurfaceProfile() = default;
    // At a breakpoint, `side` selects the one-sided value.
    virtual ProfileSample eval(double x, Side side = Side::Right) const = 0;
    virtual double domain_start() const = 0;
    virtual double domain_end() const = 0;
    // Points where G'' (and possibly G') jump.
    virtual std::vector<double> breakpoints() const = 0;
    // Points where quadrature panels and integrator steps should be split.
    virtual std::vector<double> features() const { return breakpoints(); }
    // G'(b+) - G'(b-) at breakpoint b.
    virtual double derivative_jump(double b) const;

    double gauss_curvature(double x, Side side = Side::Right) const;
    // Smallest distance between consecutive features (infinity with fewer than two).
    virtual double feature_gap() const;
    // Fixed-step count for a segment of length `len` starting at x: `base`, raised
    // so that steps stay below gap/8 when the segment can reach a feature.
    int substeps(double x, double len, int base) const;
    // Sum of derivative jumps at breakpoints strictly inside (a, b).
    double kink_sum(double a, double b) const;
    // Integral of K*G over [a, b] in x, including the distributional kink terms.
    virtual double strip_density(double a, double b) const;
};

class ProfileG final : public SurfaceProfile {
public:
    // Solves k1 and x0 for the given parameters and builds the profile.
    static ProfileG solve(MetricParams p, bool printed_amplitude = false);
    // Uses p.k1 and p.x0 as given.
    ProfileG(const MetricParams& p, bool printed_amplitude = false);

    ProfileSample eval(double x, Side side = Side::Right) const override;
    // Evaluation on [-delta - sigma, domain_end) continuing the first piece to
    // the left (the extension used for mollification).
    ProfileSample eval_extended(double x, Side side = Side::Right) const;
    double domain_start() const override { return -p_.delta; }
    double domain_end() const override;
    std::vector<double> breakpoints() const override { return {p_.epsilon, 2.0 * p_.epsilon}; }

    const MetricParams& params() const { return p_; }
    double c1() const { return c1_; }
    double c2() const { return c2_; }
    bool c1_continuous() const { return p_.branch == Branch::Principal; }
    bool printed_amplitude() const { return printed_; }

private:
    ProfileSample eval_piece(int piece, double x) const;
    MetricParams p_;
    double c1_ = 0.0;
    double c2_ = 0.0;
    bool printed_ = false;
};

double solve_k1(double eps, double delta, double nu);

struct X0Solution {
    double x0 = 0.0;
    bool c0_only = false;  // shifted branch: derivative kink at 2*eps
};

X0Solution solve_x0(double eps, double nu, double k2, Branch branch);

struct CurvatureValue {
    double K = 0.0;
    bool at_breakpoint = false;
};

CurvatureValue gauss_curvature(const SurfaceProfile& g, double x, Side side = Side::Right);

struct ContinuityReport {
    double value_jump_eps = 0.0;
    double deriv_jump_eps = 0.0;
    double value_jump_2eps = 0.0;
    double deriv_jump_2eps = 0.0;
    double kink = 0.0;                    // G'(2eps+) - G'(2eps-)
    double printed_value_jump_2eps = 0.0; // with the printed third-piece amplitude
    bool c1 = false;
};

ContinuityReport continuity_report(const ProfileG& g);

}  // namespace torusric
