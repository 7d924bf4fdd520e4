#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace toricount {

enum class ModelFault {
    BadFile,
    NonUnimodularCone,
    IncompleteFan,
    NegativeWeight,
    BadDegrees,
    NoSolution,
    SingularSubmatrix,
    WeightMismatch,
};

const char* fault_name(ModelFault f);

class ModelError : public std::runtime_error {
public:
    ModelError(ModelFault fault, const std::string& what)
        : std::runtime_error(std::string(fault_name(fault)) + ": " + what), fault(fault) {}
    ModelFault fault;
};

class BudgetExceeded : public std::runtime_error {
public:
    explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

class OverflowError : public std::runtime_error {
public:
    explicit OverflowError(const std::string& what) : std::runtime_error(what) {}
};

// Exponent vector over the rays: the monomial x^D = prod x_i^{expo[i]}.
using Expo = std::vector<int>;

struct QTerm {
    long long coeff;
    Expo expo;
};

// Model file contents, indices still 1-based as written by the user.
struct RawModel {
    std::string name;
    int n = 0;
    int r = 0;
    std::vector<std::vector<long long>> rays;
    std::vector<std::vector<int>> max_cones;     // 1-based ray indices
    std::vector<int> degrees;
    std::vector<QTerm> polynomial;               // validated separately (qform)
    std::optional<int> basis_cone;               // 1-based index into max_cones
};

// Validated toric datum plus everything derived from it. Immutable after
// construction; all member queries are const and safe to share across threads.
class ToricModel {
public:
    static ToricModel validate(const RawModel& raw);

    std::string name;
    int n = 0;
    int r = 0;
    std::vector<std::vector<long long>> rays;    // n+r rays, each an n-vector
    std::vector<std::vector<int>> cones;         // 0-based, sorted ray indices
    std::vector<int> degrees;                    // d_j
    std::vector<std::vector<int>> weight;        // a_{i,j}: (n+r) x r
    std::vector<int> anticanonical;              // n_j = 1 + sum_{i in basis} a_{i,j}
    int basis_cone = -1;                         // index into cones
    std::vector<int> pic_rays;                   // the r rays carrying the Picard basis classes

    int num_rays() const { return n + r; }
    int num_cones() const { return int(cones.size()); }
    bool ray_in_cone(int cone, int ray) const;

    // the r rays off cone sigma, sorted
    const std::vector<int>& off_rays(int cone) const { return off_[cone]; }
    // inverse of the r x r weight submatrix on the off rays; E(n+j) = sum_k beta[j][k] D_{off[k]}
    const std::vector<std::vector<int>>& cone_beta(int cone) const { return beta_[cone]; }

    // exponent vector of D(sigma): class sum_j (n_j-d_j)[D_{pic_j}], supported off sigma
    const Expo& divisor_D_sigma(int cone) const { return dsig_[cone]; }
    // exponent vector of E(i) relative to sigma: class [D_i], supported off sigma
    Expo divisor_E(int cone, int ray) const;

    // all inclusion-minimal ray sets not contained in any single maximal cone
    std::vector<std::vector<int>> minimal_uncovered_sets() const;

private:
    std::vector<std::vector<int>> off_;
    std::vector<std::vector<std::vector<int>>> beta_;
    std::vector<Expo> dsig_;
};

}  // namespace toricount
