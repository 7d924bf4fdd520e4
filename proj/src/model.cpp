#include "toricount/model.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "toricount/rational.hpp"

namespace toricount {

const char* fault_name(ModelFault f) {
    switch (f) {
        case ModelFault::BadFile: return "BadFile";
        case ModelFault::NonUnimodularCone: return "NonUnimodularCone";
        case ModelFault::IncompleteFan: return "IncompleteFan";
        case ModelFault::NegativeWeight: return "NegativeWeight";
        case ModelFault::BadDegrees: return "BadDegrees";
        case ModelFault::NoSolution: return "NoSolution";
        case ModelFault::SingularSubmatrix: return "SingularSubmatrix";
        case ModelFault::WeightMismatch: return "WeightMismatch";
    }
    return "ModelError";
}

namespace {

__int128 det_bareiss(std::vector<std::vector<__int128>> m) {
    const int k = int(m.size());
    __int128 prev = 1;
    int sign = 1;
    for (int col = 0; col < k - 1; ++col) {
        if (m[col][col] == 0) {
            int piv = -1;
            for (int row = col + 1; row < k; ++row)
                if (m[row][col] != 0) { piv = row; break; }
            if (piv < 0) return 0;
            std::swap(m[col], m[piv]);
            sign = -sign;
        }
        for (int row = col + 1; row < k; ++row) {
            for (int j = col + 1; j < k; ++j)
                m[row][j] = (m[row][j] * m[col][col] - m[row][col] * m[col][j]) / prev;
            m[row][col] = 0;
        }
        prev = m[col][col];
    }
    return sign * m[k - 1][k - 1];
}

// Solve A x = b exactly; returns empty if singular.
std::vector<Rat> solve_exact(std::vector<std::vector<Rat>> a, std::vector<Rat> b) {
    const int k = int(a.size());
    for (int col = 0; col < k; ++col) {
        int piv = -1;
        for (int row = col; row < k; ++row)
            if (a[row][col] != Rat(0)) { piv = row; break; }
        if (piv < 0) return {};
        std::swap(a[col], a[piv]);
        std::swap(b[col], b[piv]);
        Rat p = a[col][col];
        for (int j = col; j < k; ++j) a[col][j] = a[col][j] / p;
        b[col] = b[col] / p;
        for (int row = 0; row < k; ++row) {
            if (row == col || a[row][col] == Rat(0)) continue;
            Rat f = a[row][col];
            for (int j = col; j < k; ++j) a[row][j] = a[row][j] - f * a[col][j];
            b[row] = b[row] - f * b[col];
        }
    }
    return b;
}

}  // namespace

bool ToricModel::ray_in_cone(int cone, int ray) const {
    const auto& c = cones[cone];
    return std::binary_search(c.begin(), c.end(), ray);
}

ToricModel ToricModel::validate(const RawModel& raw) {
    ToricModel m;
    m.name = raw.name;
    m.n = raw.n;
    m.r = raw.r;
    if (m.n < 1 || m.r < 1)
        throw ModelError(ModelFault::BadFile, "n and r must be positive");
    const int nr = m.n + m.r;
    if (int(raw.rays.size()) != nr)
        throw ModelError(ModelFault::BadFile, "expected n+r rays");
    for (const auto& v : raw.rays)
        if (int(v.size()) != m.n)
            throw ModelError(ModelFault::BadFile, "each ray must have n coordinates");
    m.rays = raw.rays;
    if (int(raw.degrees.size()) != m.r)
        throw ModelError(ModelFault::BadFile, "expected r degrees");
    m.degrees = raw.degrees;

    if (raw.max_cones.empty())
        throw ModelError(ModelFault::BadFile, "no maximal cones");
    for (const auto& c : raw.max_cones) {
        if (int(c.size()) != m.n)
            throw ModelError(ModelFault::BadFile, "each maximal cone must list n rays");
        std::vector<int> z;
        for (int i : c) {
            if (i < 1 || i > nr)
                throw ModelError(ModelFault::BadFile, "cone ray index out of range");
            z.push_back(i - 1);
        }
        std::sort(z.begin(), z.end());
        if (std::adjacent_find(z.begin(), z.end()) != z.end())
            throw ModelError(ModelFault::BadFile, "repeated ray in cone");
        m.cones.push_back(std::move(z));
    }

    // regularity: each maximal cone's ray matrix is unimodular
    for (int c = 0; c < m.num_cones(); ++c) {
        std::vector<std::vector<__int128>> mat(m.n, std::vector<__int128>(m.n));
        for (int k = 0; k < m.n; ++k)
            for (int t = 0; t < m.n; ++t) mat[t][k] = m.rays[m.cones[c][k]][t];
        __int128 d = det_bareiss(mat);
        if (d != 1 && d != -1)
            throw ModelError(ModelFault::NonUnimodularCone,
                             "cone " + std::to_string(c + 1) + " has determinant " + Rat::int128_str(d));
    }

    // combinatorial completeness: every facet of a maximal cone lies in exactly two of them
    {
        std::map<std::vector<int>, int> facet_count;
        for (const auto& c : m.cones) {
            for (int drop = 0; drop < m.n; ++drop) {
                std::vector<int> f;
                for (int k = 0; k < m.n; ++k)
                    if (k != drop) f.push_back(c[k]);
                ++facet_count[f];
            }
        }
        for (const auto& [f, cnt] : facet_count)
            if (cnt != 2)
                throw ModelError(ModelFault::IncompleteFan,
                                 "a facet is shared by " + std::to_string(cnt) + " maximal cones");
    }

    // distinguished basis cone: the cone on rays {1..n} unless the user marked one
    {
        std::vector<int> first_n(m.n);
        for (int i = 0; i < m.n; ++i) first_n[i] = i;
        int found = -1;
        if (raw.basis_cone) {
            int bc = *raw.basis_cone - 1;
            if (bc < 0 || bc >= m.num_cones())
                throw ModelError(ModelFault::BadFile, "basis_cone index out of range");
            found = bc;
        } else {
            for (int c = 0; c < m.num_cones(); ++c)
                if (m.cones[c] == first_n) { found = c; break; }
            if (found < 0)
                throw ModelError(ModelFault::BadFile,
                                 "rays 1..n do not span a maximal cone; mark basis_cone in the model file");
        }
        m.basis_cone = found;
    }
    const auto& basis = m.cones[m.basis_cone];
    for (int i = 0; i < nr; ++i)
        if (!std::binary_search(basis.begin(), basis.end(), i)) m.pic_rays.push_back(i);

    // weight matrix: v_{pic_j} = -sum_{i in basis} a_{i,j} v_i, nonnegative integers
    m.weight.assign(nr, std::vector<int>(m.r, 0));
    for (int j = 0; j < m.r; ++j) {
        std::vector<std::vector<Rat>> A(m.n, std::vector<Rat>(m.n));
        std::vector<Rat> b(m.n);
        for (int t = 0; t < m.n; ++t) {
            for (int k = 0; k < m.n; ++k) A[t][k] = Rat(m.rays[basis[k]][t]);
            b[t] = Rat(-m.rays[m.pic_rays[j]][t]);
        }
        auto sol = solve_exact(A, b);
        if (sol.empty())
            throw ModelError(ModelFault::NonUnimodularCone, "basis cone rays are degenerate");
        for (int k = 0; k < m.n; ++k) {
            if (sol[k].den() != 1)
                throw ModelError(ModelFault::NegativeWeight,
                                 "non-integer weight for ray " + std::to_string(m.pic_rays[j] + 1));
            if (sol[k].num() < 0)
                throw ModelError(ModelFault::NegativeWeight,
                                 "negative weight a[" + std::to_string(basis[k] + 1) + "][" +
                                     std::to_string(j + 1) + "]");
            m.weight[basis[k]][j] = int((long long)sol[k].num());
        }
        m.weight[m.pic_rays[j]][j] = 1;
    }

    m.anticanonical.assign(m.r, 0);
    for (int j = 0; j < m.r; ++j) {
        int s = 1;
        for (int i : basis) s += m.weight[i][j];
        m.anticanonical[j] = s;
        if (s - m.degrees[j] < 1)
            throw ModelError(ModelFault::BadDegrees,
                             "n_j - d_j = " + std::to_string(s - m.degrees[j]) +
                                 " for j = " + std::to_string(j + 1) + " (need >= 1)");
    }

    // per-cone inverse weight submatrices and D(sigma)
    m.off_.resize(m.num_cones());
    m.beta_.resize(m.num_cones());
    m.dsig_.resize(m.num_cones());
    for (int c = 0; c < m.num_cones(); ++c) {
        for (int i = 0; i < nr; ++i)
            if (!m.ray_in_cone(c, i)) m.off_[c].push_back(i);
        // invert (a_{off[l], j})_{l,j} exactly; must be integral
        std::vector<std::vector<int>> beta(m.r, std::vector<int>(m.r, 0));
        for (int col = 0; col < m.r; ++col) {
            std::vector<std::vector<Rat>> A(m.r, std::vector<Rat>(m.r));
            std::vector<Rat> b(m.r);
            for (int l = 0; l < m.r; ++l) {
                for (int j = 0; j < m.r; ++j) A[l][j] = Rat(m.weight[m.off_[c][l]][j]);
                b[l] = Rat(l == col ? 1 : 0);
            }
            // solve A^T y = e_col so that beta * A_sub = I
            std::vector<std::vector<Rat>> At(m.r, std::vector<Rat>(m.r));
            for (int l = 0; l < m.r; ++l)
                for (int j = 0; j < m.r; ++j) At[j][l] = A[l][j];
            auto sol = solve_exact(At, b);
            if (sol.empty())
                throw ModelError(ModelFault::SingularSubmatrix,
                                 "off-cone rays of cone " + std::to_string(c + 1) +
                                     " do not span the class lattice");
            for (int k = 0; k < m.r; ++k) {
                if (sol[k].den() != 1)
                    throw ModelError(ModelFault::SingularSubmatrix,
                                     "off-cone weight submatrix of cone " + std::to_string(c + 1) +
                                         " is not unimodular");
                beta[col][k] = int((long long)sol[k].num());
            }
        }
        m.beta_[c] = beta;

        Expo dexpo(nr, 0);
        for (int j = 0; j < m.r; ++j)
            for (int k = 0; k < m.r; ++k)
                dexpo[m.off_[c][k]] += (m.anticanonical[j] - m.degrees[j]) * beta[j][k];
        for (int i = 0; i < nr; ++i)
            if (dexpo[i] < 0)
                throw ModelError(ModelFault::NoSolution,
                                 "D(sigma) is not effective on cone " + std::to_string(c + 1));
        m.dsig_[c] = std::move(dexpo);
    }

    return m;
}

Expo ToricModel::divisor_E(int cone, int ray) const {
    const auto& off = off_[cone];
    const auto& beta = beta_[cone];
    Expo e(num_rays(), 0);
    for (int j = 0; j < r; ++j) {
        if (weight[ray][j] == 0) continue;
        for (int k = 0; k < r; ++k) e[off[k]] += weight[ray][j] * beta[j][k];
    }
    return e;
}

std::vector<std::vector<int>> ToricModel::minimal_uncovered_sets() const {
    const int nr = num_rays();
    if (nr > 24)
        throw BudgetExceeded("minimal_uncovered_sets: too many rays for exhaustive scan");
    std::vector<std::uint32_t> cone_masks;
    for (const auto& c : cones) {
        std::uint32_t msk = 0;
        for (int i : c) msk |= 1u << i;
        cone_masks.push_back(msk);
    }
    auto covered = [&](std::uint32_t s) {
        for (std::uint32_t cm : cone_masks)
            if ((s & cm) == s) return true;
        return false;
    };
    std::vector<std::uint32_t> found;
    std::vector<std::vector<int>> out;
    // scan by cardinality so minimality is a subset check against previous finds
    for (int card = 1; card <= nr; ++card) {
        for (std::uint32_t s = 1; s < (1u << nr); ++s) {
            if (__builtin_popcount(s) != card || covered(s)) continue;
            bool minimal = true;
            for (std::uint32_t f : found)
                if ((f & s) == f) { minimal = false; break; }
            if (!minimal) continue;
            found.push_back(s);
            std::vector<int> set;
            for (int i = 0; i < nr; ++i)
                if (s >> i & 1) set.push_back(i);
            out.push_back(std::move(set));
        }
    }
    return out;
}

}  // namespace toricount
