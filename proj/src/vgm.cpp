#include "vsflow/vgm.hpp"

namespace vsflow {

namespace {
void validate(const VgmMaterial& m) {
    if (m.K[0] <= 0.0 || m.K[1] <= 0.0 || m.K[2] <= 0.0)
        throw std::invalid_argument("material '" + m.name + "': conductivity must be positive");
    if (m.alpha <= 0.0)
        throw std::invalid_argument("material '" + m.name + "': alpha must be positive");
    if (m.n <= 1.0)
        throw std::invalid_argument("material '" + m.name + "': n must exceed 1");
    if (!(0.0 <= m.theta_r && m.theta_r < m.theta_s && m.theta_s <= 1.0))
        throw std::invalid_argument("material '" + m.name +
                                    "': need 0 <= theta_r < theta_s <= 1");
}
}  // namespace

VgmMaterial make_vgm(std::string name, double K, double alpha, double n, double theta_r,
                     double theta_s) {
    return make_vgm_diag(std::move(name), {K, K, K}, alpha, n, theta_r, theta_s);
}

VgmMaterial make_vgm_diag(std::string name, std::array<double, 3> K, double alpha, double n,
                          double theta_r, double theta_s) {
    VgmMaterial m;
    m.name = std::move(name);
    m.K = K;
    m.alpha = alpha;
    m.n = n;
    m.m = 1.0 - 1.0 / n;
    m.theta_r = theta_r;
    m.theta_s = theta_s;
    validate(m);
    return m;
}

}  // namespace vsflow
