#pragma once

#include <array>
#include <cmath>

#include "grnea/core/tensor.hpp"
#include "grnea/core/threading.hpp"

namespace grnea::nn {

/// Switchable normalization parameters: learned softmax mixing weights over
/// {batch, instance, layer} statistics plus the per-channel affine pair.
template <typename T>
struct SNParams {
    std::array<T, 3> lambda_mu{T(0), T(0), T(0)};   // order: BN, IN, LN
    std::array<T, 3> lambda_var{T(0), T(0), T(0)};
    std::vector<T> gamma;  // per channel
    std::vector<T> beta;   // per channel
    T epsilon = T(1e-5);

    SNParams() = default;
    explicit SNParams(int channels, T eps = T(1e-5))
        : gamma(channels, T(1)), beta(channels, T(0)), epsilon(eps) {
        if (!(eps > T(0))) throw std::invalid_argument("switchable_norm: epsilon must be > 0");
    }
};

template <typename T>
std::array<T, 3> softmax3(const std::array<T, 3>& lam) {
    T m = std::max({lam[0], lam[1], lam[2]});
    std::array<T, 3> e{std::exp(lam[0] - m), std::exp(lam[1] - m), std::exp(lam[2] - m)};
    T s = e[0] + e[1] + e[2];
    return {e[0] / s, e[1] / s, e[2] / s};
}

/// Per-scope statistics of one forward pass, kept for the backward pass.
template <typename T>
struct SnStats {
    std::vector<T> mu_bn, var_bn;  // per channel
    std::vector<T> mu_in, var_in;  // per (item, channel)
    std::vector<T> mu_ln, var_ln;  // per item
    std::vector<T> mu_sn, inv_s;   // mixed, per (item, channel)
    std::array<T, 3> omega{}, omega_v{};
};

namespace detail {

/// Two-pass statistics plus the normalized output. Batch-direction
/// reductions run in fixed item order so results are thread-count invariant.
template <typename T>
Tensor4<T> sn_forward(const Tensor4<T>& x, const SNParams<T>& p, SnStats<T>& st) {
    if (x.c() != static_cast<int>(p.gamma.size()))
        throw std::invalid_argument("switchable_norm: channel mismatch");
    if (!(p.epsilon > T(0))) throw std::invalid_argument("switchable_norm: epsilon must be > 0");
    const int N = x.n(), C = x.c();
    const std::size_t m = static_cast<std::size_t>(x.h()) * x.w();

    std::vector<T> sum_nc(static_cast<std::size_t>(N) * C);
    parallel_for(sum_nc.size(), [&](std::size_t i) {
        const T* v = x.data() + i * m;
        T s = T(0);
        for (std::size_t k = 0; k < m; ++k) s += v[k];
        sum_nc[i] = s;
    });
    st.mu_in.assign(sum_nc.size(), T(0));
    st.mu_bn.assign(C, T(0));
    st.mu_ln.assign(N, T(0));
    for (int n = 0; n < N; ++n)
        for (int c = 0; c < C; ++c) {
            const T s = sum_nc[static_cast<std::size_t>(n) * C + c];
            st.mu_in[static_cast<std::size_t>(n) * C + c] = s / static_cast<T>(m);
            st.mu_bn[c] += s;
            st.mu_ln[n] += s;
        }
    for (int c = 0; c < C; ++c) st.mu_bn[c] /= static_cast<T>(N * m);
    for (int n = 0; n < N; ++n) st.mu_ln[n] /= static_cast<T>(C * m);

    std::vector<T> sq_b(sum_nc.size()), sq_i(sum_nc.size()), sq_l(sum_nc.size());
    parallel_for(sum_nc.size(), [&](std::size_t i) {
        const int n = static_cast<int>(i) / C, c = static_cast<int>(i) % C;
        const T* v = x.data() + i * m;
        const T mb = st.mu_bn[c], mi = st.mu_in[i], ml = st.mu_ln[n];
        T ab = T(0), ai = T(0), al = T(0);
        for (std::size_t k = 0; k < m; ++k) {
            ab += (v[k] - mb) * (v[k] - mb);
            ai += (v[k] - mi) * (v[k] - mi);
            al += (v[k] - ml) * (v[k] - ml);
        }
        sq_b[i] = ab;
        sq_i[i] = ai;
        sq_l[i] = al;
    });
    st.var_in.assign(sum_nc.size(), T(0));
    st.var_bn.assign(C, T(0));
    st.var_ln.assign(N, T(0));
    for (int n = 0; n < N; ++n)
        for (int c = 0; c < C; ++c) {
            const std::size_t i = static_cast<std::size_t>(n) * C + c;
            st.var_in[i] = sq_i[i] / static_cast<T>(m);
            st.var_bn[c] += sq_b[i];
            st.var_ln[n] += sq_l[i];
        }
    for (int c = 0; c < C; ++c) st.var_bn[c] /= static_cast<T>(N * m);
    for (int n = 0; n < N; ++n) st.var_ln[n] /= static_cast<T>(C * m);

    st.omega = softmax3(p.lambda_mu);
    st.omega_v = softmax3(p.lambda_var);

    st.mu_sn.assign(sum_nc.size(), T(0));
    st.inv_s.assign(sum_nc.size(), T(0));
    Tensor4<T> out(N, C, x.h(), x.w());
    parallel_for(sum_nc.size(), [&](std::size_t i) {
        const int n = static_cast<int>(i) / C, c = static_cast<int>(i) % C;
        const T mu =
            st.omega[0] * st.mu_bn[c] + st.omega[1] * st.mu_in[i] + st.omega[2] * st.mu_ln[n];
        const T var = st.omega_v[0] * st.var_bn[c] + st.omega_v[1] * st.var_in[i] +
                      st.omega_v[2] * st.var_ln[n];
        const T is = T(1) / std::sqrt(var + p.epsilon);
        st.mu_sn[i] = mu;
        st.inv_s[i] = is;
        const T g = p.gamma[c], b = p.beta[c];
        const T* v = x.data() + i * m;
        T* o = out.data() + i * m;
        for (std::size_t k = 0; k < m; ++k) o[k] = g * (v[k] - mu) * is + b;
    });
    return out;
}

}  // namespace detail

/// Normalization layer mixing BN/IN/LN means and variances through
/// softmax(lambda) weights, then applying the per-channel affine transform.
/// Statistics always come from the current batch.
template <typename T>
class SwitchableNorm {
public:
    SwitchableNorm() = default;
    explicit SwitchableNorm(int channels, T eps = T(1e-5)) : p_(channels, eps) {}
    explicit SwitchableNorm(SNParams<T> p) : p_(std::move(p)) {
        if (!(p_.epsilon > T(0)))
            throw std::invalid_argument("switchable_norm: epsilon must be > 0");
    }

    SNParams<T>& params() { return p_; }
    const SNParams<T>& params() const { return p_; }

    Tensor4<T> forward(const Tensor4<T>& x, bool cache = true) {
        Tensor4<T> out = detail::sn_forward(x, p_, st_);
        if (cache) x_ = x;
        return out;
    }

    /// Pure forward pass; safe for concurrent callers on a trained layer.
    Tensor4<T> infer(const Tensor4<T>& x) const {
        SnStats<T> st;
        return detail::sn_forward(x, p_, st);
    }

    Tensor4<T> backward(const Tensor4<T>& dout) {
        const int N = x_.n(), C = x_.c();
        const std::size_t m = static_cast<std::size_t>(x_.h()) * x_.w();
        ensure_grad_buffers();

        // per-(n,c) reductions of dL/dy
        std::vector<T> s_a(static_cast<std::size_t>(N) * C), s_ax(s_a.size());
        std::vector<T> s_g(s_a.size()), s_b(s_a.size());
        parallel_for(s_a.size(), [&](std::size_t i) {
            const int c = static_cast<int>(i) % C;
            const T g = p_.gamma[c], is = st_.inv_s[i], mu = st_.mu_sn[i];
            const T* dy = dout.data() + i * m;
            const T* v = x_.data() + i * m;
            T sa = T(0), sax = T(0), sg = T(0), sb = T(0);
            for (std::size_t k = 0; k < m; ++k) {
                const T a = dy[k] * g;
                const T xc = v[k] - mu;
                sa += a;
                sax += a * xc;
                sg += dy[k] * xc * is;
                sb += dy[k];
            }
            s_a[i] = sa;
            s_ax[i] = sax;
            s_g[i] = sg;
            s_b[i] = sb;
        });
        std::vector<T> dmu(s_a.size()), dvar(s_a.size());
        for (std::size_t i = 0; i < dmu.size(); ++i) {
            dmu[i] = -s_a[i] * st_.inv_s[i];
            dvar[i] = -T(0.5) * s_ax[i] * st_.inv_s[i] * st_.inv_s[i] * st_.inv_s[i];
        }
        for (int n = 0; n < N; ++n)
            for (int c = 0; c < C; ++c) {
                const std::size_t i = static_cast<std::size_t>(n) * C + c;
                gamma_grad[c] += s_g[i];
                beta_grad[c] += s_b[i];
            }

        // route mixed-statistic gradients back to scope statistics and weights
        std::vector<T> dmu_b(C, T(0)), dmu_l(N, T(0)), dv_b(C, T(0)), dv_l(N, T(0));
        std::array<T, 3> domega{T(0), T(0), T(0)}, domega_v{T(0), T(0), T(0)};
        for (int n = 0; n < N; ++n)
            for (int c = 0; c < C; ++c) {
                const std::size_t i = static_cast<std::size_t>(n) * C + c;
                dmu_b[c] += st_.omega[0] * dmu[i];
                dmu_l[n] += st_.omega[2] * dmu[i];
                dv_b[c] += st_.omega_v[0] * dvar[i];
                dv_l[n] += st_.omega_v[2] * dvar[i];
                domega[0] += dmu[i] * st_.mu_bn[c];
                domega[1] += dmu[i] * st_.mu_in[i];
                domega[2] += dmu[i] * st_.mu_ln[n];
                domega_v[0] += dvar[i] * st_.var_bn[c];
                domega_v[1] += dvar[i] * st_.var_in[i];
                domega_v[2] += dvar[i] * st_.var_ln[n];
            }
        auto softmax_back = [](const std::array<T, 3>& w, const std::array<T, 3>& dw) {
            T dot = w[0] * dw[0] + w[1] * dw[1] + w[2] * dw[2];
            return std::array<T, 3>{w[0] * (dw[0] - dot), w[1] * (dw[1] - dot),
                                    w[2] * (dw[2] - dot)};
        };
        const auto dlam = softmax_back(st_.omega, domega);
        const auto dlam_v = softmax_back(st_.omega_v, domega_v);
        for (int k = 0; k < 3; ++k) {
            lambda_mu_grad[k] += dlam[k];
            lambda_var_grad[k] += dlam_v[k];
        }

        Tensor4<T> dx(N, C, x_.h(), x_.w());
        const T inv_nb = T(1) / static_cast<T>(N * m);
        const T inv_ni = T(1) / static_cast<T>(m);
        const T inv_nl = T(1) / static_cast<T>(C * m);
        parallel_for(s_a.size(), [&](std::size_t i) {
            const int n = static_cast<int>(i) / C, c = static_cast<int>(i) % C;
            const T g = p_.gamma[c], is = st_.inv_s[i];
            // dmu_b / dmu_l already carry their softmax weights
            const T mean_term =
                dmu_b[c] * inv_nb + st_.omega[1] * dmu[i] * inv_ni + dmu_l[n] * inv_nl;
            const T cb = T(2) * dv_b[c] * inv_nb;
            const T ci = T(2) * st_.omega_v[1] * dvar[i] * inv_ni;
            const T cl = T(2) * dv_l[n] * inv_nl;
            const T mb = st_.mu_bn[c], mi = st_.mu_in[i], ml = st_.mu_ln[n];
            const T* dy = dout.data() + i * m;
            const T* v = x_.data() + i * m;
            T* d = dx.data() + i * m;
            for (std::size_t k = 0; k < m; ++k) {
                d[k] = dy[k] * g * is + mean_term + cb * (v[k] - mb) + ci * (v[k] - mi) +
                       cl * (v[k] - ml);
            }
        });
        return dx;
    }

    void collect_params(const std::string& prefix, std::vector<ParamRef<T>>& out) {
        ensure_grad_buffers();
        out.push_back({prefix + ".gamma", p_.gamma.data(), gamma_grad.data(), p_.gamma.size()});
        out.push_back({prefix + ".beta", p_.beta.data(), beta_grad.data(), p_.beta.size()});
        out.push_back({prefix + ".lambda_mu", p_.lambda_mu.data(), lambda_mu_grad.data(), 3});
        out.push_back({prefix + ".lambda_var", p_.lambda_var.data(), lambda_var_grad.data(), 3});
    }

    std::vector<T> gamma_grad, beta_grad;
    std::array<T, 3> lambda_mu_grad{}, lambda_var_grad{};

    const SnStats<T>& stats() const { return st_; }

private:
    void ensure_grad_buffers() {
        if (gamma_grad.size() != p_.gamma.size()) {
            gamma_grad.assign(p_.gamma.size(), T(0));
            beta_grad.assign(p_.beta.size(), T(0));
            lambda_mu_grad.fill(T(0));
            lambda_var_grad.fill(T(0));
        }
    }

    SNParams<T> p_;
    Tensor4<T> x_;
    SnStats<T> st_;
};

/// Op-level entry point.
template <typename T>
Tensor4<T> switchable_norm(const Tensor4<T>& input, const SNParams<T>& params) {
    SnStats<T> st;
    return detail::sn_forward(input, params, st);
}

}  // namespace grnea::nn
