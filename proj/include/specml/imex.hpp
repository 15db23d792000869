#pragma once

namespace specml {

/// One step of the IMEX scheme: classical RK4 weights for the explicit
/// tendency, Crank-Nicolson (trapezoidal) treatment of the diagonal linear
/// symbol inside every sub-stage solve, then one filter application.
///
/// Ops supplies the state algebra:
///   State tendency(const State& u)
///   State cn_solve(const State& u, const State& t, double a)
///       -> [(1 + (a/2) lambda) u + a t] / (1 - (a/2) lambda)  per mode
///   State combine(n1, n2, n3, n4) -> (n1 + 2 n2 + 2 n3 + n4) / 6
///   State filter(const State& s)
///
/// With lambda = 0 this is classical RK4 (order 4); with a vanishing
/// tendency it is exactly Crank-Nicolson (order 2).
template <typename Ops>
typename Ops::State imex_cn_rk4_step(Ops& ops, const typename Ops::State& u,
                                     double h) {
    auto n1 = ops.tendency(u);
    auto u2 = ops.cn_solve(u, n1, h / 2);
    auto n2 = ops.tendency(u2);
    auto u3 = ops.cn_solve(u, n2, h / 2);
    auto n3 = ops.tendency(u3);
    auto u4 = ops.cn_solve(u, n3, h);
    auto n4 = ops.tendency(u4);
    auto s = ops.combine(n1, n2, n3, n4);
    return ops.filter(ops.cn_solve(u, s, h));
}

/// Fully explicit first-order step: u + h*(lambda u + N(u)), filtered.
/// Ops additionally supplies euler_solve(u, t, h) for that update.
template <typename Ops>
typename Ops::State forward_euler_step(Ops& ops, const typename Ops::State& u,
                                       double h) {
    auto n = ops.tendency(u);
    return ops.filter(ops.euler_solve(u, n, h));
}

}  // namespace specml
