"""Smoke test for the Python bindings: theory, simulation, estimation and scenarios."""

import math

import ramsey_noise_py as rn


def close(a, b, tol):
    return abs(a - b) <= tol


def main():
    p = rn.Protocol()
    assert close(p.phi_r, math.pi / 4, 1e-15)

    # no noise: r1 is the bare Ramsey probability
    bare = rn.Theory({"kind": "none"}, p, 5)
    assert close(bare.r1(), 0.5 * (1 + math.cos(math.pi / 4)), 1e-15)

    # Gaussian working point
    ec = {"kind": "gaussian", "spectrum": {"kind": "exp_correlated", "d_corr": 6.51, "tau_corr": 20.0}}
    th = rn.Theory(ec, p, 10)
    f = th.phase_correlators()
    assert close(f[0], 0.16, 1e-3), f[0]
    assert close(th.r1(), 0.826, 1e-3), th.r1()
    assert th.r2(1) > 0 and th.r3(1, 4) < 0

    # TLS ladder theory
    ladder = rn.tls_ladder(0.2, 10)
    tls_th = rn.Theory.from_tls(ladder, p, 60)
    assert len(tls_th.r2_series(60)) == 60

    # simulation and estimation agree with theory
    runs = rn.simulate({"noise": ec, "run": {"cycles": 20000, "repetitions": 8, "seed": 1}})
    assert len(runs) == 8 and all(len(r) == 20000 for r in runs)
    again = rn.simulate({"noise": ec, "run": {"cycles": 20000, "repetitions": 8, "seed": 1}})
    assert runs == again
    est = rn.estimate_correlators(runs, 10, [(1, 4)])
    r1, se = est["r1"]
    assert abs(r1 - th.r1()) < 4 * se, (r1, th.r1(), se)
    v2, s2 = est["r2"][1]
    assert abs(v2 - th.r2(1)) < 4 * s2

    # distributions
    rho = rn.rho_static_tls(100, [rn.Tls.symmetric(0.2, 1e-9)] * 4, p)
    assert close(sum(rho), 1.0, 1e-10)
    assert close(sum(rn.rho_binomial(50, 0.8)), 1.0, 1e-12)
    hist = rn.block_distribution(runs, 100)
    assert close(sum(hist), 1.0, 1e-12)

    # spectrum: Parseval per series
    spec = rn.outcome_power_spectrum([runs[0][:4096]])
    ones = sum(runs[0][:4096])
    assert close(sum(spec), 4096 * ones, 1e-6 * 4096 * ones)

    # scenarios
    art = rn.run_scenario({"scenario": "analytic"})
    assert art["tables"]["analytic"]["rows"][0][0] == "r1"
    d1 = rn.reproduce("tableD1", cycles=20000, repetitions=2, seed=1)
    assert len(d1["tables"]["tableD1"]["rows"]) == 6
    assert "fig7-spectrum" in rn.TARGETS

    try:
        rn.Tls(0.2, -0.1, 0.1)
    except ValueError:
        pass
    else:
        raise AssertionError("negative rate accepted")
    try:
        rn.run_scenario({"scenario": "analytic", "bogus": 1})
    except ValueError:
        pass
    else:
        raise AssertionError("unknown key accepted")

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
